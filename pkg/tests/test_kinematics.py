"""Channel kinematics: outgoing wavenumbers, open channels, momentum transfer."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotor_scatter.kinematics import (
    Channel,
    geometry,
    geometry_grid,
    open_channels,
    outgoing_wavenumber,
)
from rotor_scatter.model import IncidentBeam, Molecule


MOL = Molecule(atom_mass=1.0, half_separation=1.0)


class TestOutgoingWavenumber:
    def test_elastic_is_exact(self):
        # same |l| in and out: no rotational energy exchanged, returned value
        # must be the input wavenumber bit for bit, not a recomputed root
        k = 5.0
        assert outgoing_wavenumber(k, 3, -3, MOL) == k
        assert outgoing_wavenumber(k, 3, 3, MOL) == k
        k2 = 0.1 + 0.2  # not exactly representable as 0.3
        assert outgoing_wavenumber(k2, 0, 0, MOL) == k2

    def test_inelastic_gain(self):
        # dropping from |l|=1 to 0 releases rotational energy into the motion
        assert outgoing_wavenumber(2.0, 1, 0, MOL) == pytest.approx(math.sqrt(5.0), rel=1e-15)

    def test_inelastic_loss(self):
        assert outgoing_wavenumber(2.0, 0, 1, MOL) == pytest.approx(math.sqrt(3.0), rel=1e-15)

    def test_closed_channel_is_none(self):
        assert outgoing_wavenumber(1.0, 0, 2, MOL) is None

    def test_marginal_channel_is_closed(self):
        # radicand exactly zero: treated as closed, not as a zero-speed wave
        assert outgoing_wavenumber(2.0, 0, 2, MOL) is None

    def test_point_particle_requires_no_rotation(self):
        point = Molecule(atom_mass=1.0, half_separation=0.0)
        assert outgoing_wavenumber(1.5, 0, 0, point) == 1.5
        with pytest.raises(ValueError):
            outgoing_wavenumber(1.5, 0, 2, point)

    def test_rejects_bad_wavenumber(self):
        with pytest.raises(ValueError):
            outgoing_wavenumber(0.0, 0, 0, MOL)

    @given(k=st.floats(0.1, 50.0), alpha=st.floats(0.1, 10.0),
           l_in=st.integers(-6, 6), l_out=st.integers(-6, 6))
    @settings(deadline=None)
    def test_energy_conservation(self, k, alpha, l_in, l_out):
        mol = Molecule(atom_mass=1.3, half_separation=alpha)
        kappa = outgoing_wavenumber(k, l_in, l_out, mol)
        if kappa is None:
            return
        inertia = mol.moment_of_inertia
        e_in = k * k / (4 * mol.atom_mass) + l_in * l_in / (2 * inertia)
        e_out = kappa * kappa / (4 * mol.atom_mass) + l_out * l_out / (2 * inertia)
        assert e_out == pytest.approx(e_in, rel=1e-12)

    @given(k=st.floats(0.5, 20.0), alpha=st.floats(0.2, 5.0))
    @settings(deadline=None)
    def test_monotone_in_transferred_energy(self, k, alpha):
        mol = Molecule(atom_mass=1.0, half_separation=alpha)
        kappas = []
        for l_out in range(0, 8):
            kp = outgoing_wavenumber(k, 0, l_out, mol)
            if kp is None:
                break
            kappas.append(kp)
        assert all(a > b for a, b in zip(kappas, kappas[1:]))


class TestOpenChannels:
    def test_single_elastic_channel(self):
        beam = IncidentBeam(wavenumber=1.0, amplitudes={0: 1.0})
        chans = open_channels(beam, MOL, parity_only=True)
        assert [(c.l_in, c.l_out) for c in chans] == [(0, 0)]
        assert chans[0].kappa == 1.0 and chans[0].weight == 1.0

    def test_three_channels_at_k_2_5(self):
        beam = IncidentBeam(wavenumber=2.5, amplitudes={0: 1.0})
        chans = open_channels(beam, MOL, parity_only=True)
        assert [(c.l_in, c.l_out) for c in chans] == [(0, -2), (0, 0), (0, 2)]

    def test_parity_filter(self):
        beam = IncidentBeam(wavenumber=2.5, amplitudes={0: 1.0})
        full = open_channels(beam, MOL, parity_only=False)
        assert [(c.l_in, c.l_out) for c in full] == [
            (0, -2), (0, -1), (0, 0), (0, 1), (0, 2)]

    def test_exact_threshold_channel_absent(self):
        # k*alpha = 2 puts |l_out| = 2 exactly at threshold; it must not appear
        beam = IncidentBeam(wavenumber=2.0, amplitudes={0: 1.0})
        chans = open_channels(beam, MOL, parity_only=True)
        assert [(c.l_in, c.l_out) for c in chans] == [(0, 0)]

    def test_weights_follow_amplitudes(self):
        beam = IncidentBeam(wavenumber=1.0, amplitudes={0: 0.6, 2: 0.8j})
        chans = open_channels(beam, MOL, parity_only=True)
        w = {(c.l_in, c.l_out): c.weight for c in chans}
        # k*alpha = 1: from l=0 only elastic; from l=2 both l'=2 and the
        # energy-releasing l'=0 and l'=-2 are open
        assert w[(0, 0)] == pytest.approx(0.36)
        assert w[(2, 2)] == pytest.approx(0.64)
        assert (2, 0) in w and (2, -2) in w

    def test_point_particle_keeps_elastic_only(self):
        point = Molecule(atom_mass=1.0, half_separation=0.0)
        beam = IncidentBeam(wavenumber=3.0, amplitudes={0: 1.0})
        chans = open_channels(beam, point, parity_only=True)
        assert [(c.l_in, c.l_out) for c in chans] == [(0, 0)]

    def test_sorted_by_channel_labels(self):
        beam = IncidentBeam(wavenumber=4.5, amplitudes={0: 0.6, 2: 0.8})
        chans = open_channels(beam, MOL, parity_only=True)
        keys = [(c.l_in, c.l_out) for c in chans]
        assert keys == sorted(keys)
        assert len(keys) == len(set(keys))

    @given(k=st.floats(0.3, 30.0), alpha=st.floats(0.1, 4.0))
    @settings(deadline=None, max_examples=60)
    def test_channel_count_matches_threshold_rule(self, k, alpha):
        # open l' for a ground-state beam satisfy |l'| < k*alpha strictly
        prod = k * alpha
        if abs(prod - round(prod)) < 1e-9:
            return  # stay away from exact thresholds, covered separately
        beam = IncidentBeam(wavenumber=k, amplitudes={0: 1.0})
        mol = Molecule(atom_mass=1.0, half_separation=alpha)
        chans = open_channels(beam, mol, parity_only=False)
        assert len(chans) == 2 * math.floor(prod) + 1


class TestGeometry:
    def test_side_scattering(self):
        g = geometry(1.0, 1.0, math.pi / 2)
        assert g.q_x == -1.0
        assert g.q_y == pytest.approx(1.0, abs=1e-15)
        assert g.q_mag == pytest.approx(math.sqrt(2.0), rel=1e-15)
        assert g.mu == pytest.approx(3 * math.pi / 4, rel=1e-15)

    def test_back_scattering(self):
        g = geometry(1.0, 1.0, math.pi)
        assert g.q_mag == pytest.approx(2.0, rel=1e-15)
        assert g.mu == pytest.approx(math.pi, rel=1e-12)

    def test_forward_elastic_is_degenerate(self):
        g = geometry(2.0, 2.0, 0.0)
        assert g.q_mag == 0.0
        assert g.mu == 0.0

    def test_forward_inelastic(self):
        # straight ahead with kappa < k: momentum transfer points along -y
        g = geometry(2.0, 1.0, 0.0)
        assert g.q_x == 0.0 and g.q_y == 1.0
        assert g.mu == pytest.approx(math.pi)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            geometry(0.0, 1.0, 0.1)
        with pytest.raises(ValueError):
            geometry(1.0, -0.5, 0.1)

    @given(k=st.floats(0.1, 20.0), kappa=st.floats(0.0, 20.0),
           theta=st.floats(-math.pi, math.pi))
    @settings(deadline=None)
    def test_law_of_cosines(self, k, kappa, theta):
        g = geometry(k, kappa, theta)
        expect = k * k + kappa * kappa - 2 * k * kappa * math.cos(theta)
        assert g.q_mag ** 2 == pytest.approx(expect, rel=1e-12, abs=1e-12)

    def test_grid_matches_scalar_bit_for_bit(self):
        thetas = np.linspace(-1.5, 1.5, 201)
        qx, qy, qm = geometry_grid(2.0, 1.2, thetas)
        for i, t in enumerate(thetas):
            g = geometry(2.0, 1.2, float(t))
            assert qx[i] == g.q_x
            assert qy[i] == g.q_y
            assert qm[i] == g.q_mag


class TestChannel:
    def test_fields(self):
        c = Channel(l_in=0, l_out=2, kappa=1.5, weight=1.0)
        assert (c.l_in, c.l_out, c.kappa, c.weight) == (0, 2, 1.5, 1.0)
