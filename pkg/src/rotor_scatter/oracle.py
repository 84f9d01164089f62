"""Slow independent checks for the fast analytic paths.

Everything here recomputes results from their defining integrals with
adaptive refinement, on purpose sharing no code with the production
formulas: only the domain types from model are imported. Momentum
transfer, peak transforms, and angular phases are all rederived locally,
so a transcription slip in the fast path cannot cancel against the same
slip here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .model import GAUSSIAN, POLYNOMIAL_GAUSSIAN, Molecule, PeakShape, PotentialSpec

# hard ceiling on quadrature nodes before giving up
NODE_CAP = 2 ** 20


class OracleConvergenceError(Exception):
    """Raised when doubling the node count hits the cap without settling."""


@dataclass(frozen=True)
class QuadratureSpec:
    node_count: int = 64
    radial_cutoff: float = 12.0
    abs_tol: float = 1e-12

    def __post_init__(self):
        n = self.node_count
        if not isinstance(n, int) or n < 64 or (n & (n - 1)) != 0:
            raise ValueError("node_count must be a power of two >= 64")
        if not (self.radial_cutoff > 0 and math.isfinite(self.radial_cutoff)):
            raise ValueError("radial_cutoff must be finite and > 0")
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise ValueError("abs_tol must be finite and > 0")


def _ft_shape_local(shape: PeakShape, q_mag: float) -> float:
    # local re-derivation of the single-peak transform, kept deliberately
    # separate from the production module
    t = q_mag * shape.width
    g = 0.5 * shape.strength * shape.width ** 2 * math.exp(-(t * t) / 4.0)
    if shape.variant == GAUSSIAN:
        return g
    if shape.variant == POLYNOMIAL_GAUSSIAN:
        return (t * t / 4.0) * g
    raise ValueError(f"unknown peak variant {shape.variant!r}")


def _ft_total_local(spec: PotentialSpec, q_x: float, q_y: float) -> complex:
    q = math.sqrt(q_x * q_x + q_y * q_y)
    total = 0j
    for peak in spec.peaks:
        total += _ft_shape_local(peak.shape, q) * complex(
            math.cos(q_x * peak.center_x), -math.sin(q_x * peak.center_x))
    return total


def _angular_integral(n: int, c_x: float, c_y: float, nodes: int) -> complex:
    """integral over phi of exp(i n phi) * 2 cos(c_x cos phi + c_y sin phi)."""
    phi = np.arange(nodes) * (2.0 * math.pi / nodes)
    f = np.exp(1j * n * phi) * (2.0 * np.cos(c_x * np.cos(phi) + c_y * np.sin(phi)))
    return complex(f.sum()) * (2.0 * math.pi / nodes)


def matrix_element_quadrature(spec: PotentialSpec, molecule: Molecule,
                              k: float, theta: float, l_in: int, l_out: int,
                              kappa: float,
                              quad: QuadratureSpec = QuadratureSpec()) -> complex:
    """Transition amplitude by direct angular quadrature.

    The rotor average over orientations is done numerically on a periodic
    trapezoid grid (spectrally accurate here), doubling the node count
    until two consecutive refinements agree within quad.abs_tol.
    """
    if k <= 0 or kappa < 0:
        raise ValueError("need k > 0 and kappa >= 0")
    q_x = -kappa * math.sin(theta)
    q_y = k - kappa * math.cos(theta)
    vtot = _ft_total_local(spec, q_x, q_y)
    n = l_in - l_out
    c_x = molecule.half_separation * q_x
    c_y = molecule.half_separation * q_y
    nodes = quad.node_count
    prev = _angular_integral(n, c_x, c_y, nodes)
    while True:
        nodes *= 2
        if nodes > NODE_CAP:
            raise OracleConvergenceError(
                f"angular quadrature did not settle below {NODE_CAP} nodes")
        cur = _angular_integral(n, c_x, c_y, nodes)
        if abs(cur - prev) < quad.abs_tol:
            return vtot * cur / (4.0 * math.pi ** 2)
        prev = cur


def _cos_moments(q: float, width: float, cutoff: float, nodes: int, dps: int):
    """(I0, I2) with I_p = integral of cos(q u) (u/width)^p exp(-u^2/width^2)
    over |u| <= cutoff*width, by endpoint-weighted trapezoid at dps digits."""
    with mp.workdps(dps):
        w = mp.mpf(width)
        length = mp.mpf(cutoff) * w
        h = 2 * length / nodes
        s0 = mp.mpf(0)
        s2 = mp.mpf(0)
        qm = mp.mpf(q)
        for j in range(nodes + 1):
            u = -length + j * h
            r = u / w
            val = mp.cos(qm * u) * mp.e ** (-(r * r))
            wt = mp.mpf(1) if 0 < j < nodes else mp.mpf(0.5)
            s0 += wt * val
            s2 += wt * val * r * r
        return s0 * h, s2 * h


def ft_numeric(shape: PeakShape, q_x: float, q_y: float,
               quad: QuadratureSpec = QuadratureSpec()) -> complex:
    """Single-peak transform from its defining 2D integral.

    The integrand separates into 1D cosine moments along each axis; those
    are evaluated with mpmath because the transform decays like
    exp(-(q*width)^2/4) while the integrand stays order one, a
    cancellation plain doubles cannot survive at large q*width. Working
    precision grows with (q*width)^2 to keep relative accuracy.
    """
    q = math.sqrt(q_x * q_x + q_y * q_y)
    dps = 30 + int(0.11 * (q * shape.width) ** 2)
    # per-axis cap: equivalent work of NODE_CAP points on the 2D grid
    axis_cap = int(math.sqrt(NODE_CAP))
    nodes = quad.node_count
    prev = None
    while nodes <= axis_cap:
        with mp.workdps(dps):
            i0x, i2x = _cos_moments(q_x, shape.width, quad.radial_cutoff, nodes, dps)
            i0y, i2y = _cos_moments(q_y, shape.width, quad.radial_cutoff, nodes, dps)
            v0 = mp.mpf(shape.strength)
            if shape.variant == GAUSSIAN:
                val = v0 / (2 * mp.pi) * i0x * i0y
            elif shape.variant == POLYNOMIAL_GAUSSIAN:
                # 1 - x^2/D^2 - y^2/D^2 splits into the two cross terms
                val = v0 / (2 * mp.pi) * ((i0x - i2x) * i0y - i0x * i2y)
            else:
                raise ValueError(f"unknown peak variant {shape.variant!r}")
            out = float(val)
        if prev is not None and abs(out - prev) < quad.abs_tol:
            return complex(out, 0.0)
        prev = out
        nodes *= 2
    raise OracleConvergenceError(
        f"axis quadrature did not settle below {axis_cap} nodes per axis")
