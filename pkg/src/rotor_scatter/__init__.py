"""Born-approximation scattering of a planar rigid rotor on multi-peak potentials."""

__version__ = "0.1.0"
