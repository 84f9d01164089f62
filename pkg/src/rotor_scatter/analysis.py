"""Interference-pattern diagnostics.

Fringe contrast is read off local extrema inside a window rather than the
global range, so a broad envelope on top of the fringes does not inflate
the figure. Plateaus (exactly repeated samples) count as one extremum at
their midpoint, which keeps the answer deterministic on symmetric grids.
"""

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .model import CrossSectionProfile

__all__ = [
    "AnalysisError",
    "ResolutionError",
    "UndefinedRatioError",
    "FringeReport",
    "visibility",
    "peak_spacing",
    "suppression_ratio",
    "fringe_window",
    "fringe_report",
]

# fewer samples cannot support extremum classification at fringe scale
MIN_WINDOW_SAMPLES = 32


class AnalysisError(ValueError):
    """Diagnostic could not be computed from the given profile."""


class ResolutionError(AnalysisError):
    """The sampled grid is too coarse to resolve the requested features."""


class UndefinedRatioError(AnalysisError):
    """Comparison baseline has zero fringe contrast."""


@dataclass(frozen=True)
class FringeReport:
    visibility: float
    peak_thetas: Tuple[float, ...]
    mean_spacing: float
    window: Tuple[float, float]

    def __post_init__(self):
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError("visibility must lie in [0, 1]")
        if any(b <= a for a, b in zip(self.peak_thetas, self.peak_thetas[1:])):
            raise ValueError("peak_thetas must be strictly ascending")
        if not self.mean_spacing > 0.0:
            raise ValueError("mean_spacing must be > 0")
        if not self.window[0] < self.window[1]:
            raise ValueError("window must satisfy lo < hi")


def _run_extrema(values: np.ndarray) -> Tuple[List[int], List[int]]:
    """Indices of interior local maxima and minima, plateaus collapsed."""
    n = values.size
    maxima: List[int] = []
    minima: List[int] = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        # a run touching either end has no two-sided neighborhood
        if i > 0 and j < n - 1:
            left = values[i - 1]
            right = values[j + 1]
            if left < values[i] and right < values[i]:
                maxima.append((i + j) // 2)
            elif left > values[i] and right > values[i]:
                minima.append((i + j) // 2)
        i = j + 1
    return maxima, minima


def _window_slice(profile: CrossSectionProfile, window) -> Tuple[np.ndarray, np.ndarray]:
    lo, hi = float(window[0]), float(window[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise AnalysisError(f"window ({lo}, {hi}) is empty")
    mask = (profile.thetas >= lo) & (profile.thetas <= hi)
    thetas = profile.thetas[mask]
    values = profile.sigma[mask]
    if values.size < MIN_WINDOW_SAMPLES:
        raise AnalysisError(
            f"window holds {values.size} samples, need >= {MIN_WINDOW_SAMPLES}")
    return thetas, values


def visibility(profile: CrossSectionProfile, window) -> float:
    """Fringe contrast (max - min)/(max + min) from interior local extrema.

    Returns 0.0 when the window contains no interior maximum or no interior
    minimum: an envelope without oscillation has no fringes to grade.
    """
    _, values = _window_slice(profile, window)
    if not values.any():
        raise AnalysisError("profile is identically zero inside the window")
    maxima, minima = _run_extrema(values)
    if not maxima or not minima:
        return 0.0
    s_max = max(float(values[i]) for i in maxima)
    s_min = min(float(values[i]) for i in minima)
    return (s_max - s_min) / (s_max + s_min)


def peak_spacing(profile: CrossSectionProfile, near_theta: float, count: int) -> float:
    """Mean angular gap between the count+1 local maxima nearest near_theta."""
    if count < 1:
        raise AnalysisError("count must be >= 1")
    maxima, _ = _run_extrema(profile.sigma)
    if len(maxima) < count + 1:
        span = float(profile.thetas[-1] - profile.thetas[0])
        # alternating extrema need >= 4 samples per fringe to classify
        density = 4.0 * (count + 1) / span
        raise ResolutionError(
            f"resolved {len(maxima)} local maxima, need {count + 1}; "
            f"sample at least {density:.6g} points per unit angle "
            f"({math.ceil(density * span)} across the grid)")
    order = sorted(maxima, key=lambda i: (abs(profile.thetas[i] - near_theta), i))
    chosen = np.sort(profile.thetas[np.array(order[:count + 1])])
    return float(np.mean(np.diff(chosen)))


def fringe_window(reference: CrossSectionProfile) -> Tuple[float, float]:
    """Angular span over which the reference profile actually oscillates.

    The span runs from its first interior extremum to its last. Grading a
    structured target against a point-particle reference over this window
    keeps the comparison about fringes: features the target develops beyond
    the reference's interference region (form-factor dips, wide-angle
    pedestal bumps) would otherwise masquerade as contrast.
    """
    maxima, minima = _run_extrema(reference.sigma)
    spots = sorted(maxima + minima)
    if len(spots) < 2 or spots[0] == spots[-1]:
        raise AnalysisError("reference profile shows no oscillation span")
    lo = float(reference.thetas[spots[0]])
    hi = float(reference.thetas[spots[-1]])
    if not lo < hi:
        raise AnalysisError("reference profile shows no oscillation span")
    return lo, hi


def suppression_ratio(with_internal: CrossSectionProfile,
                      without: CrossSectionProfile, window) -> float:
    """Visibility of the structured target over its point-particle twin."""
    if not np.array_equal(with_internal.thetas, without.thetas):
        raise AnalysisError("profiles are sampled on different theta grids")
    baseline = visibility(without, window)
    if baseline == 0.0:
        raise UndefinedRatioError(
            "reference profile has zero visibility, ratio is undefined")
    return visibility(with_internal, window) / baseline


def fringe_report(profile: CrossSectionProfile, window) -> FringeReport:
    """Bundle contrast, peak positions, and mean spacing for one window."""
    thetas, values = _window_slice(profile, window)
    vis = visibility(profile, window)
    maxima, _ = _run_extrema(values)
    if len(maxima) < 2:
        raise ResolutionError(
            f"found {len(maxima)} interior maxima in the window, "
            "need >= 2 to report a spacing")
    peaks = tuple(float(thetas[i]) for i in maxima)
    spacing = float(np.mean(np.diff(np.array(peaks))))
    return FringeReport(visibility=vis, peak_thetas=peaks,
                        mean_spacing=spacing,
                        window=(float(window[0]), float(window[1])))
