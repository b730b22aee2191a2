"""Edgeworth-corrected distribution functions for standardized means.

The normal limit of a standardized sample mean ignores skewness and
kurtosis.  Keeping the next two expansion terms gives a distribution
function accurate to o(1/n), which is what makes small-sample intervals
honest.  Two pivots are supported:

* ``Pivot.Z`` — the mean standardized by a known variance,
* ``Pivot.T`` — the studentized mean (plug-in variance), whose expansion
  picks up an extra variance-estimation correction term that survives
  even when skewness and kurtosis vanish.

The expansions are signed measures rather than guaranteed CDFs: for
strong skew at small n the implied density can dip below zero.  The
quantile solver therefore works on a clamped, monotonized version of the
CDF and falls back to equal-tailed or plain normal quantiles when the
expansion stops behaving like a density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.special import ndtr

from .errors import InvalidAlpha, UnsupportedOrder

# Standardized-unit bracket: beyond |x| = 12 the normal tail mass is below
# 1e-32, which dominates any polynomial correction at supported (n, skew,
# kurtosis) ranges.
BRACKET = 12.0
VALIDITY_GRID_SIZE = 4001
# The monotone CDF interpolates linearly between grid nodes; this density
# keeps the interpolation error near 1e-8 in probability so quantiles are
# good to ~1e-7, well inside the 1e-6 oracle tolerances.
MONOTONE_GRID_SIZE = 32001
MASS_TOL = 1e-9   # level-search tolerance, in probability
X_TOL = 1e-10     # abscissa tolerance for root bisections
# Tail ripples of the signed density below this fraction of the peak are
# irrelevant to any practical interval and are ignored by the shape check.
_LEVEL_FLOOR_FRACTION = 1e-4

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_HERMITE_MAX = 8


class Pivot(Enum):
    """Which standardization the expansion describes."""

    Z = "z"  # known variance
    T = "t"  # plug-in (studentized) variance


class IntervalMethod(Enum):
    """How a quantile pair was obtained."""

    SHORTEST = "shortest"
    EQUAL_TAILED = "equal_tailed"
    NORMAL_FALLBACK = "normal_fallback"


def normal_pdf(x):
    """Standard normal density; accepts scalars or arrays."""
    x = np.asarray(x, dtype=np.float64)
    out = np.exp(-0.5 * x * x) / _SQRT_2PI
    return float(out) if out.ndim == 0 else out


def normal_cdf(x):
    """Standard normal CDF (erf-based, absolute error below 1e-12)."""
    out = ndtr(x)
    return float(out) if np.ndim(x) == 0 else out


@lru_cache(maxsize=1024)
def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF by bisection on :func:`normal_cdf`.

    Every interval in this package (normal or Edgeworth) inverts a CDF by
    bisection, so the plain normal quantile shares that code path instead
    of using a separate rational approximation.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must be in (0, 1), got {p}")
    lo, hi = -13.0, 13.0
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if ndtr(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hermite(k: int, x):
    """Probabilists' Hermite polynomial He_k.

    Convention fixed by the derivative identity
    d/dx[He_k(x) phi(x)] = -He_{k+1}(x) phi(x): He_0 = 1, He_1 = x,
    He_{k+1}(x) = x He_k(x) - k He_{k-1}(x).
    """
    if not 0 <= k <= _HERMITE_MAX:
        raise UnsupportedOrder(f"Hermite order must be in [0, {_HERMITE_MAX}], got {k}")
    x = np.asarray(x, dtype=np.float64)
    prev = np.ones_like(x)
    if k == 0:
        return float(prev) if prev.ndim == 0 else prev
    cur = x.copy()
    for j in range(1, k):
        prev, cur = cur, x * cur - j * prev
    return float(cur) if cur.ndim == 0 else cur


@dataclass(frozen=True)
class EdgeworthParams:
    """Inputs of the expansion: sample size, shape cumulants, pivot."""

    n: int
    skewness: float
    kurtosis_excess: float
    pivot: Pivot = Pivot.Z

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not (math.isfinite(self.skewness) and math.isfinite(self.kurtosis_excess)):
            raise ValueError("skewness and kurtosis_excess must be finite")


@dataclass(frozen=True)
class QuantilePair:
    """Standardized quantiles (lo, hi) enclosing the requested mass."""

    lo: float
    hi: float
    mass: float
    method: IntervalMethod

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"quantile pair must satisfy lo < hi, got ({self.lo}, {self.hi})")

    @property
    def length(self) -> float:
        return self.hi - self.lo


def _correction_coeffs(p: EdgeworthParams) -> np.ndarray:
    """Coefficients (ascending powers) of the polynomial P with
    CDF(x) = Phi(x) + P(x) phi(x)."""
    k3 = p.skewness
    k4 = p.kurtosis_excess
    rn = 1.0 / math.sqrt(p.n)
    c = np.zeros(6)
    if p.pivot is Pivot.Z:
        # -n^{-1/2} (k3/6) He2 - n^{-1} [(k4/24) He3 + (k3^2/72) He5]
        he2 = np.array([-1.0, 0.0, 1.0, 0.0, 0.0, 0.0])
        he3 = np.array([0.0, -3.0, 0.0, 1.0, 0.0, 0.0])
        he5 = np.array([0.0, 15.0, 0.0, -10.0, 0.0, 1.0])
        c -= rn * (k3 / 6.0) * he2
        c -= (rn * rn) * ((k4 / 24.0) * he3 + (k3 * k3 / 72.0) * he5)
    else:
        # +n^{-1/2} (k3/6)(2x^2+1)
        # +n^{-1} [ (k4/12)(x^3-3x) - (k3^2/18)(x^5+2x^3-3x) - (1/4)(x^3+3x) ]
        q1 = np.array([1.0, 0.0, 2.0, 0.0, 0.0, 0.0])
        qa = np.array([0.0, -3.0, 0.0, 1.0, 0.0, 0.0])
        qb = np.array([0.0, -3.0, 0.0, 2.0, 0.0, 1.0])
        qc = np.array([0.0, 3.0, 0.0, 1.0, 0.0, 0.0])
        c += rn * (k3 / 6.0) * q1
        c += (rn * rn) * ((k4 / 12.0) * qa - (k3 * k3 / 18.0) * qb - 0.25 * qc)
    return c


def _density_coeffs(p: EdgeworthParams) -> np.ndarray:
    """Coefficients of Q with pdf(x) = Q(x) phi(x): Q = 1 + P' - x P."""
    c = _correction_coeffs(p)
    q = np.zeros(7)
    q[0] = 1.0
    q[:5] += np.arange(1, 6) * c[1:]          # P'
    q[1:7] -= c                               # -x P
    return q


def _polyval(coeffs: np.ndarray, x):
    """Horner evaluation, ascending coefficients; scalar or array x."""
    out = np.zeros_like(np.asarray(x, dtype=np.float64))
    for a in coeffs[::-1]:
        out = out * x + a
    return out


def ee_cdf_raw(x, p: EdgeworthParams):
    """Raw (unclamped) expansion CDF value; may leave [0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    out = ndtr(x) + _polyval(_correction_coeffs(p), x) * normal_pdf(x)
    return float(out) if out.ndim == 0 else out


def ee_cdf(x, p: EdgeworthParams):
    """Expansion CDF clamped to [0, 1]."""
    out = np.clip(ee_cdf_raw(x, p), 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def ee_pdf(x, p: EdgeworthParams):
    """Exact derivative of the raw expansion CDF.

    Can be negative for extreme cumulants at small n; use
    :func:`is_valid_density` before treating it as a density.
    """
    x = np.asarray(x, dtype=np.float64)
    out = _polyval(_density_coeffs(p), x) * normal_pdf(x)
    return float(out) if out.ndim == 0 else out


class MonotoneCdf:
    """Nondecreasing version of the expansion CDF backing the solvers.

    Running maximum of the clamped raw CDF over a fixed grid on
    [-BRACKET, BRACKET], with linear interpolation between nodes.
    Deterministic and cheap; exact at grid nodes wherever the raw
    expansion is already a true CDF.
    """

    def __init__(self, params: EdgeworthParams, size: int = MONOTONE_GRID_SIZE):
        self.x = np.linspace(-BRACKET, BRACKET, size)
        raw = np.clip(ee_cdf_raw(self.x, params), 0.0, 1.0)
        self.y = np.maximum.accumulate(raw)

    def __call__(self, x):
        return np.interp(x, self.x, self.y)

    def spans(self, lo_p: float, hi_p: float) -> bool:
        return self.y[0] <= lo_p and self.y[-1] >= hi_p

    def inverse(self, prob: float) -> float:
        """Smallest bracket point with CDF >= prob, by bisection."""
        lo, hi = -BRACKET, BRACKET
        while hi - lo > X_TOL:
            mid = 0.5 * (lo + hi)
            if float(np.interp(mid, self.x, self.y)) < prob:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def is_valid_density(p: EdgeworthParams) -> bool:
    """Whether the expansion density is usable by the level-set solver.

    Requires nonnegativity (>= -1e-12) on a 4001-point grid over the
    bracket, and a single-peaked profile above a small fraction of the
    peak height; sub-floor tail ripples are tolerated.
    """
    grid = np.linspace(-BRACKET, BRACKET, VALIDITY_GRID_SIZE)
    q = ee_pdf(grid, p)
    if np.min(q) < -1e-12:
        return False
    peak = float(np.max(q))
    if peak <= 0.0:
        return False
    floor = _LEVEL_FLOOR_FRACTION * peak
    above = q >= floor
    idx = np.flatnonzero(above)
    if idx.size == 0 or not np.all(np.diff(idx) == 1):
        return False
    block = q[idx]
    top = int(np.argmax(block))
    atol = 1e-12 * peak
    return bool(
        np.all(np.diff(block[: top + 1]) >= -atol)
        and np.all(np.diff(block[top:]) <= atol)
    )


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha must be in (0, 1), got {alpha}")


def _pdf_scalar(coeffs: tuple, x: float) -> float:
    acc = 0.0
    for a in coeffs:
        acc = acc * x + a
    return acc * math.exp(-0.5 * x * x) / _SQRT_2PI


def _bisect_pdf_crossing(coeffs: tuple, level: float, lo: float, hi: float,
                         increasing: bool) -> float:
    """Abscissa where the density crosses ``level`` on a monotone stretch."""
    while hi - lo > X_TOL:
        mid = 0.5 * (lo + hi)
        below = _pdf_scalar(coeffs, mid) < level
        if below == increasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _normal_fallback(alpha: float) -> QuantilePair:
    q = normal_quantile(1.0 - alpha / 2.0)
    mass = float(ndtr(q) - ndtr(-q))
    return QuantilePair(-q, q, mass, IntervalMethod.NORMAL_FALLBACK)


def equal_tailed_quantiles(p: EdgeworthParams, alpha: float) -> QuantilePair:
    """Quantiles of the monotonized expansion CDF at alpha/2 and 1 - alpha/2."""
    _check_alpha(alpha)
    mcdf = MonotoneCdf(p)
    if not mcdf.spans(alpha / 2.0, 1.0 - alpha / 2.0):
        return _normal_fallback(alpha)
    lo = mcdf.inverse(alpha / 2.0)
    hi = mcdf.inverse(1.0 - alpha / 2.0)
    mass = float(mcdf(hi) - mcdf(lo))
    return QuantilePair(lo, hi, mass, IntervalMethod.EQUAL_TAILED)


def shortest_interval(p: EdgeworthParams, alpha: float) -> QuantilePair:
    """Shortest interval of mass 1 - alpha under the expansion.

    Solved by level-set bisection: for a density level c, the two
    crossings of the expansion density with c bound an interval whose
    endpoints have equal density; the level is bisected until the
    enclosed mass (difference of the monotonized CDF) matches 1 - alpha.
    Falls back to equal-tailed quantiles when the expansion density is
    not single-peaked-positive, and to plain normal quantiles when the
    monotonized CDF cannot even span [alpha/4, 1 - alpha/4].
    """
    _check_alpha(alpha)
    mcdf = MonotoneCdf(p)
    if not mcdf.spans(alpha / 4.0, 1.0 - alpha / 4.0):
        return _normal_fallback(alpha)
    if not is_valid_density(p):
        if not mcdf.spans(alpha / 2.0, 1.0 - alpha / 2.0):
            return _normal_fallback(alpha)
        lo = mcdf.inverse(alpha / 2.0)
        hi = mcdf.inverse(1.0 - alpha / 2.0)
        return QuantilePair(lo, hi, float(mcdf(hi) - mcdf(lo)), IntervalMethod.EQUAL_TAILED)

    coeffs = tuple(_density_coeffs(p)[::-1])
    grid = np.linspace(-BRACKET, BRACKET, VALIDITY_GRID_SIZE)
    q = ee_pdf(grid, p)
    peak = float(np.max(q))
    mode_x = float(grid[int(np.argmax(q))])
    floor = _LEVEL_FLOOR_FRACTION * peak
    idx = np.flatnonzero(q >= floor)
    # widen by one node so the crossing bisections start from a strict bracket
    left_edge = float(grid[max(idx[0] - 1, 0)])
    right_edge = float(grid[min(idx[-1] + 1, grid.size - 1)])

    target = 1.0 - alpha

    def crossings(level: float) -> tuple[float, float]:
        lo = _bisect_pdf_crossing(coeffs, level, left_edge, mode_x, increasing=True)
        hi = _bisect_pdf_crossing(coeffs, level, mode_x, right_edge, increasing=False)
        return lo, hi

    def mass_at(level: float) -> tuple[float, float, float]:
        lo, hi = crossings(level)
        return float(mcdf(hi) - mcdf(lo)), lo, hi

    m_floor, lo, hi = mass_at(floor)
    if m_floor < target - MASS_TOL:
        # the requested mass extends below the level floor; equal-tailed is
        # the honest answer there
        qlo = mcdf.inverse(alpha / 2.0)
        qhi = mcdf.inverse(1.0 - alpha / 2.0)
        return QuantilePair(qlo, qhi, float(mcdf(qhi) - mcdf(qlo)), IntervalMethod.EQUAL_TAILED)

    c_lo, c_hi = floor, peak
    best = (abs(m_floor - target), lo, hi, m_floor)
    for _ in range(200):
        c = 0.5 * (c_lo + c_hi)
        m, lo, hi = mass_at(c)
        if abs(m - target) < best[0]:
            best = (abs(m - target), lo, hi, m)
        if abs(m - target) <= MASS_TOL:
            break
        if m > target:
            c_lo = c
        else:
            c_hi = c
        if c_hi - c_lo <= 1e-16 * peak:
            break
    _, lo, hi, m = best
    return QuantilePair(lo, hi, m, IntervalMethod.SHORTEST)
