"""Confidence intervals and verdicts for the relative score.

Three interval constructions share one contract: a normal-limit interval
(``ci_clt``) and two Edgeworth-corrected intervals (``ci_edgeworth`` with
the Z or T pivot) that use the sample's skewness and excess kurtosis to
fix small-sample coverage.  The verdict is a sign rule on the interval:
an interval entirely above zero favors model 1, entirely below zero
favors model 2, anything straddling zero is inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .edgeworth import (
    EdgeworthParams,
    IntervalMethod,
    Pivot,
    normal_quantile,
    shortest_interval,
)
from .errors import InvalidAlpha, SampleTooSmall, ZeroVariance
from .scores import ScoreSample, moment_summary


class Method(Enum):
    """Interval construction tags shared across the package."""

    CLT = "clt"
    EE_Z = "ee_z"
    EE_T = "ee_t"
    SUBSAMPLING = "subsampling"
    HULC = "hulc"
    MMD = "mmd"


class Verdict(Enum):
    MODEL1_BETTER = "model1_better"
    MODEL2_BETTER = "model2_better"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConfidenceInterval:
    """A two-sided interval for the relative score (or a baseline target).

    ``meta`` carries method-specific annotations: Edgeworth solver
    fallbacks, plug-in-variance flags, resampling parameters.
    """

    lower: float
    upper: float
    alpha: float
    method: Method
    point: float
    stderr: float = math.nan
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"interval bounds out of order: ({self.lower}, {self.upper})")

    @property
    def verdict(self) -> Verdict:
        # strict inequalities: exact-zero endpoints stay inconclusive
        if self.lower > 0.0:
            return Verdict.MODEL1_BETTER
        if self.upper < 0.0:
            return Verdict.MODEL2_BETTER
        return Verdict.INCONCLUSIVE

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def covers(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def excludes_zero(self) -> bool:
        return self.verdict is not Verdict.INCONCLUSIVE


def verdict(ci: ConfidenceInterval) -> Verdict:
    """Sign rule on the interval bounds."""
    return ci.verdict


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha must be in (0, 1), got {alpha}")


def ci_clt(sample: ScoreSample, alpha: float) -> ConfidenceInterval:
    """Normal-limit interval: point estimate +/- q_{1-alpha/2} * stderr."""
    _check_alpha(alpha)
    ms = moment_summary(sample)  # raises SampleTooSmall for n < 2
    if ms.variance <= 0.0:
        raise ZeroVariance("all log-density differences are identical")
    se = math.sqrt(ms.variance / ms.n)
    q = normal_quantile(1.0 - alpha / 2.0)
    return ConfidenceInterval(
        lower=ms.mean - q * se,
        upper=ms.mean + q * se,
        alpha=alpha,
        method=Method.CLT,
        point=ms.mean,
        stderr=se,
    )


def ci_edgeworth(
    sample: ScoreSample,
    alpha: float,
    pivot: Pivot = Pivot.T,
    known_variance: float | None = None,
) -> ConfidenceInterval:
    """Edgeworth-corrected interval from the shortest quantile pair.

    The standardized quantile pair (lo, hi) of the expansion maps to the
    interval [point - hi * s, point - lo * s], where the scale s uses the
    known variance when supplied (Z pivot) and the plug-in sample
    variance otherwise.
    """
    _check_alpha(alpha)
    if sample.n < 4:
        raise SampleTooSmall(
            f"Edgeworth intervals need n >= 4 for meaningful third/fourth moments, got {sample.n}"
        )
    ms = moment_summary(sample)
    plugin = known_variance is None
    variance = ms.variance if plugin else float(known_variance)
    if variance <= 0.0:
        raise ZeroVariance("variance must be positive for interval construction")
    params = EdgeworthParams(
        n=ms.n,
        skewness=ms.skewness,
        kurtosis_excess=ms.kurtosis_excess,
        pivot=pivot,
    )
    pair = shortest_interval(params, alpha)
    se = math.sqrt(variance / ms.n)
    meta = {"quantile_method": pair.method.value, "quantile_mass": pair.mass}
    if pivot is Pivot.Z:
        meta["plugin_variance"] = plugin
    return ConfidenceInterval(
        lower=ms.mean - pair.hi * se,
        upper=ms.mean - pair.lo * se,
        alpha=alpha,
        method=Method.EE_Z if pivot is Pivot.Z else Method.EE_T,
        point=ms.mean,
        stderr=se,
        meta=meta,
    )
