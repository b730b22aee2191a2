"""Point estimate and moment summary of per-point log-density differences.

A comparison run starts from one number per test point and model: the
log-density the model assigns to that point, in nats.  Everything
downstream (point estimate, variance, skewness, kurtosis, confidence
intervals) is a function of the per-point differences
``logp1[i] - logp2[i]``, so this module is deliberately small.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import EmptySample, NonFiniteInput, SampleTooSmall


@dataclass(frozen=True)
class ScoreSample:
    """Paired per-test-point log-densities (nats) from two models.

    Parameters
    ----------
    logp1, logp2 : array_like
        Log-densities of the two models at the same test points, in the
        same order.  Must be finite.
    ids : tuple of str, optional
        Opaque identifiers of the test points, used only in error
        messages and reports.  When omitted, positional indices are used.
    """

    logp1: np.ndarray
    logp2: np.ndarray
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        l1 = np.asarray(self.logp1, dtype=np.float64)
        l2 = np.asarray(self.logp2, dtype=np.float64)
        if l1.ndim != 1 or l2.ndim != 1 or l1.shape != l2.shape:
            raise ValueError("logp1 and logp2 must be 1-d arrays of equal length")
        if self.ids is not None and len(self.ids) != l1.shape[0]:
            raise ValueError("ids length does not match the number of entries")
        for arr in (l1, l2):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                i = int(bad[0])
                raise NonFiniteInput(self._id_at(i), float(arr[i]))
        object.__setattr__(self, "logp1", l1)
        object.__setattr__(self, "logp2", l2)

    def _id_at(self, i: int) -> str:
        return self.ids[i] if self.ids is not None else str(i)

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[str, float, float]]) -> "ScoreSample":
        """Build a sample from ``(id, logp1, logp2)`` triples."""
        ids, l1, l2 = [], [], []
        for entry_id, a, b in entries:
            ids.append(str(entry_id))
            l1.append(float(a))
            l2.append(float(b))
        return cls(np.array(l1, dtype=np.float64), np.array(l2, dtype=np.float64), tuple(ids))

    @property
    def n(self) -> int:
        return int(self.logp1.shape[0])

    def diffs(self) -> np.ndarray:
        """Per-point differences ``logp1 - logp2``."""
        return self.logp1 - self.logp2


@dataclass(frozen=True)
class MomentSummary:
    """Sample moments of the log-density differences.

    ``variance`` carries the unbiased (n-1 denominator) estimate used for
    standard errors.  ``third_central`` and ``fourth_central`` are plain
    central moments with denominator n, and the ``skewness`` /
    ``kurtosis_excess`` ratios are formed with the denominator-n variance
    so the usual cumulant identities hold exactly on any finite sample.
    """

    n: int
    mean: float
    variance: float
    skewness: float
    kurtosis_excess: float
    third_central: float
    fourth_central: float

    @property
    def is_degenerate(self) -> bool:
        """True when every difference is identical (zero variance)."""
        return self.variance == 0.0


def relative_score(sample: ScoreSample) -> float:
    """Mean log-density difference: the relative-score point estimate.

    Positive values favor model 1.  Unbiased for the difference of the
    two models' negative KL divergences from the test distribution.
    """
    if sample.n == 0:
        raise EmptySample("cannot average an empty sample")
    # np.mean uses pairwise summation, bounding float error on large n.
    return float(np.mean(sample.diffs()))


def moment_summary(sample: ScoreSample) -> MomentSummary:
    """Mean, variance, skewness and excess kurtosis of the differences."""
    n = sample.n
    if n < 2:
        raise SampleTooSmall(f"need at least 2 entries, got {n}")
    x = sample.diffs()
    mean = float(np.mean(x))
    c = x - mean
    m2 = float(np.mean(c * c))
    m3 = float(np.mean(c ** 3))
    m4 = float(np.mean(c ** 4))
    variance = m2 * n / (n - 1)
    if m2 == 0.0:
        skewness = 0.0
        kurtosis_excess = 0.0
    else:
        skewness = m3 / m2 ** 1.5
        kurtosis_excess = m4 / (m2 * m2) - 3.0
    return MomentSummary(
        n=n,
        mean=mean,
        variance=variance,
        skewness=skewness,
        kurtosis_excess=kurtosis_excess,
        third_central=m3,
        fourth_central=m4,
    )
