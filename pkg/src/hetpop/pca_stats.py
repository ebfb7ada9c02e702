"""Bivariate summaries and 2 x 2 principal-component scores.

The correlation matrix of a standardized item pair is [[1, r], [r, 1]],
whose eigendecomposition is closed form: eigenvalues 1 + r and 1 - r
with fixed eigenvectors (1, 1)/sqrt(2) and (1, -1)/sqrt(2). Component
scores are the z-scores rotated onto the eigenvectors and scaled to unit
variance:

    c_sum  = (z1 + z2) / sqrt(2 * (1 + r))
    c_diff = (z1 - z2) / sqrt(2 * (1 - r))

ordered by descending eigenvalue, so c1 = c_sum for r >= 0 and
c1 = c_diff for r < 0. Both eigenvectors already have a positive first
component, which fixes all signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hetpop.errors import DataError, DegenerateDataError
from hetpop.model_gen import BivariateSample

__all__ = [
    "SINGULAR_TOL",
    "ComponentScores",
    "CorrelationSummary",
    "component_scores",
    "summarize",
]

# component scaling involves 1 / sqrt(1 - |r|)
SINGULAR_TOL = 1e-8

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class CorrelationSummary:
    """Sample means, standard deviations (n - 1 denominator), and r."""

    mean1: float
    mean2: float
    sd1: float
    sd2: float
    r: float


@dataclass(frozen=True, eq=False)
class ComponentScores:
    """Whitened principal-component scores of one item pair.

    ``c1`` and ``c2`` have in-sample mean 0, variance 1 (n - 1
    denominator), and zero correlation. ``loadings`` is the 2 x 2 matrix
    A with A @ [c1, c2] reproducing the z-scores.
    """

    c1: np.ndarray
    c2: np.ndarray
    eigenvalues: tuple
    loadings: np.ndarray

    @property
    def n(self) -> int:
        return self.c1.shape[0]


def summarize(sample: BivariateSample) -> CorrelationSummary:
    """Means, sds, and the exact sample Pearson r of the two columns."""
    scores = sample.scores
    n = scores.shape[0]
    if n < 3:
        raise DataError(f"need at least 3 rows to summarize, got {n}")
    means = scores.mean(axis=0)
    centered = scores - means
    cov = centered.T @ centered / (n - 1)
    sd1 = math.sqrt(cov[0, 0])
    sd2 = math.sqrt(cov[1, 1])
    if sd1 == 0.0 or sd2 == 0.0:
        raise DegenerateDataError("a column is constant; correlation is undefined")
    r = cov[0, 1] / (sd1 * sd2)
    r = min(1.0, max(-1.0, r))
    return CorrelationSummary(mean1=means[0], mean2=means[1], sd1=sd1, sd2=sd2, r=r)


def component_scores(sample: BivariateSample, summary: CorrelationSummary) -> ComponentScores:
    """Standardize the columns and project onto the two components."""
    r = summary.r
    if abs(r) >= 1.0 - SINGULAR_TOL:
        raise DegenerateDataError(
            f"|r| = {abs(r):.10f} is too close to 1; a component variance vanishes"
        )
    scores = sample.scores
    z1 = (scores[:, 0] - summary.mean1) / summary.sd1
    z2 = (scores[:, 1] - summary.mean2) / summary.sd2
    c_sum = (z1 + z2) / math.sqrt(2.0 * (1.0 + r))
    c_diff = (z1 - z2) / math.sqrt(2.0 * (1.0 - r))
    if r >= 0.0:
        ew = (1.0 + r, 1.0 - r)
        c1, c2 = c_sum, c_diff
        vectors = np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]])
    else:
        ew = (1.0 - r, 1.0 + r)
        c1, c2 = c_diff, c_sum
        vectors = np.array([[_INV_SQRT2, _INV_SQRT2], [-_INV_SQRT2, _INV_SQRT2]])
    loadings = vectors * np.sqrt(ew)
    return ComponentScores(c1=c1, c2=c2, eigenvalues=ew, loadings=loadings)
