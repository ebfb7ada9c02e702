"""The kappa heterogeneity index and its Monte-Carlo decision rule.

kappa is the proportion of cases whose two component scores are both
beyond 1 in absolute value. For a bivariate normal sample the two
whitened components are independent standard normals, so kappa
converges to (2 * (1 - Phi(1)))**2, about 0.1007. When the two items
mix heterogeneous populations, large scores on both components are
systematically rarer and kappa drops.

The decision rule compares the observed kappa_x against a reference
distribution of kappa_y values computed from synthetic single-population
samples that share the observed n and r. Each reference run draws its
own sample (parametrically from normals, or by resampling the pooled
standardized observations), then recomputes its own correlation, its own
component scores, and its own kappa, exactly as the observed sample was
treated. Heterogeneity is declared when kappa_x falls below the
floor(0.05 * nruns)-th smallest reference value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hetpop import _kernels
from hetpop.errors import DegenerateDataError, DomainError
from hetpop.model_gen import BivariateSample
from hetpop.pca_stats import SINGULAR_TOL, ComponentScores, component_scores, summarize
from hetpop.stochastics import RngState

__all__ = [
    "METHODS",
    "DetectionResult",
    "KappaValue",
    "ReferenceDistribution",
    "detect",
    "kappa",
    "percentile_5",
    "reference_distribution",
]

METHODS = ("parametric", "bootstrap")

# uniform-block budget per kernel call; keeps huge-n runs to a few
# dozen MB without changing the consumed stream
_CHUNK_BYTES = 1 << 26


@dataclass(frozen=True)
class KappaValue:
    """kappa = count / n, with the raw flagged-case count kept."""

    kappa: float
    n: int
    count: int


@dataclass(frozen=True, eq=False)
class ReferenceDistribution:
    """All kappa_y values from one batch of single-population runs."""

    values: np.ndarray
    method: str
    r_used: float
    n: int

    def __post_init__(self):
        if len(self.values) < 20:
            raise DomainError(f"need at least 20 runs, got {len(self.values)}")


@dataclass(frozen=True)
class DetectionResult:
    """Outcome of the 5th-percentile rule for one item pair."""

    kappa_x: float
    kappa_y_mean: float
    p05: float
    heterogeneous: bool
    nruns: int


def kappa(scores: ComponentScores) -> KappaValue:
    """Proportion of cases with |c1| > 1 and |c2| > 1 (both strict)."""
    flagged = (np.abs(scores.c1) > 1.0) & (np.abs(scores.c2) > 1.0)
    count = int(flagged.sum())
    return KappaValue(kappa=count / scores.n, n=scores.n, count=count)


def reference_distribution(
    r: float,
    sample: BivariateSample,
    nruns: int = 500,
    method: str = "parametric",
    rng: RngState = None,
) -> ReferenceDistribution:
    """kappa_y values from ``nruns`` synthetic q = 1 runs at (n, r).

    Parametric runs consume one u block and one v block of 2n uniforms
    each; bootstrap runs consume two n blocks of index uniforms into the
    pooled standardized observations (2n - 1 denominator). Runs are
    processed in fixed-size chunks, which leaves the consumed stream
    independent of chunking.
    """
    if method not in METHODS:
        raise DomainError(f"method must be one of {METHODS}, got {method!r}")
    if nruns < 20:
        raise DomainError(f"nruns must be >= 20, got {nruns}")
    if rng is None:
        raise DomainError("an RngState is required")
    r = float(r)
    if abs(r) >= 1.0 - SINGULAR_TOL:
        raise DegenerateDataError(f"|r| = {abs(r):.10f} is too close to 1")
    n = sample.n
    if method == "bootstrap":
        stacked = np.concatenate([sample.scores[:, 0], sample.scores[:, 1]])
        sd = stacked.std(ddof=1)
        if sd == 0.0:
            raise DegenerateDataError("pooled observations are constant")
        pool = (stacked - stacked.mean()) / sd
        width = n
    else:
        pool = None
        width = 2 * n
    values = np.empty(nruns)
    runs_per_chunk = max(1, _CHUNK_BYTES // (2 * width * 8))
    lo = 0
    while lo < nruns:
        hi = min(nruns, lo + runs_per_chunk)
        block = rng.gen.random((hi - lo, 2, width))
        u = np.ascontiguousarray(block[:, 0, :])
        v = np.ascontiguousarray(block[:, 1, :])
        if method == "parametric":
            _kernels.kappa_runs_parametric(u, v, r, values[lo:hi])
        else:
            _kernels.kappa_runs_bootstrap(u, v, pool, r, values[lo:hi])
        lo = hi
    if np.isnan(values).any():
        raise DegenerateDataError("a reference run collapsed to a degenerate sample")
    return ReferenceDistribution(values=values, method=method, r_used=r, n=n)


def percentile_5(dist: ReferenceDistribution) -> float:
    """The k-th smallest reference value, k = floor(0.05 * nruns)."""
    k = int(np.floor(0.05 * len(dist.values)))
    return float(np.sort(dist.values)[k - 1])


def detect(
    sample: BivariateSample,
    nruns: int = 500,
    method: str = "parametric",
    rng: RngState = None,
) -> DetectionResult:
    """Full pipeline: summarize, score, kappa_x, reference, verdict."""
    summary = summarize(sample)
    scores = component_scores(sample, summary)
    kappa_x = kappa(scores).kappa
    ref = reference_distribution(summary.r, sample, nruns, method, rng)
    p05 = percentile_5(ref)
    return DetectionResult(
        kappa_x=kappa_x,
        kappa_y_mean=float(ref.values.mean()),
        p05=p05,
        heterogeneous=bool(kappa_x < p05),
        nruns=nruns,
    )
