"""Synthetic item scores under the essentially-parallel factor model.

Each of ``q`` item populations is driven by one common factor. An item
score for individual row ``i`` is

    x = lam * f_s + sqrt(1 - lam**2) * e + m,

where ``s`` is the population the item was taken from, ``f_s`` the
corresponding factor score, ``e`` a unique factor score, and ``m`` an
optional item-mean offset with variance ``omega``. The q factors carry a
compound-symmetry inter-correlation ``phi``. Candidate scores are
generated for all q populations and the assignment mode decides which
column an individual actually gets:

* ``independent_per_item``: fresh uniform pick per individual and item,
* ``shared_within_individual``: one pick per individual, reused for
  every item (drawn once, directly after the factor scores),
* ``single_population``: always the first population.

Assignment draws are skipped entirely when ``q == 1``, so for a given
stream the three modes then produce identical samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hetpop.errors import DataError, DomainError
from hetpop.stochastics import RngState, normal_matrix

__all__ = [
    "MODES",
    "BivariateSample",
    "FactorCorrelation",
    "ModelSpec",
    "cholesky_lower",
    "factor_correlation",
    "generate_item_pair",
    "generate_m_items",
]

MODES = ("independent_per_item", "shared_within_individual", "single_population")


@dataclass(frozen=True)
class ModelSpec:
    """One fully specified generative condition.

    Fields
    ------
    q: number of item populations (and factors), >= 1.
    lam: common loading, in (0, 1]; the unique loading is
        sqrt(1 - lam**2).
    phi: inter-correlation between the q factors, in [0, 1).
    omega: variance of item means within a population, >= 0.
    n: sample size, >= 2.
    mode: one of MODES.
    """

    q: int
    lam: float
    phi: float = 0.0
    omega: float = 0.0
    n: int = 1000
    mode: str = "independent_per_item"

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise DomainError(f"q must be an integer >= 1, got {self.q!r}")
        if not (0.0 < self.lam <= 1.0):
            raise DomainError(f"lam must be in (0, 1], got {self.lam!r}")
        if not (0.0 <= self.phi < 1.0):
            raise DomainError(f"phi must be in [0, 1), got {self.phi!r}")
        if not (self.omega >= 0.0 and math.isfinite(self.omega)):
            raise DomainError(f"omega must be finite and >= 0, got {self.omega!r}")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n!r}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True, eq=False)
class BivariateSample:
    """An n x 2 matrix of item scores.

    ``provenance`` records where the scores came from: a
    ``(spec, seed, stream_id)`` tuple for generated data, the string
    ``"ingested"`` for data read from a file, or None.
    """

    scores: np.ndarray
    provenance: object = None

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 2 or scores.shape[1] != 2:
            raise DataError(f"scores must be an n x 2 matrix, got shape {scores.shape}")
        if scores.shape[0] < 2:
            raise DataError(f"need at least 2 rows, got {scores.shape[0]}")
        if not np.isfinite(scores).all():
            raise DataError("scores contain non-finite entries")
        object.__setattr__(self, "scores", scores)

    @property
    def n(self) -> int:
        return self.scores.shape[0]


@dataclass(frozen=True, eq=False)
class FactorCorrelation:
    """Compound-symmetry correlation matrix of the q factors."""

    matrix: np.ndarray


def factor_correlation(q: int, phi: float) -> FactorCorrelation:
    """The q x q matrix with unit diagonal and ``phi`` everywhere else."""
    if int(q) != q or q < 1:
        raise DomainError(f"q must be an integer >= 1, got {q!r}")
    if not (0.0 <= phi < 1.0):
        raise DomainError(f"phi must be in [0, 1), got {phi!r}")
    m = np.full((q, q), float(phi))
    np.fill_diagonal(m, 1.0)
    return FactorCorrelation(matrix=m)


def cholesky_lower(m: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L @ L.T == m, positive diagonal."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"need a square matrix, got shape {m.shape}")
    if not np.allclose(m, m.T):
        raise DomainError("matrix is not symmetric")
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise DomainError(f"matrix is not positive definite: {exc}") from exc


def _draw_columns(rng: RngState, n: int, q: int) -> np.ndarray:
    """Uniform categorical pick of one population index per row."""
    cols = (rng.gen.random(n) * q).astype(np.int64)
    np.minimum(cols, q - 1, out=cols)
    return cols


def _generate(spec: ModelSpec, m: int, rng: RngState) -> np.ndarray:
    n, q, lam = spec.n, spec.q, spec.lam
    psi = math.sqrt(1.0 - lam * lam)
    chol = cholesky_lower(factor_correlation(q, spec.phi).matrix)
    factors = normal_matrix(rng, n, q) @ chol.T
    if spec.mode == "shared_within_individual" and q > 1:
        shared_pick = _draw_columns(rng, n, q)
    out = np.empty((n, m))
    rows = np.arange(n)
    for j in range(m):
        candidates = lam * factors + psi * normal_matrix(rng, n, q)
        if spec.omega > 0.0:
            candidates += math.sqrt(spec.omega) * normal_matrix(rng, n, q)
        if q == 1 or spec.mode == "single_population":
            out[:, j] = candidates[:, 0]
        elif spec.mode == "independent_per_item":
            out[:, j] = candidates[rows, _draw_columns(rng, n, q)]
        else:
            out[:, j] = candidates[rows, shared_pick]
    return out


def generate_item_pair(spec: ModelSpec, rng: RngState) -> BivariateSample:
    """Generate one n x 2 sample under ``spec``, consuming from ``rng``."""
    scores = _generate(spec, 2, rng)
    return BivariateSample(scores=scores, provenance=(spec, rng.seed, rng.stream_id))


def generate_m_items(spec: ModelSpec, m: int, rng: RngState) -> np.ndarray:
    """Generate an n x m score matrix with per-item population assignment.

    Only the modes with item-wise assignment semantics are allowed here;
    the shared mode is specific to item pairs.
    """
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    if spec.mode == "shared_within_individual":
        raise DomainError("generate_m_items requires independent_per_item or single_population")
    return _generate(spec, m, rng)
