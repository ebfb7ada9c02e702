"""Seedable random-variate foundation.

Every stochastic routine in the package draws from an :class:`RngState`,
a thin wrapper around numpy's PCG64 generator keyed by ``(seed,
stream_id)``. Parallel code never shares a state; each unit of work gets
its own stream id and therefore an independent, reproducible sequence.

Standard normals use the Box-Muller transform (Box & Muller, 1958),
cosine branch only:

    z = sqrt(-2 ln u) * cos(2 pi v)

with two fresh uniforms per variate, drawn as one block of u followed by
one block of v. A raw uniform of exactly zero is mapped to the smallest
positive double so that ln(u) stays finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hetpop.errors import DomainError

__all__ = [
    "RngState",
    "TINY",
    "box_muller",
    "normal_matrix",
    "seed_stream",
    "standard_normal",
    "uniform_open",
]

# smallest positive double; stands in for a raw 0.0 draw
TINY = np.nextafter(0.0, 1.0)

TWO_PI = 2.0 * np.pi

_U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class RngState:
    """One independent random stream, identified by (seed, stream_id)."""

    seed: int
    stream_id: int
    gen: np.random.Generator = field(repr=False, compare=False)


def seed_stream(seed: int, stream_id: int) -> RngState:
    """Build the stream identified by ``(seed, stream_id)``.

    The output sequence is a pure function of the two integers; distinct
    stream ids give statistically independent sequences.
    """
    seed = int(seed)
    stream_id = int(stream_id)
    if not 0 <= seed <= _U64_MAX:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if not 0 <= stream_id <= _U64_MAX:
        raise DomainError(f"stream_id must be an unsigned 64-bit integer, got {stream_id}")
    bits = np.random.PCG64(np.random.SeedSequence([seed, stream_id]))
    return RngState(seed=seed, stream_id=stream_id, gen=np.random.Generator(bits))


def uniform_open(state: RngState) -> float:
    """One uniform draw strictly inside (0, 1)."""
    u = float(state.gen.random())
    return u if u > 0.0 else float(TINY)


def box_muller(u, v) -> np.ndarray:
    """Apply the cosine-branch transform to given uniforms.

    Exposed separately so the mapping from uniforms to normals can be
    evaluated on explicit inputs; ``u`` is guarded against zeros.
    """
    u = np.maximum(np.asarray(u, dtype=np.float64), TINY)
    v = np.asarray(v, dtype=np.float64)
    return np.sqrt(-2.0 * np.log(u)) * np.cos(TWO_PI * v)


def standard_normal(state: RngState, count: int) -> np.ndarray:
    """Draw ``count`` i.i.d. standard normals.

    Consumes exactly ``2 * count`` uniforms from the stream: a block of
    u then a block of v.
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    u = state.gen.random(count)
    v = state.gen.random(count)
    return box_muller(u, v)


def normal_matrix(state: RngState, rows: int, cols: int) -> np.ndarray:
    """``rows * cols`` standard normals, reshaped row-major."""
    return standard_normal(state, rows * cols).reshape(rows, cols)
