"""Closed-form predictions for the pooled population of individuals.

When an item pair is assembled by independent uniform selection from q
item populations with common loading lam and factor inter-correlation
phi, the pooled inter-item correlation is

    rho = (1/q + phi * (1 - 1/q)) * lam**2 / (1 + omega).

The phi part is shared by every subgroup of individuals; the 1/q part
survives only in the subgroups whose two items happen to come from the
same population. Item-mean variance omega inflates item variance without
adding common variance, hence the attenuation by 1 + omega.

A one-factor analysis of such pooled data shows the loading

    sqrt(1/q + phi * (1 - 1/q)) * lam / sqrt(1 + omega),

so with omega = 0 and phi = 0 any loading above sqrt(1/2) ~ .71 rules
out q > 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hetpop.errors import DomainError

__all__ = [
    "LOADING_BOUND",
    "CorrelationPrediction",
    "expected_correlation",
    "expected_loading",
    "reproduced_covariance",
]

# single-population loading floor: above this, q > 1 is impossible
# (for omega = 0 and phi = 0)
LOADING_BOUND = math.sqrt(0.5)


@dataclass(frozen=True)
class CorrelationPrediction:
    """Expected inter-item correlation, split into its two sources.

    ``common_part`` is the share carried by the factor inter-correlation
    and present in every subgroup of individuals; ``subpopulation_part``
    is the share contributed only by same-population item draws. The two
    parts sum to ``rho``.
    """

    rho: float
    common_part: float
    subpopulation_part: float


def _check_domain(q: int, lam: float, phi: float, omega: float = 0.0) -> None:
    if int(q) != q or q < 1:
        raise DomainError(f"q must be an integer >= 1, got {q!r}")
    if not (0.0 < lam <= 1.0):
        raise DomainError(f"lam must be in (0, 1], got {lam!r}")
    if not (0.0 <= phi < 1.0):
        raise DomainError(f"phi must be in [0, 1), got {phi!r}")
    if not (omega >= 0.0 and math.isfinite(omega)):
        raise DomainError(f"omega must be finite and >= 0, got {omega!r}")


def expected_correlation(q: int, lam: float, phi: float = 0.0, omega: float = 0.0) -> CorrelationPrediction:
    """Pooled correlation of an item pair under independent selection."""
    _check_domain(q, lam, phi, omega)
    scale = 1.0 + omega
    common = lam * lam * phi / scale
    subpop = (lam * lam / q) * (1.0 - phi) / scale
    return CorrelationPrediction(rho=common + subpop, common_part=common, subpopulation_part=subpop)


def expected_loading(q: int, lam: float, phi: float = 0.0, omega: float = 0.0) -> float:
    """Loading of the one-factor model seen in the pooled population.

    The squared loading equals the expected correlation, which is what
    ties the two predictions together for essentially parallel items.
    """
    _check_domain(q, lam, phi, omega)
    return lam * math.sqrt((1.0 / q + phi * (1.0 - 1.0 / q)) / (1.0 + omega))


def reproduced_covariance(m: int, lam: float, omega: float = 0.0) -> np.ndarray:
    """Model covariance of m pooled items when every individual draws
    both items from one population (or there is only one population).

    Off-diagonals are lam**2, diagonals 1 + omega; the matrix does not
    depend on q, which is the point: pooled covariances cannot tell q
    populations apart in this regime.
    """
    if int(m) != m or m < 2:
        raise DomainError(f"m must be an integer >= 2, got {m!r}")
    _check_domain(1, lam, 0.0, omega)
    sigma = np.full((m, m), lam * lam)
    np.fill_diagonal(sigma, 1.0 + omega)
    return sigma
