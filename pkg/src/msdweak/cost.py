"""Closed-form distillation-cost calculators.

Recursive n-to-k distillation at suppression order d costs O(log^gamma(1/eps))
raw states with gamma = log(n/k)/log(d); once the per-round suppression is
only linear (eps_out = k' * eps_in, k' < 1) the cost becomes polynomial,
C(eps) = (eps_r/eps)^tau with tau = log(n/k)/log(1/k').  Level counts are
integers in practice, so both the smooth formula value and the
integer-ceiling value are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class CostDomainError(ValueError):
    """Cost query outside the formulas' domain (or target unreachable)."""


def gamma_exponent(n: int, k: int, d: float) -> float:
    """Ideal-regime cost exponent log(n/k)/log(d)."""
    if not (n > k >= 1):
        raise CostDomainError(f"need n > k >= 1, got n={n}, k={k}")
    if d < 2:
        raise CostDomainError(f"ideal regime needs suppression order >= 2, got {d}")
    return math.log(n / k) / math.log(d)


def tau_exponent(n: int, k: int, k_prime: float) -> float:
    """Linear-regime cost exponent log(n/k)/log(1/k')."""
    if not (n > k >= 1):
        raise CostDomainError(f"need n > k >= 1, got n={n}, k={k}")
    if not 0.0 < k_prime < 1.0:
        raise CostDomainError(f"k' must lie in (0, 1), got {k_prime}")
    return math.log(n / k) / math.log(1.0 / k_prime)


@dataclass(frozen=True)
class CostQuery:
    n: int
    k: int
    eps_raw: float
    eps_target: float
    d: float | None = None          # ideal regime: suppression order
    c: float = 1.0                  # ideal regime prefactor: eps_{l+1} = c * eps_l^d
    k_prime: float | None = None    # linear regime prefactor

    def __post_init__(self):
        if not (0.0 < self.eps_target <= self.eps_raw < 1.0):
            raise CostDomainError(
                f"need 0 < eps_target <= eps_raw < 1, got {self.eps_target}, {self.eps_raw}")


@dataclass(frozen=True)
class CostResult:
    regime: str
    levels: int
    cost: float
    levels_smooth: float
    cost_smooth: float
    exponent: float  # gamma (ideal) or tau (linear)


def levels_and_cost(query: CostQuery, regime: str) -> CostResult:
    """Recursion depth and raw-state count to reach eps_target from eps_raw."""
    ratio = query.n / query.k
    if regime == "linear":
        if query.k_prime is None:
            raise CostDomainError("linear regime requires k_prime")
        kp = query.k_prime
        tau = tau_exponent(query.n, query.k, kp)
        if query.eps_target >= query.eps_raw:
            levels = 0
            smooth = 0.0
        else:
            smooth = math.log(query.eps_target / query.eps_raw) / math.log(kp)
            levels = math.ceil(smooth - 1e-12)
        return CostResult(
            regime="linear",
            levels=levels,
            cost=ratio ** levels,
            levels_smooth=smooth,
            cost_smooth=(query.eps_raw / query.eps_target) ** tau,
            exponent=tau,
        )
    if regime == "ideal":
        if query.d is None:
            raise CostDomainError("ideal regime requires suppression order d")
        d, c = query.d, query.c
        gamma = gamma_exponent(query.n, query.k, d)
        if c * query.eps_raw ** (d - 1.0) >= 1.0:
            raise CostDomainError(
                f"target unreachable: c * eps_raw^(d-1) = {c * query.eps_raw ** (d - 1):.3g} >= 1 "
                "(input error above the distillation threshold)")
        # eps_l = c^((d^l - 1)/(d - 1)) * eps_raw^(d^l); levels = smallest l with eps_l <= eps
        levels = 0
        eps = query.eps_raw
        while eps > query.eps_target and levels < 1000:
            eps = c * eps ** d
            levels += 1
        adj = math.log(c) / (d - 1.0)
        u = (math.log(query.eps_target) + adj) / (math.log(query.eps_raw) + adj)
        smooth = math.log(u) / math.log(d) if u > 1 else 0.0
        return CostResult(
            regime="ideal",
            levels=levels,
            cost=ratio ** levels,
            levels_smooth=smooth,
            cost_smooth=u ** gamma if u > 1 else 1.0,
            exponent=gamma,
        )
    raise CostDomainError(f"unknown regime {regime!r}; expected 'ideal' or 'linear'")
