"""Measurement-noise parameterizations, normalized to the map coefficient.

Every two-outcome noisy measurement of a Pauli observable g used here takes
the symmetric form

    M+ = f1 P+ + f2 P-,     M- = f1 P- + f2 P+,      f1^2 + f2^2 = 1,

so that M+^2 + M-^2 = I.  The squared post-selection operator is then
M+^2 = (I + lam*g)/2 with lam = f1^2 - f2^2, and lam is the only noise
parameter the distillation map depends on.  Parameterizations:

    gaussian beta:   f1, f2 = exp(+-beta/2)/sqrt(2 cosh beta)  -> lam = tanh(beta)
    coefficient h:   M+ ~ I + h*g                              -> lam = 2h/(1+h^2)
    binary eta:      f1, f2 = sqrt((1 +- eta)/2)               -> lam = eta
    continuous k:    Gaussian pointer of strength kappa, binarized ->
                     beta = arctanh(erf(sqrt(kappa/2)))
    raw lambda:      lam passed through
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ModelError(ValueError):
    """Measurement-model parameter out of range."""


_KINDS = ("gaussian", "h", "eta", "lambda", "kappa")


@dataclass(frozen=True)
class MeasurementModel:
    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ModelError(f"unknown model kind {self.kind!r}; expected one of {_KINDS}")
        v = self.value
        if self.kind in ("gaussian", "kappa"):
            if v < 0:
                raise ModelError(f"{self.kind} parameter must be >= 0, got {v}")
        else:
            if not 0.0 <= v <= 1.0:
                raise ModelError(f"{self.kind} parameter must lie in [0, 1], got {v}")

    # named constructors
    @classmethod
    def gaussian(cls, beta: float) -> "MeasurementModel":
        return cls("gaussian", beta)

    @classmethod
    def coefficient_h(cls, h: float) -> "MeasurementModel":
        return cls("h", h)

    @classmethod
    def binary_eta(cls, eta: float) -> "MeasurementModel":
        return cls("eta", eta)

    @classmethod
    def raw_lambda(cls, lam: float) -> "MeasurementModel":
        return cls("lambda", lam)

    @classmethod
    def continuous_gaussian(cls, kappa: float) -> "MeasurementModel":
        return cls("kappa", kappa)

    def effective_beta(self) -> float:
        """Gaussian strength equivalent (arctanh of lambda); inf when ideal."""
        lam = lambda_of(self)
        if lam >= 1.0:
            return math.inf
        return math.atanh(lam)


def lambda_of(model: MeasurementModel) -> float:
    """Coefficient of g in the normalized squared measurement operator."""
    k, v = model.kind, model.value
    if k == "gaussian":
        return math.tanh(v)
    if k == "h":
        return 2.0 * v / (1.0 + v * v)
    if k == "eta":
        return v
    if k == "lambda":
        return v
    if k == "kappa":
        # binarized continuous Gaussian pointer: beta = arctanh(erf(sqrt(kappa/2)))
        e = math.erf(math.sqrt(v / 2.0))
        if e >= 1.0:
            return 1.0
        return math.tanh(math.atanh(e))
    raise ModelError(k)


def first_order_factor(model: MeasurementModel) -> float:
    """(1-lam)/(1+lam); equals exp(-2 beta) exactly for the Gaussian model."""
    lam = lambda_of(model)
    return (1.0 - lam) / (1.0 + lam)


def amplitudes(model: MeasurementModel, sign: int = +1) -> tuple[float, float]:
    """(coefficient on P+, coefficient on P-) of the outcome-`sign` operator.

    The pair satisfies f1^2 + f2^2 = 1; used verbatim by the dense oracle.
    """
    if sign not in (+1, -1):
        raise ModelError(f"sign must be +1 or -1, got {sign}")
    lam = lambda_of(model)
    f1 = math.sqrt((1.0 + lam) / 2.0)
    f2 = math.sqrt((1.0 - lam) / 2.0)
    return (f1, f2) if sign == +1 else (f2, f1)


def beta_for_lambda(lam: float) -> float:
    if not 0.0 <= lam <= 1.0:
        raise ModelError(f"lambda must lie in [0, 1], got {lam}")
    return math.inf if lam == 1.0 else math.atanh(lam)
