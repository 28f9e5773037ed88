"""Epsilon-accuracy of noisy outputs against the ideal state.

Two independent notions are reported side by side and never merged: the
Hellinger distance between noisy and ideal outcome distributions, and the
absolute error of an observable's expectation value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .distributions import bhattacharyya, hellinger_discrete
from .errors import DomainError, NormalizationError
from .quantum import (
    ATOL,
    DensityMatrix,
    Observable,
    QuantumChannel,
    apply_channel,
    expectation,
    measure_distribution,
)

PHYSICAL_E_MAX = 0.75


@dataclass(frozen=True)
class AccuracyReport:
    epsilon: float
    hellinger: Optional[float] = None
    observable_error: Optional[float] = None

    @property
    def accurate_hellinger(self) -> Optional[bool]:
        return None if self.hellinger is None else self.hellinger <= self.epsilon

    @property
    def accurate_observable(self) -> Optional[bool]:
        return None if self.observable_error is None else self.observable_error <= self.epsilon

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "hellinger": self.hellinger,
            "observable_error": self.observable_error,
            "accurate_hellinger": self.accurate_hellinger,
            "accurate_observable": self.accurate_observable,
        }


def _check_epsilon(epsilon: float, upper: float = 1.0) -> float:
    epsilon = float(epsilon)
    if not (0.0 < epsilon <= upper):
        raise DomainError(f"epsilon must lie in (0, {upper}], got {epsilon}")
    return epsilon


def hellinger_accuracy(ideal: DensityMatrix, ch: QuantumChannel, epsilon: float) -> AccuracyReport:
    epsilon = _check_epsilon(epsilon)
    q = measure_distribution(ideal)
    p = measure_distribution(apply_channel(ideal, ch))
    return AccuracyReport(epsilon=epsilon, hellinger=hellinger_discrete(p, q))


def observable_error(ideal: DensityMatrix, ch: QuantumChannel, obs: Observable) -> float:
    """|Tr[O E(rho)] - Tr[O rho]|."""
    return abs(expectation(apply_channel(ideal, ch), obs) - expectation(ideal, obs))


def observable_error_spectral(ideal: DensityMatrix, ch: QuantumChannel, obs: Observable) -> float:
    """|sum_m m (p(m) - q(m))| with p, q the eigenvalue distributions of O."""
    noisy = apply_channel(ideal, ch)
    total = 0.0
    for m, proj in obs.spectral_projectors():
        p = np.trace(proj @ noisy.matrix).real
        q = np.trace(proj @ ideal.matrix).real
        total += m * (p - q)
    return abs(total)


def spectral_diameter(obs: Observable) -> float:
    vals = obs.eigenvalues
    return float(vals[-1] - vals[0])


def accuracy_report(
    ideal: DensityMatrix,
    ch: QuantumChannel,
    obs: Observable,
    epsilon: float,
) -> AccuracyReport:
    """Both accuracy notions for one state, channel and observable.

    The Hellinger check needs epsilon in (0, 1]; the observable check allows
    epsilon up to the observable's spectral diameter, in which case the
    Hellinger verdict is still reported against the same epsilon.
    """
    epsilon = _check_epsilon(epsilon, max(1.0, spectral_diameter(obs)))
    q = measure_distribution(ideal)
    p = measure_distribution(apply_channel(ideal, ch))
    return AccuracyReport(
        epsilon=epsilon,
        hellinger=hellinger_discrete(p, q),
        observable_error=observable_error(ideal, ch, obs),
    )


class ClosedForms(NamedTuple):
    hellinger: float
    observable_error: float
    fallback: bool  # True when the Hellinger ratio form was singular


def depolarizing_closed_forms(alpha: complex, beta: complex, e: float) -> ClosedForms:
    """Single-qubit depolarizing Hellinger distance and Z-observable error.

    For |psi> = alpha|0> + beta|1>:

        d_H = (1 - |a|^2 sqrt(1 - 2e/3 (1 - |b/a|^2))
                 - |b|^2 sqrt(1 - 2e/3 (1 - |a/b|^2)))^(1/2)
        d_O = |4e (1 - 2|b|^2) / 3|

    When alpha or beta vanishes the ratios are singular; d_H is then taken
    from the Bhattacharyya sum over the shifted probabilities and
    ``fallback`` is set.
    """
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2
    if abs(a2 + b2 - 1.0) > ATOL:
        raise NormalizationError(f"|alpha|^2 + |beta|^2 = {a2 + b2!r}, expected 1")
    e = float(e)
    if not 0.0 <= e <= PHYSICAL_E_MAX:
        raise DomainError(f"e={e} outside [0, 3/4]")
    d_o = abs(4.0 * e * (1.0 - 2.0 * b2) / 3.0)
    if a2 == 0.0 or b2 == 0.0:
        shift = 2.0 * e * (1.0 - 2.0 * b2) / 3.0
        p = [max(0.0, a2 - shift), max(0.0, b2 + shift)]
        bc = bhattacharyya(p, [a2, b2])
        return ClosedForms(math.sqrt(max(0.0, 1.0 - bc)), d_o, True)
    k = 2.0 * e / 3.0
    inner = (
        1.0
        - a2 * math.sqrt(1.0 - k * (1.0 - b2 / a2))
        - b2 * math.sqrt(1.0 - k * (1.0 - a2 / b2))
    )
    return ClosedForms(math.sqrt(max(0.0, inner)), d_o, False)


class ParameterBound(NamedTuple):
    value: float
    clamped: bool


def max_depolarizing_parameter(epsilon: float) -> ParameterBound:
    """Largest depolarizing e keeping the Z-observable error within epsilon: 3 eps / 4."""
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    e = 0.75 * epsilon
    if e > PHYSICAL_E_MAX:
        return ParameterBound(PHYSICAL_E_MAX, True)
    return ParameterBound(e, False)
