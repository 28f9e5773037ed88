"""Reproducibility of observable outputs across execution instances.

Each simulated instance draws its own depolarizing parameter from an
exponential model and evaluates the observable exactly or from sampled
shots. Instance ``i`` draws from the stream keyed ``(seed, i)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.stats import beta as _beta_dist

from . import kernels
from .accuracy import PHYSICAL_E_MAX
from .distributions import ExponentialModel
from .errors import DomainError
from .quantum import DensityMatrix, Observable, expectation
from .rng import stream

TruncationPolicy = Literal["resample", "pass-through"]

# confidence of the one-sided lower bound on Pr(d_O <= eps)
META_CONFIDENCE = 0.95


@dataclass(frozen=True)
class ReproducibilitySpec:
    epsilon: float
    delta: float
    instances: int
    shots: int = 0
    truncation: TruncationPolicy = "resample"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise DomainError(f"delta must lie in (0, 1), got {self.delta}")
        if self.instances < 1:
            raise DomainError(f"instances must be >= 1, got {self.instances}")
        if self.shots < 0:
            raise DomainError(f"shots must be >= 0, got {self.shots}")
        if self.truncation not in ("resample", "pass-through"):
            raise DomainError(f"unknown truncation policy {self.truncation!r}")


@dataclass(frozen=True)
class ReproducibilityResult:
    error_samples: np.ndarray = field(repr=False)
    epsilon: float
    delta: float
    successes: int
    empirical_prob: float
    lower_conf_bound: float
    error_parameters: np.ndarray | None = field(default=None, repr=False)

    @property
    def verdict(self) -> bool:
        return self.lower_conf_bound >= 1.0 - self.delta

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "instances": int(self.error_samples.size),
            "successes": self.successes,
            "empirical_prob": self.empirical_prob,
            "lower_conf_bound": self.lower_conf_bound,
            "meta_confidence": META_CONFIDENCE,
            "verdict": self.verdict,
        }


def clopper_pearson_lower(successes: int, trials: int, confidence: float = META_CONFIDENCE) -> float:
    """Exact one-sided binomial lower confidence bound."""
    if successes <= 0:
        return 0.0
    return float(_beta_dist.ppf(1.0 - confidence, successes, trials - successes + 1))


def reproducibility_check(samples: Sequence[float], epsilon: float, delta: float) -> ReproducibilityResult:
    """Test Pr(d_O <= eps) >= 1 - delta conservatively via the lower bound."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("no samples")
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    k = int(np.count_nonzero(x <= epsilon))
    return ReproducibilityResult(
        error_samples=x,
        epsilon=float(epsilon),
        delta=float(delta),
        successes=k,
        empirical_prob=k / x.size,
        lower_conf_bound=clopper_pearson_lower(k, x.size),
    )


def _draw_error_parameter(g: np.random.Generator, model: ExponentialModel, policy: TruncationPolicy) -> float:
    e = g.exponential(model.mean)
    if policy == "resample":
        while e > PHYSICAL_E_MAX:
            e = g.exponential(model.mean)
    return e


def simulate_instances(
    state: DensityMatrix,
    obs: Observable,
    model: ExponentialModel,
    spec: ReproducibilitySpec,
    seed: int,
) -> ReproducibilityResult:
    """Monte Carlo over instance-varying depolarizing noise on every qubit."""
    n_qubits = state.n_qubits
    if obs.dim != state.dim:
        raise DomainError(f"observable dimension {obs.dim} does not match state {state.dim}")
    if obs.is_diagonal:
        basis, values = None, np.diag(obs.matrix).real.copy()
    else:
        basis, values = obs.eigenvectors, obs.eigenvalues

    gens = [stream(seed, i) for i in range(spec.instances)]
    es = np.array([_draw_error_parameter(g, model, spec.truncation) for g in gens])
    probs = kernels.depolarized_probabilities(state.matrix, basis, es, n_qubits)

    if spec.shots == 0:
        noisy = probs @ values
    else:
        noisy = np.empty(spec.instances)
        for i, g in enumerate(gens):
            p = np.clip(probs[i], 0.0, None)
            counts = g.multinomial(spec.shots, p / p.sum())
            noisy[i] = counts @ values / spec.shots

    ideal = expectation(state, obs)
    result = reproducibility_check(np.abs(ideal - noisy), spec.epsilon, spec.delta)
    return ReproducibilityResult(
        error_samples=result.error_samples,
        epsilon=result.epsilon,
        delta=result.delta,
        successes=result.successes,
        empirical_prob=result.empirical_prob,
        lower_conf_bound=result.lower_conf_bound,
        error_parameters=es,
    )


def min_exponential_rate(epsilon: float, delta: float) -> float:
    """Smallest exponential rate satisfying the reproducibility condition: 4|ln delta| / (3 eps)."""
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    return 4.0 * abs(math.log(delta)) / (3.0 * epsilon)


def error_threshold(epsilon: float, beta_sq: float) -> float:
    """|3 eps / (4 (1 - 2|beta|^2))|; infinite for the balanced state."""
    if not 0.0 <= beta_sq <= 1.0:
        raise DomainError(f"|beta|^2 must lie in [0, 1], got {beta_sq}")
    denom = 1.0 - 2.0 * beta_sq
    if denom == 0.0:
        return math.inf
    return abs(3.0 * epsilon / (4.0 * denom))


def parameter_bound_probability(model: ExponentialModel, epsilon: float, beta_sq: float) -> float:
    """Pr(e <= |3 eps / (4 (1 - 2|beta|^2))|) under the untruncated exponential model."""
    thr = error_threshold(epsilon, beta_sq)
    return 1.0 if math.isinf(thr) else model.cdf(thr)


def predicted_probability(
    model: ExponentialModel,
    epsilon: float,
    beta_sq: float,
    truncation: TruncationPolicy = "resample",
) -> float:
    """Exact Pr(d_O <= eps) for a single qubit under the simulated sampling policy."""
    thr = error_threshold(epsilon, beta_sq)
    if truncation == "pass-through":
        return 1.0 if math.isinf(thr) else model.cdf(thr)
    return model.cdf(min(thr, PHYSICAL_E_MAX)) / model.cdf(PHYSICAL_E_MAX)
