"""Probability machinery: discrete Hellinger distance, exponential and beta
models, moment fits, seeded sampling and adaptive quadrature.

The quadrature routine is the independent oracle for every closed-form
integral elsewhere in the package.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy import integrate as _spi
from scipy.special import betaln

from .errors import DimensionError, DomainError, FitError, NormalizationError, QuadratureError
from .rng import stream

PROB_SUM_TOL = 1e-9
NEG_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteDistribution:
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64, copy=True).ravel()
        if p.size == 0:
            raise DimensionError("distribution must have at least one outcome")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise NormalizationError(f"negative or non-finite probability (min {p.min():.3e})")
        s = p.sum()
        if abs(s - 1.0) > PROB_SUM_TOL:
            raise NormalizationError(f"probabilities sum to {s!r}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_raw(cls, values: Sequence[float]) -> "DiscreteDistribution":
        """Clamp round-off negatives (>= -1e-12) to zero, then validate."""
        p = np.asarray(values, dtype=np.float64).ravel()
        if np.any(p < -NEG_TOL):
            raise NormalizationError(f"probability {p.min():.3e} below round-off tolerance")
        return cls(np.clip(p, 0.0, None))

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> "DiscreteDistribution":
        c = np.asarray(counts, dtype=np.float64)
        total = c.sum()
        if total <= 0:
            raise NormalizationError("counts must have a positive total")
        return cls(c / total)

    def __len__(self) -> int:
        return self.probs.size


def _pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    pa = p.probs if isinstance(p, DiscreteDistribution) else DiscreteDistribution(p).probs
    qa = q.probs if isinstance(q, DiscreteDistribution) else DiscreteDistribution(q).probs
    if pa.shape != qa.shape:
        raise DimensionError(f"length mismatch: {pa.size} vs {qa.size}")
    return pa, qa


def bhattacharyya(p, q) -> float:
    """BC(p, q) = sum_i sqrt(p_i q_i), clipped into [0, 1]."""
    pa, qa = _pair(p, q)
    return float(min(1.0, np.sum(np.sqrt(pa * qa))))


def hellinger_discrete(p, q) -> float:
    """sqrt(1 - BC(p, q)).

    Evaluated as sqrt(sum (sqrt p - sqrt q)^2 / 2), which equals
    sqrt(1 - BC) for normalized inputs without the cancellation near p = q.
    """
    pa, qa = _pair(p, q)
    d2 = 0.5 * np.sum((np.sqrt(pa) - np.sqrt(qa)) ** 2)
    return float(math.sqrt(min(1.0, d2)))


@dataclass(frozen=True)
class ExponentialModel:
    """Density rate * exp(-rate * e) on [0, inf)."""

    rate: float

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise DomainError(f"exponential rate must be positive and finite, got {self.rate}")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def var(self) -> float:
        return 1.0 / self.rate**2

    def pdf(self, e):
        e = np.asarray(e, dtype=float)
        return np.where(e >= 0, self.rate * np.exp(-self.rate * np.maximum(e, 0.0)), 0.0)

    def cdf(self, e: float) -> float:
        return 0.0 if e <= 0 else -math.expm1(-self.rate * e)


@dataclass(frozen=True)
class BetaModel:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"beta shapes must be positive and finite, got a={self.a}, b={self.b}")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    @property
    def var(self) -> float:
        s = self.a + self.b
        return self.a * self.b / (s * s * (s + 1.0))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (self.a - 1) * np.log(x) + (self.b - 1) * np.log1p(-x) - betaln(self.a, self.b)
        return np.where((x > 0) & (x < 1), out, -np.inf)

    def pdf(self, x):
        return np.exp(self.logpdf(x))


Model = Union[ExponentialModel, BetaModel]


@dataclass(frozen=True)
class QuadratureSpec:
    lower: float = 0.0
    upper: float = math.inf
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000
    points: tuple[float, ...] = ()

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if not math.isfinite(self.lower):
            raise DomainError("lower integration bound must be finite")
        if not self.upper > self.lower:
            raise DomainError(f"empty integration range [{self.lower}, {self.upper}]")


def integrate(f: Callable[[float], float], spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``spec``'s range.

    A half-infinite range [a, inf) is mapped onto [0, 1) by
    e = a + u / (1 - u). Raises :class:`QuadratureError` when the requested
    tolerance is not met within ``max_subdivisions``.
    """
    a = spec.lower
    if math.isinf(spec.upper):

        def g(u):
            w = 1.0 - u
            return f(a + u / w) / (w * w)

        lo, hi = 0.0, 1.0
        pts = [(p - a) / (1.0 + p - a) for p in spec.points if p > a]
    else:
        g, lo, hi = f, a, spec.upper
        pts = [p for p in spec.points if lo < p < hi]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _spi.IntegrationWarning)
        res = _spi.quad(
            g,
            lo,
            hi,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=spec.max_subdivisions,
            points=pts or None,
            full_output=1,
        )
    if len(res) == 4:
        raise QuadratureError(f"quadrature did not converge: {res[3].strip()} (estimate {res[0]!r}, error {res[1]!r})")
    val, err = res[0], res[1]
    if not math.isfinite(val):
        raise QuadratureError(f"quadrature produced non-finite value {val!r}")
    return float(val)


def hellinger_exponential(m1: ExponentialModel, m2: ExponentialModel) -> float:
    """Hellinger distance between two exponential densities.

    BC = 2 sqrt(l1 l2) / (l1 + l2), so 1 - BC = (sqrt l1 - sqrt l2)^2 / (l1 + l2).
    """
    r1, r2 = m1.rate, m2.rate
    return math.sqrt((math.sqrt(r1) - math.sqrt(r2)) ** 2 / (r1 + r2))


def bhattacharyya_exponential(m1: ExponentialModel, m2: ExponentialModel) -> float:
    return 2.0 * math.sqrt(m1.rate * m2.rate) / (m1.rate + m2.rate)


def hellinger_by_quadrature(
    pdf1: Callable[[float], float],
    pdf2: Callable[[float], float],
    spec: QuadratureSpec,
) -> float:
    """Hellinger distance of two normalized densities from
    d^2 = 1/2 * integral (sqrt p - sqrt q)^2."""
    d2 = 0.5 * integrate(lambda x: (math.sqrt(pdf1(x)) - math.sqrt(pdf2(x))) ** 2, spec)
    return math.sqrt(min(1.0, max(0.0, d2)))


def hellinger_exponential_quadrature(m1: ExponentialModel, m2: ExponentialModel) -> float:
    def p(e):
        return m1.rate * math.exp(-m1.rate * e)

    def q(e):
        return m2.rate * math.exp(-m2.rate * e)

    spec = QuadratureSpec(0.0, math.inf, abs_tol=1e-13, rel_tol=1e-12)
    return hellinger_by_quadrature(p, q, spec)


def hellinger_beta(m1: BetaModel, m2: BetaModel) -> float:
    """Hellinger distance between two beta densities by quadrature on (0, 1)."""

    def p(x):
        return float(m1.pdf(x))

    def q(x):
        return float(m2.pdf(x))

    pts = []
    for m in (m1, m2):
        sd = math.sqrt(m.var)
        pts += [m.mean - 3 * sd, m.mean, m.mean + 3 * sd]
    spec = QuadratureSpec(0.0, 1.0, abs_tol=1e-12, rel_tol=1e-10, points=tuple(sorted(set(pts))))
    return hellinger_by_quadrature(p, q, spec)


def fit_exponential(samples: Sequence[float]) -> ExponentialModel:
    """Maximum-likelihood rate 1 / mean."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise FitError(f"need at least 2 samples, got {x.size}")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise FitError("exponential samples must be finite and non-negative")
    m = x.mean()
    if m <= 0:
        raise FitError("sample mean is zero; rate is unbounded")
    return ExponentialModel(1.0 / m)


def beta_from_moments(mean: float, var: float) -> BetaModel:
    if not 0 < mean < 1:
        raise FitError(f"beta mean must lie in (0, 1), got {mean}")
    if var <= 0:
        raise FitError("zero variance: beta shapes are unbounded")
    k = mean * (1 - mean) / var - 1.0
    if k <= 0:
        raise FitError(f"infeasible moments: variance {var} >= mean(1-mean) = {mean * (1 - mean)}")
    return BetaModel(mean * k, (1 - mean) * k)


def fit_beta(samples: Sequence[float]) -> BetaModel:
    """Method-of-moments beta fit (population variance of the samples)."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise FitError(f"need at least 2 samples, got {x.size}")
    if np.any((x <= 0) | (x >= 1)):
        raise FitError("beta samples must lie strictly inside (0, 1)")
    if np.all(x == x[0]):
        raise FitError("zero variance: beta shapes are unbounded")
    return beta_from_moments(float(x.mean()), float(x.var()))


def sample_model(model: Model, n: int, seed: int) -> np.ndarray:
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    g = stream(seed)
    if isinstance(model, ExponentialModel):
        return g.exponential(model.mean, size=n)
    if isinstance(model, BetaModel):
        return g.beta(model.a, model.b, size=n)
    raise TypeError(f"unsupported model {type(model).__name__}")
