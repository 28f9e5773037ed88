"""Output stability under a drifting error-parameter distribution.

The error parameter follows an exponential density whose rate decays
linearly in time, rate(t) = rate0 - eta (t - t0). Expected outputs and
their sensitivity between two times are integrals over that density. A
permissible Hellinger drift d_max follows from the stability tolerance
through g(d) = d sqrt(1 - d^2/2) <= phi^2, and the drift model turns d_max
into the longest interval before recalibration.

Alternative closed forms for phi, the bound, the drift distance and the
horizon are kept for comparison (``printed_*`` and ``quoted_*``). They
disagree with the derived forms and never decide a verdict.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .distributions import ExponentialModel, QuadratureSpec, hellinger_exponential, integrate
from .errors import DomainError

G_MAX = 1.0 / math.sqrt(2.0)

_QUAD = dict(abs_tol=1e-13, rel_tol=1e-11)


@dataclass(frozen=True)
class ErrorParameterProcess:
    """Exponential error-parameter density with linearly decaying rate."""

    rate0: float
    eta: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if not self.rate0 > 0:
            raise DomainError(f"initial rate must be positive, got {self.rate0}")
        if self.eta < 0:
            raise DomainError(f"drift rate eta must be non-negative, got {self.eta}")

    def rate(self, t: float) -> float:
        r = self.rate0 - self.eta * (t - self.t0)
        if not r > 0:
            raise DomainError(f"rate(t={t}) = {r} is not positive; the drift model has expired")
        return r

    def model(self, t: float) -> ExponentialModel:
        return ExponentialModel(self.rate(t))

    @property
    def expiry(self) -> float:
        """Time at which the rate reaches zero (inf when stationary)."""
        return math.inf if self.eta == 0 else self.t0 + self.rate0 / self.eta


@dataclass(frozen=True)
class OutputFunctional:
    """Output O_e as a function of the error parameter, with its ideal value.

    ``domain`` is the e-range used for the normalization integral in
    :func:`phi`; expectations integrate over the full support [0, inf).
    """

    fn: Callable[[float], float]
    ideal: float
    domain: tuple[float, float] = (0.0, 0.75)

    def __call__(self, e: float) -> float:
        return self.fn(e)


def depolarizing_functional(beta_sq: float = 1.0, domain_upper: float = 0.75) -> OutputFunctional:
    """Z expectation of a depolarized single-qubit state: (2|b|^2 - 1)(1 - 4e/3)."""
    m = 2.0 * beta_sq - 1.0
    return OutputFunctional(lambda e: m * (1.0 - 4.0 * e / 3.0), ideal=m, domain=(0.0, domain_upper))


def expected_output(proc: ErrorParameterProcess, t: float, fn: OutputFunctional) -> float:
    """integral p(e; t) O_e de over [0, inf)."""
    r = proc.rate(t)
    return integrate(lambda e: r * math.exp(-r * e) * fn(e), QuadratureSpec(0.0, math.inf, **_QUAD))


def sensitivity(proc: ErrorParameterProcess, t1: float, t2: float, fn: OutputFunctional) -> float:
    """integral O_e (p(e; t1) - p(e; t2)) de."""
    r1, r2 = proc.rate(t1), proc.rate(t2)
    if r1 == r2:
        return 0.0

    def integrand(e):
        return fn(e) * (r1 * math.exp(-r1 * e) - r2 * math.exp(-r2 * e))

    return integrate(integrand, QuadratureSpec(0.0, math.inf, **_QUAD))


def drift_hellinger(proc: ErrorParameterProcess, t: float, dt: float) -> float:
    return hellinger_exponential(proc.model(t), proc.model(t + dt))


@dataclass(frozen=True)
class PhiResult:
    phi: float
    c: float  # sqrt of integral O_e^2 over the domain
    normalized_integral: float  # integral (O_e / M)^2 over the domain


def phi(epsilon: float, fn: OutputFunctional) -> PhiResult:
    """phi = eps / (2 sqrt 2) * [integral (O_e / M)^2 de]^(-1/2) over ``fn.domain``."""
    lo, hi = fn.domain
    if not math.isfinite(hi):
        raise DomainError("phi needs a bounded e-domain; the normalization integral diverges otherwise")
    if fn.ideal == 0:
        raise DomainError("ideal output M is zero; the normalized integral is undefined")
    spec = QuadratureSpec(lo, hi, **_QUAD)
    c2 = integrate(lambda e: fn(e) ** 2, spec)
    if not c2 > 0:
        raise DomainError("integral of O_e^2 vanishes on the domain")
    norm = c2 / fn.ideal**2
    return PhiResult(phi=epsilon / (2.0 * math.sqrt(2.0)) / math.sqrt(norm), c=math.sqrt(c2), normalized_integral=norm)


def quoted_depolarizing_phi(epsilon: float) -> float:
    """Alternative depolarizing phi, 3 sqrt 3 eps / (14 sqrt 2); matches neither e-domain."""
    return 3.0 * math.sqrt(3.0) * epsilon / (14.0 * math.sqrt(2.0))


def g(d: float) -> float:
    """d sqrt(1 - d^2 / 2), increasing on [0, 1] up to 1/sqrt 2."""
    return d * math.sqrt(1.0 - 0.5 * d * d)


def max_hellinger_nonstationarity(phi_val: float) -> float:
    """Largest d in [0, 1] with g(d) <= phi^2.

    Solving d^2 (1 - d^2/2) = phi^4 gives d = sqrt(1 - sqrt(1 - 2 phi^4));
    for phi^2 >= 1/sqrt 2 every d in [0, 1] qualifies and 1 is returned.
    """
    if phi_val < 0:
        raise DomainError(f"phi must be non-negative, got {phi_val}")
    v = phi_val * phi_val
    if v >= G_MAX:
        return 1.0
    # 1 - sqrt(1 - 2v^2) written to avoid cancellation for small v
    y = 2.0 * v * v / (1.0 + math.sqrt(1.0 - 2.0 * v * v))
    return math.sqrt(y)


def max_hellinger_bisection(phi_val: float, tol: float = 1e-14) -> float:
    """Root-finding oracle for :func:`max_hellinger_nonstationarity`."""
    v = phi_val * phi_val
    if v >= G_MAX:
        return 1.0
    if v == 0:
        return 0.0
    return brentq(lambda d: g(d) - v, 0.0, 1.0, xtol=tol, rtol=4 * np.finfo(float).eps)


def printed_bound(phi_val: float) -> Optional[float]:
    """sqrt(1 - sqrt(2 phi^2 - 1)) alternative form; None where undefined."""
    inner = 2.0 * phi_val * phi_val - 1.0
    if inner < 0 or inner > 1:
        return None
    return math.sqrt(1.0 - math.sqrt(inner))


def printed_drift_hellinger(rate0: float, eta: float, dt: float) -> Optional[float]:
    """sqrt(1 - rate0 (rate0 - eta dt) / (2 rate0 - eta dt)) alternative form; None where undefined."""
    denom = 2.0 * rate0 - eta * dt
    if denom == 0:
        return None
    inner = 1.0 - rate0 * (rate0 - eta * dt) / denom
    return math.sqrt(inner) if inner >= 0 else None


def printed_horizon(rate0: float, eta: float, bound: Optional[float]) -> Optional[float]:
    """rate0 * 2 sqrt 2 * bound / eta alternative form; None where undefined."""
    if bound is None or eta <= 0:
        return None
    return rate0 * 2.0 * math.sqrt(2.0) * bound / eta


@dataclass(frozen=True)
class Horizon:
    duration: float  # inf for a stationary process
    rate_end: float
    capped: bool = False

    @property
    def infinite(self) -> bool:
        return math.isinf(self.duration)


def stable_time_horizon(proc: ErrorParameterProcess, d_max: float) -> Horizon:
    """Longest dt with drift Hellinger distance from rate0 to rate0 - eta dt <= d_max.

    With x = sqrt(rate_end / rate0) and B = 1 - d_max^2 the condition
    2x / (1 + x^2) = B is the quadratic B x^2 - 2x + B = 0, whose root in
    (0, 1) is x = (1 - sqrt(1 - B^2)) / B.
    """
    if not 0 <= d_max <= 1:
        raise DomainError(f"d_max must lie in [0, 1], got {d_max}")
    if proc.eta == 0:
        return Horizon(math.inf, proc.rate0)
    if d_max == 0:
        return Horizon(0.0, proc.rate0)
    if d_max >= 1:
        return Horizon(proc.rate0 / proc.eta, 0.0, capped=True)
    b = 1.0 - d_max * d_max
    x = b / (1.0 + math.sqrt(1.0 - b * b))  # == (1 - sqrt(1 - b^2)) / b
    rate_end = proc.rate0 * x * x
    return Horizon((proc.rate0 - rate_end) / proc.eta, rate_end)


def stable_time_horizon_bisection(proc: ErrorParameterProcess, d_max: float) -> float:
    """Bisection on the monotone drift-Hellinger curve; oracle for the closed form."""
    if proc.eta == 0:
        return math.inf
    span = proc.rate0 / proc.eta

    def f(dt):
        return hellinger_exponential(ExponentialModel(proc.rate0), ExponentialModel(proc.rate0 - proc.eta * dt)) - d_max

    hi = span * (1 - 1e-15)
    if f(hi) <= 0:
        return span
    return brentq(f, 0.0, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)


@dataclass(frozen=True)
class StabilityReport:
    sensitivity: float
    normalized_sensitivity: Optional[float]
    epsilon: float
    raw_pass: bool
    hellinger_nonstationarity: float
    d_max: Optional[float] = None

    @property
    def normalized_available(self) -> bool:
        return self.normalized_sensitivity is not None

    @property
    def verdict(self) -> bool:
        if self.normalized_sensitivity is None:
            return self.raw_pass
        return abs(self.normalized_sensitivity) <= self.epsilon

    def to_dict(self) -> dict:
        return {
            "sensitivity": self.sensitivity,
            "normalized_sensitivity": self.normalized_sensitivity,
            "normalized_available": self.normalized_available,
            "epsilon": self.epsilon,
            "raw_pass": self.raw_pass,
            "verdict": self.verdict,
            "hellinger_nonstationarity": self.hellinger_nonstationarity,
            "d_max": self.d_max,
        }


def stability_check(
    proc: ErrorParameterProcess,
    t1: float,
    t2: float,
    fn: OutputFunctional,
    epsilon: float,
) -> StabilityReport:
    """Epsilon-stability between t1 and t2.

    The verdict uses |sensitivity / M| <= eps; the unnormalized comparison
    is reported as ``raw_pass`` and decides only when M = 0.
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    s = sensitivity(proc, t1, t2, fn)
    normalized = None if fn.ideal == 0 else s / fn.ideal
    d_max = None
    if fn.ideal != 0 and math.isfinite(fn.domain[1]):
        d_max = max_hellinger_nonstationarity(phi(epsilon, fn).phi)
    return StabilityReport(
        sensitivity=s,
        normalized_sensitivity=normalized,
        epsilon=float(epsilon),
        raw_pass=abs(s) <= epsilon,
        hellinger_nonstationarity=hellinger_exponential(proc.model(t1), proc.model(t2)),
        d_max=d_max,
    )


def cauchy_schwarz_terms(f: np.ndarray, p: np.ndarray, q: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    """Both sides of |int f (p - q)| <= 2 sqrt 2 c d sqrt(1 - d^2/2) on a weighted grid.

    ``w`` are quadrature weights; p and q must be normalized under them.
    Returns (lhs, rhs) with c = sqrt(int f^2) and d the Hellinger distance.
    """
    lhs = abs(float(np.sum(w * f * (p - q))))
    c = math.sqrt(float(np.sum(w * f * f)))
    d2 = 0.5 * float(np.sum(w * (np.sqrt(p) - np.sqrt(q)) ** 2))
    d = math.sqrt(min(1.0, d2))
    return lhs, 2.0 * math.sqrt(2.0) * c * g(d)


def bounded_output_terms(f: np.ndarray, p: np.ndarray, q: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    """Like :func:`cauchy_schwarz_terms` but with c = max |f|.

    |f| <= c pulls f out of the integral before the two-factor
    Cauchy-Schwarz step, so this form holds for any normalized p, q.
    """
    lhs = abs(float(np.sum(w * f * (p - q))))
    d2 = 0.5 * float(np.sum(w * (np.sqrt(p) - np.sqrt(q)) ** 2))
    d = math.sqrt(min(1.0, d2))
    return lhs, 2.0 * math.sqrt(2.0) * float(np.max(np.abs(f))) * g(d)
