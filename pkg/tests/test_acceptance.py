"""Acceptance gate: each criterion at its stated tolerance.

Every check prints one ``[PASS]``/``[FAIL]`` line; the lines are also
collected and repeated in the pytest terminal summary. Run directly with
``python3 tests/test_acceptance.py`` for the lines alone.
"""
import json
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import random_density, random_pure_amplitudes  # noqa: E402
from qstability.accuracy import (  # noqa: E402
    depolarizing_closed_forms,
    hellinger_accuracy,
    max_depolarizing_parameter,
    observable_error,
)
from qstability.cli import run  # noqa: E402
from qstability.distributions import (  # noqa: E402
    BetaModel,
    ExponentialModel,
    hellinger_discrete,
    hellinger_exponential,
    hellinger_exponential_quadrature,
    sample_model,
)
from qstability.quantum import (  # noqa: E402
    QuantumChannel,
    apply_channel,
    depolarize_each_qubit,
    depolarizing,
    pure_state,
    readout_z,
)
from qstability.reliability import addressability, compare_windows, load_calibration, metric_window  # noqa: E402
from qstability.reproducibility import ReproducibilitySpec, min_exponential_rate, simulate_instances  # noqa: E402
from qstability.stability import (  # noqa: E402
    G_MAX,
    ErrorParameterProcess,
    cauchy_schwarz_terms,
    depolarizing_functional,
    drift_hellinger,
    g,
    max_hellinger_nonstationarity,
    sensitivity,
    stable_time_horizon,
)

SEED = 20221016
LINES: list[str] = []


def report(num: int, name: str, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {name} ({detail})"
    print(line)
    LINES.append(line)
    return ok


def c1_closed_forms():
    rng = np.random.default_rng(SEED)
    z = readout_z()
    worst_h = worst_o = 0.0
    n = 0
    t0 = time.perf_counter()
    while n < 200:
        alpha, beta = random_pure_amplitudes(rng, 2)
        if min(abs(alpha), abs(beta)) < 1e-3:
            continue
        e = rng.uniform(0, 0.7)
        rho, ch = pure_state([alpha, beta]), depolarizing(e)
        cf = depolarizing_closed_forms(alpha, beta, e)
        worst_h = max(worst_h, abs(cf.hellinger - hellinger_accuracy(rho, ch, 1.0).hellinger))
        worst_o = max(worst_o, abs(cf.observable_error - observable_error(rho, ch, z)))
        n += 1
    dt = time.perf_counter() - t0
    ok = worst_h <= 1e-12 and worst_o <= 1e-12 and dt < 1.0
    return ok, f"max |dH| {worst_h:.1e}, max |dO| {worst_o:.1e}, {dt:.3f} s"


def c2_accuracy_bound():
    bound = max_depolarizing_parameter(0.1)
    d = observable_error(pure_state([0, 1]), depolarizing(bound.value), readout_z())
    ok = abs(bound.value - 0.075) <= 1e-12 and abs(d - 0.1) <= 1e-12
    return ok, f"e_max {bound.value:.15f}, d_O {d:.15f}"


def c3_reproducibility():
    rate = min_exponential_rate(0.1, 0.05)
    t0 = time.perf_counter()
    res = simulate_instances(
        pure_state([0, 1]),
        readout_z(),
        ExponentialModel(rate),
        ReproducibilitySpec(epsilon=0.1, delta=0.05, instances=100_000, shots=0),
        seed=SEED,
    )
    dt = time.perf_counter() - t0
    ok = abs(rate - 39.9431) <= 1e-3 and abs(res.empirical_prob - 0.95) <= 0.005 and dt < 30
    return ok, f"rate {rate:.4f}, Pr {res.empirical_prob:.5f}, {dt:.2f} s"


def c4_exponential_hellinger():
    rates = [0.5, 3.0, 20.0, 40.0, 200.0]
    worst = max(
        abs(hellinger_exponential(ExponentialModel(a), ExponentialModel(b))
            - hellinger_exponential_quadrature(ExponentialModel(a), ExponentialModel(b)))
        for a in rates
        for b in rates
    )
    v1 = hellinger_exponential(ExponentialModel(40), ExponentialModel(20))
    v2 = hellinger_exponential(ExponentialModel(40), ExponentialModel(22.5))
    ok = worst <= 1e-8 and abs(v1 - 0.239147) <= 1e-6 and abs(v2 - 0.2) <= 1e-6
    return ok, f"grid max diff {worst:.1e}, (40,20) {v1:.6f}, (40,22.5) {v2:.6f}"


def c5_sensitivity():
    s = sensitivity(ErrorParameterProcess(40, 1), 0, 20, depolarizing_functional(1.0))
    analytic = (1 - 4 / (3 * 40)) - (1 - 4 / (3 * 20))
    ok = abs(s - 0.033333) <= 1e-6 and abs(s - analytic) <= 1e-6
    return ok, f"quadrature {s:.10f}, analytic {analytic:.10f}"


def c6_bound_inverse():
    worst = max(abs(g(max_hellinger_nonstationarity(math.sqrt(v))) - min(v, G_MAX))
                for v in (0.01, 0.1, 0.3, 0.4677, 0.7, 0.9))
    d = max_hellinger_nonstationarity(math.sqrt(0.467707))
    ok = worst <= 1e-10 and abs(d - 0.5) <= 1e-6
    return ok, f"round-trip max {worst:.1e}, d_max {d:.7f}"


def c7_horizon():
    proc = ErrorParameterProcess(40, 1)
    h = stable_time_horizon(proc, 0.2)
    d = drift_hellinger(proc, 0, h.duration)
    ok = abs(h.duration - 17.5) <= 1e-6 and abs(d - 0.2) <= 1e-8
    return ok, f"dt {h.duration:.12f}, drift d_H {d:.12f}"


def _grid_density(rng, x, w):
    kind = rng.integers(3)
    if kind == 0:
        lam = rng.uniform(0.5, 30)
        f = lam * np.exp(-lam * x)
    elif kind == 1:
        mu, sd = rng.uniform(0, 1), rng.uniform(0.02, 0.5)
        f = np.exp(-0.5 * ((x - mu) / sd) ** 2)
    else:
        f = rng.uniform(0, 1, size=x.size) ** 2
    return f / np.sum(w * f)


def c8_cauchy_schwarz():
    rng = np.random.default_rng(SEED)
    x = np.linspace(0, 1, 401)
    w = np.full(x.size, x[1] - x[0])
    w[[0, -1]] *= 0.5
    basis = np.vstack([np.ones_like(x), x, x**2, np.sin(7 * x)])
    violations, worst = 0, 0.0
    for _ in range(1000):
        p, q = _grid_density(rng, x, w), _grid_density(rng, x, w)
        lhs, rhs = cauchy_schwarz_terms(rng.normal(size=4) @ basis, p, q, w)
        if lhs > rhs + 1e-9:
            violations += 1
            worst = max(worst, lhs - rhs)
    return violations == 0, f"{violations}/1000 violations, worst excess {worst:.3g}"


def c9_metric_and_channel():
    rng = np.random.default_rng(SEED)
    bad = 0
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        p, q, r = (rng.dirichlet(np.full(n, 0.7)) for _ in range(3))
        dpq, dqp = hellinger_discrete(p, q), hellinger_discrete(q, p)
        bad += abs(dpq - dqp) > 1e-15 or hellinger_discrete(p, p) != 0.0
        bad += dpq > hellinger_discrete(p, r) + hellinger_discrete(r, q) + 1e-12
    worst_tr = worst_neg = worst_mix = 0.0
    for i in range(1000):
        dim = 2 ** int(rng.integers(1, 4))
        rho = random_density(rng, dim, int(rng.integers(1, dim + 1)))
        # random CPTP map from an isometry
        k = int(rng.integers(1, 4))
        v = np.linalg.qr(rng.normal(size=(k * dim, dim)) + 1j * rng.normal(size=(k * dim, dim)))[0]
        out = apply_channel(rho, QuantumChannel(v.reshape(k, dim, dim)))
        worst_tr = max(worst_tr, abs(np.trace(out.matrix).real - 1))
        worst_neg = max(worst_neg, -np.linalg.eigvalsh(out.matrix).min())
        mixed = depolarize_each_qubit(rho, 0.75) if dim > 2 else apply_channel(rho, depolarizing(0.75))
        worst_mix = max(worst_mix, np.abs(mixed.matrix - np.eye(dim) / dim).max())
    ok = bad == 0 and worst_tr <= 1e-10 and worst_neg <= 1e-10 and worst_mix <= 1e-10
    return ok, f"metric failures {bad}, trace {worst_tr:.1e}, neg eig {worst_neg:.1e}, I/d {worst_mix:.1e}"


def _windows(x1, x2):
    docs, ts = [], 1_700_000_000
    for f in list(x1) + list(x2):
        docs.append({"device": "synthetic", "timestamp": ts, "qubits": [
            {"index": 0, "init_fidelity": float(f), "gate_fidelity": 0.999,
             "t1_s": 1e-4, "t2_s": 1e-4, "gate_duration_s": 1e-7}]})
        ts += 600
    snaps = load_calibration(json.dumps(docs).encode())
    split = snaps[len(x1)].timestamp
    return (metric_window(snaps, "init_fidelity", 0, (0, split - 1)),
            metric_window(snaps, "init_fidelity", 0, (split, ts)))


def c10_reliability():
    a = sample_model(BetaModel(0.98 * 400, 0.02 * 400), 60, SEED)
    b = sample_model(BetaModel(0.85 * 400, 0.15 * 400), 60, SEED + 1)
    drift = compare_windows(*_windows(a, b), threshold=0.1)
    same = compare_windows(*_windows(a, a), threshold=0.1)
    mi0 = addressability({"00": 25, "01": 25, "10": 25, "11": 25})
    mi1 = addressability({"00": 50, "01": 0, "10": 0, "11": 50})
    ok = not drift.stationary and same.stationary and abs(mi0) <= 1e-12 and abs(mi1 - 1) <= 1e-12
    return ok, f"drift d_H {drift.hellinger:.4f}, identical d_H {same.hellinger:.1e}, MI {mi0:.1e}/{mi1:.12f}"


def c11_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        cal = Path(tmp) / "cal.json"
        a = sample_model(BetaModel(392, 8), 30, 1)
        b = sample_model(BetaModel(340, 60), 30, 2)
        docs = [{"device": "d", "timestamp": 1000 + 60 * i, "qubits": [
            {"index": 0, "init_fidelity": float(f), "gate_fidelity": 0.99,
             "t1_s": 1e-4, "t2_s": 1e-4, "gate_duration_s": 1e-7}]}
            for i, f in enumerate(np.concatenate([a, b]))]
        cal.write_text(json.dumps(docs))
        commands = [
            ["accuracy", "--alpha", "0.6", "--beta", "0.8", "--e", "0.05"],
            ["reproduce", "--rate", "40", "--instances", "5000", "--shots", "100", "--seed", "3"],
            ["reliability", "--input", str(cal)],
            ["stability", "--eta", "1", "--t2", "20"],
            ["demo-bv", "--e", "0.02", "--seed", "5"],
        ]
        differing = []
        for c in commands:
            outs = []
            for k in range(2):
                path = Path(tmp) / f"{c[0]}_{k}.json"
                run(c + ["--out", str(path)])
                outs.append(path.read_bytes())
            if outs[0] != outs[1] or not outs[0]:
                differing.append(c[0])
    return not differing, f"{len(commands)} subcommands, differing: {differing or 'none'}"


CRITERIA = [
    (1, "depolarizing closed forms vs Kraus simulation", c1_closed_forms),
    (2, "accuracy bound tight at worst-case states", c2_accuracy_bound),
    (3, "minimum rate and Monte Carlo reproducibility", c3_reproducibility),
    (4, "exponential-pair Hellinger closed form vs quadrature", c4_exponential_hellinger),
    (5, "sensitivity for rate 40 -> 20", c5_sensitivity),
    (6, "non-stationarity bound inverse", c6_bound_inverse),
    (7, "drift horizon", c7_horizon),
    (8, "Cauchy-Schwarz chain with L2 constant", c8_cauchy_schwarz),
    (9, "metric and channel properties", c9_metric_and_channel),
    (10, "reliability pipeline", c10_reliability),
    (11, "end-to-end CLI determinism", c11_determinism),
]


@pytest.mark.parametrize("num,name,check", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, name, check):
    ok, detail = check()
    assert report(num, name, ok, detail), detail


if __name__ == "__main__":
    results = [report(num, name, *check()) for num, name, check in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria met")
    sys.exit(0 if all(results) else 1)
