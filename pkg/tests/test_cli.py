import csv
import io
import json

import numpy as np
import pytest

from qstability.cli import main, run
from qstability.distributions import BetaModel, sample_model


def fixture_doc(means=(0.98, 0.85), n=40, seed=0):
    docs, ts = [], 1_700_000_000
    for k, m in enumerate(means):
        x = sample_model(BetaModel(200 * m, 200 * (1 - m)), n, seed + k)
        for f in x:
            docs.append({
                "device": "synthetic",
                "timestamp": ts,
                "qubits": [
                    {"index": 0, "init_fidelity": float(f), "gate_fidelity": 0.999,
                     "t1_s": 1e-4, "t2_s": 8e-5, "gate_duration_s": 1e-7},
                    {"index": 1, "init_fidelity": 0.9, "gate_fidelity": 0.998,
                     "t1_s": 2e-4, "t2_s": 1e-4, "gate_duration_s": 1e-7},
                ],
                "pairs": [{"a": 0, "b": 1, "counts": {"00": 25, "01": 25, "10": 25, "11": 25}}],
            })
            ts += 600
    return docs


@pytest.fixture
def drift_file(tmp_path):
    p = tmp_path / "drift.json"
    p.write_text(json.dumps(fixture_doc()))
    return p


@pytest.fixture
def flat_file(tmp_path):
    p = tmp_path / "flat.json"
    p.write_text(json.dumps(fixture_doc(means=(0.95, 0.95), seed=7)))
    return p


def report(argv):
    code, text = run(argv)
    return code, (json.loads(text) if text else None)


@pytest.mark.parametrize(
    "argv,code",
    [
        (["accuracy", "--alpha", "1", "--e", "0"], 0),
        (["accuracy", "--alpha", "0", "--beta", "1", "--e", "0.3"], 2),
        (["accuracy", "--epsilon", "-1"], 1),
        (["accuracy", "--e", "0.9"], 1),
        (["accuracy", "--e", "0.9", "--allow-unphysical"], 2),
        (["accuracy", "--alpha", "1", "--beta", "1"], 1),
        (["reproduce", "--rate", "200", "--instances", "2000"], 0),
        (["reproduce", "--rate", "10", "--instances", "500"], 2),
        (["reproduce"], 1),
        (["stability", "--eta", "1", "--t2", "20", "--epsilon", "0.05"], 0),
        (["stability", "--eta", "1", "--t2", "20", "--epsilon", "0.01"], 2),
        (["stability", "--eta", "1", "--t2", "50"], 1),
        (["demo-bv", "--secret", ""], 1),
        (["demo-bv", "--secret", "10x1"], 1),
        (["demo-bv", "--e", "0"], 0),
        (["demo-bv", "--e", "0.05"], 2),
        (["accuracy", "--bogus"], 1),
        (["nope"], 1),
    ],
)
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code


def test_accuracy_report_contents():
    code, rep = report(["accuracy", "--alpha", "0", "--beta", "1", "--e", "0.3"])
    assert code == 2
    assert rep["tool"] == "qstability" and rep["command"] == "accuracy" and rep["seed"] == 0
    res = rep["results"]
    assert res["hellinger"] == pytest.approx((1 - 0.8**0.5) ** 0.5, abs=1e-12)
    assert res["observable_error"] == pytest.approx(0.4, abs=1e-12)
    assert res["max_depolarizing_parameter"]["value"] == pytest.approx(0.075)


def test_reliability_verdicts(drift_file, flat_file):
    code, rep = report(["reliability", "--input", str(drift_file)])
    assert code == 2 and rep["results"]["verdict"]["hellinger"] > 0.1 and not rep["results"]["verdict"]["stationary"]
    code, rep = report(["reliability", "--input", str(flat_file)])
    assert code == 0 and rep["results"]["verdict"]["hellinger"] <= 0.1


def test_reliability_bad_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('[{"device": "d", "timestamp": 1, "qubits": [{"index": 0, "init_fidelity": 1.2}]}]')
    assert main(["reliability", "--input", str(bad)]) == 1
    bad.write_text("{oops")
    assert main(["reliability", "--input", str(bad)]) == 1


def test_stability_formula_variants():
    _, rep = report(["stability", "--eta", "1", "--t2", "20"])
    fv = rep["results"]["formula_variants"]
    assert fv["phi_derived"] == pytest.approx(0.1 / np.sqrt(2))
    assert fv["phi_quoted"] == pytest.approx(3 * np.sqrt(3) * 0.1 / (14 * np.sqrt(2)))
    assert {"bound_derived", "horizon_derived", "horizon_printed"} <= set(fv)


def test_stability_d_max_override():
    _, rep = report(["stability", "--eta", "1", "--d-max", "0.2"])
    assert rep["results"]["horizon"]["duration"] == pytest.approx(17.5, abs=1e-9)
    assert rep["results"]["drift_hellinger_at_horizon"] == pytest.approx(0.2, abs=1e-12)


@pytest.mark.parametrize(
    "argv",
    [
        ["accuracy", "--alpha", "0.6", "--beta", "0.8", "--e", "0.05"],
        ["reproduce", "--rate", "40", "--instances", "3000", "--shots", "64"],
        ["stability", "--eta", "1", "--t2", "20"],
        ["demo-bv", "--e", "0.02", "--seed", "9"],
    ],
)
def test_byte_identical(argv):
    a, b = run(argv), run(argv)
    assert a == b and a[1]


def test_reliability_byte_identical(drift_file):
    assert run(["reliability", "--input", str(drift_file)]) == run(["reliability", "--input", str(drift_file)])


def test_seed_changes_monte_carlo():
    a = report(["reproduce", "--rate", "40", "--instances", "2000", "--seed", "1"])[1]
    b = report(["reproduce", "--rate", "40", "--instances", "2000", "--seed", "2"])[1]
    assert a["results"]["empirical_prob"] != b["results"]["empirical_prob"]


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": "0", "beta": "1", "e": 0.3, "epsilon": 0.5}))
    code, rep = report(["accuracy", "--config", str(cfg)])
    assert code == 0 and rep["config"]["epsilon"] == 0.5
    code, rep = report(["accuracy", "--config", str(cfg), "--epsilon", "0.2"])
    assert code == 2 and rep["config"]["epsilon"] == 0.2
    cfg.write_text(json.dumps({"no_such_option": 1}))
    assert main(["accuracy", "--config", str(cfg)]) == 1


def test_out_and_csv(tmp_path):
    out, series = tmp_path / "r.json", tmp_path / "s.csv"
    code = main(["stability", "--eta", "1", "--t2", "20", "--out", str(out), "--csv", str(series)])
    assert code == 0
    rep = json.loads(out.read_text())
    rows = list(csv.DictReader(io.StringIO(series.read_text())))
    assert len(rows) == len(rep["series"]) == 21
    assert float(rows[0]["expected_output"]) == pytest.approx(1 - 1 / 30)


def test_csv_format_on_stdout(capsys):
    assert main(["demo-bv", "--format", "csv"]) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0].count(",") >= 1
    with pytest.raises(json.JSONDecodeError):
        json.loads(text)
