"""Device reliability from calibration snapshots.

Snapshots are read from JSON documents shaped like::

    [
      {"device": "dev", "timestamp": 1650000000,
       "qubits": [{"index": 0, "init_fidelity": 0.97, "gate_fidelity": 0.999,
                   "t1_s": 1e-4, "t2_s": 8e-5, "gate_duration_s": 3.5e-8}],
       "pairs": [{"a": 0, "b": 1, "counts": {"00": 40, "01": 10, "10": 10, "11": 40}}]}
    ]

A window of one metric for one qubit is fitted with a beta density; two
windows are judged stationary when the Hellinger distance between their
fits stays below a threshold.
"""
from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import asdict, dataclass, field
from typing import IO, Mapping, Optional, Sequence, Union

import numpy as np

from .distributions import BetaModel, fit_beta, hellinger_beta
from .errors import DomainError, FitError, SchemaError

DEFAULT_THRESHOLD = 0.1
OUTCOMES = ("00", "01", "10", "11")
UNIT_INTERVAL_METRICS = ("init_fidelity", "gate_fidelity")
METRICS = UNIT_INTERVAL_METRICS + ("t1_s", "t2_s", "gate_duration_s", "duty_cycle")

_QUBIT_FIELDS = ("index", "init_fidelity", "gate_fidelity", "t1_s", "t2_s", "gate_duration_s")
_SNAPSHOT_FIELDS = ("device", "timestamp", "qubits", "pairs")
_PAIR_FIELDS = ("a", "b", "counts")


@dataclass(frozen=True)
class QubitRecord:
    index: int
    init_fidelity: float
    gate_fidelity: float
    t1_s: float
    t2_s: float
    gate_duration_s: float


@dataclass(frozen=True)
class PairRecord:
    a: int
    b: int
    counts: Mapping[str, int]


@dataclass(frozen=True)
class CalibrationSnapshot:
    device: str
    timestamp: int
    qubits: tuple[QubitRecord, ...]
    pairs: tuple[PairRecord, ...] = ()

    def qubit(self, index: int) -> QubitRecord:
        for q in self.qubits:
            if q.index == index:
                return q
        raise KeyError(f"snapshot at {self.timestamp} has no qubit {index}")


def _number(rec: Mapping, key: str, where: str) -> float:
    if key not in rec:
        raise SchemaError(f"{where}: missing required field '{key}'")
    v = rec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaError(f"{where}: field '{key}' must be a finite number, got {v!r}")
    return float(v)


def _integer(rec: Mapping, key: str, where: str) -> int:
    if key not in rec:
        raise SchemaError(f"{where}: missing required field '{key}'")
    v = rec[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{where}: field '{key}' must be an integer, got {v!r}")
    return v


def _warn_unknown(rec: Mapping, known: Sequence[str], where: str) -> None:
    extra = sorted(set(rec) - set(known))
    if extra:
        warnings.warn(f"{where}: ignoring unknown fields {extra}", stacklevel=3)


def _parse_qubit(rec, where: str) -> QubitRecord:
    if not isinstance(rec, dict):
        raise SchemaError(f"{where}: qubit record must be an object")
    _warn_unknown(rec, _QUBIT_FIELDS, where)
    index = _integer(rec, "index", where)
    if index < 0:
        raise SchemaError(f"{where}: field 'index' must be non-negative, got {index}")
    vals = {}
    for key in ("init_fidelity", "gate_fidelity"):
        v = _number(rec, key, where)
        if not 0 < v < 1:
            raise SchemaError(f"{where}: field '{key}' must lie in (0, 1), got {v}")
        vals[key] = v
    for key in ("t1_s", "t2_s", "gate_duration_s"):
        v = _number(rec, key, where)
        if not v > 0:
            raise SchemaError(f"{where}: field '{key}' must be positive, got {v}")
        vals[key] = v
    return QubitRecord(index=index, **vals)


def _parse_pair(rec, where: str) -> PairRecord:
    if not isinstance(rec, dict):
        raise SchemaError(f"{where}: pair record must be an object")
    _warn_unknown(rec, _PAIR_FIELDS, where)
    a, b = _integer(rec, "a", where), _integer(rec, "b", where)
    counts = rec.get("counts")
    if not isinstance(counts, dict):
        raise SchemaError(f"{where}: field 'counts' must be an object keyed by {OUTCOMES}")
    parsed = {}
    for k in OUTCOMES:
        v = counts.get(k, 0)
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise SchemaError(f"{where}: counts['{k}'] must be a non-negative integer, got {v!r}")
        parsed[k] = v
    _warn_unknown(counts, OUTCOMES, f"{where}.counts")
    return PairRecord(a=a, b=b, counts=parsed)


def _parse_snapshot(rec, where: str) -> CalibrationSnapshot:
    if not isinstance(rec, dict):
        raise SchemaError(f"{where}: snapshot must be an object")
    _warn_unknown(rec, _SNAPSHOT_FIELDS, where)
    device = rec.get("device")
    if not isinstance(device, str):
        raise SchemaError(f"{where}: field 'device' must be a string")
    ts = _integer(rec, "timestamp", where)
    qubits = rec.get("qubits")
    if not isinstance(qubits, list):
        raise SchemaError(f"{where}: field 'qubits' must be a list")
    pairs = rec.get("pairs", [])
    if not isinstance(pairs, list):
        raise SchemaError(f"{where}: field 'pairs' must be a list")
    return CalibrationSnapshot(
        device=device,
        timestamp=ts,
        qubits=tuple(_parse_qubit(q, f"{where}.qubits[{i}]") for i, q in enumerate(qubits)),
        pairs=tuple(_parse_pair(p, f"{where}.pairs[{i}]") for i, p in enumerate(pairs)),
    )


def load_calibration(source: Union[str, os.PathLike, bytes, IO]) -> list[CalibrationSnapshot]:
    """Parse a calibration document; returns snapshots sorted by timestamp.

    ``source`` is a path, raw bytes, or a readable file object.
    """
    if isinstance(source, (bytes, bytearray)):
        text = bytes(source).decode("utf-8")
    elif isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"calibration document is not valid JSON: {exc}") from exc
    if isinstance(doc, dict) and "snapshots" in doc:
        doc = doc["snapshots"]
    if not isinstance(doc, list):
        raise SchemaError("calibration document must be a list of snapshots")
    snaps = [_parse_snapshot(s, f"snapshots[{i}]") for i, s in enumerate(doc)]
    return sorted(snaps, key=lambda s: s.timestamp)


def serialize_calibration(snapshots: Sequence[CalibrationSnapshot]) -> str:
    out = []
    for s in snapshots:
        d = {
            "device": s.device,
            "timestamp": s.timestamp,
            "qubits": [asdict(q) for q in s.qubits],
        }
        if s.pairs:
            d["pairs"] = [{"a": p.a, "b": p.b, "counts": dict(p.counts)} for p in s.pairs]
        out.append(d)
    return json.dumps(out, indent=2)


def duty_cycle(snapshot: CalibrationSnapshot, qubit: int, coherence: str = "t2") -> float:
    """Coherence time over gate duration. ``coherence`` picks T2 (default) or T1."""
    rec = snapshot.qubit(qubit)
    if rec.gate_duration_s <= 0:
        raise DomainError("gate duration must be positive")
    if coherence not in ("t1", "t2"):
        raise ValueError(f"coherence must be 't1' or 't2', got {coherence!r}")
    t = rec.t2_s if coherence == "t2" else rec.t1_s
    return t / rec.gate_duration_s


def addressability(joint_counts) -> float:
    """Mutual information in bits between two qubits' outcomes.

    ``joint_counts`` is a mapping over "00", "01", "10", "11" or a 2x2 array
    indexed [first bit, second bit].
    """
    if isinstance(joint_counts, Mapping):
        c = np.array([[joint_counts.get("00", 0), joint_counts.get("01", 0)],
                      [joint_counts.get("10", 0), joint_counts.get("11", 0)]], dtype=float)
    else:
        c = np.asarray(joint_counts, dtype=float).reshape(2, 2)
    if np.any(c < 0):
        raise DomainError("counts must be non-negative")
    total = c.sum()
    if total <= 0:
        raise DomainError("joint counts are all zero")
    pxy = c / total
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    nz = pxy > 0
    mi = float(np.sum(pxy[nz] * np.log2(pxy[nz] / (px @ py)[nz])))
    return max(0.0, mi)


def metric_value(snapshot: CalibrationSnapshot, metric: str, qubit: int) -> float:
    if metric == "duty_cycle":
        return duty_cycle(snapshot, qubit)
    if metric not in METRICS:
        raise KeyError(f"unknown metric {metric!r}; choose from {METRICS}")
    return getattr(snapshot.qubit(qubit), metric)


@dataclass(frozen=True)
class MetricWindow:
    metric: str
    qubit: int
    start: int
    end: int
    samples: np.ndarray = field(repr=False)
    fit: Optional[BetaModel] = None
    flag: Optional[str] = None  # why no fit is attached


def metric_window(
    snapshots: Sequence[CalibrationSnapshot],
    metric: str,
    qubit: int,
    time_range: tuple[int, int],
) -> MetricWindow:
    """Samples of one metric for one qubit with start <= timestamp <= end."""
    start, end = time_range
    vals = [
        metric_value(s, metric, qubit)
        for s in snapshots
        if start <= s.timestamp <= end and any(q.index == qubit for q in s.qubits)
    ]
    samples = np.array(vals, dtype=float)
    fit, flag = None, None
    if samples.size < 2:
        flag = "insufficient-samples"
    elif metric not in UNIT_INTERVAL_METRICS:
        flag = "not-unit-interval"
    elif np.all(samples == samples[0]):
        flag = "zero-variance"
    else:
        try:
            fit = fit_beta(samples)
        except FitError:
            flag = "infeasible-moments"
    return MetricWindow(metric, qubit, start, end, samples, fit, flag)


@dataclass(frozen=True)
class ReliabilityVerdict:
    metric: str
    windows: tuple[tuple[int, int], tuple[int, int]]
    hellinger: float
    threshold: float

    @property
    def stationary(self) -> bool:
        return self.hellinger <= self.threshold

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "windows": [list(w) for w in self.windows],
            "hellinger": self.hellinger,
            "threshold": self.threshold,
            "stationary": self.stationary,
        }


def compare_windows(w1: MetricWindow, w2: MetricWindow, threshold: float = DEFAULT_THRESHOLD) -> ReliabilityVerdict:
    if w1.fit is None or w2.fit is None:
        missing = [f"[{w.start}, {w.end}] ({w.flag})" for w in (w1, w2) if w.fit is None]
        raise FitError(f"window(s) without a beta fit: {', '.join(missing)}")
    if w1.fit == w2.fit:
        d = 0.0
    else:
        d = hellinger_beta(w1.fit, w2.fit)
    return ReliabilityVerdict(w1.metric, ((w1.start, w1.end), (w2.start, w2.end)), d, float(threshold))


@dataclass(frozen=True)
class SpatialSpread:
    min: float
    max: float
    mean: float
    std: float
    count: int


def spatial_spread(snapshot: CalibrationSnapshot, metric: str) -> SpatialSpread:
    """Across-qubit summary of one metric (population standard deviation)."""
    if not snapshot.qubits:
        raise DomainError(f"snapshot at {snapshot.timestamp} has no qubit records")
    x = np.array([metric_value(snapshot, metric, q.index) for q in snapshot.qubits])
    return SpatialSpread(float(x.min()), float(x.max()), float(x.mean()), float(x.std()), int(x.size))
