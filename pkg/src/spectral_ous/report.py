"""Verification reports and their text encoding.

Reports are written as indented key/value text (a YAML subset) with a fixed
key order, so identical runs give identical bytes and files diff cleanly.
Wall time is kept on the object but only written when asked for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import yaml

PASS, FAIL, UNKNOWN = "pass", "fail", "unknown"


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if x is None or isinstance(x, str):
        return x
    return str(x)


@dataclass
class Check:
    max_residual: float
    tolerance: float
    verdict: str
    trials: int = 0

    def to_dict(self):
        return {"max_residual": _plain(self.max_residual), "tolerance": _plain(self.tolerance),
                "verdict": self.verdict, "trials": int(self.trials)}


@dataclass
class Witness:
    label: str
    elements: list
    residual: float

    def to_dict(self):
        return {"label": self.label, "elements": list(self.elements),
                "residual": _plain(self.residual)}


@dataclass
class VerificationReport:
    """Outcome of a check suite or a counterexample search."""

    suite: str
    model: str
    seed: int | None = None
    trials: int = 0
    verdict: str = PASS
    max_residual: float = 0.0
    checks: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    wall_time: float | None = field(default=None, compare=False)

    @property
    def passed(self):
        return self.verdict == PASS

    def add_check(self, name, residual, tolerance, trials=0, higher_is_worse=True):
        """Record a residual check; the verdict is ``residual <= tolerance``."""
        residual = float(residual)
        ok = residual <= tolerance if higher_is_worse else residual >= tolerance
        if math.isnan(residual):
            ok = False
        self.checks[name] = Check(residual, float(tolerance), PASS if ok else FAIL, trials)
        self._refresh()
        return ok

    def add_flag(self, name, ok, trials=0):
        self.checks[name] = Check(0.0 if ok else 1.0, 0.0, PASS if ok else FAIL, trials)
        self._refresh()
        return ok

    def add_witness(self, label, elements, residual):
        self.witnesses.append(Witness(label, [str(e) for e in elements], float(residual)))

    def mark_unknown(self, reason):
        self.verdict = UNKNOWN
        self.details.setdefault("unknown_reason", reason)

    def _refresh(self):
        if self.verdict == UNKNOWN:
            return
        self.verdict = FAIL if any(c.verdict == FAIL for c in self.checks.values()) else PASS
        vals = [c.max_residual for c in self.checks.values()]
        self.max_residual = max(vals) if vals else 0.0

    def merge(self, other, prefix):
        """Fold another report's checks and witnesses under ``prefix/``."""
        for name, chk in other.checks.items():
            self.checks[f"{prefix}/{name}"] = chk
        self.witnesses.extend(Witness(f"{prefix}/{w.label}", w.elements, w.residual)
                              for w in other.witnesses)
        if other.details:
            self.details[prefix] = other.details
        if other.verdict == UNKNOWN and self.verdict != FAIL:
            self.verdict = UNKNOWN
        self._refresh()

    def to_dict(self, include_timing=False):
        d = {
            "suite": self.suite,
            "model": self.model,
            "seed": self.seed,
            "trials": int(self.trials),
            "verdict": self.verdict,
            "max_residual": _plain(self.max_residual),
            "config": _plain(self.config),
            "checks": {k: v.to_dict() for k, v in self.checks.items()},
            "witnesses": [w.to_dict() for w in self.witnesses],
            "details": _plain(self.details),
        }
        if include_timing and self.wall_time is not None:
            d["wall_time"] = float(self.wall_time)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(
            suite=d["suite"], model=d["model"], seed=d.get("seed"), trials=d.get("trials", 0),
            verdict=d["verdict"], max_residual=d.get("max_residual", 0.0),
            checks={k: Check(**v) for k, v in (d.get("checks") or {}).items()},
            witnesses=[Witness(**w) for w in (d.get("witnesses") or [])],
            details=d.get("details") or {}, config=d.get("config") or {},
            wall_time=d.get("wall_time"),
        )


def encode_report(report, include_timing=False):
    text = yaml.safe_dump(report.to_dict(include_timing), sort_keys=False,
                          default_flow_style=False, allow_unicode=False, width=1 << 16)
    return text if text.endswith("\n") else text + "\n"


def parse_report(text):
    return VerificationReport.from_dict(yaml.safe_load(text))


def emit_report(report, path, include_timing=False):
    """Write ``report`` to ``path``; raises ``OSError`` with the path on failure."""
    text = encode_report(report, include_timing)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return path


def load_report(path):
    with open(path, encoding="utf-8") as fh:
        return parse_report(fh.read())
