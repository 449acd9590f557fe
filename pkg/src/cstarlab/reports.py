"""Verdict records shared by the property checks, the CLI and the tests."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class CheckResult:
    """Outcome of one check.

    ``bound="upper"`` passes when ``max_residual <= tolerance``; a negative
    control uses ``bound="lower"`` and passes when the residual is at least
    ``tolerance``.
    """

    check: str
    max_residual: float
    tolerance: float
    witness: Any = None
    samples: int = 0
    bound: str = "upper"
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        r = self.max_residual
        if r is None or math.isnan(r):
            return False
        if self.bound == "lower":
            return bool(r >= self.tolerance)
        return bool(r <= self.tolerance)

    def to_dict(self) -> dict:
        d = {
            "check": self.check,
            "max_residual": _plain(self.max_residual),
            "witness": _plain(self.witness),
            "tolerance": _plain(self.tolerance),
            "pass": self.passed,
        }
        if self.samples:
            d["samples"] = int(self.samples)
        if self.bound != "upper":
            d["bound"] = self.bound
        if self.info:
            d["info"] = _plain(self.info)
        return d

    def line(self) -> str:
        op = ">=" if self.bound == "lower" else "<="
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict}  {self.check}: {self.max_residual:.3e} {op} {self.tolerance:.1e}"


class MaxTracker:
    """Running maximum with the witness that produced it."""

    def __init__(self):
        self.value = 0.0
        self.witness = None
        self.count = 0

    def update(self, value: float, witness=None) -> None:
        self.count += 1
        value = float(value)
        if self.witness is None or value > self.value or math.isnan(value):
            self.value = value
            self.witness = witness

    def result(self, check: str, tolerance: float, **kw) -> CheckResult:
        return CheckResult(check, self.value, tolerance, self.witness, self.count, **kw)


def observed_orders(ns, residuals) -> list[float]:
    """Convergence orders log2(r_k / r_{k+1}) for successive mesh doublings."""
    out = []
    for (n0, r0), (n1, r1) in zip(zip(ns, residuals), zip(ns[1:], residuals[1:])):
        out.append(float(np.log(r0 / r1) / np.log(n1 / n0)))
    return out


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x
