from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Certificate:
    name: str
    measured: float
    bound: float
    passed: bool
    tolerance: float

    def to_dict(self) -> dict:
        return {"name": self.name, "measured": _num(self.measured), "bound": _num(self.bound),
                "pass": bool(self.passed), "tolerance": _num(self.tolerance)}

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        return cls(d["name"], float(d["measured"]), float(d["bound"]), bool(d["pass"]),
                   float(d["tolerance"]))


def _num(x: float):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def at_most(name: str, measured: float, bound: float, tol: float = 0.0) -> Certificate:
    return Certificate(name, float(measured), float(bound), bool(measured <= bound + tol), tol)


def at_least(name: str, measured: float, bound: float, tol: float = 0.0) -> Certificate:
    return Certificate(name, float(measured), float(bound), bool(measured >= bound - tol), tol)


def all_passed(certs) -> bool:
    return all(c.passed for c in certs)
