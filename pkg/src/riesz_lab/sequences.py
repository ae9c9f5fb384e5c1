"""Weight sequences, amplitude generators and summability diagnostics."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import Overflow, ScheduleViolation

FAMILIES = ("power", "explicit", "necreg", "custom")


@dataclass(frozen=True, eq=False)
class WeightSeq:
    """Positive sequence ``w_0, w_1, ...`` indexed by frequency modulus.

    ``power`` sequences ``(1+n)^s`` are evaluated in the log domain so that
    indices far beyond float range (``4**j`` for large ``j``) stay exact.
    ``explicit``/``necreg`` sequences hold a finite table and raise
    :class:`Overflow` past its end.
    """

    family: str
    params: dict = field(default_factory=dict)
    table: np.ndarray | None = None
    func: Callable[[int], float] | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown weight family {self.family!r}")
        if self.table is not None:
            t = np.array(self.table, dtype=float)
            if t.ndim != 1 or t.size == 0 or np.any(~np.isfinite(t)) or np.any(t <= 0):
                raise ValueError("weights must be finite and positive")
            t.setflags(write=False)
            object.__setattr__(self, "table", t)

    @classmethod
    def power(cls, s: float) -> "WeightSeq":
        return cls("power", {"s": float(s)})

    @classmethod
    def explicit(cls, values: Sequence[float], **params) -> "WeightSeq":
        return cls("explicit", dict(params), np.asarray(values, dtype=float))

    @classmethod
    def custom(cls, func: Callable[[int], float], name: str = "custom") -> "WeightSeq":
        return cls("custom", {"name": name}, None, func)

    @property
    def n_max(self) -> int | None:
        return None if self.table is None else self.table.size - 1

    def log_value(self, n: int) -> float:
        n = int(n)
        if n < 0:
            raise ValueError("weights are indexed by n >= 0")
        if self.family == "power":
            return self.params["s"] * math.log(n + 1)
        if self.table is not None:
            if n > self.n_max:
                raise Overflow(f"index {n} beyond weight table end {self.n_max}")
            return math.log(self.table[n])
        return math.log(self.func(n))

    def __call__(self, n: int) -> float:
        n = int(n)
        if n < 0:
            raise ValueError("weights are indexed by n >= 0")
        if self.table is not None:
            if n > self.n_max:
                raise Overflow(f"index {n} beyond weight table end {self.n_max}")
            return float(self.table[n])
        if self.family == "custom":
            return float(self.func(n))
        if n < 2**900:
            return float(n + 1) ** self.params["s"]
        return math.exp(self.log_value(n))

    def array(self, n_max: int) -> np.ndarray:
        """``w_0..w_{n_max}`` as floats."""
        if self.family == "power":
            return np.power(np.arange(n_max + 1, dtype=float) + 1.0, self.params["s"])
        if self.table is not None:
            if n_max > self.n_max:
                raise Overflow(f"need w up to {n_max}, table ends at {self.n_max}")
            return self.table[:n_max + 1].copy()
        return np.array([self.func(n) for n in range(n_max + 1)], dtype=float)

    def to_csv(self, n_max: int | None = None) -> str:
        n_max = self.n_max if n_max is None else n_max
        if n_max is None:
            raise ValueError("n_max required for unbounded families")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "value"])
        for n, v in enumerate(self.array(n_max)):
            w.writerow([n, repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "WeightSeq":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [h.strip() for h in rows[0]] != ["n", "value"]:
            raise ValueError("weight CSV header must be n,value")
        body = [r for r in rows[1:] if r]
        ns = [int(r[0]) for r in body]
        if ns != list(range(len(ns))):
            raise ValueError("weight CSV must list n = 0, 1, 2, ... without gaps")
        return cls.explicit([float(r[1]) for r in body])


def parse_weight_spec(spec: str, read=None) -> WeightSeq:
    """Parse ``power:s``, ``csv:path`` or ``necreg:path[:n_max]``."""
    kind, _, rest = spec.partition(":")
    read = read or (lambda p: open(p, encoding="utf-8").read())
    if kind == "power":
        return WeightSeq.power(float(rest))
    if kind == "csv":
        return WeightSeq.from_csv(read(rest))
    if kind == "necreg":
        path, _, nm = rest.partition(":")
        sched = NecregSchedule.from_json(read(path))
        n_max = int(nm) if nm else 4 * sched.N[-1]
        return necreg_weights(sched, n_max)
    raise ValueError(f"unknown weight spec {spec!r}")


# amplitude generator for divergent weighted sums

@dataclass(frozen=True, eq=False)
class AmplitudePlan:
    a: np.ndarray
    d: np.ndarray
    provenance: str

    @property
    def count(self) -> int:
        return self.a.size

    def divergent_partial_sums(self) -> np.ndarray:
        return np.cumsum(self.a)

    def weighted_partial_sums(self) -> np.ndarray:
        """Partial sums of ``a_j^2 / d_j``."""
        return np.cumsum(self.a**2 / self.d)


def seq1_amplitudes(lam: WeightSeq, count: int) -> AmplitudePlan:
    """Amplitudes ``a_j = d_j / (2 (1 + d_1 + ... + d_j))`` with ``d_j = min(1, 4^j / lam_{4^j})``."""
    if count < 1:
        raise ValueError("count must be positive")
    d = np.empty(count)
    for j in range(1, count + 1):
        d[j - 1] = min(1.0, _ratio_4j(lam, j))
    D = np.cumsum(d)
    a = 0.5 * d / (1.0 + D)
    return AmplitudePlan(a, d, f"seq1[{lam.family}:{json.dumps(lam.params, sort_keys=True)}]")


def _ratio_4j(lam: WeightSeq, j: int) -> float:
    """``4^j / lam_{4^j}``, directly while representable, else in the log domain."""
    if j <= 400:
        return float(4**j) / lam(4**j)
    x = j * math.log(4.0) - lam.log_value(4**j)
    return math.inf if x > 700 else math.exp(x)


def max_ratio_weights(lam: WeightSeq, count: int) -> np.ndarray:
    """``max(1, lam_{4^j} 4^{-j})`` for ``j = 1..count``."""
    return np.array([max(1.0, 1.0 / _ratio_4j(lam, j)) for j in range(1, count + 1)])


# necessary-regularity weights

@dataclass(frozen=True)
class NecregSchedule:
    N: tuple[int, ...]
    eps: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "N", tuple(int(n) for n in self.N))
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        if len(self.N) != len(self.eps) or not self.N:
            raise ScheduleViolation("N and eps must be non-empty and of equal length")
        if self.N[0] < 1 or any(not (0 < e <= 1) for e in self.eps):
            raise ScheduleViolation("need N_1 >= 1 and eps_k in (0, 1]")
        for k in range(len(self.N) - 1):
            if not self.N[k + 1] > 10 * self.N[k]:
                raise ScheduleViolation(f"N[{k + 1}]={self.N[k + 1]} not > 10*N[{k}]={10 * self.N[k]}")
            if not self.eps[k + 1] < self.eps[k] / 10:
                raise ScheduleViolation(f"eps[{k + 1}]={self.eps[k + 1]} not < eps[{k}]/10")

    def to_json(self) -> str:
        return json.dumps({"N": list(self.N), "eps": list(self.eps)}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NecregSchedule":
        obj = json.loads(text)
        if set(obj) != {"N", "eps"}:
            raise ScheduleViolation("schedule JSON needs exactly keys N and eps")
        return cls(tuple(obj["N"]), tuple(obj["eps"]))

    def gaps(self, n_max: int) -> list[tuple[int, int, int, float]]:
        """``(k, lo, hi, eps_k)`` for the open gaps ``N_k < n < N_{k+1}`` up to ``n_max``."""
        out = []
        for k, (n, e) in enumerate(zip(self.N, self.eps)):
            hi = self.N[k + 1] if k + 1 < len(self.N) else n_max + 1
            if n + 1 <= min(hi - 1, n_max):
                out.append((k + 1, n + 1, min(hi - 1, n_max), e))
        return out


def necreg_weights(schedule: NecregSchedule, n_max: int) -> WeightSeq:
    """``w_{N_k} = eps_k``, ``w_n = eps_k^{-2}`` on ``N_k < n < N_{k+1}``; ``w_n = 1`` below ``N_1``."""
    if n_max < schedule.N[0]:
        raise ScheduleViolation("n_max must reach N_1")
    w = np.ones(n_max + 1)
    for k, (n, e) in enumerate(zip(schedule.N, schedule.eps)):
        if n > n_max:
            break
        hi = schedule.N[k + 1] if k + 1 < len(schedule.N) else n_max + 1
        w[n] = e
        w[n + 1:min(hi, n_max + 1)] = e**-2
    return WeightSeq("necreg", {"N": list(schedule.N), "eps": list(schedule.eps)}, w)


# regularity constants

@dataclass(frozen=True)
class RegularityReport:
    M: int
    n_max: int
    A_growth: float
    A_tail: float
    A: float
    A_quarter: float
    growth_at_nmax: float
    tail_at_nmax: float
    trend: str


def check_regularity(w: WeightSeq, M: int, n_max: int) -> RegularityReport:
    """Smallest empirical ``A`` with

    ``sum_{j<=n} (1+j)^(M-1) w_j <= A n^M w_n`` and
    ``sum_{j>=n} w_j / j^(M+1) <= A w_n / n^M`` for ``1 <= n <= n_max``.

    The tail sum is truncated at ``4 n_max``.  ``A_quarter`` is the same
    constant over ``n <= n_max/4``; growth beyond 10% is flagged.
    """
    if M < 1 or n_max < 4:
        raise ValueError("need M >= 1 and n_max >= 4")
    top = 4 * n_max
    wv = w.array(top)
    j = np.arange(top + 1, dtype=float)
    head = np.cumsum((1.0 + j) ** (M - 1) * wv)
    terms = np.zeros(top + 1)
    terms[1:] = wv[1:] / j[1:] ** (M + 1)
    tail = np.cumsum(terms[::-1])[::-1]
    n = np.arange(1, n_max + 1)
    growth = head[n] / (n.astype(float) ** M * wv[n])
    tailr = tail[n] / (wv[n] / n.astype(float) ** M)
    both = np.maximum(growth, tailr)
    A = float(both.max())
    Aq = float(both[: max(1, n_max // 4)].max())
    trend = "unbounded" if A > 1.1 * Aq else "stable"
    return RegularityReport(M, n_max, float(growth.max()), float(tailr.max()), A, Aq,
                            float(growth[-1]), float(tailr[-1]), trend)


def doubling_constant(w: WeightSeq, n_max: int) -> float:
    """``sup max(w_k/w_n, w_n/w_k)`` over ``1 <= n <= k <= 2n <= 2 n_max``."""
    wv = np.log(w.array(2 * n_max))
    best = 0.0
    for n in range(1, n_max + 1):
        seg = wv[n:2 * n + 1] - wv[n]
        best = max(best, float(np.max(np.abs(seg))))
    return math.exp(best)


# divergence diagnostics

@dataclass(frozen=True)
class DivergenceReport:
    checkpoints: tuple[int, ...]
    partial_sums: tuple[float, ...]
    last_increment: float
    previous_increment: float
    tol: float
    label: str


def divergence_diagnostics(x: Sequence[float], tol: float = 1e-3) -> DivergenceReport:
    """Label a nonnegative series by its partial sums at dyadic checkpoints.

    ``divergent-like`` when the last-octave increment is at least ``tol``,
    ``convergent-like`` when it is below ``tol`` and shrinking, and
    ``inconclusive`` otherwise.
    """
    x = np.asarray(x, dtype=float)
    if x.size < 64:
        raise ValueError("need at least 64 terms")
    if np.any(x < 0):
        raise ValueError("terms must be nonnegative")
    S = np.cumsum(x)
    cps = [2**k for k in range(int(math.log2(x.size)) + 1)]
    sums = [float(S[c - 1]) for c in cps]
    last = sums[-1] - sums[-2]
    prev = sums[-2] - sums[-3]
    if last >= tol:
        label = "divergent-like"
    elif last <= 0.9 * prev or last == 0.0:
        label = "convergent-like"
    else:
        label = "inconclusive"
    return DivergenceReport(tuple(cps), tuple(sums), last, prev, tol, label)


def reciprocal_terms(lam: WeightSeq, length: int) -> np.ndarray:
    """``1/lam_n`` for ``n = 1..length``."""
    return 1.0 / lam.array(length)[1:]
