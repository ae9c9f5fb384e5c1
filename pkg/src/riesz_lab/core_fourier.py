"""Trigonometric polynomials and grid functions on the unit circle.

Conventions
-----------
Angles are in radians, ``t = 2*pi*x`` with ``x`` in ``[0, 1)``.  The circle
carries the normalised measure, so ``coeff(n) = (1/M) sum_k f(x_k) exp(-2 pi i n k / M)``
on an ``M``-point grid.  A :class:`TrigPoly` of degree ``K`` stores the
coefficients of frequencies ``-K..K`` in a single array indexed by ``n + K``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import AliasingRisk, ArcTooFine, BudgetExceeded

TWO_PI = 2.0 * math.pi
DEFAULT_BUDGET = 2**20
BUDGET_ENV = "RIESZ_LAB_BUDGET"
REAL_TOL = 1e-12


def coefficient_budget() -> int:
    """Maximum number of stored coefficients ``2K+1`` for any single polynomial."""
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_BUDGET
    return int(raw)


def check_budget(degree: int, what: str = "polynomial") -> None:
    budget = coefficient_budget()
    if 2 * degree + 1 > budget:
        raise BudgetExceeded(
            f"{what} needs {2 * degree + 1} coefficients, budget is {budget}"
        )


def next_pow2(n: int) -> int:
    n = int(n)
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Finite Fourier series ``sum_{|n|<=K} c_n zeta^n``.

    Parameters
    ----------
    coeffs : array_like
        Complex coefficients of frequencies ``-K..K`` (odd length ``2K+1``).
    real_valued : bool
        When true the coefficients must satisfy ``c_{-n} = conj(c_n)``.
    """

    coeffs: np.ndarray
    real_valued: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size % 2 == 0:
            raise ValueError("coefficient array must have odd length 2K+1")
        if self.real_valued:
            scale = max(1.0, float(np.max(np.abs(c))))
            err = float(np.max(np.abs(c - np.conj(c[::-1]))))
            if err > REAL_TOL * scale:
                raise ValueError(f"real_valued poly is not conjugate symmetric (err {err:.3g})")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction
    @classmethod
    def zeros(cls, degree: int, real_valued: bool = True) -> "TrigPoly":
        return cls(np.zeros(2 * degree + 1, dtype=complex), real_valued)

    @classmethod
    def constant(cls, value: complex = 1.0) -> "TrigPoly":
        return cls(np.array([value], dtype=complex), np.imag(value) == 0)

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, complex], degree: int | None = None,
                     real_valued: bool = False) -> "TrigPoly":
        K = max((abs(int(n)) for n in mapping), default=0)
        K = K if degree is None else max(K, degree)
        c = np.zeros(2 * K + 1, dtype=complex)
        for n, v in mapping.items():
            c[int(n) + K] = v
        return cls(c, real_valued)

    @classmethod
    def symmetrized(cls, coeffs: np.ndarray) -> "TrigPoly":
        """Real part of the series with the given coefficients, flagged real."""
        c = np.asarray(coeffs, dtype=complex)
        return cls(0.5 * (c + np.conj(c[::-1])), True)

    # access
    @property
    def degree(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def frequencies(self) -> np.ndarray:
        K = self.degree
        return np.arange(-K, K + 1)

    def coeff(self, n: int) -> complex:
        K = self.degree
        return complex(self.coeffs[n + K]) if abs(n) <= K else 0.0j

    def coeffs_at(self, freqs) -> np.ndarray:
        freqs = np.asarray(freqs, dtype=np.int64)
        K = self.degree
        out = np.zeros(freqs.shape, dtype=complex)
        ok = np.abs(freqs) <= K
        out[ok] = self.coeffs[freqs[ok] + K]
        return out

    def padded(self, degree: int) -> "TrigPoly":
        K = self.degree
        if degree < K:
            raise ValueError("padded degree must not shrink the polynomial")
        c = np.zeros(2 * degree + 1, dtype=complex)
        c[degree - K:degree + K + 1] = self.coeffs
        return TrigPoly(c, self.real_valued)

    def truncated(self, degree: int) -> "TrigPoly":
        K = self.degree
        if degree >= K:
            return self
        return TrigPoly(self.coeffs[K - degree:K + degree + 1], self.real_valued)

    def trimmed(self, tol: float = 0.0) -> "TrigPoly":
        """Drop outer coefficients with modulus ``<= tol``."""
        K = self.degree
        idx = np.nonzero(np.abs(self.coeffs) > tol)[0]
        if idx.size == 0:
            return TrigPoly.zeros(0, self.real_valued)
        k = int(max(abs(idx[0] - K), abs(idx[-1] - K)))
        return self.truncated(k)

    def real_part(self) -> "TrigPoly":
        return TrigPoly.symmetrized(self.coeffs)

    def energy(self, mask: np.ndarray | None = None) -> float:
        a = np.abs(self.coeffs) ** 2
        return float(np.sum(a if mask is None else a[mask]))

    def support(self, tol: float = 0.0) -> np.ndarray:
        return self.frequencies[np.abs(self.coeffs) > tol]

    # arithmetic
    def _binary(self, other: "TrigPoly", sign: float) -> "TrigPoly":
        K = max(self.degree, other.degree)
        a, b = self.padded(K), other.padded(K)
        return TrigPoly(a.coeffs + sign * b.coeffs, self.real_valued and other.real_valued)

    def __add__(self, other):
        if isinstance(other, TrigPoly):
            return self._binary(other, 1.0)
        return self + TrigPoly.constant(other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, TrigPoly):
            return self._binary(other, -1.0)
        return self - TrigPoly.constant(other)

    def __neg__(self):
        return TrigPoly(-self.coeffs, self.real_valued)

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return pointwise_product(self, other)
        real = self.real_valued and np.imag(other) == 0
        return TrigPoly(self.coeffs * other, bool(real))

    __rmul__ = __mul__

    # evaluation
    def __call__(self, t) -> np.ndarray:
        """Evaluate at angles ``t`` (radians) by direct summation."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.exp(1j * np.outer(t, self.frequencies)) @ self.coeffs
        return out.real if self.real_valued else out

    def samples(self, M: int) -> "GridFunction":
        return idft(self, M)

    # serialisation
    def to_json(self) -> str:
        rows = [[int(n), float(c.real), float(c.imag)] for n, c in zip(self.frequencies, self.coeffs)]
        return json.dumps({"degree": self.degree, "coeffs": rows}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, real_valued: bool | None = None) -> "TrigPoly":
        obj = json.loads(text)
        if set(obj) != {"coeffs", "degree"}:
            raise ValueError("TrigPoly JSON needs exactly 'degree' and 'coeffs'")
        K = int(obj["degree"])
        ns = [int(r[0]) for r in obj["coeffs"]]
        if ns != sorted(ns) or len(set(ns)) != len(ns):
            raise ValueError("frequencies must be strictly ascending")
        mapping = {n: complex(r[1], r[2]) for n, r in zip(ns, obj["coeffs"])}
        p = cls.from_mapping(mapping, degree=K)
        return _maybe_real(p, real_valued)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "re", "im"])
        for n, c in zip(self.frequencies, self.coeffs):
            w.writerow([int(n), repr(float(c.real)), repr(float(c.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, real_valued: bool | None = None) -> "TrigPoly":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [h.strip() for h in rows[0]] != ["n", "re", "im"]:
            raise ValueError("TrigPoly CSV header must be n,re,im")
        ns, vals = [], []
        for r in rows[1:]:
            if not r:
                continue
            ns.append(int(r[0]))
            vals.append(complex(float(r[1]), float(r[2])))
        if ns != sorted(ns) or len(set(ns)) != len(ns):
            raise ValueError("frequencies must be strictly ascending")
        p = cls.from_mapping(dict(zip(ns, vals)))
        return _maybe_real(p, real_valued)


def _maybe_real(p: TrigPoly, real_valued: bool | None) -> TrigPoly:
    if real_valued is False:
        return p
    c = p.coeffs
    sym = float(np.max(np.abs(c - np.conj(c[::-1])))) <= REAL_TOL * max(1.0, float(np.max(np.abs(c))))
    if real_valued and not sym:
        raise ValueError("coefficients are not conjugate symmetric")
    return TrigPoly(c, sym)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples on the ``M``-point grid ``x_k = k/M`` (``M`` a power of two)."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples)
        if s.ndim != 1 or not _is_pow2(s.size):
            raise ValueError("grid size must be a power of two")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def M(self) -> int:
        return self.samples.size

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.M) / self.M

    @property
    def angles(self) -> np.ndarray:
        return TWO_PI * self.positions

    def mean(self) -> complex:
        return complex(np.mean(self.samples))

    def mask(self, arc: "Arc") -> np.ndarray:
        return arc.mask(self.M)


@dataclass(frozen=True)
class Arc:
    """Half-open arc ``[center - pi*length, center + pi*length)`` with wraparound.

    ``center`` is an angle in radians; ``length`` is normalised (full circle = 1).
    """

    center: float
    length: float

    def __post_init__(self):
        if not (0.0 < self.length <= 1.0):
            raise ValueError("arc length must lie in (0, 1]")
        object.__setattr__(self, "center", float(self.center) % TWO_PI)

    @classmethod
    def from_start(cls, start: float, length: float) -> "Arc":
        """Arc beginning at normalised position ``start``."""
        return cls(TWO_PI * (start + 0.5 * length), length)

    @classmethod
    def dyadic(cls, k: int, level: int) -> "Arc":
        return cls.from_start(k / 2**level, 1.0 / 2**level)

    @property
    def start(self) -> float:
        # snap to the 2^-40 lattice so dyadic arcs tile grids without overlap
        s = (self.center / TWO_PI - 0.5 * self.length) % 1.0
        r = round(s * 2.0**40) / 2.0**40
        return (r if abs(s - r) < 1e-13 else s) % 1.0

    def contains_position(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.length >= 1.0:
            return np.ones(x.shape, dtype=bool)
        return np.mod(x - self.start, 1.0) < self.length

    def contains(self, t) -> np.ndarray:
        return self.contains_position(np.asarray(t, dtype=float) / TWO_PI)

    def mask(self, M: int) -> np.ndarray:
        return self.contains_position(np.arange(M) / M)

    def distance(self, x) -> np.ndarray:
        """Normalised arc-length distance from positions ``x`` to the arc."""
        x = np.asarray(x, dtype=float)
        d = np.mod(x - self.start, 1.0)
        out = np.minimum(d - self.length, 1.0 - d)
        return np.where(d < self.length, 0.0, out)


def dyadic_arcs(level: int = 4) -> list[Arc]:
    return [Arc.dyadic(k, level) for k in range(2**level)]


@dataclass(frozen=True)
class BlockSpectrum:
    """Frequency blocks ``lo_j <= |n| <= hi_j``; consecutive blocks may touch but not overlap."""

    blocks: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for lo, hi in self.blocks:
            if lo > hi:
                raise ValueError("empty block")

    def __len__(self):
        return len(self.blocks)

    def index_of(self, freqs) -> np.ndarray:
        """Lowest block index (1-based) containing ``|n|``, 0 if none."""
        m = np.abs(np.asarray(freqs, dtype=np.int64))
        out = np.zeros(m.shape, dtype=np.int64)
        for j in range(len(self.blocks), 0, -1):
            lo, hi = self.blocks[j - 1]
            out[(m >= lo) & (m <= hi)] = j
        return out

    def union_mask(self, freqs, include_zero: bool = True) -> np.ndarray:
        m = np.abs(np.asarray(freqs, dtype=np.int64))
        inside = self.index_of(m) > 0
        return inside | (m == 0) if include_zero else inside


@dataclass(frozen=True)
class AliasingPolicy:
    """Grid choice for products; ``grid_size`` forces a specific grid."""

    grid_size: int | None = None

    @staticmethod
    def required(deg_f: int, deg_g: int) -> int:
        return next_pow2(2 * (deg_f + deg_g) + 1)

    def grid_for(self, deg_f: int, deg_g: int) -> int:
        need = self.required(deg_f, deg_g)
        if self.grid_size is None:
            return need
        if not _is_pow2(self.grid_size):
            raise ValueError("grid size must be a power of two")
        if self.grid_size < need:
            raise AliasingRisk(f"grid {self.grid_size} below required {need}")
        return self.grid_size


def dft(g: GridFunction, keep_nyquist: bool = False) -> TrigPoly:
    """Coefficients ``|n| <= M/2 - 1`` of the grid function.

    The Nyquist term is dropped unless ``keep_nyquist``, in which case it is
    split evenly between ``+-M/2`` and the result reproduces every sample.
    """
    M = g.M
    if M < 2:
        return TrigPoly.constant(complex(g.samples[0]))
    c = np.fft.fft(g.samples) / M
    h = M // 2 - 1
    coeffs = np.concatenate([c[M - h:], c[:h + 1]])
    if keep_nyquist:
        half = 0.5 * c[M // 2]
        coeffs = np.concatenate([[half], coeffs, [half]])
    if np.isrealobj(g.samples):
        return TrigPoly.symmetrized(coeffs)
    return TrigPoly(coeffs)


def idft(p: TrigPoly, M: int) -> GridFunction:
    """Exact samples of ``p`` on the ``M``-point grid (frequencies folded mod ``M``)."""
    if not _is_pow2(M):
        raise ValueError("grid size must be a power of two")
    arr = np.zeros(M, dtype=complex)
    np.add.at(arr, np.mod(p.frequencies, M), p.coeffs)
    s = np.fft.ifft(arr) * M
    return GridFunction(s.real if p.real_valued else s)


def pointwise_product(f: TrigPoly, g: TrigPoly, guard: AliasingPolicy | None = None) -> TrigPoly:
    """Exact product of two polynomials computed on an alias-free grid."""
    guard = guard or AliasingPolicy()
    K = f.degree + g.degree
    M = guard.grid_for(f.degree, g.degree)
    check_budget(K, "product")
    fs = idft(f, M).samples
    gs = idft(g, M).samples
    c = np.fft.fft(fs * gs) / M
    coeffs = np.concatenate([c[M - K:], c[:K + 1]]) if K > 0 else c[:1]
    if f.real_valued and g.real_valued:
        return TrigPoly.symmetrized(coeffs)
    return TrigPoly(coeffs)


def norm_weighted_l2(f: TrigPoly, w, exclude_zero: bool = False) -> float:
    """``(sum_n |c_n|^2 w_{|n|})^(1/2)``; ``w`` is a weight sequence or array."""
    K = f.degree
    wv = w.array(K) if hasattr(w, "array") else np.asarray(w, dtype=float)[:K + 1]
    if wv.size < K + 1:
        raise ValueError("weight sequence shorter than polynomial degree")
    a = np.abs(f.coeffs) ** 2 * wv[np.abs(f.frequencies)]
    if exclude_zero:
        a[K] = 0.0
    return math.sqrt(float(np.sum(a)))


def is_n_sparse(freqs: Iterable[int], N: float) -> bool:
    """Whether ``|n|/|m| >= N`` for every pair with ``|n| > |m| > 0``."""
    mods = sorted({abs(int(n)) for n in freqs} - {0})
    return all(b >= N * a for a, b in zip(mods, mods[1:]))


def ess_sup_on_arc(g: GridFunction, arc: Arc, min_points: int = 8, closed: bool = False) -> float:
    """Largest ``|g|`` over grid points of the arc.

    With ``closed`` the grid point at the right endpoint is included when the
    endpoint lies on the grid; for samples of a continuous function this is
    the supremum over the closed arc.
    """
    mask = arc.mask(g.M)
    if int(mask.sum()) < min_points:
        raise ArcTooFine(f"only {int(mask.sum())} grid points in arc (need {min_points})")
    if closed and arc.length < 1.0:
        end = (arc.start + arc.length) * g.M
        k = round(end)
        if abs(end - k) < 1e-9:
            mask = mask.copy()
            mask[k % g.M] = True
    return float(np.max(np.abs(g.samples[mask])))


def eval_grid_size(degree: int, factor: int = 8, minimum: int = 4096) -> int:
    """Dense evaluation grid for sign and support checks."""
    return max(minimum, next_pow2(factor * max(degree, 1)))
