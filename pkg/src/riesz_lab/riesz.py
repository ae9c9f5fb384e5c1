"""Classical and adapted Riesz products.

classical: ``prod_j (1 + a_j Re zeta^{N_j})`` with ``N_{j+1}/N_j >= 3``, ``0 < a_j <= 1``.
adapted:   ``prod_j (1 + a_j Re T_{N_j})`` with ``N_{j+1}/N_j >= 4``, ``0 < a_j <= 1/2``,
where ``T_N`` is the Dirichlet-type kernel of :mod:`riesz_lab.kernels`.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .core_fourier import (BlockSpectrum, TrigPoly, check_budget, idft,
                           next_pow2, pointwise_product)
from .errors import BlocksOverlap, DomainError, SpecViolation
from .kernels import dirichlet_type

MAX_DEPTH = 8
KINDS = ("classical", "adapted")


@dataclass(frozen=True)
class RieszSpec:
    kind: str
    a: tuple[float, ...]
    N: tuple[int, ...]
    depth: int | None = None
    max_depth: int = MAX_DEPTH

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "N", tuple(int(x) for x in self.N))
        depth = len(self.a) if self.depth is None else int(self.depth)
        object.__setattr__(self, "depth", depth)
        if self.kind not in KINDS:
            raise SpecViolation(f"unknown kind {self.kind!r}")
        if len(self.a) != len(self.N):
            raise SpecViolation("a and N must have equal length")
        if not 0 <= depth <= len(self.a):
            raise SpecViolation("depth must lie in 0..len(a)")
        if depth > self.max_depth:
            raise SpecViolation(f"depth {depth} exceeds cap {self.max_depth}")
        ratio = 3 if self.kind == "classical" else 4
        a_max = 1.0 if self.kind == "classical" else 0.5
        for j, (aj, nj) in enumerate(zip(self.a, self.N)):
            if not 0 < aj <= a_max:
                raise SpecViolation(f"a[{j}]={aj} outside (0, {a_max}]")
            if nj < 1:
                raise SpecViolation(f"N[{j}]={nj} must be positive")
        for j in range(len(self.N) - 1):
            if self.N[j + 1] < ratio * self.N[j]:
                raise SpecViolation(f"N[{j + 1}]/N[{j}] = {self.N[j + 1] / self.N[j]:.3g} < {ratio}")

    @property
    def active_a(self) -> tuple[float, ...]:
        return self.a[:self.depth]

    @property
    def active_N(self) -> tuple[int, ...]:
        return self.N[:self.depth]

    @property
    def ratio(self) -> float:
        N = self.active_N
        return min((N[j + 1] / N[j] for j in range(len(N) - 1)), default=math.inf)

    def truncated(self, depth: int) -> "RieszSpec":
        return RieszSpec(self.kind, self.a, self.N, depth, self.max_depth)

    def degree(self) -> int:
        if self.kind == "classical":
            return sum(self.active_N)
        return sum(2 * n - 1 for n in self.active_N)


def _re_monomial(N: int, a: float) -> TrigPoly:
    c = np.zeros(2 * N + 1, dtype=complex)
    c[N] = 1.0
    c[0] += 0.5 * a
    c[2 * N] += 0.5 * a
    return TrigPoly(c, True)


def re_dirichlet(N: int) -> TrigPoly:
    return dirichlet_type(N).real_part()


def classical_partials(spec: RieszSpec) -> list[TrigPoly]:
    """``[sigma_0, sigma_1, ..., sigma_depth]`` with ``sigma_0 = 1``."""
    if spec.kind != "classical":
        raise SpecViolation("classical_partials needs a classical spec")
    check_budget(spec.degree(), "classical product")
    out = [TrigPoly.constant(1.0)]
    for aj, nj in zip(spec.active_a, spec.active_N):
        out.append(pointwise_product(out[-1], _re_monomial(nj, aj)))
    return out


def classical_partial(spec: RieszSpec) -> TrigPoly:
    return classical_partials(spec)[-1]


def adapted_partials(spec: RieszSpec) -> list[TrigPoly]:
    """``[P_0, ..., P_depth]`` by the recursion ``P_{j+1} = P_j + a_{j+1} P_j Re T_{N_{j+1}}``."""
    if spec.kind != "adapted":
        raise SpecViolation("adapted_partials needs an adapted spec")
    check_budget(spec.degree(), "adapted product")
    out = [TrigPoly.constant(1.0)]
    for aj, nj in zip(spec.active_a, spec.active_N):
        prev = out[-1]
        inc = pointwise_product(prev, re_dirichlet(nj))
        out.append(prev + aj * inc)
    return out


def adapted_partial(spec: RieszSpec) -> TrigPoly:
    return adapted_partials(spec)[-1]


def adapted_increments(spec: RieszSpec) -> list[TrigPoly]:
    """``R_j = a_j P_{j-1} Re T_{N_j}`` for ``j = 1..depth``."""
    P = adapted_partials(spec)
    return [P[j + 1] - P[j] for j in range(spec.depth)]


def direct_product(spec: RieszSpec) -> TrigPoly:
    """Full product of the factors evaluated on one grid, then one transform."""
    K = spec.degree()
    check_budget(K)
    M = next_pow2(2 * K + 1)
    vals = np.ones(M)
    t = 2 * math.pi * np.arange(M) / M
    for aj, nj in zip(spec.active_a, spec.active_N):
        if spec.kind == "classical":
            vals = vals * (1.0 + aj * np.cos(nj * t))
        else:
            # Re T_N(t) = (1/N) sum_k cos((N+k) t), summed in closed form
            re_t = _re_dirichlet_values(nj, t)
            vals = vals * (1.0 + aj * re_t)
    if K == 0:
        return TrigPoly.constant(float(vals[0]))
    c = np.fft.fft(vals) / M
    return TrigPoly.symmetrized(np.concatenate([c[M - K:], c[:K + 1]]))


def _re_dirichlet_values(N: int, t: np.ndarray) -> np.ndarray:
    half = np.sin(t / 2.0)
    safe = np.where(np.abs(half) < 1e-12, 1.0, half)
    # sum_{k<N} cos((N+k)t) = sin(N t/2) cos((3N-1) t/2) / sin(t/2)
    val = np.sin(N * t / 2.0) * np.cos((3 * N - 1) * t / 2.0) / safe
    return np.where(np.abs(half) < 1e-12, float(N), val) / N


def block_spectrum(spec: RieszSpec, strict: bool = True) -> BlockSpectrum:
    """Frequency blocks of the product.

    classical: ``(1 - 1/(k-1)) N_j <= |n| <= (1 + 1/(k-1)) N_j`` with ``k`` the minimal ratio.
    adapted:   ``N_j/3 <= |n| <= 3 N_j``.
    Blocks that share only an endpoint are accepted; any longer overlap raises
    :class:`BlocksOverlap` unless ``strict`` is false.
    """
    blocks = []
    if spec.kind == "classical":
        k = spec.ratio
        s = 0.0 if math.isinf(k) else 1.0 / (k - 1.0)
        for n in spec.active_N:
            blocks.append((int(math.ceil((1 - s) * n - 1e-9)), int(math.floor((1 + s) * n + 1e-9))))
    else:
        for n in spec.active_N:
            blocks.append((int(math.ceil(n / 3.0 - 1e-9)), 3 * n))
    if strict:
        for j in range(len(blocks) - 1):
            if blocks[j][1] > blocks[j + 1][0]:
                raise BlocksOverlap(
                    f"block {j + 1} ends at {blocks[j][1]} after block {j + 2} starts at {blocks[j + 1][0]}")
    return BlockSpectrum(tuple(blocks))


def block_energies(p: TrigPoly, blocks: BlockSpectrum) -> tuple[np.ndarray, float]:
    """Energy per block (lowest-index attribution) and energy outside every block and ``{0}``."""
    idx = blocks.index_of(p.frequencies)
    e = np.abs(p.coeffs) ** 2
    per = np.array([float(np.sum(e[idx == j])) for j in range(1, len(blocks) + 1)])
    off = float(np.sum(e[(idx == 0) & (p.frequencies != 0)]))
    return per, off


def local_l2_bounds(spec: RieszSpec) -> np.ndarray:
    """``a_j^2 / N_j * prod_{k<j} (1 + a_k^2 / N_k)``."""
    a = np.array(spec.active_a)
    N = np.array(spec.active_N, dtype=float)
    r = a**2 / N
    prior = np.concatenate([[1.0], np.cumprod(1.0 + r)[:-1]])
    return r * prior


@dataclass
class LocalL2Report:
    rows: list[dict] = field(default_factory=list)
    off_block: float = 0.0
    overlapping: bool = False

    @property
    def passed(self) -> bool:
        return all(r["pass"] for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "block_lo", "block_hi", "measured", "bound", "pass"])
        for r in self.rows:
            w.writerow([r["j"], r["block_lo"], r["block_hi"], repr(r["measured"]), repr(r["bound"]),
                        str(r["pass"]).lower()])
        return buf.getvalue()


def verify_local_l2(spec: RieszSpec, slack: float = 1e-12) -> LocalL2Report:
    """Measured block energies of ``P_depth`` against the local bounds."""
    if spec.kind != "adapted":
        raise SpecViolation("local bounds apply to adapted products")
    blocks = block_spectrum(spec, strict=False)
    try:
        block_spectrum(spec, strict=True)
        overlapping = False
    except BlocksOverlap:
        overlapping = True
    P = adapted_partial(spec)
    per, off = block_energies(P, blocks)
    bounds = local_l2_bounds(spec)
    rows = []
    for j, ((lo, hi), m, b) in enumerate(zip(blocks.blocks, per, bounds), start=1):
        rows.append({"j": j, "block_lo": lo, "block_hi": hi, "measured": float(m),
                     "bound": float(b), "pass": bool(m <= b + slack)})
    return LocalL2Report(rows, off, overlapping)


def log_expansion_remainder(spec: RieszSpec, grid_size: int | None = None) -> dict:
    """Sup over the grid of ``h = sum_j a_j Re T_{N_j} - log P``.

    The reference bound is ``(1/2) sum_j a_j^2``; raises :class:`DomainError`
    if the product is not positive on the grid.
    """
    if spec.kind != "adapted":
        raise SpecViolation("log expansion applies to adapted products")
    K = spec.degree()
    M = grid_size or max(4096, next_pow2(8 * max(K, 1)))
    t = 2 * math.pi * np.arange(M) / M
    lin = np.zeros(M)
    for aj, nj in zip(spec.active_a, spec.active_N):
        lin += aj * _re_dirichlet_values(nj, t)
    P = np.real(idft(adapted_partial(spec), M).samples)
    if np.any(P <= 0):
        raise DomainError("product is not positive on the grid")
    h = lin - np.log(P)
    bound = 0.5 * float(np.sum(np.square(spec.active_a)))
    sup = float(np.max(np.abs(h)))
    return {"sup": sup, "bound": bound, "pass": sup <= bound, "grid_size": M,
            "argmax": float(t[int(np.argmax(np.abs(h)))])}


def classical_comparison(spec: RieszSpec) -> RieszSpec:
    """Classical spec with the same amplitudes and frequencies."""
    return RieszSpec("classical", spec.a, spec.N, spec.depth, spec.max_depth)


def grid_values(p: TrigPoly, M: int) -> np.ndarray:
    return idft(p, M).samples
