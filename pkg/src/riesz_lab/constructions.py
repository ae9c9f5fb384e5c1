"""End-to-end constructions with numerical certificates.

Each builder returns an artifact holding the polynomials it produced and a
list of :class:`~riesz_lab.certificates.Certificate`.  The ``certify_*``
functions recompute certificates from polynomials alone so that saved
bundles can be re-checked without rebuilding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import MeasureSurrogate, support_distance
from .certificates import Certificate, at_least, at_most
from .core_fourier import (Arc, GridFunction, TrigPoly, check_budget, dft, dyadic_arcs,
                           ess_sup_on_arc, eval_grid_size, idft, next_pow2)
from .errors import HypothesisFailure, SpecViolation
from .kernels import ToothShape, comb_block
from .riesz import (RieszSpec, adapted_partials, block_spectrum, classical_partials)
from .sequences import (AmplitudePlan, DivergenceReport, WeightSeq, divergence_diagnostics,
                        reciprocal_terms, seq1_amplitudes)

SPECTRAL_TOL = 1e-12
SUP_SLACK = 1e-9
NONNEG_TOL = 1e-10


def weighted_energy(p: TrigPoly, w: np.ndarray) -> float:
    """``sum_{n != 0} |c_n|^2 w_{|n|}``."""
    e = np.abs(p.coeffs) ** 2 * w[np.abs(p.frequencies)]
    e[p.degree] = 0.0
    return float(np.sum(e))


def arc_sups(polys: list[TrigPoly], M: int, level: int = 4) -> np.ndarray:
    """``sup |p|`` on each closed dyadic arc of the given level, one row per polynomial."""
    arcs = dyadic_arcs(level)
    out = np.empty((len(polys), len(arcs)))
    for i, p in enumerate(polys):
        g = idft(p, M)
        out[i] = [ess_sup_on_arc(g, a, closed=True) for a in arcs]
    return out


def _monotone_defect(sups: np.ndarray) -> float:
    """Largest drop of a row-to-row sequence (0 when nondecreasing)."""
    if sups.shape[0] < 2:
        return 0.0
    return float(max(0.0, np.max(sups[:-1] - sups[1:])))


# bad-range construction

@dataclass(frozen=True)
class BadRangeOptions:
    safety: float = 1.01
    grid_factor: int = 8
    diag_length: int = 2**16
    arcs_level: int = 4
    growth_margin: float = 0.05
    growth_depth: int = 8
    classical_depth: int = 6
    classical_factor: float = 10.0


@dataclass(eq=False)
class BadRangeArtifact:
    spec: RieszSpec
    plan: AmplitudePlan
    partials: list[TrigPoly]
    certificates: list[Certificate]
    diagnostics: DivergenceReport
    details: dict = field(default_factory=dict)


def certify_bad_range(partials: list[TrigPoly], lam: WeightSeq, a, opts: BadRangeOptions,
                      classical: list[TrigPoly] | None = None) -> tuple[list[Certificate], dict]:
    """Certificates for ``P_1..P_n`` (``partials[0]`` is ``P_1``) with ``N_j = 4^j``."""
    depth = len(partials)
    a = np.asarray(a, dtype=float)[:depth]
    N = [4**j for j in range(1, depth + 1)]
    spec = RieszSpec("adapted", tuple(a), tuple(N))
    blocks = block_spectrum(spec, strict=False)
    K = partials[-1].degree
    wv = lam.array(max(K, 1))
    lam_at = np.array([lam(n) for n in N])
    C = float(np.prod(1.0 + a**2 / np.array(N, dtype=float))) * opts.safety
    certs, weighted, bounds = [], [], []
    for k, P in enumerate(partials, start=1):
        off = P.frequencies != 0
        outside = off & ~blocks.union_mask(P.frequencies)
        mass = float(np.sum(np.abs(P.coeffs[outside]) ** 2))
        certs.append(at_most(f"spectral_containment_depth_{k}", mass, SPECTRAL_TOL))
        m = weighted_energy(P, wv)
        b = C * float(np.sum(lam_at[:k] * a[:k] ** 2 / np.array(N[:k], dtype=float)))
        weighted.append(m)
        bounds.append(b)
        certs.append(at_most(f"weighted_norm_depth_{k}", m, b))
    M = eval_grid_size(K, opts.grid_factor)
    sups = arc_sups(partials, M, opts.arcs_level)
    mins = [float(np.min(np.real(idft(P, M).samples))) for P in partials]
    certs.append(at_least("nonnegative_on_grid", min(mins), 0.0, NONNEG_TOL))
    certs.append(at_most("arc_sup_monotone", _monotone_defect(sups), 0.0, SUP_SLACK))
    if depth >= opts.growth_depth:
        reach = float(np.min(sups[opts.growth_depth - 1]))
        certs.append(at_least("arc_sup_growth", reach, 1.0 + opts.growth_margin))
    details = {"weighted": weighted, "weighted_bounds": bounds, "C": C, "arc_sups": sups.tolist(),
               "grid_size": M, "grid_min": mins}
    if classical is not None:
        cw = [weighted_energy(s, lam.array(max(s.degree, 1))) for s in classical]
        ratio = cw[-1] / weighted[-1]
        details["classical_weighted"] = cw
        details["classical_ratio"] = ratio
        if depth >= opts.classical_depth:
            certs.append(at_least("classical_gap", ratio, opts.classical_factor))
    return certs, details


def build_bad_range(lam: WeightSeq, depth: int, opts: BadRangeOptions | None = None,
                    compare_classical: bool = True) -> BadRangeArtifact:
    """Adapted product ``prod (1 + a_j Re T_{4^j})`` with amplitudes from ``lam``."""
    opts = opts or BadRangeOptions()
    if depth < 1:
        raise SpecViolation("depth must be positive")
    diag = divergence_diagnostics(reciprocal_terms(lam, opts.diag_length))
    if diag.label == "convergent-like":
        raise HypothesisFailure(
            f"sum 1/lambda_n looks convergent (last-octave increment {diag.last_increment:.3g})")
    plan = seq1_amplitudes(lam, depth)
    spec = RieszSpec("adapted", tuple(plan.a), tuple(4**j for j in range(1, depth + 1)))
    partials = adapted_partials(spec)[1:]
    classical = None
    if compare_classical:
        classical = classical_partials(RieszSpec("classical", spec.a, spec.N))[1:]
    certs, details = certify_bad_range(partials, lam, plan.a, opts, classical)
    return BadRangeArtifact(spec, plan, partials, certs, diag, details)


# Hadamard lacunary series

@dataclass(eq=False)
class HadamardArtifact:
    n: tuple[int, ...]
    c: tuple[float, ...]
    partials: list[TrigPoly]
    certificates: list[Certificate]
    details: dict = field(default_factory=dict)


def hadamard_partial(n, c) -> TrigPoly:
    K = int(max(n))
    coeffs = np.zeros(2 * K + 1, dtype=complex)
    for nj, cj in zip(n, c):
        coeffs[K + nj] += cj
        coeffs[K - nj] += cj
    return TrigPoly(coeffs, True)


def certify_hadamard(partials: list[TrigPoly], n, c, lam: WeightSeq | None = None,
                     arcs_level: int = 4) -> tuple[list[Certificate], dict]:
    c = np.asarray(c, dtype=float)
    certs = []
    sups, norms = [], []
    M = eval_grid_size(partials[-1].degree)
    for k, S in enumerate(partials, start=1):
        g = idft(S, M).samples
        norm2 = float(np.mean(np.abs(g) ** 2))
        exact = 2.0 * float(np.sum(c[:k] ** 2))
        norms.append(norm2)
        certs.append(at_most(f"l2_norm_depth_{k}", abs(norm2 - exact), 1e-10 * max(1.0, exact)))
        sups.append(float(np.max(np.abs(g))))
    if lam is not None:
        wv = lam.array(partials[-1].degree)
        lam_n = np.array([lam(x) for x in n])
        m = weighted_energy(partials[-1], wv)
        b = 2.0 * float(np.sum(c ** 2 * lam_n))
        certs.append(at_most("weighted_norm", m, b, 1e-12 * max(1.0, b)))
        if np.all(lam_n < 1):
            certs.append(at_most("weighted_norm_below_l2", m, 2.0 * float(np.sum(c ** 2))))
    asups = arc_sups(partials, M, arcs_level)
    drops = np.diff(np.array(sups))
    certs.append(at_least("sup_increasing", float(np.min(drops)) if drops.size else 1.0, 0.0))
    certs.append(at_most("arc_sup_monotone", _monotone_defect(asups), 0.0, SUP_SLACK))
    return certs, {"sups": sups, "l2": norms, "arc_sups": asups.tolist(), "grid_size": M}


def build_hadamard(n, c, lam: WeightSeq | None = None) -> HadamardArtifact:
    """Partial sums of ``sum_j c_j (zeta^{n_j} + zeta^{-n_j})``."""
    n = tuple(int(x) for x in n)
    c = tuple(float(x) for x in c)
    if len(n) != len(c) or not n:
        raise SpecViolation("n and c must be non-empty and of equal length")
    if n[0] < 1 or any(n[j + 1] < 3 * n[j] for j in range(len(n) - 1)):
        raise SpecViolation("frequencies must be positive with ratio at least 3")
    if any(not 0 < x <= 1 for x in c):
        raise SpecViolation("coefficients must lie in (0, 1]")
    check_budget(n[-1])
    partials = [hadamard_partial(n[:k], c[:k]) for k in range(1, len(n) + 1)]
    certs, details = certify_hadamard(partials, n, c, lam)
    return HadamardArtifact(n, c, partials, certs, details)


# small-support classical product

@dataclass(eq=False)
class SmallSupportArtifact:
    spec: RieszSpec
    eps: float
    W: np.ndarray
    selected: tuple[int, ...]
    partials: list[TrigPoly]
    certificates: list[Certificate]
    details: dict = field(default_factory=dict)


def window_sups(w: WeightSeq, N, eps: float) -> np.ndarray:
    """``W_j = sup { w_n : |n - N_j| <= eps N_j }``."""
    top = int(math.floor(max(N) * (1 + eps)))
    wv = w.array(top)
    out = []
    for nj in N:
        lo = int(math.ceil(nj * (1 - eps) - 1e-9))
        hi = int(math.floor(nj * (1 + eps) + 1e-9))
        out.append(float(np.max(wv[max(lo, 0):hi + 1])))
    return np.array(out)


def select_subsequence(W, budget: float = 1.0) -> list[int]:
    """Greedy scan keeping ``j`` when ``W_j`` halves the last kept value and ``W_j 2^(count)`` fits the budget."""
    kept: list[int] = []
    for j, wj in enumerate(W):
        if kept and not wj < W[kept[-1]] / 2:
            continue
        if wj * 2 ** (len(kept) + 1) > budget:
            continue
        kept.append(j)
    return kept


def certify_small_support(partials: list[TrigPoly], N, eps: float, W,
                          w: WeightSeq) -> tuple[list[Certificate], dict]:
    N = list(N)
    W = np.asarray(W, dtype=float)
    P = partials[-1]
    freqs = np.abs(P.frequencies)
    inside = freqs == 0
    which = np.zeros(freqs.shape, dtype=np.int64)
    for j, nj in enumerate(N, start=1):
        win = np.abs(freqs - nj) <= eps * nj + 1e-9
        which[win & (which == 0)] = j
        inside |= win
    e = np.abs(P.coeffs) ** 2
    certs = [at_most("spectral_windows", float(np.sum(e[~inside])), SPECTRAL_TOL)]
    wv = w.array(P.degree)[freqs]
    per = []
    for j in range(1, len(N) + 1):
        m = float(np.sum(e[which == j] * wv[which == j]))
        per.append(m)
        certs.append(at_most(f"block_energy_{j}", m, W[j - 1] * 2.0**j))
    tail = float(np.sum((e * wv)[freqs > N[0]]))
    budget = float(np.sum(W * 2.0 ** np.arange(1, len(N) + 1)))
    certs.append(at_most("weighted_tail", tail, budget))
    return certs, {"block_energy": per, "tail": tail, "budget": budget}


def build_small_support(w: WeightSeq, eps: float, N, a, select: bool = False,
                        budget: float = 1.0) -> SmallSupportArtifact:
    """Classical product with frequencies ``N_j`` and amplitudes ``a_j``, weights dipping near ``N_j``."""
    N = tuple(int(x) for x in N)
    a = tuple(float(x) for x in a)
    if not 0 < eps <= 1:
        raise SpecViolation("eps must lie in (0, 1]")
    if len(N) != len(a) or not N:
        raise SpecViolation("N and a must be non-empty and of equal length")
    W_all = window_sups(w, N, eps)
    idx = select_subsequence(W_all, budget) if select else list(range(len(N)))
    if not idx:
        raise SpecViolation("subsequence selection kept no index")
    Ns = tuple(N[i] for i in idx)
    As = tuple(a[i] for i in idx)
    ratio = min((Ns[j + 1] / Ns[j] for j in range(len(Ns) - 1)), default=math.inf)
    if ratio < 2.0 / eps:
        raise SpecViolation(f"frequency ratio {ratio:.3g} below 2/eps = {2.0 / eps:.3g}")
    spec = RieszSpec("classical", As, Ns)
    partials = classical_partials(spec)[1:]
    W = W_all[idx]
    certs, details = certify_small_support(partials, Ns, eps, W, w)
    return SmallSupportArtifact(spec, eps, W, tuple(idx), partials, certs, details)


# nonnegative bump with a spread zero set

@dataclass(eq=False)
class PsiArtifact:
    N: int
    delta: float
    M: int
    N_delta: int
    psi: TrigPoly
    grid: GridFunction
    zero_set: tuple[Arc, ...]
    certificates: list[Certificate]
    details: dict = field(default_factory=dict)


def psi_grid_size(N_delta: int, M: int = 2, points_per_ramp: int = 3) -> int:
    shape = ToothShape(M)
    ramp = shape.ramp * shape.coverage / N_delta**2
    return max(2**14, next_pow2(int(math.ceil(points_per_ramp / ramp))))


def envelope_constant(psi: TrigPoly, N: int, M: int) -> float:
    """Smallest ``C`` with ``|psi^(n)| <= C N^-1/2 min(1, (n/N)^M, (n/N)^-M)`` for ``n != 0``."""
    n = np.abs(psi.frequencies).astype(float)
    ok = n > 0
    x = n[ok] / N
    env = np.minimum(1.0, np.minimum(x**M, x**-M)) / math.sqrt(N)
    return float(np.max(np.abs(psi.coeffs[ok]) / env))


def sweep_arcs(length: float, count: int = 32) -> list[Arc]:
    return [Arc(2 * math.pi * (i + 0.5) / count, length) for i in range(count)]


def certify_psi(grid: GridFunction, psi: TrigPoly, N: int, delta: float, M: int,
                zero_tol: float = 1e-9) -> tuple[list[Certificate], dict]:
    s = np.real(grid.samples)
    certs = [
        at_most("mean_one", abs(psi.coeff(0) - 1.0), 1e-12),
        at_least("nonnegative", float(np.min(s)), 0.0, 1e-9),
    ]
    fractions = []
    for arc in sweep_arcs(min(delta, 1.0)):
        mask = arc.mask(grid.M)
        fractions.append(float(np.mean(s[mask] <= zero_tol)))
    certs.append(at_least("zero_fraction", min(fractions), 0.01))
    dist = support_distance(MeasureSurrogate(psi, grid.M))
    certs.append(at_most("support_distance", dist, delta))
    C = envelope_constant(psi, N, M)
    certs.append(at_most("envelope_constant", C, math.inf))
    return certs, {"zero_fractions": fractions, "support_distance": dist, "envelope_constant": C}


def build_psi(N: int, delta: float, M: int = 2, grid_size: int | None = None) -> PsiArtifact:
    """Mean-one nonnegative polynomial vanishing on a positive share of every arc of length ``delta``.

    The circle is cut into ``N_delta = max(ceil(4/delta), N)`` equal arcs, each
    carrying a signed comb block with ``N_delta`` teeth; ``psi`` is
    ``(10 + F) / mean(10 + F)`` for the sum ``F`` of the blocks.
    """
    if N < 1 or not 0 < delta <= 1:
        raise SpecViolation("need N >= 1 and delta in (0, 1]")
    Nd = max(int(math.ceil(4.0 / delta - 1e-12)), int(N))
    G = grid_size or psi_grid_size(Nd, M)
    check_budget(G // 2, "psi")
    F = np.zeros(G)
    zero_set = []
    block_props = []
    for k in range(Nd):
        blk = comb_block(Arc.from_start(k / Nd, 1.0 / Nd), Nd, M, G)
        F[blk.indices] += blk.values
        zero_set.extend(blk.plateaus)
        block_props.append(blk.properties())
    raw = 10.0 + F
    vals = raw / np.mean(raw)
    grid = GridFunction(vals)
    psi = dft(grid, keep_nyquist=True)
    certs, details = certify_psi(grid, psi, N, delta, M)
    details["grid_size"] = G
    details["plateau_share_min"] = min(p["plateau_share"] for p in block_props)
    return PsiArtifact(N, delta, M, Nd, psi, grid, tuple(zero_set), certs, details)
