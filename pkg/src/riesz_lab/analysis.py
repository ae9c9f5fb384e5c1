"""Measure surrogates, support gaps, uncertainty exploration and Fejer extraction."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .core_fourier import (Arc, GridFunction, TrigPoly, dft, idft, is_n_sparse, next_pow2,
                           norm_weighted_l2)
from .errors import EmptySupport, HypothesisFailure, NoWitness
from .kernels import fejer, smooth_step
from .sequences import NecregSchedule, WeightSeq


@dataclass(frozen=True, eq=False)
class MeasureSurrogate:
    """Absolutely continuous measure ``density * dm`` with a polynomial density."""

    density: TrigPoly
    grid_size: int | None = None

    @cached_property
    def M(self) -> int:
        """Evaluation grid; sampling is exact on any grid, so ``grid_size`` is taken as given."""
        if self.grid_size is not None:
            return self.grid_size
        return max(4096, next_pow2(2 * self.density.degree + 1))

    @cached_property
    def samples(self) -> np.ndarray:
        return idft(self.density, self.M).samples

    @cached_property
    def tv_norm(self) -> float:
        return float(np.mean(np.abs(self.samples)))

    def coeff(self, n: int) -> complex:
        return self.density.coeff(n)


def support_distance(mu: MeasureSurrogate, threshold: float | None = None) -> float:
    """``max`` over grid points of the normalised distance to the numerical support.

    The support is ``{|density| > threshold}``, by default ``1e-6`` times the grid maximum.
    """
    a = np.abs(mu.samples)
    top = float(a.max())
    if top == 0.0:
        raise EmptySupport("density vanishes on the grid")
    thr = 1e-6 * top if threshold is None else threshold
    supp = np.nonzero(a > thr)[0]
    if supp.size == 0:
        raise EmptySupport("no grid point above threshold")
    M = a.size
    gaps = np.diff(np.concatenate([supp, [supp[0] + M]])) - 1
    longest = int(gaps.max())
    return math.ceil(longest / 2) / M


def greedy_sparse_subset(freqs, magnitudes, N: float = 10, limit: int | None = None) -> list[int]:
    """Greedy ``N``-sparse subset taken in decreasing order of ``magnitudes``."""
    order = np.argsort(-np.asarray(magnitudes), kind="stable")
    chosen: list[int] = []
    mods: list[int] = []
    for i in order:
        n = int(freqs[i])
        m = abs(n)
        if m == 0:
            continue
        if all(m == x or (m >= N * x if m > x else x >= N * m) for x in mods):
            chosen.append(n)
            mods.append(m)
            if limit is not None and len(chosen) >= limit:
                break
    return chosen


@dataclass(frozen=True)
class UncertaintyConditions:
    low_energy: float
    high_offenders: tuple[int, ...]
    sparse_subset: tuple[int, ...]
    off_sparse_max: float
    is_10_sparse: bool


def uncertainty_conditions(mu: MeasureSurrogate, N: int, eps: float) -> UncertaintyConditions:
    """Low-frequency energy and the high frequencies whose coefficient reaches ``eps``.

    The offenders are tested for 10-sparseness; ``off_sparse_max`` is the
    largest high coefficient left outside a greedy 10-sparse subset.
    """
    p = mu.density
    f = p.frequencies
    a = np.abs(p.coeffs)
    low = float(np.sum(a[np.abs(f) <= N] ** 2))
    high = np.abs(f) > N
    offenders = tuple(int(n) for n in f[high & (a >= eps)])
    subset = greedy_sparse_subset(f[high], a[high])
    rest = high & ~np.isin(f, subset)
    off = float(a[rest].max()) if np.any(rest) else 0.0
    return UncertaintyConditions(low, offenders, tuple(sorted(subset)), off,
                                 is_n_sparse(offenders, 10))


def _gap_cut(M: int, gap: Arc, ramp: float) -> np.ndarray:
    """0 on ``gap``, 1 at distance ``>= ramp`` from it."""
    d = gap.distance(np.arange(M) / M)
    return smooth_step(d / ramp)


def random_gapped_density(rng: np.random.Generator, N: int, delta: float, M: int = 4096,
                          ramp: float = 0.02) -> tuple[TrigPoly, float]:
    """Random density of total variation 1 vanishing on an arc longer than ``2 delta``."""
    D = 4 * N
    n = np.arange(-D, D + 1)
    c = (rng.normal(size=n.size) + 1j * rng.normal(size=n.size)) / (1.0 + np.abs(n))
    base = idft(TrigPoly(c), M).samples
    glen = min(2 * delta + rng.uniform(0.02, 0.1), 0.95)
    gap = Arc(rng.uniform(0, 2 * math.pi), glen)
    dens = base * _gap_cut(M, gap, ramp)
    dens = dens / np.mean(np.abs(dens))
    return dft(GridFunction(dens), keep_nyquist=True), glen


@dataclass
class UncertaintyReport:
    N: int
    gamma: float
    delta: float
    trials: int
    seed: int
    witnesses: list[dict] = field(default_factory=list)
    eps_star: float | None = None
    eps_trace: list[float] = field(default_factory=list)

    def to_json(self) -> str:
        obj = {"N": self.N, "gamma": self.gamma, "delta": self.delta, "trials": self.trials,
               "seed": self.seed, "witness_count": len(self.witnesses), "eps_star": self.eps_star}
        return json.dumps(obj, sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "gap", "low_energy", "off_sparse_max"])
        for r in self.witnesses:
            w.writerow([r["trial"], repr(r["gap"]), repr(r["low_energy"]), repr(r["off_sparse_max"])])
        return buf.getvalue()


def explore_uncertainty(N: int, gamma: float, delta: float, trials: int, seed: int = 0,
                        M: int = 4096) -> UncertaintyReport:
    """Random search for measures with a support gap above ``delta`` and low energy above ``gamma``.

    ``eps_star`` is the smallest off-sparse coefficient over all witnesses; it
    can only decrease as ``trials`` grows because trial ``i`` always draws
    from the stream seeded by ``(seed, i)``.
    """
    if not (0 < gamma < 1 and 0 < delta < 1):
        raise ValueError("gamma and delta must lie in (0, 1)")
    rep = UncertaintyReport(N, gamma, delta, trials, seed)
    best = math.inf
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        dens, glen = random_gapped_density(rng, N, delta, M)
        mu = MeasureSurrogate(dens, M)
        gap = support_distance(mu)
        cond = uncertainty_conditions(mu, N, 0.0)
        if gap > delta and cond.low_energy >= gamma:
            rep.witnesses.append({"trial": i, "gap": gap, "low_energy": cond.low_energy,
                                  "off_sparse_max": cond.off_sparse_max})
            best = min(best, cond.off_sparse_max)
        rep.eps_trace.append(best)
    if not rep.witnesses:
        raise NoWitness(f"no witness in {trials} trials", rep)
    rep.eps_star = best
    return rep


class Extraction(NamedTuple):
    extracted: complex
    via_grid: complex
    bound: float
    eta: float


def fejer_extraction(mu: MeasureSurrogate, lam: int, N: int, excluded: Arc,
                     require_window: bool = True, window_tol: float = 1e-4,
                     vanish_tol: float = 1e-9) -> Extraction:
    """Coefficient of ``zeta^lam`` in ``F_N * density``, computed two ways.

    ``extracted`` is ``sum_k F^(k) mu^(lam - k)``; ``via_grid`` integrates
    ``zeta^-lam F_N mu`` over the complement of ``excluded`` on an exact grid.
    ``bound`` is ``100 eta^-2 / N`` with ``eta`` the excluded length.

    The density must be at most ``vanish_tol`` on ``excluded``.  With
    ``require_window`` every coefficient at ``lam +- k``, ``1 <= k <= N``, must
    be at most ``window_tol`` times the total variation.
    """
    p = mu.density
    on_arc = np.abs(mu.samples[excluded.mask(mu.M)])
    if on_arc.size and float(on_arc.max()) > vanish_tol:
        raise HypothesisFailure(f"density is {float(on_arc.max()):.3g} on the excluded arc")
    if require_window:
        k = np.arange(1, N + 1)
        window = np.concatenate([p.coeffs_at(lam - k), p.coeffs_at(lam + k)])
        worst = float(np.max(np.abs(window)))
        if worst > window_tol * mu.tv_norm:
            raise HypothesisFailure(f"coefficient {worst:.3g} inside the window around lam")
    F = fejer(N)
    k = F.frequencies
    extracted = complex(np.sum(F.coeffs * p.coeffs_at(lam - k)))
    M = next_pow2(2 * (p.degree + N + abs(lam)) + 1)
    x = np.arange(M) / M
    vals = idft(p, M).samples * idft(F, M).samples * np.exp(-2j * math.pi * lam * x)
    keep = ~excluded.mask(M)
    via_grid = complex(np.sum(vals[keep]) / M)
    eta = excluded.length
    return Extraction(extracted, via_grid, 100.0 / (eta**2 * N), eta)


@dataclass(frozen=True)
class EnvelopeRow:
    k: int
    lo: int
    hi: int
    sup: float
    eps: float
    passed: bool


def weight_envelope_check(mu: MeasureSurrogate | TrigPoly, w: WeightSeq,
                          rel_tol: float = 1e-12) -> list[EnvelopeRow]:
    """Per-gap ``sup |c_n|`` against ``eps_k`` for a necreg weight sequence."""
    p = mu.density if isinstance(mu, MeasureSurrogate) else mu
    if w.family != "necreg":
        raise ValueError("envelope check needs necreg weights")
    norm = norm_weighted_l2(p, w)
    if norm > 1.0 + 1e-12:
        raise ValueError(f"weighted norm {norm:.6g} exceeds 1")
    sched = NecregSchedule(tuple(w.params["N"]), tuple(w.params["eps"]))
    a = np.abs(p.coeffs)
    f = np.abs(p.frequencies)
    rows = []
    for k, lo, hi, e in sched.gaps(p.degree):
        sel = (f >= lo) & (f <= hi)
        s = float(a[sel].max()) if np.any(sel) else 0.0
        rows.append(EnvelopeRow(k, lo, hi, s, e, s <= e * (1 + rel_tol)))
    return rows
