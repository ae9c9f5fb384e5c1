"""Kernels: Dirichlet-type, Fejer, box, Rudin-Shapiro signs, smooth bumps, signed comb blocks."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_fourier import Arc, GridFunction, TrigPoly, dft, next_pow2
from .errors import ArcTooSmall, BlockFailure

MIN_BUMP_LENGTH = 2.0**-12


def dirichlet_type(N: int) -> TrigPoly:
    """``T_N = (1/N) sum_{0<=k<N} zeta^(N+k)``."""
    if N < 1:
        raise ValueError("N must be positive")
    c = np.zeros(2 * (2 * N - 1) + 1, dtype=complex)
    K = 2 * N - 1
    c[K + N:K + 2 * N] = 1.0 / N
    return TrigPoly(c)


def fejer(N: int) -> TrigPoly:
    """Fejer kernel with coefficients ``max(0, 1 - |n|/N)``."""
    if N < 1:
        raise ValueError("N must be positive")
    n = np.arange(-(N - 1), N)
    return TrigPoly(1.0 - np.abs(n) / N, True)


def fejer_pointwise_bound(N: int, t) -> np.ndarray:
    """``1 / (N sin^2(t/2))``."""
    return 1.0 / (N * np.sin(np.asarray(t, dtype=float) / 2.0) ** 2)


def box_kernel(N: int, K_cut: int | None = None) -> TrigPoly:
    """Truncated box kernel with coefficients ``sin(n/2N) / (n/2N)``.

    These are the coefficients of ``2 pi N`` times the indicator of an arc of
    angular length ``1/N``, a unit-mass box.
    """
    if N < 1:
        raise ValueError("N must be positive")
    K = 64 * N if K_cut is None else int(K_cut)
    n = np.arange(-K, K + 1)
    return TrigPoly(np.sinc(n / (2.0 * math.pi * N)).astype(complex), True)


def box_kernel_c0(p: TrigPoly, N: int) -> float:
    """Largest ``c`` with ``|coeff(n)| >= 1/2`` for all ``|n| <= c N`` inside the truncation."""
    a = np.abs(p.coeffs[p.degree:])
    bad = np.nonzero(a < 0.5)[0]
    last = (bad[0] - 1) if bad.size else p.degree
    return last / N


def box_kernel_tail_fraction(N: int, K_cut: int) -> float:
    """Share of the total squared mass ``2 pi N`` lying beyond ``|n| > K_cut``."""
    n = np.arange(1, K_cut + 1)
    kept = 1.0 + 2.0 * float(np.sum(np.sinc(n / (2.0 * math.pi * N)) ** 2))
    return 1.0 - kept / (2.0 * math.pi * N)


def rudin_shapiro_signs(N: int) -> np.ndarray:
    """``(-1)^{number of '11' blocks in the binary expansion of k}`` for ``k < N``."""
    k = np.arange(N, dtype=np.int64)
    pairs = k & (k >> 1)
    count = np.zeros(N, dtype=np.int64)
    while np.any(pairs):
        count += pairs & 1
        pairs >>= 1
    return np.where(count % 2 == 0, 1, -1)


def rudin_shapiro_poly(N: int) -> TrigPoly:
    c = np.zeros(2 * N - 1, dtype=complex)
    c[N - 1:] = rudin_shapiro_signs(N) / N
    return TrigPoly(c)


def _bump_grid(length: float, minimum: int = 2**14) -> int:
    return max(minimum, next_pow2(int(math.ceil(64.0 / length))))


def smooth_bump(arc: Arc, M: int = 4, grid_size: int | None = None) -> TrigPoly:
    """Raised-cosine bump ``sin(pi u)^(2M)`` on ``arc`` (``u`` the relative position), mean 1.

    Vanishes identically off the arc and has ``2M-1`` continuous derivatives,
    so its coefficients decay at least like ``|n|^-(2M+1)``.
    """
    if arc.length >= 1.0:
        return TrigPoly.constant(1.0)
    if arc.length < MIN_BUMP_LENGTH:
        raise ArcTooSmall(f"arc length {arc.length} below {MIN_BUMP_LENGTH}")
    G = grid_size or _bump_grid(arc.length)
    x = np.arange(G) / G
    u = np.mod(x - arc.start, 1.0) / arc.length
    vals = np.where(u < 1.0, np.sin(math.pi * np.minimum(u, 1.0)) ** (2 * M), 0.0)
    vals /= vals.mean()
    return dft(GridFunction(vals))


def decay_constant(p: TrigPoly, M: float) -> float:
    """Smallest ``C`` with ``|coeff(n)| <= C |n|^-M`` for ``n != 0``."""
    n = np.abs(p.frequencies).astype(float)
    ok = n > 0
    return float(np.max(np.abs(p.coeffs[ok]) * n[ok] ** M))


# signed comb building block

def smooth_step(t) -> np.ndarray:
    """C-infinity step: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        e0 = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        e1 = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return e0 / (e0 + e1)


def plateau(y, half_width: float, ramp: float) -> np.ndarray:
    """1 on ``|y| <= half_width``, smooth descent to 0 at ``half_width + ramp``."""
    return smooth_step((half_width + ramp - np.abs(y)) / ramp)


@dataclass(frozen=True)
class ToothShape:
    """Profile of one tooth: ``M+1`` plateau copies weighted by an ``M``-th difference.

    The weights are the binomial row with alternating signs, normalised so
    the central copy sits at ``-1``; the profile has ``M`` vanishing moments.
    """

    M: int = 2
    plateau_share: float = 0.75

    @property
    def half_extent(self) -> float:
        return 0.5 / (self.M + 1)

    @property
    def half_width(self) -> float:
        return self.plateau_share * self.half_extent

    @property
    def ramp(self) -> float:
        return (1.0 - self.plateau_share) * self.half_extent

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.M + 1) - self.M / 2.0) * 2.0 * self.half_extent

    @property
    def weights(self) -> np.ndarray:
        j0 = self.M // 2
        row = np.array([math.comb(self.M, j) for j in range(self.M + 1)], dtype=float)
        sign = np.array([(-1.0) ** (j - j0) for j in range(self.M + 1)])
        return -sign * row / row[j0]

    @property
    def mean_abs(self) -> float:
        """Mean of ``|profile|`` over the unit tooth."""
        return float(np.sum(np.abs(self.weights))) * (2 * self.half_width + self.ramp)

    @property
    def coverage(self) -> float:
        """Share of each tooth slot occupied so that ``10 * mean|f| = 1`` on the arc."""
        return 1.0 / (10.0 * self.mean_abs)


@dataclass(frozen=True, eq=False)
class CombBlock:
    arc: Arc
    N: int
    grid_size: int
    indices: np.ndarray
    values: np.ndarray
    plateaus: tuple[Arc, ...]
    side_scale: float

    def full(self) -> np.ndarray:
        out = np.zeros(self.grid_size)
        out[self.indices] = self.values
        return out

    def properties(self) -> dict:
        """Grid checks of support, range, mass and the ``-10`` plateau share."""
        G = self.grid_size
        mass = float(np.sum(np.abs(self.values))) / G
        low = int(np.count_nonzero(self.values == -10.0)) / G
        inside = self.arc.mask(G)[self.indices]
        return {
            "support": bool(np.all(inside)),
            "range": bool(np.max(np.abs(self.values)) <= 10.0),
            "mass": abs(mass - self.arc.length) <= 1e-12,
            "plateau": low >= self.arc.length / 50.0,
            "mass_value": mass,
            "plateau_share": low / self.arc.length,
        }

    def envelope_constant(self, M: int) -> float:
        """Fitted ``C`` with ``|f^(n)| <= C m(I) N^-1/2 min(1, x^M, x^-M)``, ``x = |n| m(I)/N``."""
        p = dft(GridFunction(self.full()))
        n = np.abs(p.frequencies).astype(float)
        ok = n > 0
        x = n[ok] * self.arc.length / self.N
        env = self.arc.length / math.sqrt(self.N) * np.minimum(1.0, np.minimum(x**M, x**-M))
        return float(np.max(np.abs(p.coeffs[ok]) / env))


def comb_block(arc: Arc, N: int, M: int = 2, grid_size: int = 2**16,
               shape: ToothShape | None = None) -> CombBlock:
    """Signed comb block on ``arc``: ``N`` teeth with Rudin-Shapiro signs.

    Values lie in ``[-10, 10]`` and vanish off the arc; the central copy of
    each positively signed tooth is a plateau at exactly ``-10``.  The side
    copies are rescaled so that ``int_I |f| dm = m(I)`` holds on the grid.
    """
    shape = shape or ToothShape(M)
    if N < 1:
        raise ValueError("N must be positive")
    G = grid_size
    mask = arc.mask(G)
    idx = np.nonzero(mask)[0]
    rel = np.mod(idx / G - arc.start, 1.0)
    slot = arc.length / N
    k = np.minimum((rel / slot).astype(np.int64), N - 1)
    width = shape.coverage * slot
    y = (rel - (k + 0.5) * slot) / width
    signs = rudin_shapiro_signs(N)[k].astype(float)
    centers, weights = shape.centers, shape.weights
    j0 = M // 2
    central = np.zeros(idx.size)
    side = np.zeros(idx.size)
    for j, (c, wt) in enumerate(zip(centers, weights)):
        part = wt * plateau(y - c, shape.half_width, shape.ramp)
        if j == j0:
            central += part
        else:
            side += part
    central *= 10.0 * signs
    side *= 10.0 * signs
    target = arc.length
    c_mass = float(np.sum(np.abs(central))) / G
    s_mass = float(np.sum(np.abs(side))) / G
    if s_mass <= 0:
        raise BlockFailure("comb block unresolved by grid (no side mass)")
    beta = (target - c_mass) / s_mass
    side_peak = float(np.max(np.abs(weights[np.arange(M + 1) != j0])))
    if not (0 < beta * side_peak <= 1.0):
        raise BlockFailure(f"side rescaling {beta:.4f} leaves range [-10, 10]")
    values = central + beta * side
    plateaus = []
    slot_start = arc.start
    rs = rudin_shapiro_signs(N)
    for kk in range(N):
        for j, (c, wt) in enumerate(zip(centers, weights)):
            val = 10.0 * rs[kk] * wt * (1.0 if j == j0 else beta)
            if val == -10.0:
                mid = slot_start + (kk + 0.5) * slot + c * width
                plateaus.append(Arc.from_start(mid - shape.half_width * width, 2 * shape.half_width * width))
    blk = CombBlock(arc, N, G, idx, values, tuple(plateaus), beta)
    props = blk.properties()
    failed = [k for k in ("support", "range", "mass", "plateau") if not props[k]]
    if failed:
        raise BlockFailure(f"comb block fails {failed}: {props}")
    return blk
