import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from riesz_lab.core_fourier import Arc, idft
from riesz_lab.errors import ArcTooSmall, BlockFailure
from riesz_lab.kernels import (ToothShape, box_kernel, box_kernel_c0, box_kernel_tail_fraction,
                               comb_block, decay_constant, dirichlet_type, fejer,
                               fejer_pointwise_bound, plateau, rudin_shapiro_poly,
                               rudin_shapiro_signs, smooth_bump, smooth_step)


def rs_recursive(N):
    """Rudin-Shapiro pair recursion ``(P, Q) -> (P + x^m Q, P - x^m Q)``."""
    p, q = [1], [1]
    while len(p) < N:
        p, q = p + q, p + [-x for x in q]
    return p[:N]


# Dirichlet-type

@pytest.mark.parametrize("N", [1, 2, 4, 8, 16, 64])
def test_dirichlet_identities(N):
    T = dirichlet_type(N)
    assert abs(T.coeff(0)) == 0
    assert abs(complex(np.sum(T.coeffs)) - 1) <= 1e-12
    assert set(T.support().tolist()) == set(range(N, 2 * N))
    assert abs(T.energy() - 1 / N) <= 1e-12


def test_dirichlet_n1():
    T = dirichlet_type(1)
    assert T.support().tolist() == [1]
    assert T.coeff(1) == 1


def test_dirichlet_value_at_one_direct():
    assert abs(dirichlet_type(4)(0.0)[0] - 1) < 1e-14


# Fejer

def test_fejer_n1_constant():
    F = fejer(1)
    assert F.degree == 0 and F.coeff(0) == 1


def test_fejer_pointwise_at_pi():
    F = fejer(8)
    assert F(math.pi)[0] <= 0.125 + 1e-15
    assert fejer_pointwise_bound(8, math.pi) == pytest.approx(0.125)


def test_fejer_nonnegative_dense():
    assert float(np.min(idft(fejer(8), 1024).samples)) >= -1e-12


@given(st.integers(1, 200))
def test_fejer_mean_and_bound(N):
    F = fejer(N)
    assert F.coeff(0) == 1
    M = 4096
    s = idft(F, M).samples
    t = 2 * np.pi * np.arange(1, M) / M
    assert np.all(s[1:] <= fejer_pointwise_bound(N, t) * (1 + 1e-12) + 1e-12)
    assert float(np.min(s)) >= -1e-12


# box kernel

def test_box_unit_mass():
    for N in (1, 3, 10):
        assert box_kernel(N).coeff(0) == 1


def test_box_closed_form():
    assert abs(box_kernel(4).coeff(4).real - math.sin(0.5) / 0.5) < 1e-15
    assert abs(math.sin(0.5) / 0.5 - 0.958851) < 1e-6


def test_box_c0():
    c0 = box_kernel_c0(box_kernel(10), 10)
    assert c0 >= 1
    # sin(x)/x = 1/2 at x = 1.895494..., so the last good n is floor(20 * 1.8955) = 37
    assert c0 == pytest.approx(3.7)


@pytest.mark.parametrize("N,K", [(1, 16), (4, 256), (10, 640), (16, 4096)])
def test_box_tail_fraction_bound(N, K):
    assert 0 <= box_kernel_tail_fraction(N, K) <= 2 * N / K


def test_box_tail_fraction_frozen():
    # oracle: 30-digit partial sum against the closed form total 2 pi N, confirmed by brute summation to 4e7
    assert box_kernel_tail_fraction(4, 256) == pytest.approx(0.0100755273429549, abs=1e-12)


# Rudin-Shapiro

def test_rs_small():
    assert rudin_shapiro_signs(4).tolist() == [1, 1, 1, -1]
    assert rudin_shapiro_signs(1).tolist() == [1]


@pytest.mark.parametrize("N", [2, 5, 16, 100, 1024])
def test_rs_matches_recursion(N):
    assert rudin_shapiro_signs(N).tolist() == rs_recursive(N)


def test_rs_sup_256():
    s = np.abs(idft(rudin_shapiro_poly(256), 8192).samples)
    assert float(s.max()) <= 0.625


@pytest.mark.parametrize("k", range(13))
def test_rs_sup_powers_of_two(k):
    N = 2**k
    s = np.abs(idft(rudin_shapiro_poly(N), max(4096, 16 * N)).samples)
    assert float(s.max()) <= 10 / math.sqrt(N)


# smooth bump

def test_bump_whole_circle():
    p = smooth_bump(Arc(0.0, 1.0))
    assert p.degree == 0 and p.coeff(0) == 1


def test_bump_mean_one():
    p = smooth_bump(Arc(0.0, 0.25), 4)
    assert abs(p.coeff(0) - 1) <= 1e-12


def test_bump_vanishes_outside():
    arc = Arc(1.0, 0.125)
    p = smooth_bump(arc, 4)
    M = 4 * 16384
    s = idft(p, M).samples
    assert float(np.max(np.abs(s[~arc.mask(M)]))) <= 1e-9
    assert float(np.min(s)) >= -1e-9


def test_bump_too_small():
    with pytest.raises(ArcTooSmall):
        smooth_bump(Arc(0.0, 2.0**-13))


def test_bump_decay():
    p = smooth_bump(Arc(0.0, 0.25), 4)
    assert decay_constant(p, 4) < 1e4


# comb building block

def test_smooth_step_and_plateau():
    np.testing.assert_array_equal(smooth_step(np.array([-1.0, 0.0, 1.0, 2.0])), [0, 0, 1, 1])
    v = smooth_step(np.linspace(0, 1, 101))
    assert np.all(np.diff(v) >= 0)
    pl = plateau(np.array([0.0, 0.2, 0.5]), 0.1, 0.2)
    assert pl[0] == 1 and pl[2] == 0 and 0 < pl[1] < 1


@pytest.mark.parametrize("M", [1, 2, 3, 4])
def test_tooth_vanishing_moments(M):
    sh = ToothShape(M)
    for m in range(M):
        assert abs(float(np.sum(sh.weights * sh.centers**m))) < 1e-12
    assert sh.weights[M // 2] == -1


@pytest.mark.parametrize("N,start,length", [(4, 0.0, 0.25), (16, 0.3, 0.0625), (7, 0.9, 0.2)])
def test_comb_block_properties(N, start, length):
    blk = comb_block(Arc.from_start(start, length), N, 2, 2**16)
    props = blk.properties()
    assert props["support"] and props["range"] and props["mass"] and props["plateau"]
    assert abs(float(np.mean(blk.full()))) < 1e-3 * length


def test_comb_block_unresolved():
    with pytest.raises(BlockFailure):
        comb_block(Arc.from_start(0.0, 1 / 64), 64, 2, 2**12)
