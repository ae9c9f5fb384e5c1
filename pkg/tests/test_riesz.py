import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from riesz_lab.core_fourier import TrigPoly, idft
from riesz_lab.errors import BlocksOverlap, DomainError, SpecViolation
from riesz_lab.riesz import (RieszSpec, _re_dirichlet_values, adapted_increments, adapted_partial,
                             adapted_partials, block_energies, block_spectrum, classical_comparison,
                             classical_partial, classical_partials, direct_product,
                             local_l2_bounds, log_expansion_remainder, re_dirichlet,
                             verify_local_l2)


@st.composite
def adapted_specs(draw, max_depth=4):
    depth = draw(st.integers(1, max_depth))
    N = [draw(st.integers(1, 8))]
    for _ in range(depth - 1):
        N.append(N[-1] * draw(st.integers(4, 6)))
    a = [draw(st.floats(0.01, 0.5)) for _ in range(depth)]
    return RieszSpec("adapted", a, N)


@st.composite
def classical_specs(draw, max_depth=4):
    depth = draw(st.integers(1, max_depth))
    N = [draw(st.integers(1, 8))]
    for _ in range(depth - 1):
        N.append(N[-1] * draw(st.integers(3, 5)))
    a = [draw(st.floats(0.01, 1.0)) for _ in range(depth)]
    return RieszSpec("classical", a, N)


# spec validation

def test_spec_violations():
    with pytest.raises(SpecViolation):
        RieszSpec("adapted", [0.6], [4])
    with pytest.raises(SpecViolation):
        RieszSpec("adapted", [0.5, 0.5], [4, 15])
    with pytest.raises(SpecViolation):
        RieszSpec("classical", [0.5, 0.5], [4, 11])
    with pytest.raises(SpecViolation):
        RieszSpec("classical", [0.0], [4])
    with pytest.raises(SpecViolation):
        RieszSpec("other", [0.5], [4])
    with pytest.raises(SpecViolation):
        RieszSpec("adapted", [0.1] * 9, [4**j for j in range(1, 10)])
    with pytest.raises(SpecViolation):
        adapted_partials(RieszSpec("classical", [0.5], [4]))


def test_degree():
    assert RieszSpec("adapted", [0.5, 0.5], [4, 16]).degree() == 7 + 31
    assert RieszSpec("classical", [0.5, 0.5], [3, 9]).degree() == 12


# partial products

def test_classical_depth_zero():
    p = classical_partial(RieszSpec("classical", [0.5], [3], depth=0))
    assert p.degree == 0 and p.coeff(0) == 1


def test_classical_single_factor():
    p = classical_partial(RieszSpec("classical", [0.5], [3]))
    np.testing.assert_allclose(p.coeffs, [0.25, 0, 0, 1, 0, 0, 0.25], atol=1e-15)


def test_adapted_single_factor():
    p = adapted_partial(RieszSpec("adapted", [0.5], [4]))
    assert p.coeff(0) == pytest.approx(1)
    for n in range(4, 8):
        assert abs(p.coeff(n) - 1 / 16) < 1e-15 and abs(p.coeff(-n) - 1 / 16) < 1e-15
    assert set(p.support(1e-15).tolist()) == {0, 4, 5, 6, 7, -4, -5, -6, -7}


def test_first_block_energy_is_half_of_a2_over_N():
    # coefficients a/(2N) on 2N frequencies give a^2/(2N)
    spec = RieszSpec("adapted", [0.5], [4])
    per, off = block_energies(adapted_partial(spec), block_spectrum(spec))
    assert abs(per[0] - 1 / 32) < 1e-15
    assert off <= 1e-30


def test_re_dirichlet_closed_form():
    t = np.linspace(0, 2 * np.pi, 1001)
    for N in (1, 3, 8):
        np.testing.assert_allclose(_re_dirichlet_values(N, t), re_dirichlet(N)(t), atol=1e-12)


def test_increments_sum_to_partial():
    spec = RieszSpec("adapted", [0.5, 0.3, 0.2], [2, 8, 40])
    total = TrigPoly.constant(1.0)
    for r in adapted_increments(spec):
        total = total + r
    np.testing.assert_allclose(total.coeffs, adapted_partial(spec).coeffs, atol=1e-14)


@given(adapted_specs(6))
def test_recursion_equals_direct_product(spec):
    p, q = adapted_partial(spec), direct_product(spec)
    K = max(p.degree, q.degree)
    assert np.max(np.abs(p.padded(K).coeffs - q.padded(K).coeffs)) <= 1e-10


@given(classical_specs())
def test_classical_equals_direct_product(spec):
    p, q = classical_partial(spec), direct_product(spec)
    K = max(p.degree, q.degree)
    assert np.max(np.abs(p.padded(K).coeffs - q.padded(K).coeffs)) <= 1e-10


@given(st.one_of(adapted_specs(), classical_specs()))
def test_probability_density(spec):
    ps = adapted_partials(spec) if spec.kind == "adapted" else classical_partials(spec)
    for P in ps:
        assert abs(P.coeff(0) - 1) <= 1e-12
        M = max(4096, 8 * P.degree)
        M = 1 << (M - 1).bit_length()
        assert float(np.min(idft(P, M).samples)) >= -1e-10


# blocks

def test_blocks_adapted_overlap():
    with pytest.raises(BlocksOverlap):
        block_spectrum(RieszSpec("adapted", [0.5] * 3, [4, 16, 64]))
    b = block_spectrum(RieszSpec("adapted", [0.5] * 3, [4, 16, 64]), strict=False)
    assert b.blocks == ((2, 12), (6, 48), (22, 192))


def test_blocks_adapted_disjoint():
    assert block_spectrum(RieszSpec("adapted", [0.5, 0.5], [4, 64])).blocks == ((2, 12), (22, 192))


def test_blocks_classical():
    assert block_spectrum(RieszSpec("classical", [0.5, 0.5], [8, 24])).blocks == ((4, 12), (12, 36))


def test_spectrum_contained_in_blocks():
    spec = RieszSpec("adapted", [0.5, 0.4, 0.3], [4, 16, 64])
    _, off = block_energies(adapted_partial(spec), block_spectrum(spec, strict=False))
    assert off <= 1e-12


@given(st.one_of(adapted_specs(5), classical_specs()))
def test_off_block_mass_vanishes(spec):
    P = adapted_partial(spec) if spec.kind == "adapted" else classical_partial(spec)
    _, off = block_energies(P, block_spectrum(spec, strict=False))
    assert off <= 1e-12


@given(classical_specs())
def test_classical_block_estimate(spec):
    P = classical_partial(spec)
    per, _ = block_energies(P, block_spectrum(spec, strict=False))
    a = np.array(spec.a)
    bound = a**2 * np.cumprod(1 + a**2)
    assert np.all(per <= bound + 1e-12)


@given(adapted_specs(5))
def test_adapted_l2_product_bound(spec):
    r = np.array(spec.a) ** 2 / np.array(spec.N)
    for k, P in enumerate(adapted_partials(spec)):
        assert P.energy() <= float(np.prod(1 + r[:k])) + 1e-12


def test_local_l2_first_block():
    rep = verify_local_l2(RieszSpec("adapted", [0.5], [4]))
    row = rep.rows[0]
    assert row["bound"] == pytest.approx(1 / 16)
    assert row["measured"] == pytest.approx(1 / 32)
    assert rep.passed and not rep.overlapping and rep.off_block <= 1e-30


def test_local_l2_second_block_exceeds_bound():
    # frozen from the run: block 2 carries about |P_1(1)|^2 a^2 / (2 N_2) with P_1(1) = 1.5
    rep = verify_local_l2(RieszSpec("adapted", [0.5, 0.5], [4, 64]))
    bound = (0.25 / 64) * (1 + 0.25 / 4)
    assert rep.rows[1]["bound"] == pytest.approx(bound, rel=1e-15)
    assert rep.rows[1]["measured"] == pytest.approx(0.004179954528808594, rel=1e-12)
    assert not rep.rows[1]["pass"]
    assert rep.off_block <= 1e-12
    Q = direct_product(RieszSpec("adapted", [0.5, 0.5], [4, 64]))
    oracle = sum(abs(Q.coeff(n)) ** 2 for n in range(-192, 193) if 22 <= abs(n))
    assert rep.rows[1]["measured"] == pytest.approx(oracle, rel=1e-10)


def test_local_l2_violation_with_touching_blocks():
    # frozen from the run: mass of the third factor lands above the local bound
    rep = verify_local_l2(RieszSpec("adapted", [0.5, 0.5, 0.5], [4, 16, 64]))
    assert rep.overlapping
    assert not rep.rows[2]["pass"]
    assert rep.rows[2]["measured"] == pytest.approx(0.00758, rel=1e-3)


def test_local_l2_csv():
    text = verify_local_l2(RieszSpec("adapted", [0.5], [4])).to_csv()
    assert text.splitlines()[0] == "j,block_lo,block_hi,measured,bound,pass"
    assert text.splitlines()[1].endswith(",true")


def test_local_bounds_formula():
    b = local_l2_bounds(RieszSpec("adapted", [0.5, 0.5], [4, 64]))
    np.testing.assert_allclose(b, [0.25 / 4, 0.25 / 64 * (1 + 0.25 / 4)], rtol=1e-15)


# log expansion

def test_log_expansion_depth_one():
    r = log_expansion_remainder(RieszSpec("adapted", [0.5], [4]), 8192)
    assert r["sup"] <= 1 / 8 + 1e-9 and r["pass"]


def test_log_expansion_small_amplitude():
    assert log_expansion_remainder(RieszSpec("adapted", [0.01], [4]), 8192)["sup"] <= 5e-5


def test_log_expansion_fails_for_n1():
    # Re T_1 = cos reaches -1, and log(1/2) + 1/2 exceeds 1/8
    r = log_expansion_remainder(RieszSpec("adapted", [0.5], [1]), 8192)
    assert not r["pass"]
    assert r["sup"] == pytest.approx(math.log(2) - 0.5, rel=1e-9)


def test_log_expansion_factor_oracle():
    spec = RieszSpec("adapted", [0.4, 0.3, 0.2], [2, 8, 32])
    M = 8192
    t = 2 * np.pi * np.arange(M) / M
    h = np.zeros(M)
    for a, N in zip(spec.a, spec.N):
        x = a * _re_dirichlet_values(N, t)
        h += x - np.log1p(x)
    assert log_expansion_remainder(spec, M)["sup"] == pytest.approx(float(np.max(np.abs(h))), abs=1e-12)


def test_log_expansion_domain_error(monkeypatch):
    import riesz_lab.riesz as R
    monkeypatch.setattr(R, "adapted_partial", lambda spec: TrigPoly.constant(-1.0))
    with pytest.raises(DomainError):
        R.log_expansion_remainder(RieszSpec("adapted", [0.5], [4]))


def test_classical_comparison():
    s = classical_comparison(RieszSpec("adapted", [0.5, 0.2], [4, 16]))
    assert s.kind == "classical" and s.a == (0.5, 0.2)
