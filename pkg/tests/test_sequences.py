import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from riesz_lab.errors import Overflow, ScheduleViolation
from riesz_lab.sequences import (NecregSchedule, WeightSeq, check_regularity, divergence_diagnostics,
                                 doubling_constant, max_ratio_weights, necreg_weights,
                                 parse_weight_spec, reciprocal_terms, seq1_amplitudes)

SCHED = NecregSchedule((10, 101, 1011), (0.1, 0.009, 0.0008))


@st.composite
def schedules(draw):
    k = draw(st.integers(1, 3))
    N = [draw(st.integers(1, 20))]
    eps = [draw(st.floats(0.05, 1.0))]
    for _ in range(k - 1):
        N.append(10 * N[-1] + draw(st.integers(1, 30)))
        eps.append(eps[-1] / draw(st.floats(10.5, 20)))
    return NecregSchedule(tuple(N), tuple(eps))


# weight sequences

def test_power_weights():
    w = WeightSeq.power(1)
    assert w(0) == 1 and w(9) == pytest.approx(10)
    np.testing.assert_allclose(w.array(3), [1, 2, 3, 4])


def test_power_log_domain_huge_index():
    w = WeightSeq.power(0.5)
    assert w.log_value(4**500) == pytest.approx(0.5 * 500 * math.log(4), rel=1e-12)


def test_explicit_overflow():
    w = WeightSeq.explicit([1.0, 2.0])
    with pytest.raises(Overflow):
        w(2)
    with pytest.raises(Overflow):
        w.array(5)


def test_weights_must_be_positive():
    with pytest.raises(ValueError):
        WeightSeq.explicit([1.0, 0.0])


def test_weight_csv_round_trip():
    w = WeightSeq.explicit([1.0, 0.25, 3.0])
    assert WeightSeq.from_csv(w.to_csv()).table.tolist() == [1.0, 0.25, 3.0]
    with pytest.raises(ValueError):
        WeightSeq.from_csv("n,value\n0,1\n2,1\n")


def test_parse_weight_spec(tmp_path):
    assert parse_weight_spec("power:2").params == {"s": 2.0}
    f = tmp_path / "w.csv"
    f.write_text("n,value\n0,1.0\n1,0.5\n")
    assert parse_weight_spec(f"csv:{f}").table.tolist() == [1.0, 0.5]
    s = tmp_path / "s.json"
    s.write_text(SCHED.to_json())
    w = parse_weight_spec(f"necreg:{s}:2000")
    assert w.n_max == 2000 and w(101) == 0.009
    with pytest.raises(ValueError):
        parse_weight_spec("gauss:1")


# amplitude generator

def test_seq1_exact_for_lambda_4j():
    w = WeightSeq.custom(lambda n: n)
    plan = seq1_amplitudes(w, 50)
    np.testing.assert_array_equal(plan.d, np.ones(50))
    j = np.arange(1, 51)
    assert np.max(np.abs(plan.a - 1 / (2 * (1 + j)))) <= 1e-15


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_seq1_range(s):
    a = seq1_amplitudes(WeightSeq.power(s), 200).a
    assert np.all(a > 0) and np.all(a <= 0.5)


def test_seq1_divergent_trend():
    plan = seq1_amplitudes(WeightSeq.power(1), 1000)
    # oracle: d_j = 4^j/(1+4^j) in closed form
    j = np.arange(1, 1001)
    d = 1 / (1 + 4.0 ** -j)
    a = 0.5 * d / (1 + np.cumsum(d))
    np.testing.assert_allclose(plan.a, a, rtol=1e-12)
    assert float(np.sum(plan.a)) >= 3.0
    assert float(np.sum(plan.a)) == pytest.approx(float(np.sum(a)), rel=1e-12)


def test_seq1_weighted_sum_convergent_trend():
    plan = seq1_amplitudes(WeightSeq.power(1), 1000)
    S = plan.weighted_partial_sums()
    assert S[-1] <= 0.26
    assert S[-1] - S[499] <= 1e-3


def test_max_ratio_weights():
    np.testing.assert_allclose(max_ratio_weights(WeightSeq.power(1), 3), 1 + 4.0 ** -np.arange(1, 4))
    np.testing.assert_array_equal(max_ratio_weights(WeightSeq.power(0.5), 3), [1, 1, 1])


# necreg schedule and weights

def test_necreg_readout():
    w = necreg_weights(SCHED, 2000)
    assert w(10) == 0.1 and w(101) == 0.009
    assert w(50) == pytest.approx(100, rel=1e-15)
    assert w(5) == 1


def test_schedule_violations():
    with pytest.raises(ScheduleViolation):
        NecregSchedule((10, 100), (0.1, 0.001))
    with pytest.raises(ScheduleViolation):
        NecregSchedule((10, 101), (0.1, 0.01))
    with pytest.raises(ScheduleViolation):
        NecregSchedule((10,), (1.5,))
    with pytest.raises(ScheduleViolation):
        NecregSchedule.from_json(json.dumps({"N": [1], "eps": [0.5], "x": 0}))


def test_schedule_json_round_trip():
    assert NecregSchedule.from_json(SCHED.to_json()) == SCHED


@given(schedules())
def test_necreg_definition(sched):
    n_max = 3 * sched.N[-1]
    w = necreg_weights(sched, n_max)
    for k, (n, e) in enumerate(zip(sched.N, sched.eps)):
        assert w(n) == e
        assert w(n) * w(n + 1) == pytest.approx(1 / e, rel=1e-12)
        hi = sched.N[k + 1] if k + 1 < len(sched.N) else n_max + 1
        assert np.all(w.array(n_max)[n + 1:hi] == e**-2)


def test_gaps():
    assert SCHED.gaps(2000) == [(1, 11, 100, 0.1), (2, 102, 1010, 0.009), (3, 1012, 2000, 0.0008)]


# regularity

def test_regularity_constant_weights():
    r = check_regularity(WeightSeq.power(0), 2, 100)
    # direct sums: (n+1)(n+2)/(2 n^2) at n = 100, and 1 + 2 = 3 at n = 1
    assert r.growth_at_nmax == pytest.approx(101 * 102 / 2 / 100**2, rel=1e-12)
    assert r.A_growth == pytest.approx(3.0)
    assert r.A == pytest.approx(3.0)


def test_regularity_direct_oracle():
    w = WeightSeq.custom(lambda n: 1 / (1 + n))
    r = check_regularity(w, 3, 64)
    best = 0.0
    for n in range(1, 65):
        head = sum((1 + j) ** 2 / (1 + j) for j in range(n + 1)) / (n**3 / (1 + n))
        tail = sum(1 / (1 + j) / j**4 for j in range(n, 4 * 64 + 1)) / (1 / (1 + n) / n**3)
        best = max(best, head, tail)
    assert math.isfinite(r.A)
    assert r.A == pytest.approx(best, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0])
@pytest.mark.parametrize("M", [2, 3])
def test_regularity_stabilizes(alpha, M):
    w = WeightSeq.power(-alpha)
    a1 = check_regularity(w, M, 2**10).A
    a2 = check_regularity(w, M, 2**12).A
    assert abs(a2 / a1 - 1) <= 0.1


def test_regularity_necreg_unbounded():
    w = necreg_weights(SCHED, 8000)
    r = check_regularity(w, 2, 2000)
    assert r.trend == "unbounded"
    assert check_regularity(w, 2, 200).A < r.A


def test_doubling_constant():
    assert doubling_constant(WeightSeq.power(1), 50) == pytest.approx(101 / 51)
    assert doubling_constant(necreg_weights(SCHED, 4000), 500) == pytest.approx(1 / 0.009**3)


# divergence labels

def test_divergence_harmonic():
    r = divergence_diagnostics(1 / np.arange(1, 2**16 + 1))
    assert r.label == "divergent-like"
    assert r.last_increment == pytest.approx(math.log(2), abs=1e-4)


def test_divergence_squares():
    assert divergence_diagnostics(1 / np.arange(1, 2**16 + 1) ** 2).label == "convergent-like"


def test_divergence_constant():
    assert divergence_diagnostics(np.full(100, 0.1)).label == "divergent-like"


def test_divergence_short_input():
    with pytest.raises(ValueError):
        divergence_diagnostics(np.ones(10))


def test_reciprocal_terms():
    np.testing.assert_allclose(reciprocal_terms(WeightSeq.power(1), 3), [1 / 2, 1 / 3, 1 / 4])


def test_seq1_sqrt_weights_deep():
    # 4^j / sqrt(1+4^j) overflows a double past j = 1024
    plan = seq1_amplitudes(WeightSeq.power(0.5), 1100)
    assert np.all(plan.d == 1.0)
