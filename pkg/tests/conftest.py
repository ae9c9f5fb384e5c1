import numpy as np
import pytest
from hypothesis import settings

from riesz_lab.analysis import MeasureSurrogate, _gap_cut
from riesz_lab.core_fourier import Arc, GridFunction, TrigPoly, dft

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def random_poly(rng, K, real=False):
    c = rng.normal(size=2 * K + 1) + 1j * rng.normal(size=2 * K + 1)
    p = TrigPoly(c)
    return p.real_part() if real else p


def direct_dft(samples):
    """O(M^2) DFT: coefficient of frequency n for n = -M/2 .. M/2-1."""
    M = len(samples)
    k = np.arange(M)
    return {n: complex(np.sum(samples * np.exp(-2j * np.pi * k * n / M)) / M)
            for n in range(-M // 2, M // 2)}


def direct_convolution(f, g):
    out = {}
    for n, a in zip(f.frequencies, f.coeffs):
        for m, b in zip(g.frequencies, g.coeffs):
            out[int(n + m)] = out.get(int(n + m), 0) + a * b
    return out


def admissible_input(rng, M=4096):
    """Density vanishing on a random arc whose window coefficients are negligible."""
    eta = rng.uniform(0.05, 0.2)
    ex = Arc.from_start(rng.uniform(0, 1), eta)
    x = np.arange(M) / M
    mod = 1 + sum(rng.uniform(0, 0.3) * np.cos(2 * np.pi * k * x + rng.uniform(0, 6.3)) for k in (1, 2, 3))
    p = dft(GridFunction(_gap_cut(M, ex, 0.3) * mod))
    N = int(rng.integers(5, 31))
    return MeasureSurrogate(p, M), ex, N + int(rng.integers(45, 101)), N


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
