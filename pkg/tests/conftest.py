import numpy as np
import pytest

from qdt import _kernels
from qdt.events import ElementaryEvent, StatisticalOperator, UncertainUnion
from qdt.linalg import HilbertSpace
from qdt.prospects import CompositeSpace, Prospect


def random_density(rng, d, rank=None):
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_hermitian(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def random_amplitudes(rng, d, modes=None):
    """Normalized complex amplitudes with ``modes`` nonzero entries (all by default)."""
    modes = d if modes is None else modes
    b = np.zeros(d, dtype=complex)
    idx = rng.choice(d, size=modes, replace=False)
    b[idx] = rng.normal(size=modes) + 1j * rng.normal(size=modes)
    return b / np.linalg.norm(b)


def state_on(matrix, d_a, d_b):
    space = CompositeSpace(HilbertSpace(d_a), HilbertSpace(d_b))
    return StatisticalOperator(matrix, space)


def make_prospect(n, amps, d_a):
    return Prospect(
        ElementaryEvent(HilbertSpace(d_a), n),
        UncertainUnion.normalized(HilbertSpace(len(amps)), amps),
    )


# -- independent oracles: plain loops, no library code ---------------------

def kron_oracle(a, b):
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def partial_trace_oracle(m, d_a, d_b, which):
    if which == "B":
        out = np.zeros((d_a, d_a), dtype=complex)
        for i in range(d_a):
            for k in range(d_a):
                for j in range(d_b):
                    out[i, k] += m[i * d_b + j, k * d_b + j]
    else:
        out = np.zeros((d_b, d_b), dtype=complex)
        for j in range(d_b):
            for l in range(d_b):
                for i in range(d_a):
                    out[j, l] += m[i * d_b + j, i * d_b + l]
    return out


def direct_prospect_p(rho, n, amps, d_b):
    """``Tr(rho |pi><pi|)`` with ``|pi>`` assembled entry by entry."""
    d = rho.shape[0]
    psi = np.zeros(d, dtype=complex)
    for al in range(d_b):
        psi[n * d_b + al] = amps[al]
    total = 0j
    for i in range(d):
        for j in range(d):
            total += rho[i, j] * psi[j] * np.conj(psi[i])
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(params=["compiled", "python"])
def backend(request):
    if request.param == "compiled" and not _kernels.compiled_available():
        pytest.skip("compiled kernels not built")
    previous = _kernels.use_backend(request.param)
    yield request.param
    _kernels.use_backend(previous)


# -- acceptance summary ------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
