"""Acceptance suite: each criterion at its stated tolerance and time budget.

Every check prints one ``PASS``/``FAIL`` line (also collected into a block at
the end of the pytest run). Run standalone with ``python3 tests/test_acceptance.py``.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from qdt.entanglement import cross_block_norm, separability_test
from qdt.events import ElementaryEvent, StatisticalOperator, UncertainUnion
from qdt.linalg import HilbertSpace
from qdt.lottery import Lottery, UtilityFunction, predict, utility_factors
from qdt.errors import AmbiguousRankingError
from qdt.prospects import CompositeSpace, Prospect, ProspectLattice, lattice_probabilities, prospect_operator
from qdt.quarterlaw import AttractionDistribution, estimate_aggregate

from conftest import ACCEPTANCE_LINES, direct_prospect_p, random_amplitudes, random_density

SEED = 20240917


def report(name, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def cli_records(*argv):
    start = time.perf_counter()
    out = subprocess.run(
        [sys.executable, "-m", "qdt", *argv, "--format", "records"], capture_output=True, check=True
    ).stdout
    return out, time.perf_counter() - start


def lottery_rows(raw):
    rows = [json.loads(line) for line in raw.decode().splitlines()]
    lots = [r for r in rows if r["record"] == "lottery"]
    ranking = next(r for r in rows if r["record"] == "ranking")
    return lots, ranking


def state(m, d_a, d_b):
    return StatisticalOperator(m, CompositeSpace(HilbertSpace(d_a), HilbertSpace(d_b)))


def lattice(d_a, amps):
    return ProspectLattice.complete(
        HilbertSpace(d_a), UncertainUnion.normalized(HilbertSpace(len(amps)), amps)
    )


def test_pair1_prediction():
    out, elapsed = cli_records("predict", "kt_pair1")
    lots, ranking = lottery_rows(out)
    f = [r["f"] for r in lots]
    p = [r["p"] for r in lots]
    dev = ranking["max_deviation"]
    ok = (
        max(abs(a - b) for a, b in zip(f, (0.5, 0.5))) <= 1e-12
        and max(abs(a - b) for a, b in zip(p, (0.25, 0.75))) <= 1e-12
        and dev <= 0.11 + 1e-12
        and elapsed < 1.0
    )
    report("pair1_prediction", ok, f"f={f} p={p} max|dev|={dev} time={elapsed:.3f}s")


def test_pair2_prediction():
    out, elapsed = cli_records("predict", "kt_pair2")
    lots, ranking = lottery_rows(out)
    p = [r["p"] for r in lots]
    dev = ranking["max_deviation"]
    ok = (
        max(abs(a - b) for a, b in zip(p, (0.75, 0.25))) <= 1e-12
        and abs(dev - 0.02) <= 1e-12
        and elapsed < 1.0
    )
    report("pair2_prediction", ok, f"p={p} max|dev|={dev} time={elapsed:.3f}s")


def test_quarter_law_monte_carlo():
    start = time.perf_counter()
    r = estimate_aggregate(AttractionDistribution("uniform_magnitude", lattice_size=2), 1_000_000, 42)
    elapsed = time.perf_counter() - start
    gap = abs(r.aggregate_abs_q - 0.25)
    ok = gap <= 0.001 and elapsed < 30.0
    report(
        "quarter_law_monte_carlo",
        ok,
        f"mean|q|={r.aggregate_abs_q:.6f} se={r.standard_error:.2e} |gap|={gap:.2e} time={elapsed:.2f}s",
    )


def test_product_states_have_no_attraction():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst, count = 0.0, 0
    for _ in range(600):
        d_a, d_b = (int(x) for x in rng.integers(2, 5, size=2))
        m = np.kron(random_density(rng, d_a), random_density(rng, d_b))
        amps = random_amplitudes(rng, d_b, int(rng.integers(2, d_b + 1)))
        for d in lattice_probabilities(state(m, d_a, d_b), lattice(d_a, amps)):
            worst = max(worst, abs(d.q))
        count += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 10.0
    report("product_states_no_attraction", ok, f"{count} states max|q|={worst:.2e} time={elapsed:.2f}s")


def test_probability_split_and_direct_trace():
    rng = np.random.default_rng(SEED + 1)
    worst_split, worst_trace, count = 0.0, 0.0, 0
    for _ in range(1000):
        d_a, d_b = (int(x) for x in rng.integers(2, 5, size=2))
        m = random_density(rng, d_a * d_b, int(rng.integers(1, d_a * d_b + 1)))
        lat = lattice(d_a, random_amplitudes(rng, d_b, int(rng.integers(1, d_b + 1))))
        b = lat.uncertainty.amplitudes
        n = int(rng.integers(d_a))
        d = lattice_probabilities(state(m, d_a, d_b), lat, normalize=False)[n]
        worst_split = max(worst_split, abs(d.p - d.f - d.q))
        worst_trace = max(worst_trace, abs(d.p - direct_prospect_p(m, n, b, d_b).real))
        count += 1
    ok = worst_split <= 1e-10 and worst_trace <= 1e-12
    report(
        "p_equals_f_plus_q",
        ok,
        f"{count} pairs max|p-f-q|={worst_split:.2e} max|p-trace|={worst_trace:.2e}",
    )


def test_lattice_normalization():
    rng = np.random.default_rng(SEED + 2)
    worst = {"sum_p": 0.0, "sum_f": 0.0, "sum_q": 0.0}
    for size in range(2, 6):
        for _ in range(100):
            d_b = int(rng.integers(1, 5))
            m = random_density(rng, size * d_b)
            ds = lattice_probabilities(state(m, size, d_b), lattice(size, random_amplitudes(rng, d_b)))
            worst["sum_p"] = max(worst["sum_p"], abs(math.fsum(d.p for d in ds) - 1))
            worst["sum_f"] = max(worst["sum_f"], abs(math.fsum(d.f for d in ds) - 1))
            worst["sum_q"] = max(worst["sum_q"], abs(math.fsum(d.q for d in ds)))
    ok = max(worst.values()) <= 1e-10
    report("lattice_normalization", ok, "sizes 2-5, " + " ".join(f"{k}={v:.1e}" for k, v in worst.items()))


def test_entanglement_classification():
    rng = np.random.default_rng(SEED + 3)
    worst_diag, worst_norm, misclassified, count = 0.0, 0.0, 0, 0
    for _ in range(500):
        d_a, d_b = (int(x) for x in rng.integers(1, 5, size=2))
        modes = int(rng.integers(1, d_b + 1))
        pr = Prospect(
            ElementaryEvent(HilbertSpace(d_a), int(rng.integers(d_a))),
            UncertainUnion.normalized(HilbertSpace(d_b), random_amplitudes(rng, d_b, modes)),
        )
        op = prospect_operator(pr).matrix
        worst_diag = max(worst_diag, separability_test(np.diag(np.diag(op)), (d_a, d_b)).residual)
        sep = separability_test(op, (d_a, d_b))
        if sep.separable != (modes < 2):
            misclassified += 1
        if modes >= 2:
            worst_norm = max(worst_norm, abs(sep.residual - cross_block_norm(pr)))
        count += 1
    ok = worst_diag <= 1e-12 and worst_norm <= 1e-12 and misclassified == 0
    report(
        "entanglement_classification",
        ok,
        f"{count} prospects diag residual={worst_diag:.1e} "
        f"|residual-cross norm|={worst_norm:.1e} misclassified={misclassified}",
    )


def random_lottery_set(rng):
    while True:
        lots = [
            Lottery(f"L{i}", tuple(zip(rng.uniform(0, 100, 3), rng.dirichlet(np.ones(3)))))
            for i in range(int(rng.integers(2, 5)))
        ]
        try:
            predict(lots)
        except AmbiguousRankingError:
            continue  # attraction cycle; the ranking does not depend on the utility scale
        return lots


def test_utility_scale_invariance():
    rng = np.random.default_rng(SEED + 4)
    worst, flips = 0.0, 0
    for _ in range(100):
        lots = random_lottery_set(rng)
        for base in (UtilityFunction(), UtilityFunction("power", 1.0, 0.7)):
            ref_f = utility_factors(lots, base)
            ref_choice = predict(lots, base).predicted_choice
            for c in (0.01, 1.0, 100.0):
                u = base.rescaled(c)
                worst = max(worst, max(abs(a - b) for a, b in zip(ref_f, utility_factors(lots, u))))
                flips += predict(lots, u).predicted_choice != ref_choice
    ok = worst <= 1e-12 and flips == 0
    report("utility_scale_invariance", ok, f"100 sets max|df|={worst:.1e} argmax changes={flips}")


@pytest.mark.parametrize(
    "argv",
    [
        ("predict", "kt_pair1"),
        ("validate", "entangled_state"),
        ("quarterlaw", "quarter_law", "--samples", "200000"),
    ],
    ids=["predict", "validate", "quarterlaw"],
)
def test_cli_determinism(argv):
    runs = [cli_records(*argv)[0] for _ in range(3)]
    ok = all(r == runs[0] for r in runs) and len(runs[0]) > 0
    report(f"cli_determinism[{argv[0]}]", ok, f"3 runs, {len(runs[0])} bytes, identical={ok}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
