"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel is timed with ``timeit`` (best of ``--repeat``) on both backends,
after checking that the two return the same arrays.
"""

import argparse
import timeit

import numpy as np

from qdt import _kernels
from qdt.quarterlaw import AttractionDistribution, estimate_aggregate


def random_density(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real


def cases(rng):
    rho = random_density(rng, 64 * 64)
    amps = rng.normal(size=64) + 1j * rng.normal(size=64)
    amps /= np.linalg.norm(amps)
    draws = rng.choice([-1.0, 1.0], size=(200_000, 4)) * rng.uniform(0, 0.5, size=(200_000, 4))
    q, _ = _kernels.alternation_project(draws)
    dist = AttractionDistribution(lattice_size=5)
    return {
        "lattice_mode_sums (64 x 64)": (lambda: _kernels.lattice_mode_sums(rho, 64, 64, amps), 1),
        "alternation_project (200k x 5)": (lambda: _kernels.alternation_project(draws), 1),
        "mean_abs_rows (200k x 5)": (lambda: _kernels.mean_abs_rows(q), 10),
        "estimate_aggregate (1e6, N=5)": (lambda: estimate_aggregate(dist, 1_000_000, 1), 1),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if not _kernels.compiled_available():
        raise SystemExit("compiled kernels are not built; reinstall with Cython available")

    table = cases(np.random.default_rng(0))
    backends = ("compiled", "python")
    previous = _kernels.use_backend("auto")
    print(f"{'kernel':<34}{'compiled [s]':>14}{'python [s]':>14}{'speedup':>10}")
    try:
        for name, (fn, number) in table.items():
            results, times = {}, {}
            for b in backends:
                _kernels.use_backend(b)
                results[b] = fn()
                times[b] = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            a, b = (results[k] for k in backends)
            same = all(np.array_equal(x, y) for x, y in zip(a, b)) if isinstance(a, tuple) else (
                a == b if not isinstance(a, np.ndarray) else np.allclose(a, b, rtol=0, atol=1e-15)
            )
            flag = "" if same else "  (outputs differ!)"
            print(f"{name:<34}{times['compiled']:>14.4f}{times['python']:>14.4f}"
                  f"{times['python'] / times['compiled']:>9.1f}x{flag}")
    finally:
        _kernels.use_backend(previous)


if __name__ == "__main__":
    main()
