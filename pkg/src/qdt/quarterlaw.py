"""Monte Carlo check of the aggregate attraction factor ``mean |q| = 1/4``.

Each lattice sample draws ``N - 1`` signed magnitudes, completes them with
``-sum`` so the alternation condition holds, then clamps into [-1, 1] and
redistributes any residual (see :func:`qdt._kernels.alternation_project`).
For ``N = 2`` this gives ``q_2 = -q_1`` with ``|q_1|`` distributed exactly as
the magnitude law.

Randomness: samples are produced in fixed blocks of ``CHUNK`` rows; block
``i`` uses ``PCG64(SeedSequence([seed, i]))``. Output is therefore a pure
function of ``(distribution, samples, seed)`` regardless of how blocks are
scheduled, and shorter runs are prefixes of longer ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import _kernels
from .errors import ConvergenceError

CHUNK = 1 << 16
MAX_ITER = 100
KINDS = ("uniform_magnitude", "beta_magnitude", "truncated_gaussian")


def truncated_halfnormal_mean(sigma: float) -> float:
    """Mean of ``|N(0, sigma^2)|`` conditioned on ``|x| <= 1``."""
    z = 1.0 / (sigma * math.sqrt(2.0))
    return sigma * math.sqrt(2.0 / math.pi) * (1.0 - math.exp(-z * z)) / math.erf(z)


def sigma_for_mean(target: float = 0.25) -> float:
    """Scale of the truncated half-normal whose mean is ``target``."""
    from scipy import optimize  # deferred: scipy is slow to import and only this family needs it

    return optimize.brentq(lambda s: truncated_halfnormal_mean(s) - target, 1e-3, 10.0, xtol=1e-15)


_DEFAULTS = {
    "uniform_magnitude": {"low": 0.0, "high": 0.5},
    "beta_magnitude": {"a": 1.0, "b": 3.0},
    "truncated_gaussian": {"sigma": None},
}


@dataclass(frozen=True, eq=False)
class AttractionDistribution:
    """Law of ``|q|`` for one decision maker, plus the lattice size.

    ``uniform_magnitude(low, high)``: ``|q| ~ U(low, high)``, default [0, 1/2].
    ``beta_magnitude(a, b)``: ``|q| ~ Beta(a, b)``, default Beta(1, 3).
    ``truncated_gaussian(sigma)``: ``|q| ~ |N(0, sigma)|`` cut at 1; the default
    sigma makes the mean 1/4.
    Signs are fair coin flips.
    """

    kind: str = "uniform_magnitude"
    params: Mapping[str, float] = field(default_factory=dict)
    lattice_size: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}; expected one of {KINDS}")
        unknown = set(self.params) - set(_DEFAULTS[self.kind])
        if unknown:
            raise ValueError(f"unknown parameters {sorted(unknown)} for {self.kind}")
        params = {**_DEFAULTS[self.kind], **{k: float(v) for k, v in self.params.items()}}
        if self.kind == "uniform_magnitude":
            if not 0.0 <= params["low"] <= params["high"] <= 1.0:
                raise ValueError(f"need 0 <= low <= high <= 1, got {params}")
        elif self.kind == "beta_magnitude":
            if not (params["a"] > 0 and params["b"] > 0):
                raise ValueError(f"beta parameters must be positive, got {params}")
        else:
            if params["sigma"] is None:
                params["sigma"] = sigma_for_mean(0.25)
            if not params["sigma"] > 0:
                raise ValueError(f"sigma must be positive, got {params['sigma']}")
        if int(self.lattice_size) < 2:
            raise ValueError(f"lattice size must be >= 2, got {self.lattice_size}")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "lattice_size", int(self.lattice_size))

    def __eq__(self, other):
        if not isinstance(other, AttractionDistribution):
            return NotImplemented
        return (self.kind, dict(self.params), self.lattice_size) == (
            other.kind, dict(other.params), other.lattice_size
        )

    @property
    def magnitude_mean(self) -> float:
        """Analytic mean of the magnitude law."""
        p = self.params
        if self.kind == "uniform_magnitude":
            return 0.5 * (p["low"] + p["high"])
        if self.kind == "beta_magnitude":
            return p["a"] / (p["a"] + p["b"])
        return truncated_halfnormal_mean(p["sigma"])

    def draw_magnitudes(self, rng: np.random.Generator, size) -> np.ndarray:
        p = self.params
        if self.kind == "uniform_magnitude":
            return rng.uniform(p["low"], p["high"], size)
        if self.kind == "beta_magnitude":
            return rng.beta(p["a"], p["b"], size)
        from scipy import special

        sigma = p["sigma"]
        scale = sigma * math.sqrt(2.0)
        u = rng.random(size)
        # inverse CDF of the half-normal restricted to [0, 1]
        return np.minimum(scale * special.erfinv(u * math.erf(1.0 / scale)), 1.0)


@dataclass(frozen=True)
class MCResult:
    sample_count: int
    aggregate_abs_q: float
    standard_error: float
    seed: int
    kind: str = ""
    lattice_size: int = 2


def _generator(seed: int, block: int) -> np.random.Generator:
    if int(seed) < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), block])))


def _block(dist: AttractionDistribution, seed: int, block: int) -> np.ndarray:
    rng = _generator(seed, block)
    k = dist.lattice_size - 1
    mags = dist.draw_magnitudes(rng, (CHUNK, k))
    signs = rng.integers(0, 2, size=(CHUNK, k)) * 2.0 - 1.0
    q, iters = _kernels.alternation_project(signs * mags, MAX_ITER)
    if np.any(iters < 0):
        raise ConvergenceError(
            f"alternation projection did not converge in {MAX_ITER} iterations"
        )
    return q


def sample_lattices(dist: AttractionDistribution, samples: int, seed: int) -> np.ndarray:
    """``(samples, N)`` array of attraction-factor lattices."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    blocks = -(-samples // CHUNK)
    return np.concatenate([_block(dist, seed, b) for b in range(blocks)])[:samples]


def sample_lattice_q(dist: AttractionDistribution, rng_seed: int) -> np.ndarray:
    """One lattice sample (the first of the seed's stream)."""
    return sample_lattices(dist, 1, rng_seed)[0]


def estimate_aggregate(dist: AttractionDistribution, samples: int, seed: int) -> MCResult:
    """Mean over samples of ``(1/N) sum_j |q_j|`` with its standard error."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    per_sample = _kernels.mean_abs_rows(sample_lattices(dist, samples, seed))
    mean = math.fsum(per_sample) / samples
    se = float(np.std(per_sample, ddof=1) / math.sqrt(samples)) if samples > 1 else float("inf")
    return MCResult(samples, mean, se, int(seed), dist.kind, dist.lattice_size)
