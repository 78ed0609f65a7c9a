"""Composite prospects ``pi_n = A_n (x) B`` and their operator-valued measure.

Basis convention: product basis ``|n alpha>`` has flat index
``n * dim_B + alpha`` (``B`` fastest), matching :func:`numpy.kron`. The
ordering remark that ``A_n`` happens after ``B_alpha`` is documentation only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import InvariantViolation, NormalizationError, SpaceMismatchError
from .events import ElementaryEvent, StatisticalOperator, UncertainUnion, projector_of
from .linalg import (
    DEFAULT_TOL,
    ComplexMatrix,
    HilbertSpace,
    frozen,
    hs_norm,
    identity,
    outer,
    tensor_product,
    trace,
)


@dataclass(frozen=True)
class CompositeSpace:
    space_a: HilbertSpace
    space_b: HilbertSpace

    @property
    def dims(self) -> tuple[int, int]:
        return self.space_a.dimension, self.space_b.dimension

    @property
    def product_dimension(self) -> int:
        return self.space_a.dimension * self.space_b.dimension

    # lets a CompositeSpace stand wherever a HilbertSpace is expected
    @property
    def dimension(self) -> int:
        return self.product_dimension

    @property
    def basis_labels(self) -> tuple[str, ...]:
        return tuple(
            f"{a}|{b}" for a in self.space_a.basis_labels for b in self.space_b.basis_labels
        )

    def index(self, n: int, alpha: int) -> int:
        return n * self.space_b.dimension + alpha


def product_state(
    rho_a: StatisticalOperator, rho_b: StatisticalOperator, tol: float = DEFAULT_TOL
) -> StatisticalOperator:
    space = CompositeSpace(rho_a.space, rho_b.space)
    return StatisticalOperator(tensor_product(rho_a.matrix, rho_b.matrix), space, tol)


@dataclass(frozen=True)
class Prospect:
    outcome: ElementaryEvent
    uncertainty: UncertainUnion

    @property
    def space(self) -> CompositeSpace:
        return CompositeSpace(self.outcome.space, self.uncertainty.space)


@dataclass(frozen=True, eq=False)
class ProspectOperator:
    matrix: ComplexMatrix
    source: Prospect


@dataclass(frozen=True)
class ProspectLattice:
    """Ordered prospects that share one uncertain union ``B``."""

    prospects: tuple[Prospect, ...]

    def __post_init__(self):
        ps = tuple(self.prospects)
        if len(ps) < 2:
            raise ValueError("a prospect lattice needs at least two prospects")
        first = ps[0]
        for p in ps[1:]:
            if p.uncertainty != first.uncertainty:
                raise ValueError("all prospects of a lattice must share one uncertain union")
            if p.outcome.space != first.outcome.space:
                raise SpaceMismatchError("lattice outcomes live on different spaces")
        idx = [p.outcome.index for p in ps]
        if len(set(idx)) != len(idx):
            raise ValueError(f"lattice outcomes are not distinct: {idx}")
        object.__setattr__(self, "prospects", ps)

    @classmethod
    def complete(cls, space_a: HilbertSpace, union: UncertainUnion) -> "ProspectLattice":
        """One prospect per basis outcome of ``space_a``."""
        return cls(tuple(Prospect(ElementaryEvent(space_a, n), union) for n in range(space_a.dimension)))

    @property
    def space(self) -> CompositeSpace:
        return self.prospects[0].space

    @property
    def uncertainty(self) -> UncertainUnion:
        return self.prospects[0].uncertainty

    def __len__(self):
        return len(self.prospects)

    def __iter__(self):
        return iter(self.prospects)


@dataclass(frozen=True)
class ProbabilityDecomposition:
    """``p = f + q``: total, utility (diagonal) and attraction (off-diagonal) parts."""

    p: float
    f: float
    q: float


def prospect_state(prospect: Prospect) -> ComplexMatrix:
    """``|pi_n> = sum_alpha b_alpha |n alpha>`` as a column vector."""
    space = prospect.space
    v = np.zeros((space.product_dimension, 1), dtype=np.complex128)
    n = prospect.outcome.index
    for alpha, b in enumerate(prospect.uncertainty.amplitudes):
        v[space.index(n, alpha), 0] = b
    return v


def prospect_operator(prospect: Prospect) -> ProspectOperator:
    return ProspectOperator(frozen(outer(prospect_state(prospect))), prospect)


def povm_deviation(lattice: ProspectLattice) -> float:
    """``|| sum_n P(pi_n) - 1_AB ||_HS``.

    With a single shared ``B`` the sum is ``1_A (x) |B><B|``, so the deviation
    vanishes only for a one-dimensional ``H_B``.
    """
    space = lattice.space
    if len(lattice) != space.space_a.dimension:
        raise ValueError(
            f"lattice has {len(lattice)} outcomes but H_A has dimension {space.space_a.dimension}"
        )
    total = sum(prospect_operator(p).matrix for p in lattice)
    return hs_norm(total - identity(space.product_dimension))


def _check_composite(rho: StatisticalOperator, space: CompositeSpace):
    if rho.space.dimension != space.product_dimension:
        raise SpaceMismatchError(
            f"state of dimension {rho.space.dimension} on a {space.dims} composite space"
        )
    if isinstance(rho.space, CompositeSpace) and rho.space != space:
        raise SpaceMismatchError("state and prospect use different composite spaces")


def joint_probability(
    rho: StatisticalOperator, a: ElementaryEvent, b: ElementaryEvent
) -> float:
    """``Tr rho (P_n (x) P_alpha)``."""
    space = CompositeSpace(a.space, b.space)
    _check_composite(rho, space)
    return float(trace(rho.matrix @ tensor_product(projector_of(a), projector_of(b))).real)


def marginal_additivity_check(
    rho: StatisticalOperator, a: ElementaryEvent, bs: Sequence[ElementaryEvent]
) -> tuple[float, float]:
    """Return ``(sum_alpha p(A_n (x) B_alpha), Tr rho (P_n (x) 1_B))``."""
    bs = list(bs)
    if not bs:
        raise ValueError("no B events given")
    space_b = bs[0].space
    if sorted(e.index for e in bs) != list(range(space_b.dimension)) or any(
        e.space != space_b for e in bs
    ):
        raise ValueError("B events must exhaust the basis of H_B exactly once")
    summed = math.fsum(joint_probability(rho, a, b) for b in bs)
    marginal = trace(rho.matrix @ tensor_product(projector_of(a), identity(space_b.dimension)))
    return summed, float(marginal.real)


def _raw(rho: StatisticalOperator, lattice_space: CompositeSpace, union: UncertainUnion, tol: float):
    d_a, d_b = lattice_space.dims
    f, q = _kernels.lattice_mode_sums(rho.matrix, d_a, d_b, np.asarray(union.amplitudes))
    worst = float(np.max(np.abs(q.imag))) if q.size else 0.0
    if worst > tol:
        raise InvariantViolation(f"attraction sum has imaginary residual {worst:.3e}")
    return f, q.real


def prospect_probability(
    rho: StatisticalOperator, prospect: Prospect, tol: float = DEFAULT_TOL
) -> ProbabilityDecomposition:
    """Unnormalized ``p = Tr rho P(pi_n)`` split into its diagonal and interference parts."""
    space = prospect.space
    _check_composite(rho, space)
    p = float(trace(rho.matrix @ prospect_operator(prospect).matrix).real)
    f, q = _raw(rho, space, prospect.uncertainty, tol)
    n = prospect.outcome.index
    return ProbabilityDecomposition(p, float(f[n]), float(q[n]))


def lattice_probabilities(
    rho: StatisticalOperator,
    lattice: ProspectLattice,
    normalize: bool = True,
    tol: float = DEFAULT_TOL,
) -> list[ProbabilityDecomposition]:
    """Decompositions for every prospect of ``lattice``.

    With ``normalize``, ``f`` is divided by its lattice sum, ``p`` likewise,
    and ``q`` is redefined as ``p - f``; then ``sum p = sum f = 1`` and
    ``sum q = 0``.
    """
    space = lattice.space
    _check_composite(rho, space)
    f_all, q_all = _raw(rho, space, lattice.uncertainty, tol)
    raw = []
    for pr in lattice:
        n = pr.outcome.index
        p = float(trace(rho.matrix @ prospect_operator(pr).matrix).real)
        raw.append(ProbabilityDecomposition(p, float(f_all[n]), float(q_all[n])))
    if not normalize:
        return raw
    p_sum = math.fsum(d.p for d in raw)
    f_sum = math.fsum(d.f for d in raw)
    if p_sum <= tol:
        raise NormalizationError("prospect probabilities sum to zero on this lattice")
    if f_sum <= tol:
        raise NormalizationError("utility factors sum to zero on this lattice")
    out = []
    for d in raw:
        p = _clamp_unit(d.p / p_sum, tol)
        f = _clamp_unit(d.f / f_sum, tol)
        out.append(ProbabilityDecomposition(p, f, p - f))
    return out


def _clamp_unit(x: float, tol: float) -> float:
    if x < -tol or x > 1.0 + tol:
        raise InvariantViolation(f"normalized probability {x!r} outside [0, 1]")
    return min(max(x, 0.0), 1.0)


def decohere(decomp: ProbabilityDecomposition) -> float:
    """Classical limit: the interference term is dropped, leaving ``f``."""
    return decomp.f
