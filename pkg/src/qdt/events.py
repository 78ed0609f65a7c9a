"""Operationally testable events, uncertain unions and their probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .errors import NormalizationError, SpaceMismatchError
from .linalg import (
    DEFAULT_TOL,
    ComplexMatrix,
    HilbertSpace,
    frozen,
    is_hermitian,
    is_positive_semidefinite,
    ket,
    outer,
    trace,
)


@dataclass(frozen=True)
class ElementaryEvent:
    """Event ``A_n``, represented by basis vector ``|n>`` of ``space``."""

    space: HilbertSpace
    index: int

    def __post_init__(self):
        if not 0 <= int(self.index) < self.space.dimension:
            raise IndexError(
                f"event index {self.index} outside a space of dimension {self.space.dimension}"
            )
        object.__setattr__(self, "index", int(self.index))

    @property
    def label(self) -> str:
        return self.space.basis_labels[self.index]


def elementary_events(space: HilbertSpace) -> list[ElementaryEvent]:
    return [ElementaryEvent(space, n) for n in range(space.dimension)]


@dataclass(frozen=True, eq=False)
class StatisticalOperator:
    """Trace-one, Hermitian, positive operator on ``space``.

    ``space`` may be a plain :class:`HilbertSpace` or a
    :class:`~qdt.prospects.CompositeSpace`; only its ``dimension`` is used here.
    """

    matrix: ComplexMatrix
    space: HilbertSpace
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        m = frozen(self.matrix)
        d = self.space.dimension
        if m.shape != (d, d):
            raise SpaceMismatchError(
                f"state of shape {m.shape} on a space of dimension {d}"
            )
        if not is_hermitian(m, self.tol):
            raise ValueError("statistical operator is not Hermitian")
        if not is_positive_semidefinite(m, self.tol):
            raise ValueError("statistical operator is not positive semidefinite")
        tr = trace(m)
        if abs(tr - 1.0) > self.tol:
            raise NormalizationError(f"statistical operator has trace {tr}, expected 1")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def pure(cls, vector: ArrayLike, space: HilbertSpace, tol: float = DEFAULT_TOL):
        """``|psi><psi|`` for a vector normalized on the caller's behalf."""
        v = np.asarray(vector, dtype=np.complex128).ravel()
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise NormalizationError("zero vector has no pure state")
        return cls(outer(v / norm), space, tol)

    @classmethod
    def maximally_mixed(cls, space: HilbertSpace):
        d = space.dimension
        return cls(np.eye(d, dtype=np.complex128) / d, space)

    @classmethod
    def diagonal(cls, weights: Sequence[float], space: HilbertSpace, tol: float = DEFAULT_TOL):
        return cls(np.diag(np.asarray(weights, dtype=np.complex128)), space, tol)

    def __eq__(self, other):
        if not isinstance(other, StatisticalOperator):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.space, self.matrix.tobytes()))


@dataclass(frozen=True)
class UncertainUnion:
    """Superposed set of modes ``B = {B_alpha}`` with amplitudes ``b_alpha``.

    Amplitudes cover the whole basis (zeros allowed) and must satisfy
    ``sum |b|^2 = 1``; :meth:`normalized` rescales raw weights.
    """

    space: HilbertSpace
    amplitudes: tuple[complex, ...]
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        amps = tuple(complex(a) for a in self.amplitudes)
        if len(amps) != self.space.dimension:
            raise SpaceMismatchError(
                f"{len(amps)} amplitudes for a space of dimension {self.space.dimension}"
            )
        if not all(math.isfinite(a.real) and math.isfinite(a.imag) for a in amps):
            raise ValueError("amplitudes must be finite")
        weight = math.fsum(abs(a) ** 2 for a in amps)
        if abs(weight - 1.0) > self.tol:
            raise NormalizationError(
                f"amplitudes have total weight {weight!r}; use UncertainUnion.normalized"
            )
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, space: HilbertSpace, raw: Iterable[complex], tol: float = DEFAULT_TOL):
        raw = [complex(a) for a in raw]
        norm = math.sqrt(math.fsum(abs(a) ** 2 for a in raw))
        if norm == 0.0:
            raise NormalizationError("all amplitudes are zero")
        return cls(space, tuple(a / norm for a in raw), tol)

    @property
    def vector(self) -> ComplexMatrix:
        return np.array(self.amplitudes, dtype=np.complex128).reshape(-1, 1)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(abs(a) ** 2 for a in self.amplitudes)

    @property
    def mode_count(self) -> int:
        """Number of modes with a nonzero amplitude."""
        return sum(1 for a in self.amplitudes if a != 0)


@dataclass(frozen=True)
class EventProbability:
    total: float
    classical_part: float
    interference: float


def _check_space(rho: StatisticalOperator, space: HilbertSpace):
    if rho.space != space:
        raise SpaceMismatchError("event and statistical operator live on different spaces")


def projector_of(event: ElementaryEvent) -> ComplexMatrix:
    """Rank-one projector ``|n><n|``."""
    return outer(ket(event.space.dimension, event.index))


def event_probability(rho: StatisticalOperator, event: ElementaryEvent) -> float:
    _check_space(rho, event.space)
    return float(trace(rho.matrix @ projector_of(event)).real)


def union_probability(rho: StatisticalOperator, events: Iterable[ElementaryEvent]) -> float:
    """Probability of a union of distinct (hence orthogonal) elementary events."""
    events = list(events)
    indices = [e.index for e in events]
    if len(set(indices)) != len(indices):
        raise ValueError(f"duplicate events in union: {sorted(indices)}")
    for e in events:
        _check_space(rho, e.space)
    return math.fsum(event_probability(rho, e) for e in events)


def uncertain_operator(union: UncertainUnion) -> ComplexMatrix:
    """``|A><A|`` for ``|A> = sum_n a_n |n>``; rank one, generally not a projector."""
    return outer(union.vector)


def uncertain_probability(rho: StatisticalOperator, union: UncertainUnion) -> EventProbability:
    """Split ``Tr(rho P_A)`` into the weighted classical sum and the interference term."""
    _check_space(rho, union.space)
    total = trace(rho.matrix @ uncertain_operator(union))
    a = np.asarray(union.amplitudes)
    r = rho.matrix
    diag = np.real(np.diag(r))
    classical = math.fsum(float(w) for w in np.abs(a) ** 2 * diag)
    # sum_{m != n} conj(a_m) a_n <m|rho|n>
    cross = np.conj(a)[:, None] * r * a[None, :]
    np.fill_diagonal(cross, 0.0)
    interference = complex(cross.sum())
    if abs(interference.imag) > DEFAULT_TOL or abs(total.imag) > DEFAULT_TOL:
        raise ValueError(
            f"interference term has imaginary residual {interference.imag:.3e}"
        )
    return EventProbability(float(total.real), classical, interference.real)
