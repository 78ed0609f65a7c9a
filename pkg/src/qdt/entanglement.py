"""Separability of composite operators relative to the event algebras.

The algebra generated by orthogonal rank-one projectors ``{P_n}`` is the set
of operators diagonal in that basis. Linear combinations of tensor products
of such operators are therefore exactly the operators diagonal in the product
basis, and the distance to that span is the Hilbert-Schmidt norm of the
off-diagonal entries. No optimization is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .events import StatisticalOperator, projector_of, elementary_events
from .linalg import (
    ComplexMatrix,
    HilbertSpace,
    as_matrix,
    hs_norm,
    identity,
    partial_trace,
    tensor_product,
)
from .prospects import (
    Prospect,
    ProspectLattice,
    lattice_probabilities,
    prospect_operator,
    prospect_probability,
)

CLASSIFY_TOL = 1e-8


@dataclass(frozen=True)
class ObservableAlgebra:
    """The projectors of one event basis; checked to resolve the identity."""

    space: HilbertSpace
    generators: tuple[ComplexMatrix, ...]

    def __post_init__(self):
        d = self.space.dimension
        gens = tuple(as_matrix(g) for g in self.generators)
        if len(gens) != d:
            raise DimensionError(f"{len(gens)} generators for dimension {d}")
        for i, g in enumerate(gens):
            if g.shape != (d, d) or hs_norm(g @ g - g) > 1e-12 or abs(np.trace(g) - 1) > 1e-12:
                raise ValueError(f"generator {i} is not a rank-one projector")
            for h in gens[:i]:
                if hs_norm(g @ h) > 1e-12:
                    raise ValueError("generators are not mutually orthogonal")
        if hs_norm(sum(gens) - identity(d)) > 1e-12:
            raise ValueError("generators do not sum to the identity")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def of(cls, space: HilbertSpace) -> "ObservableAlgebra":
        return cls(space, tuple(projector_of(e) for e in elementary_events(space)))

    def contains(self, op, tol: float = CLASSIFY_TOL) -> bool:
        """Whether ``op`` lies in the span of the generators."""
        op = as_matrix(op)
        coeffs = [np.vdot(g, op) for g in self.generators]
        return hs_norm(op - sum(c * g for c, g in zip(coeffs, self.generators))) <= tol


@dataclass(frozen=True)
class SeparabilityReport:
    residual: float
    separable: bool
    tolerance: float


@dataclass(frozen=True)
class GateReport:
    """Outcome of the interference gate for one prospect.

    ``q_raw`` is the unnormalized mode-interference sum; ``q`` the attraction
    factor after lattice normalization (the one the gate speaks about).
    """

    operator_entangled: bool
    state_product: bool
    q_must_vanish: bool
    q: float
    q_raw: float
    holds: bool


def separability_test(c, dims: tuple[int, int], tol: float = CLASSIFY_TOL) -> SeparabilityReport:
    """Distance of ``c`` from ``span{P_n (x) P_alpha}``."""
    c = as_matrix(c)
    d_a, d_b = (int(d) for d in dims)
    if c.shape != (d_a * d_b, d_a * d_b):
        raise DimensionError(f"operator of shape {c.shape} is not on a {d_a}x{d_b} product space")
    off = c.copy()
    np.fill_diagonal(off, 0.0)
    residual = hs_norm(off)
    return SeparabilityReport(residual, residual <= tol, tol)


def is_product_state(
    rho: StatisticalOperator, dims: tuple[int, int], tol: float = CLASSIFY_TOL
) -> SeparabilityReport:
    """Exact product-form test ``rho == Tr_B rho (x) Tr_A rho``.

    This certifies product states only; convex mixtures of products are
    reported as non-product.
    """
    m = rho.matrix
    d_a, d_b = (int(d) for d in dims)
    if m.shape[0] != d_a * d_b:
        raise DimensionError(f"state of dimension {m.shape[0]} is not on a {d_a}x{d_b} space")
    rho_a = partial_trace(m, (d_a, d_b), "B")
    rho_b = partial_trace(m, (d_a, d_b), "A")
    residual = hs_norm(m - tensor_product(rho_a, rho_b))
    return SeparabilityReport(residual, residual <= tol, tol)


def prospect_entanglement_gate(
    rho: StatisticalOperator, prospect: Prospect, tol: float = CLASSIFY_TOL
) -> GateReport:
    """Check that interference is absent whenever the theory forbids it.

    ``q`` may be nonzero only if the prospect operator is entangled and the
    strategic state is not of product form. The attraction factor is
    evaluated on the complete lattice over ``H_A`` sharing the prospect's
    uncertain union, normalized, so that the alternation condition holds.
    """
    space = prospect.space
    op = prospect_operator(prospect).matrix
    entangled = not separability_test(op, space.dims, tol).separable
    product = is_product_state(rho, space.dims, tol).separable
    must_vanish = (not entangled) or product
    raw = prospect_probability(rho, prospect)
    lattice = ProspectLattice.complete(space.space_a, prospect.uncertainty)
    q = lattice_probabilities(rho, lattice, normalize=True)[prospect.outcome.index].q
    holds = (not must_vanish) or abs(q) <= tol
    return GateReport(entangled, product, must_vanish, q, raw.q, holds)


def cross_block_norm(prospect: Prospect) -> float:
    """Analytic norm of the off-diagonal part of ``|pi_n><pi_n|``."""
    w = np.array(prospect.uncertainty.weights)
    return float(np.sqrt(max(w.sum() ** 2 - (w ** 2).sum(), 0.0)))
