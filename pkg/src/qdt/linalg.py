"""Dense complex linear algebra on small operator spaces.

Every operator and state in the package is a ``numpy.ndarray`` of dtype
``complex128`` (two dimensional, row-major). Spaces here never exceed a few
dozen dimensions, so nothing is sparse and nothing is clever.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionError

DEFAULT_TOL = 1e-10
#: largest total dimension a product space may reach
MAX_DIMENSION = 4096
EIG_RESIDUAL = 1e-9

ComplexMatrix = NDArray[np.complex128]


@dataclass(frozen=True)
class HilbertSpace:
    """Finite-dimensional space with one text label per basis vector."""

    dimension: int
    basis_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise DimensionError(f"dimension must be >= 1, got {self.dimension}")
        labels = tuple(str(x) for x in self.basis_labels) or tuple(
            str(i) for i in range(self.dimension)
        )
        if len(labels) != self.dimension:
            raise DimensionError(
                f"{len(labels)} basis labels given for dimension {self.dimension}"
            )
        if len(set(labels)) != len(labels):
            raise DimensionError(f"basis labels are not unique: {labels}")
        object.__setattr__(self, "dimension", int(self.dimension))
        object.__setattr__(self, "basis_labels", labels)

    @classmethod
    def labelled(cls, *labels: str) -> "HilbertSpace":
        return cls(len(labels), tuple(labels))


def as_matrix(a: ArrayLike, name: str = "matrix") -> ComplexMatrix:
    """Coerce ``a`` to a finite 2-D complex array (1-D input becomes a column)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be two dimensional, got shape {m.shape}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"{name} has an empty dimension: {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return m


def frozen(a: ArrayLike) -> ComplexMatrix:
    """Read-only copy, for storing inside immutable value types."""
    m = np.array(as_matrix(a), copy=True)
    m.setflags(write=False)
    return m


def _square(a: ComplexMatrix, name: str = "matrix") -> ComplexMatrix:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def identity(n: int) -> ComplexMatrix:
    return np.eye(n, dtype=np.complex128)


def adjoint(a: ArrayLike) -> ComplexMatrix:
    return as_matrix(a).conj().T


def ket(dimension: int, index: int) -> ComplexMatrix:
    """Basis column vector ``|index>``."""
    v = np.zeros((dimension, 1), dtype=np.complex128)
    v[index, 0] = 1.0
    return v


def outer(u: ArrayLike, v: ArrayLike | None = None) -> ComplexMatrix:
    """``|u><v|``; with one argument, the rank-one operator ``|u><u|``."""
    u = as_matrix(u).reshape(-1, 1)
    v = u if v is None else as_matrix(v).reshape(-1, 1)
    return u @ v.conj().T


def tensor_product(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``.

    Raises
    ------
    DimensionError
        If either dimension of the result exceeds ``MAX_DIMENSION``.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > MAX_DIMENSION or cols > MAX_DIMENSION:
        raise DimensionError(
            f"product dimension {rows}x{cols} exceeds the limit {MAX_DIMENSION}"
        )
    return np.kron(a, b)


def trace(a: ArrayLike) -> complex:
    return complex(np.trace(_square(a)))


def partial_trace(a: ArrayLike, dims: tuple[int, int], which: str = "B") -> ComplexMatrix:
    """Trace out one factor of a bipartite operator.

    Parameters
    ----------
    a : array_like
        Square operator on ``H_A (x) H_B``, basis ordered ``|i j>`` with the
        ``B`` index fastest.
    dims : (int, int)
        ``(dim_A, dim_B)``.
    which : {"A", "B"}
        The factor to trace out; the other one is kept.
    """
    a = _square(a)
    d_a, d_b = (int(d) for d in dims)
    if d_a < 1 or d_b < 1 or a.shape[0] != d_a * d_b:
        raise DimensionError(
            f"operator of size {a.shape[0]} does not factor as {d_a} x {d_b}"
        )
    t = a.reshape(d_a, d_b, d_a, d_b)
    which = which.upper()
    if which == "B":
        return np.einsum("ijkj->ik", t)
    if which == "A":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"which must be 'A' or 'B', got {which!r}")


def hs_inner_product(a: ArrayLike, b: ArrayLike) -> complex:
    """Hilbert-Schmidt scalar product ``Tr(a^+ b)``."""
    a = _square(a, "a")
    b = _square(b, "b")
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    # Tr(a^+ b) = sum_ij conj(a_ij) b_ij
    return complex(np.vdot(a, b))


def hs_norm(a: ArrayLike) -> float:
    a = as_matrix(a)
    return float(np.sqrt(np.vdot(a, a).real))


def is_hermitian(a: ArrayLike, tol: float = DEFAULT_TOL) -> bool:
    a = _square(a)
    return hs_norm(a - a.conj().T) <= tol


def hermitian_eigh(a: ArrayLike) -> tuple[NDArray[np.float64], ComplexMatrix]:
    """Eigen-decomposition of a Hermitian matrix, residual-checked.

    LAPACK's ``zheevd`` does the work; every pair is required to satisfy
    ``||A v - lambda v|| <= 1e-9 ||A||``.
    """
    a = _square(a)
    h = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(h)
    scale = max(hs_norm(h), 1.0)
    resid = np.linalg.norm(h @ v - v * w, axis=0)
    if np.any(resid > EIG_RESIDUAL * scale):
        raise np.linalg.LinAlgError(
            f"eigen-decomposition residual {resid.max():.3e} too large"
        )
    return w, v


def is_positive_semidefinite(a: ArrayLike, tol: float = DEFAULT_TOL) -> bool:
    a = _square(a)
    if not is_hermitian(a, max(tol, DEFAULT_TOL)):
        raise ValueError("positive semidefiniteness is only defined here for Hermitian input")
    w, _ = hermitian_eigh(a)
    return bool(w[0] >= -tol)
