"""Hot kernels with a compiled core and a numpy fallback.

The compiled extension is picked at import when it was built; otherwise the
fallback is used. :func:`use_backend` switches explicitly (tests and the
benchmark use it to compare the two).
"""

from __future__ import annotations

from types import ModuleType

import numpy as np

from . import _fallback

try:
    from . import _core as _compiled
except ImportError:  # extension not built
    _compiled = None

_active: ModuleType = _compiled if _compiled is not None else _fallback


def compiled_available() -> bool:
    return _compiled is not None


def backend_name() -> str:
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def use_backend(name: str) -> str:
    """Select ``"compiled"``, ``"python"`` or ``"auto"``; returns the previous name."""
    global _active
    previous = backend_name()
    if name == "python":
        _active = _fallback
    elif name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built; reinstall with Cython available")
        _active = _compiled
    elif name == "auto":
        _active = _compiled if _compiled is not None else _fallback
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def lattice_mode_sums(rho, d_a, d_b, amps):
    """Per-outcome diagonal weight ``f_n`` and mode-interference sum ``q_n``.

    ``f_n = sum_a |b_a|^2 Re <n a|rho|n a>`` and
    ``q_n = sum_{a != b} conj(b_a) b_b <n a|rho|n b>`` (complex).
    """
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    amps = np.ascontiguousarray(amps, dtype=np.complex128).ravel()
    return _active.lattice_mode_sums(rho, int(d_a), int(d_b), amps)


def alternation_project(values, max_iter: int = 100):
    """Complete each row of signed draws to a zero-sum vector inside [-1, 1].

    Row ``v`` of length ``N - 1`` becomes ``(v, -sum v)``, then is clamped and
    the residual redistributed over entries not pinned at the relevant bound,
    until ``|sum| <= 1e-13``. Returns ``(q, iterations)``; an iteration count
    of ``-1`` marks a row that did not converge.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    return _active.alternation_project(values, int(max_iter))


def mean_abs_rows(q):
    return _active.mean_abs_rows(np.ascontiguousarray(q, dtype=np.float64))
