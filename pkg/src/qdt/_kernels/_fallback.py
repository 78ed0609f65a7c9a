"""Pure-Python (numpy) kernels, used when the compiled core is unavailable.

Arithmetic is ordered exactly as in ``_core.pyx`` so both backends return
bit-identical Monte Carlo output.
"""

import numpy as np

ALT_TOL = 1e-13


def lattice_mode_sums(rho, d_a, d_b, amps):
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    amps = np.ascontiguousarray(amps, dtype=np.complex128)
    blocks = rho.reshape(d_a, d_b, d_a, d_b)
    weights = amps.real * amps.real + amps.imag * amps.imag
    f = np.zeros(d_a, dtype=np.float64)
    q = np.zeros(d_a, dtype=np.complex128)
    for n in range(d_a):
        block = blocks[n, :, n, :]
        facc = 0.0
        acc = 0j
        for al in range(d_b):
            facc = facc + weights[al] * block[al, al].real
            for bt in range(d_b):
                if bt != al:
                    acc = acc + amps[al].conjugate() * amps[bt] * block[al, bt]
        f[n] = facc
        q[n] = acc
    return f, q


def _row_sum(q):
    acc = np.zeros(q.shape[0], dtype=np.float64)
    for j in range(q.shape[1]):
        acc = acc + q[:, j]
    return acc


def alternation_project(values, max_iter):
    values = np.ascontiguousarray(values, dtype=np.float64)
    s_count, k = values.shape
    out = np.empty((s_count, k + 1), dtype=np.float64)
    out[:, :k] = values
    out[:, k] = -_row_sum(values)
    iters = np.zeros(s_count, dtype=np.int64)
    active = np.arange(s_count)
    it = 0
    while active.size:
        q = np.clip(out[active], -1.0, 1.0)
        r = _row_sum(q)
        out[active] = q
        done = np.abs(r) <= ALT_TOL
        iters[active[done]] = it
        keep = ~done
        active, q, r = active[keep], q[keep], r[keep]
        if not active.size:
            break
        if it == max_iter:
            iters[active] = -1
            break
        pos = (r > 0.0)[:, None]
        neg = (r < 0.0)[:, None]
        free = (pos & (q > -1.0)) | (neg & (q < 1.0))
        count = free.sum(axis=1)
        stuck = count == 0
        iters[active[stuck]] = -1
        active, q, r, free, count = (
            active[~stuck], q[~stuck], r[~stuck], free[~stuck], count[~stuck]
        )
        step = r / count
        out[active] = np.where(free, q - step[:, None], q)
        it += 1
    return out, iters


def mean_abs_rows(q):
    q = np.ascontiguousarray(q, dtype=np.float64)
    return _row_sum(np.abs(q)) / q.shape[1]
