"""Batched column kernels for the configuration-graph search.

Two interchangeable backends compute the same arrays:

* ``numba``: row-by-row loops compiled with ``@njit``;
* ``numpy``: one vectorized pass per program row over the whole batch.

The numba path is used when numba imports and ``HSMC_DISABLE_NUMBA`` is unset
(or ``0``).  :func:`set_backend` switches at runtime; tests and the benchmark
run both.
"""
from __future__ import annotations

import os

import numpy as np

from .program import OP_A, OP_ABAR, OP_B, OP_LETTER, OP_NOT, OP_OR, OP_TRUE

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _env_disabled() -> bool:
    return os.environ.get("HSMC_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")


# numpy backend -----------------------------------------------------------------


def start_batch_numpy(starts, ops, arg0, arg1, letters, a_vals, abar_vals):
    m = ops.shape[0]
    cols = np.zeros((starts.shape[0], m), dtype=np.uint8)
    for i in range(m):
        op = ops[i]
        a = arg0[i]
        if op == OP_LETTER:
            cols[:, i] = letters[starts, a]
        elif op == OP_TRUE:
            cols[:, i] = 1
        elif op == OP_NOT:
            cols[:, i] = 1 - cols[:, a]
        elif op == OP_OR:
            cols[:, i] = cols[:, a] | cols[:, arg1[i]]
        elif op == OP_A:
            cols[:, i] = a_vals[a, starts]
        elif op == OP_ABAR:
            cols[:, i] = abar_vals[a, starts]
    return cols


def step_batch_numpy(states, cols, succ_ptr, succ_idx, ops, arg0, arg1, letters, a_vals):
    deg = succ_ptr[states + 1] - succ_ptr[states]
    total = int(deg.sum())
    parent = np.repeat(np.arange(states.shape[0], dtype=np.int64), deg)
    # position of each output row inside its parent's successor list
    offs = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(deg) - deg, deg)
    new_states = succ_idx[np.repeat(succ_ptr[states], deg) + offs]
    prev = cols[parent]
    out = np.zeros_like(prev)
    for i in range(ops.shape[0]):
        op = ops[i]
        a = arg0[i]
        if op == OP_LETTER:
            out[:, i] = prev[:, i] & letters[new_states, a]
        elif op == OP_TRUE:
            out[:, i] = 1
        elif op == OP_NOT:
            out[:, i] = 1 - out[:, a]
        elif op == OP_OR:
            out[:, i] = out[:, a] | out[:, arg1[i]]
        elif op == OP_B:
            out[:, i] = prev[:, i] | prev[:, a]
        elif op == OP_A:
            out[:, i] = a_vals[a, new_states]
        elif op == OP_ABAR:
            out[:, i] = prev[:, i]
    return parent, new_states.astype(np.int32), out


# numba backend -----------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True, nogil=True)
    def start_batch_numba(starts, ops, arg0, arg1, letters, a_vals, abar_vals):
        n = starts.shape[0]
        m = ops.shape[0]
        cols = np.zeros((n, m), dtype=np.uint8)
        for r in range(n):
            v = starts[r]
            for i in range(m):
                op = ops[i]
                a = arg0[i]
                if op == OP_LETTER:
                    cols[r, i] = letters[v, a]
                elif op == OP_TRUE:
                    cols[r, i] = 1
                elif op == OP_NOT:
                    cols[r, i] = 1 - cols[r, a]
                elif op == OP_OR:
                    cols[r, i] = cols[r, a] | cols[r, arg1[i]]
                elif op == OP_A:
                    cols[r, i] = a_vals[a, v]
                elif op == OP_ABAR:
                    cols[r, i] = abar_vals[a, v]
        return cols

    @numba.njit(cache=True, nogil=True)
    def step_batch_numba(states, cols, succ_ptr, succ_idx, ops, arg0, arg1, letters, a_vals):
        n = states.shape[0]
        m = ops.shape[0]
        total = 0
        for r in range(n):
            total += succ_ptr[states[r] + 1] - succ_ptr[states[r]]
        parent = np.empty(total, dtype=np.int64)
        new_states = np.empty(total, dtype=np.int32)
        out = np.zeros((total, m), dtype=np.uint8)
        k = 0
        for r in range(n):
            s = states[r]
            for e in range(succ_ptr[s], succ_ptr[s + 1]):
                u = succ_idx[e]
                parent[k] = r
                new_states[k] = u
                for i in range(m):
                    op = ops[i]
                    a = arg0[i]
                    if op == OP_LETTER:
                        out[k, i] = cols[r, i] & letters[u, a]
                    elif op == OP_TRUE:
                        out[k, i] = 1
                    elif op == OP_NOT:
                        out[k, i] = 1 - out[k, a]
                    elif op == OP_OR:
                        out[k, i] = out[k, a] | out[k, arg1[i]]
                    elif op == OP_B:
                        out[k, i] = cols[r, i] | cols[r, a]
                    elif op == OP_A:
                        out[k, i] = a_vals[a, u]
                    elif op == OP_ABAR:
                        out[k, i] = cols[r, i]
                k += 1
        return parent, new_states, out

else:  # pragma: no cover
    start_batch_numba = step_batch_numba = None


_BACKENDS = {
    "numpy": (start_batch_numpy, step_batch_numpy),
    "numba": (start_batch_numba, step_batch_numba),
}
_current = "numpy" if numba is None or _env_disabled() else "numba"


def available_backends() -> list[str]:
    return [name for name, fns in _BACKENDS.items() if fns[0] is not None]


def backend() -> str:
    return _current


def set_backend(name: str) -> None:
    global _current
    if name not in available_backends():
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    _current = name


def start_batch(*args):
    return _BACKENDS[_current][0](*args)


def step_batch(*args):
    return _BACKENDS[_current][1](*args)
