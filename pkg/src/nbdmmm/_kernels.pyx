# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled selection kernel. Must match ``_pykernels.pick_sequence`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def pick_sequence(double[:, ::1] keys, Py_ssize_t[::1] ref_cols):
    cdef Py_ssize_t n = keys.shape[0]
    cdef Py_ssize_t steps = ref_cols.shape[0]
    cdef Py_ssize_t s, i, col, best
    cdef double best_key, k
    if steps > n:
        steps = n
    out = np.empty(steps, dtype=np.intp)
    cdef Py_ssize_t[::1] picked = out
    taken_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] taken = taken_arr
    for s in range(steps):
        col = ref_cols[s]
        best = -1
        best_key = 0.0
        for i in range(n):
            if taken[i]:
                continue
            k = keys[i, col]
            # strict < keeps the lowest row index on ties
            if best < 0 or k < best_key:
                best = i
                best_key = k
        taken[best] = 1
        picked[s] = best
    return out
