# cython: language_level=3
"""Compiled bit-parallel kernels over level-ordered NCT gate programs.

A program is a pair of uint64 arrays (control mask, target mask), one entry per
gate, sorted by output level, plus ``bounds`` where ``bounds[j]`` is the number
of gates at level <= j.  Every function mirrors ``_kernels_py`` exactly.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t

cnp.import_array()

ctypedef uint64_t u64


def forward(u64[::1] vals, const u64[::1] cmask, const u64[::1] tmask,
            Py_ssize_t start, Py_ssize_t stop):
    cdef Py_ssize_t i, g
    cdef u64 v, c
    for i in range(vals.shape[0]):
        v = vals[i]
        for g in range(start, stop):
            c = cmask[g]
            if v & c == c:
                v ^= tmask[g]
        vals[i] = v


def inverse(u64[::1] vals, const u64[::1] cmask, const u64[::1] tmask,
            Py_ssize_t start, Py_ssize_t stop):
    cdef Py_ssize_t i, g
    cdef u64 v, c
    for i in range(vals.shape[0]):
        v = vals[i]
        g = stop - 1
        while g >= start:
            c = cmask[g]
            if v & c == c:
                v ^= tmask[g]
            g -= 1
        vals[i] = v


def level_states(const u64[::1] vals, const u64[::1] cmask, const u64[::1] tmask,
                 const int64_t[::1] bounds):
    cdef Py_ssize_t n_vec = vals.shape[0], n_lvl = bounds.shape[0]
    out_arr = np.empty((n_vec, n_lvl), dtype=np.uint64)
    cdef u64[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, g
    cdef u64 v, c
    for i in range(n_vec):
        v = vals[i]
        out[i, 0] = v
        g = 0
        for j in range(1, n_lvl):
            while g < bounds[j]:
                c = cmask[g]
                if v & c == c:
                    v ^= tmask[g]
                g += 1
            out[i, j] = v
    return out_arr


def coverage(const u64[::1] vals, const u64[::1] cmask, const u64[::1] tmask,
             const int64_t[::1] bounds, u64 full):
    cdef Py_ssize_t n_vec = vals.shape[0], n_lvl = bounds.shape[0]
    ones_arr = np.zeros(n_lvl, dtype=np.uint64)
    zeros_arr = np.zeros(n_lvl, dtype=np.uint64)
    cdef u64[::1] ones = ones_arr
    cdef u64[::1] zeros = zeros_arr
    cdef Py_ssize_t i, j, g
    cdef u64 v, c
    for i in range(n_vec):
        v = vals[i]
        ones[0] |= v
        zeros[0] |= ~v & full
        g = 0
        for j in range(1, n_lvl):
            while g < bounds[j]:
                c = cmask[g]
                if v & c == c:
                    v ^= tmask[g]
                g += 1
            ones[j] |= v
            zeros[j] |= ~v & full
    return ones_arr, zeros_arr


def gate_inputs(const u64[::1] vals, const u64[::1] cmask, const u64[::1] tmask,
                const u64[:, ::1] pins, const int64_t[::1] ksize):
    cdef Py_ssize_t n_vec = vals.shape[0], n_gate = cmask.shape[0]
    out_arr = np.empty((n_vec, n_gate), dtype=np.uint8)
    cdef uint8_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, g, p
    cdef u64 v, c
    cdef uint8_t pat
    for i in range(n_vec):
        v = vals[i]
        for g in range(n_gate):
            pat = 0
            for p in range(ksize[g]):
                pat = (pat << 1) | (1 if v & pins[g, p] else 0)
            out[i, g] = pat
            c = cmask[g]
            if v & c == c:
                v ^= tmask[g]
    return out_arr


def inject(const u64[::1] vals, const u64[::1] cmask, const u64[::1] tmask,
           const int64_t[::1] bounds,
           const u64[:, ::1] lvl_clear, const u64[:, ::1] lvl_set,
           const u64[:, ::1] pin_clear, const u64[:, ::1] pin_set,
           const u64[::1] out_clear, const u64[::1] out_set):
    cdef Py_ssize_t n_vec = vals.shape[0], n_lvl = bounds.shape[0]
    cdef Py_ssize_t n_fault = lvl_clear.shape[0]
    res_arr = np.empty((n_fault, n_vec), dtype=np.uint64)
    cdef u64[:, ::1] res = res_arr
    cdef Py_ssize_t m, i, j, g
    cdef u64 v, c
    for m in range(n_fault):
        for i in range(n_vec):
            v = (vals[i] & ~lvl_clear[m, 0]) | lvl_set[m, 0]
            g = 0
            for j in range(1, n_lvl):
                while g < bounds[j]:
                    v = (v & ~pin_clear[m, g]) | pin_set[m, g]
                    c = cmask[g]
                    if v & c == c:
                        v ^= tmask[g]
                    g += 1
                v = (v & ~lvl_clear[m, j]) | lvl_set[m, j]
            res[m, i] = (v & ~out_clear[m]) | out_set[m]
    return res_arr
