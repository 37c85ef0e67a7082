"""Pure numpy implementations of the gate-program kernels.

Same signatures and results as the compiled ``_kernels`` module; vectorised
over the batch dimension, looping over gates in Python.
"""
import numpy as np


def _fire(v, c, t):
    return v ^ np.where((v & c) == c, t, np.uint64(0))


def forward(vals, cmask, tmask, start, stop):
    v = vals.copy()
    for g in range(start, stop):
        v = _fire(v, cmask[g], tmask[g])
    vals[:] = v


def inverse(vals, cmask, tmask, start, stop):
    v = vals.copy()
    for g in range(stop - 1, start - 1, -1):
        v = _fire(v, cmask[g], tmask[g])
    vals[:] = v


def level_states(vals, cmask, tmask, bounds):
    out = np.empty((vals.shape[0], bounds.shape[0]), dtype=np.uint64)
    v = vals.copy()
    out[:, 0] = v
    g = 0
    for j in range(1, bounds.shape[0]):
        while g < bounds[j]:
            v = _fire(v, cmask[g], tmask[g])
            g += 1
        out[:, j] = v
    return out


def coverage(vals, cmask, tmask, bounds, full):
    full = np.uint64(full)
    states = level_states(vals, cmask, tmask, bounds)
    if states.shape[0] == 0:
        zero = np.zeros(bounds.shape[0], dtype=np.uint64)
        return zero, zero.copy()
    ones = np.bitwise_or.reduce(states, axis=0)
    zeros = np.bitwise_or.reduce(~states & full, axis=0)
    return ones, zeros


def gate_inputs(vals, cmask, tmask, pins, ksize):
    out = np.empty((vals.shape[0], cmask.shape[0]), dtype=np.uint8)
    v = vals.copy()
    for g in range(cmask.shape[0]):
        pat = np.zeros(v.shape[0], dtype=np.uint8)
        for p in range(ksize[g]):
            pat = (pat << 1) | ((v & pins[g, p]) != 0).astype(np.uint8)
        out[:, g] = pat
        v = _fire(v, cmask[g], tmask[g])
    return out


def inject(vals, cmask, tmask, bounds, lvl_clear, lvl_set, pin_clear, pin_set,
           out_clear, out_set):
    res = np.empty((lvl_clear.shape[0], vals.shape[0]), dtype=np.uint64)
    for i in range(vals.shape[0]):
        v = np.full(lvl_clear.shape[0], vals[i], dtype=np.uint64)
        v = (v & ~lvl_clear[:, 0]) | lvl_set[:, 0]
        g = 0
        for j in range(1, bounds.shape[0]):
            while g < bounds[j]:
                v = (v & ~pin_clear[:, g]) | pin_set[:, g]
                v = _fire(v, cmask[g], tmask[g])
                g += 1
            v = (v & ~lvl_clear[:, j]) | lvl_set[:, j]
        res[:, i] = (v & ~out_clear) | out_set
    return res
