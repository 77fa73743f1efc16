"""Deterministic compensated reductions.

Series values must be bit-stable across runs and independent of any
block-parallel evaluation, so every Dirichlet-series reduction goes
through a fixed ascending-order block tree: numpy's pairwise sum inside
fixed-size blocks, Neumaier error-free accumulation across blocks.
"""

from __future__ import annotations

import numpy as np

_BLOCK = 4096


def neumaier_sum(values: np.ndarray) -> float:
    """Neumaier (improved Kahan) sum of a 1-D float64 array."""
    s = 0.0
    c = 0.0
    for v in values:
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


def block_sum(values: np.ndarray) -> complex | float:
    """Fixed-tree compensated sum, ascending index order.

    Blocks of 4096 are reduced with numpy's pairwise sum (deterministic
    for a fixed array) and the block results are combined with Neumaier
    compensation, so the rounding profile never depends on chunking.
    """
    arr = np.asarray(values)
    if arr.size == 0:
        return 0.0 + 0.0j if np.iscomplexobj(arr) else 0.0
    nblocks = (arr.size + _BLOCK - 1) // _BLOCK
    if np.iscomplexobj(arr):
        partial_r = np.empty(nblocks)
        partial_i = np.empty(nblocks)
        for k in range(nblocks):
            chunk = arr[k * _BLOCK : (k + 1) * _BLOCK]
            partial_r[k] = np.sum(chunk.real)
            partial_i[k] = np.sum(chunk.imag)
        return complex(neumaier_sum(partial_r), neumaier_sum(partial_i))
    partial = np.empty(nblocks)
    for k in range(nblocks):
        partial[k] = np.sum(arr[k * _BLOCK : (k + 1) * _BLOCK])
    return float(neumaier_sum(partial))


def block_dot(w: np.ndarray, zr: np.ndarray, zi: np.ndarray) -> complex:
    """Compensated dot of a real weight vector against split re/im parts."""
    nblocks = (w.size + _BLOCK - 1) // _BLOCK
    partial_r = np.empty(nblocks)
    partial_i = np.empty(nblocks)
    for k in range(nblocks):
        sl = slice(k * _BLOCK, (k + 1) * _BLOCK)
        partial_r[k] = np.dot(w[sl], zr[sl])
        partial_i[k] = np.dot(w[sl], zi[sl])
    return complex(neumaier_sum(partial_r), neumaier_sum(partial_i))
