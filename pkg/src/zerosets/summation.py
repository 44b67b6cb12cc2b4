"""Compensated floating-point accumulation.

``compensated_sum`` reduces an array pairwise, carrying the rounding error of
every addition through an error-free transformation (Knuth's TwoSum).  The
result is the pairwise sum of the leading parts plus the (plainly summed)
collected error terms, so for ``n`` terms the error is bounded by

    |S_hat - S| <= eps * |S| + (n * eps)**2 * sum(|a_i|)

with ``eps = 2**-53``: one rounding of the final result plus a second-order
term.  That is the same guarantee as Ogita-Rump-Oishi ``Sum2``, obtained here
with log2(n) vectorised passes instead of a Python loop.
"""

from __future__ import annotations

import numpy as np


def two_sum(a, b):
    """Error-free transformation: ``a + b == s + e`` exactly, ``s = fl(a + b)``."""
    s = a + b
    bp = s - a
    ap = s - bp
    e = (a - ap) + (b - bp)
    return s, e


def compensated_sum(values, axis: int = -1) -> np.ndarray | float:
    """Sum ``values`` along ``axis`` with TwoSum-compensated pairwise reduction.

    Rows containing non-finite entries fall back to the plain sum, so ``-inf``
    propagates as ``-inf`` instead of turning into ``nan`` inside TwoSum.
    """
    a = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    scalar = a.ndim == 1
    if scalar:
        a = a[None, :]
    n = a.shape[-1]
    if n == 0:
        out = np.zeros(a.shape[:-1])
        return float(out[0]) if scalar else out

    finite = np.isfinite(a)
    bad_rows = ~finite.all(axis=-1)
    if bad_rows.any():
        plain = a.sum(axis=-1)
        a = np.where(finite, a, 0.0)
    err = np.zeros(a.shape[:-1])
    while a.shape[-1] > 1:
        if a.shape[-1] % 2:
            a = np.concatenate([a, np.zeros(a.shape[:-1] + (1,))], axis=-1)
        s, e = two_sum(a[..., 0::2], a[..., 1::2])
        err += e.sum(axis=-1)
        a = s
    out = a[..., 0] + err
    if bad_rows.any():
        out = np.where(bad_rows, plain, out)
    return float(out[0]) if scalar else out


def segment_sums(values, cuts) -> np.ndarray:
    """Compensated sums of ``values[..., cuts[i]:cuts[i+1]]`` for each segment.

    ``cuts`` is a nondecreasing sequence of indices starting at 0; the result
    has ``len(cuts) - 1`` entries along the last axis.
    """
    a = np.asarray(values, dtype=float)
    cuts = np.asarray(cuts, dtype=int)
    out = np.empty(a.shape[:-1] + (len(cuts) - 1,))
    for i in range(len(cuts) - 1):
        out[..., i] = compensated_sum(a[..., cuts[i]:cuts[i + 1]], axis=-1)
    return out


def compensated_cumsum(values, axis: int = -1) -> np.ndarray:
    """Running compensated sums; loops in Python over ``axis``, so keep it short."""
    a = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    finite = np.isfinite(a)
    out = np.empty_like(a)
    s = np.zeros(a.shape[:-1])
    c = np.zeros(a.shape[:-1])
    for i in range(a.shape[-1]):
        s, e = two_sum(s, np.where(finite[..., i], a[..., i], 0.0))
        c = c + e
        out[..., i] = s + c
    if not finite.all():
        out = np.where(np.cumsum(~finite, axis=-1) > 0, np.cumsum(a, axis=-1), out)
    return np.moveaxis(out, -1, axis)
