"""Hot pairwise kernels, in numba and pure-numpy flavors.

Every kernel works on an ``(n, d)`` float64 row matrix and treats the row
set as a collection of lines: only unordered pairs ``i < j`` count, each
exactly once.  The numba flavor walks pairs explicitly; the numpy flavor
blocks the Gram computation by ``block`` rows to bound peak memory at
``block * n`` floats.  Both flavors are sequential with a fixed reduction
order, so results are reproducible bit-for-bit per backend.

``benchmarks/bench_backends.py`` times the two flavors against each other.
"""

import math

import numpy as np

from . import _accel


def _hinge_pass_numpy(rows, threshold, block):
    n, d = rows.shape
    loss = 0.0
    max_abs = 0.0
    grad = np.zeros((n, d))
    cols = np.arange(n)
    for start in range(0, n, block):
        end = min(n, start + block)
        gram = rows[start:end] @ rows.T
        upper = cols[None, :] > np.arange(start, end)[:, None]
        absg = np.abs(gram)
        masked = np.where(upper, absg, 0.0)
        if masked.size:
            max_abs = max(max_abs, float(masked.max()))
        viol = upper & (absg > threshold)
        loss += float((absg[viol] - threshold).sum())
        signs = np.where(viol, np.sign(gram), 0.0)
        grad[start:end] += signs @ rows
        grad += signs.T @ rows[start:end]
    return loss, grad, min(max_abs, 1.0)


def _coherence_scan_numpy(rows, block):
    n = rows.shape[0]
    max_abs = 0.0
    cols = np.arange(n)
    for start in range(0, n, block):
        end = min(n, start + block)
        gram = np.abs(rows[start:end] @ rows.T)
        upper = cols[None, :] > np.arange(start, end)[:, None]
        masked = np.where(upper, gram, 0.0)
        if masked.size:
            max_abs = max(max_abs, float(masked.max()))
    return min(max_abs, 1.0)


def _deviation_sum_numpy(rows, block):
    n = rows.shape[0]
    total = 0.0
    cols = np.arange(n)
    for start in range(0, n, block):
        end = min(n, start + block)
        gram = np.abs(rows[start:end] @ rows.T)
        upper = cols[None, :] > np.arange(start, end)[:, None]
        total += float(np.arcsin(np.where(upper, np.minimum(gram, 1.0), 0.0)).sum())
    return total


def _hinge_pass_pairs(rows, threshold, block):  # pragma: no cover - jitted
    n, d = rows.shape
    loss = 0.0
    max_abs = 0.0
    grad = np.zeros((n, d))
    for i in range(n - 1):
        for j in range(i + 1, n):
            c = 0.0
            for k in range(d):
                c += rows[i, k] * rows[j, k]
            a = abs(c)
            if a > max_abs:
                max_abs = a
            v = a - threshold
            if v > 0.0:
                loss += v
                s = 1.0 if c > 0.0 else -1.0
                for k in range(d):
                    grad[i, k] += s * rows[j, k]
                    grad[j, k] += s * rows[i, k]
    return loss, grad, min(max_abs, 1.0)


def _coherence_scan_pairs(rows, block):  # pragma: no cover - jitted
    n, d = rows.shape
    max_abs = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            c = 0.0
            for k in range(d):
                c += rows[i, k] * rows[j, k]
            a = abs(c)
            if a > max_abs:
                max_abs = a
    return min(max_abs, 1.0)


def _deviation_sum_pairs(rows, block):  # pragma: no cover - jitted
    n, d = rows.shape
    total = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            c = 0.0
            for k in range(d):
                c += rows[i, k] * rows[j, k]
            a = abs(c)
            if a > 1.0:
                a = 1.0
            total += math.asin(a)
    return total


if _accel.HAVE_NUMBA:
    _hinge_pass_numba = _accel.njit_kernel(_hinge_pass_pairs)
    _coherence_scan_numba = _accel.njit_kernel(_coherence_scan_pairs)
    _deviation_sum_numba = _accel.njit_kernel(_deviation_sum_pairs)

if _accel.USE_NUMBA:
    hinge_pass = _hinge_pass_numba
    coherence_scan = _coherence_scan_numba
    deviation_sum = _deviation_sum_numba
else:
    hinge_pass = _hinge_pass_numpy
    coherence_scan = _coherence_scan_numpy
    deviation_sum = _deviation_sum_numpy
