import math

import numpy as np
import pytest

from ebv import FrameConfig, FrameMatrix, generate
from ebv._kernels import _hinge_pass_numpy


def normalized_rows(rng, num, dim):
    rows = rng.standard_normal((num, dim))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def hinge_fd_gradient(rows, threshold, h=1e-6):
    """Central-difference gradient of the pairwise hinge loss."""
    grad = np.zeros_like(rows)
    for i in range(rows.shape[0]):
        for k in range(rows.shape[1]):
            up = rows.copy()
            up[i, k] += h
            down = rows.copy()
            down[i, k] -= h
            grad[i, k] = (
                _hinge_pass_numpy(up, threshold, 256)[0]
                - _hinge_pass_numpy(down, threshold, 256)[0]
            ) / (2.0 * h)
    return grad


def double_loop_coherence(rows):
    """Independent oracle: plain double loop over all pairs."""
    worst = 0.0
    n = rows.shape[0]
    for i in range(n - 1):
        for j in range(i + 1, n):
            c = abs(sum(rows[i, k] * rows[j, k] for k in range(rows.shape[1])))
            worst = max(worst, c)
    return worst


@pytest.fixture
def mercedes():
    """Three unit vectors in R^2 at mutual 120 degrees."""
    s = math.sqrt(3.0) / 2.0
    return FrameMatrix.from_rows(
        np.array([[1.0, 0.0], [-0.5, s], [-0.5, -s]])
    )


@pytest.fixture
def identity3():
    return FrameMatrix.from_rows(np.eye(3))


@pytest.fixture(scope="session")
def head_frame_8():
    """A generated 8-vector frame in R^8 with coherence well under 0.01."""
    frame, report = generate(FrameConfig(alpha=0.01, dim=8, num=8, seed=11))
    assert report.converged
    return frame
