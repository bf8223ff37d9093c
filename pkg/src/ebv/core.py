"""Frame data model, analytic coherence bounds, and geometry metrics.

A *frame* here is a set of ``num`` unit vectors in ``R^dim``, stored one
vector per row.  The quantities of interest are all functions of the
pairwise cosines: the mutual coherence (largest absolute cosine over
distinct pairs), the minimum pairwise line angle, and the mean deviation
of pair angles from 90 degrees.  Angles are reported in degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

_ROW_NORM_ATOL = 1e-9

DEFAULT_LEARNING_RATE = 0.0  # 0 = auto-calibrate from the initial gradient
DEFAULT_SLICE = 256
DEFAULT_MAX_ITERS = 50_000
DEFAULT_TOL = 5e-3


def welch_lower_bound(dim: int, num: int) -> float:
    """Smallest mutual coherence any ``num`` unit vectors in ``R^dim`` can have.

    Equals ``sqrt((num - dim) / (dim * (num - 1)))`` when ``num > dim`` and
    0 otherwise (up to ``dim`` vectors can be exactly orthogonal).
    """
    if num < 2 or dim < 1:
        raise ValueError("need num >= 2 and dim >= 1")
    if num <= dim:
        return 0.0
    return math.sqrt((num - dim) / (dim * (num - 1.0)))


def max_num_upper_bound(alpha: float, dim: int) -> int | None:
    """Largest vector count the relative bound allows at coherence ``alpha``.

    Returns ``floor(1 + (dim - 1) / (1 - alpha^2 * dim))`` while the
    denominator is positive; returns None once ``alpha^2 * dim >= 1``, where
    this bound no longer constrains the count.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    if dim < 1:
        raise ValueError("dim must be positive")
    denom = 1.0 - alpha * alpha * dim
    if denom <= 0.0:
        return None
    return int(math.floor(1.0 + (dim - 1) / denom + 1e-12))


def grassmannian_feasibility(dim: int, num: int) -> bool:
    """Whether an exact Grassmannian (Welch-equality) frame is not ruled out.

    Tests ``num < min(dim (dim+1) / 2, (num-dim)(num-dim+1) / 2)`` with the
    second term clamped to 0 for ``num <= dim``.  A False result only rules
    out meeting the Welch bound exactly; frames at larger coherence may
    still exist.
    """
    if num < 2 or dim < 1:
        raise ValueError("need num >= 2 and dim >= 1")
    first = dim * (dim + 1) // 2
    second = 0 if num <= dim else (num - dim) * (num - dim + 1) // 2
    return num < min(first, second)


@dataclass(frozen=True)
class FrameConfig:
    """One generation run: the (alpha, dim, num) triple plus optimizer knobs.

    ``learning_rate = 0`` asks the generator to calibrate the initial step
    from the measured gradient scale; any positive value is used as-is.
    ``slice`` bounds memory of blocked pair scans (numpy backend), and
    ``tol`` is the slack accepted around alpha at convergence.
    """

    alpha: float
    dim: int
    num: int
    seed: int = 0
    learning_rate: float = DEFAULT_LEARNING_RATE
    slice: int = DEFAULT_SLICE
    max_iters: int = DEFAULT_MAX_ITERS
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha!r}")
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim!r}")
        if self.num < 2:
            raise ValueError(f"num must be at least 2, got {self.num!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be positive (or 0 for auto)")
        if self.slice < 1:
            raise ValueError("slice must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    @property
    def feasible(self) -> bool:
        """True when alpha clears the Welch floor for (dim, num)."""
        return self.alpha >= welch_lower_bound(self.dim, self.num)


@dataclass(frozen=True)
class FrameMatrix:
    """``num`` unit row-vectors in ``R^dim``.

    The constructor does not validate; use :meth:`from_rows` for checked
    construction or :meth:`validate` to assert the invariants explicitly.
    """

    dim: int
    num: int
    rows: np.ndarray = field(repr=False)

    @classmethod
    def from_rows(cls, rows: np.ndarray) -> "FrameMatrix":
        rows = np.ascontiguousarray(rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError("rows must be a 2-D array")
        frame = cls(dim=rows.shape[1], num=rows.shape[0], rows=rows)
        frame.validate()
        return frame

    def validate(self) -> None:
        if self.rows.shape != (self.num, self.dim):
            raise ValueError(
                f"shape mismatch: rows {self.rows.shape} vs "
                f"(num={self.num}, dim={self.dim})"
            )
        norms = np.linalg.norm(self.rows, axis=1)
        bad = np.abs(norms - 1.0) > _ROW_NORM_ATOL
        if bad.any():
            worst = int(np.argmax(np.abs(norms - 1.0)))
            raise ValueError(
                f"row {worst} has norm {norms[worst]:.12f}, "
                f"outside 1 +/- {_ROW_NORM_ATOL:g}"
            )


@dataclass(frozen=True)
class FrameStats:
    """Geometry summary of a frame against a target coherence threshold."""

    coherence: float
    min_angle_deg: float
    avg_deviation_deg: float
    welch_bound: float
    satisfies_alpha: bool


def gram_abs(frame: FrameMatrix) -> np.ndarray:
    """Absolute Gram matrix ``|w_i . w_j|``; symmetric, unit diagonal."""
    return np.abs(frame.rows @ frame.rows.T)


def mutual_coherence(frame: FrameMatrix, block: int = DEFAULT_SLICE) -> float:
    """Largest ``|w_i . w_j|`` over distinct pairs, in [0, 1]."""
    if frame.num < 2:
        raise ValueError("mutual coherence needs at least 2 rows")
    return float(_kernels.coherence_scan(frame.rows, block))


def min_pairwise_angle_deg(frame: FrameMatrix, block: int = DEFAULT_SLICE) -> float:
    """Smallest pairwise line angle in degrees, folded to [0, 90]."""
    return math.degrees(math.acos(mutual_coherence(frame, block)))


def avg_deviation_angle_deg(frame: FrameMatrix, block: int = DEFAULT_SLICE) -> float:
    """Mean over pairs of ``|angle(w_i, w_j) - 90deg|`` in degrees.

    Uses ``|acos(c) - pi/2| = asin(|c|)``, which also makes the value
    manifestly invariant under row sign flips.
    """
    if frame.num < 2:
        raise ValueError("average deviation needs at least 2 rows")
    pairs = frame.num * (frame.num - 1) / 2
    return math.degrees(float(_kernels.deviation_sum(frame.rows, block)) / pairs)


def frame_stats(frame: FrameMatrix, alpha: float, tol: float = DEFAULT_TOL) -> FrameStats:
    """Bundle the geometry metrics plus bound-satisfaction flags."""
    coherence = mutual_coherence(frame)
    return FrameStats(
        coherence=coherence,
        min_angle_deg=math.degrees(math.acos(coherence)),
        avg_deviation_deg=avg_deviation_angle_deg(frame),
        welch_bound=welch_lower_bound(frame.dim, frame.num),
        satisfies_alpha=bool(coherence <= alpha + tol),
    )


def subset(frame: FrameMatrix, indices) -> FrameMatrix:
    """Frame restricted to ``indices`` (distinct rows, at least 2).

    Any subset of a valid frame is itself a valid frame, and its coherence
    cannot exceed the parent's.
    """
    idx = list(indices)
    if len(idx) < 2:
        raise ValueError("subset needs at least 2 row indices")
    if len(set(idx)) != len(idx):
        raise ValueError("subset indices must be distinct")
    for i in idx:
        if not 0 <= i < frame.num:
            raise IndexError(f"row index {i} out of range for num={frame.num}")
    return FrameMatrix(dim=frame.dim, num=len(idx), rows=frame.rows[idx].copy())
