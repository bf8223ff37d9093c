"""Frame generation by sliced stochastic gradient descent on a hinge loss.

Each pass normalizes the rows, accumulates the gradient of
``sum over pairs i<j of max(|w_i . w_j| - threshold, 0)`` and takes a plain
gradient step.  Gradients flow only through pairs violating the threshold;
each unordered pair is counted exactly once.

The run has two stages.  It first drives the exact pairwise maximum to
``alpha + tol``, which is the acceptance test and the convergence contract.
When the geometry has room (``alpha - tol`` still above the Welch floor) it
then keeps annealing toward ``alpha - tol``: the final maximum of a hinge
descent lands just below whatever threshold it was pushed against, so the
polish stage is what buys the margin under ``alpha`` that the reported
minimum-angle numbers reflect.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import FrameConfig, FrameMatrix, welch_lower_bound
from .errors import InfeasibleAlphaError

# lr schedule: halve after this many passes without a new best loss,
# never below the floor; once floored, re-warm to half the initial rate.
STALL_WINDOW = 50
LR_DECAY = 0.5
LR_FLOOR = 1e-4
# a loss blow-up past this factor of the best seen restores the best state
EXPLOSION_FACTOR = 2.0
# polish stage gives up after this many passes without a new best polish loss
POLISH_PATIENCE = 2000
# initial auto learning rate targets this per-row step length
TARGET_INIT_STEP = 0.15
# fp guard so an accepted maximum re-checked through a different dot-product
# path (verify) cannot straddle the boundary
STOP_MARGIN = 1e-12

TRACE_EVERY = 10


@dataclass(frozen=True)
class GenerationReport:
    """Outcome of one generation run."""

    iterations: int
    final_coherence: float
    converged: bool
    loss_trace: list[tuple[int, float]] = field(repr=False)
    elapsed_seconds: float = 0.0


def init_random_frame(config: FrameConfig) -> FrameMatrix:
    """Rows drawn i.i.d. from the uniform distribution on the unit sphere.

    Standard normal coordinates, then row normalization; deterministic for
    a fixed ``config.seed``.
    """
    if config.dim < 1:
        raise ValueError("dim must be positive")
    rng = np.random.default_rng(config.seed)
    rows = rng.standard_normal((config.num, config.dim))
    norms = np.linalg.norm(rows, axis=1)
    while (norms < 1e-12).any():  # astronomically rare; keep it total
        bad = norms < 1e-12
        rows[bad] = rng.standard_normal((int(bad.sum()), config.dim))
        norms = np.linalg.norm(rows, axis=1)
    rows /= norms[:, None]
    return FrameMatrix(dim=config.dim, num=config.num, rows=rows)


def hinge_coherence_loss(frame: FrameMatrix, alpha: float, block: int = 256) -> float:
    """``sum over pairs i<j of max(|w_i . w_j| - alpha, 0)``.

    Zero exactly when every pair cosine lies in ``[-alpha, alpha]``.
    """
    loss, _, _ = _kernels.hinge_pass(frame.rows, alpha, block)
    return float(loss)


def _auto_learning_rate(grad: np.ndarray) -> float:
    """Step size giving a median per-row displacement of TARGET_INIT_STEP."""
    scale = float(np.median(np.linalg.norm(grad, axis=1)))
    return TARGET_INIT_STEP / scale if scale > 0 else 0.1


def generation_step(frame: FrameMatrix, config: FrameConfig):
    """One descent pass: normalize rows, step against the hinge at alpha.

    Returns ``(frame, loss)``.  The returned rows are *not* re-normalized;
    normalization happens at the start of the next pass.  A frame already
    satisfying the threshold strictly has zero gradient and is returned
    unchanged apart from the initial normalization.
    """
    rows = frame.rows / np.linalg.norm(frame.rows, axis=1, keepdims=True)
    loss, grad, _ = _kernels.hinge_pass(rows, config.alpha, config.slice)
    lr = config.learning_rate or _auto_learning_rate(grad)
    rows = rows - lr * grad
    return FrameMatrix(dim=frame.dim, num=frame.num, rows=rows), float(loss)


def generate(config: FrameConfig, progress=None, polish: bool = True):
    """Search for a frame whose pairwise cosines all lie within the threshold.

    Parameters
    ----------
    config :
        Run parameters.  Rejected up front when ``alpha`` lies below the
        Welch lower bound for (dim, num), since no frame can exist there.
    progress :
        Optional callback ``(iteration, loss, current_coherence)`` invoked
        every 10 passes.
    polish :
        Keep annealing toward ``alpha - tol`` after the ``alpha + tol``
        acceptance point, while the iteration budget and a stall patience
        allow.  Capacity probes turn this off; they only need acceptance.

    Returns
    -------
    (FrameMatrix, GenerationReport)
        Best frame found (rows normalized) and the run report.  A run that
        exhausts ``max_iters`` before acceptance returns the best frame
        seen with ``converged=False``; that is an outcome, not an error.
    """
    welch = welch_lower_bound(config.dim, config.num)
    if config.num > config.dim and config.alpha < welch:
        raise InfeasibleAlphaError(config.alpha, welch, config.dim, config.num)

    t_accept = config.alpha + config.tol
    t_polish = config.alpha - config.tol
    do_polish = polish and t_polish > welch

    rows = init_random_frame(config).rows.copy()
    lr = config.learning_rate if config.learning_rate > 0 else None
    lr_init = lr
    best_loss = math.inf
    best_coh = math.inf
    best_rows = rows.copy()
    stall = 0
    accepted = False
    # polish progress is measured on the polish-threshold loss: the global
    # maximum hovers above the acceptance point for a long stretch while the
    # crowded band below it reshuffles, so coherence is the wrong meter here
    polish_best_loss = math.inf
    polish_stall = 0
    threshold = config.alpha
    trace: list[tuple[int, float]] = []
    start = time.perf_counter()
    iterations = 0

    for it in range(1, config.max_iters + 1):
        iterations = it
        rows /= np.linalg.norm(rows, axis=1, keepdims=True)
        loss, grad, coh = _kernels.hinge_pass(rows, threshold, config.slice)
        if lr is None:
            lr = _auto_learning_rate(grad)
            lr_init = lr

        if it == 1 or it % TRACE_EVERY == 0:
            trace.append((it, float(loss)))
            if progress is not None:
                progress(it, float(loss), float(coh))

        if coh < best_coh:
            best_coh = coh
            best_rows = rows.copy()

        if not accepted and coh <= t_accept - STOP_MARGIN:
            accepted = True
            trace.append((it, float(loss)))
            if not do_polish:
                break
            threshold = t_polish
            best_loss = math.inf
            stall = 0
            continue
        if accepted:
            if loss < polish_best_loss:
                polish_best_loss = loss
                polish_stall = 0
            else:
                polish_stall += 1
            if coh <= t_polish - STOP_MARGIN or polish_stall >= POLISH_PATIENCE:
                break

        if loss < best_loss:
            best_loss = loss
            stall = 0
        elif loss > EXPLOSION_FACTOR * best_loss:
            lr = max(lr * LR_DECAY, LR_FLOOR)
            rows = best_rows.copy()
            stall = 0
            continue
        else:
            stall += 1
            if stall >= STALL_WINDOW:
                stall = 0
                if lr <= LR_FLOOR * (1 + 1e-9):
                    lr = lr_init * 0.5
                    best_loss = math.inf
                else:
                    lr = max(lr * LR_DECAY, LR_FLOOR)
        rows = rows - lr * grad

    frame = FrameMatrix(dim=config.dim, num=config.num, rows=best_rows)
    final_coh = float(_kernels.coherence_scan(best_rows, config.slice))
    report = GenerationReport(
        iterations=iterations,
        final_coherence=final_coh,
        converged=accepted,
        loss_trace=trace,
        elapsed_seconds=time.perf_counter() - start,
    )
    return frame, report


def verify(frame: FrameMatrix, alpha: float, tol: float) -> bool:
    """Brute-force check that every pair cosine lies within ``alpha + tol``.

    Deliberately a plain double loop sharing no code with the blocked Gram
    scans; this is the independent oracle for the generator and the tests.
    """
    rows = frame.rows
    limit = alpha + tol
    n = frame.num
    for i in range(n - 1):
        for j in range(i + 1, n):
            if abs(float(np.dot(rows[i], rows[j]))) > limit:
                return False
    return True
