"""Empirical capacity frontier: largest vector count at a given (alpha, dim).

A probe attempts to generate and verify a frame at one candidate count; the
frontier is located by bisection between a count that is always feasible
(``num = dim``, planted orthonormal) and one that failed.  Probe success is
a certificate; probe failure is only evidence, so reported capacities are
lower-bound estimates whose quality rests on the restart budget.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_LEARNING_RATE,
    DEFAULT_SLICE,
    DEFAULT_TOL,
    FrameConfig,
    FrameMatrix,
    max_num_upper_bound,
)
from .errors import InfeasibleAlphaError
from .generate import generate, verify

SEARCH_CEILING = 2**24
MAX_PROBE_ITERS = 2_000_000
PROBE_ITERS_PER_VECTOR = 200


@dataclass(frozen=True)
class CapacityQuery:
    """Search parameters: the (alpha, dim) pair plus the per-probe template."""

    alpha: float
    dim: int
    attempt_budget: int = 3
    seed: int = 0
    learning_rate: float = DEFAULT_LEARNING_RATE
    slice: int = DEFAULT_SLICE
    tol: float = DEFAULT_TOL
    max_iters: int | None = None  # None: 200 per vector, capped at 2e6
    ceiling: int = SEARCH_CEILING

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("alpha must lie in [0, 1)")
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.attempt_budget < 1:
            raise ValueError("attempt_budget must be at least 1")

    def probe_iters(self, num: int) -> int:
        if self.max_iters is not None:
            return self.max_iters
        return min(PROBE_ITERS_PER_VECTOR * num, MAX_PROBE_ITERS)


@dataclass(frozen=True)
class CapacityResult:
    """Search outcome with the full probe trace."""

    max_num_found: int
    analytic_upper: int | None
    probes: list[tuple[int, bool]]
    total_seconds: float
    best_frame: FrameMatrix | None = field(repr=False, default=None)
    ceiling_limited: bool = False


def derived_probe_seed(seed: int, num: int, attempt: int) -> int:
    """Stable per-(num, attempt) seed so whole searches are reproducible."""
    digest = hashlib.blake2b(
        f"{seed}:{num}:{attempt}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little")


def _planted_orthonormal(dim: int, num: int) -> FrameMatrix:
    return FrameMatrix(dim=dim, num=num, rows=np.eye(num, dim))


def _probe(num: int, query: CapacityQuery):
    """(succeeded, certificate frame or None) for one candidate count."""
    if num < 2:
        raise ValueError("probe needs num >= 2")
    if num <= query.dim:
        # orthonormal construction is exact; never burn SGD on the lo end
        return True, _planted_orthonormal(query.dim, num)
    for attempt in range(query.attempt_budget):
        config = FrameConfig(
            alpha=query.alpha,
            dim=query.dim,
            num=num,
            seed=derived_probe_seed(query.seed, num, attempt),
            learning_rate=query.learning_rate,
            slice=query.slice,
            max_iters=query.probe_iters(num),
            tol=query.tol,
        )
        try:
            frame, report = generate(config, polish=False)
        except InfeasibleAlphaError:
            return False, None  # below the Welch floor: retries cannot help
        if report.converged and verify(frame, query.alpha, query.tol):
            return True, frame
    return False, None


def probe(num: int, query: CapacityQuery) -> bool:
    """Whether any attempt produced a verified frame with ``num`` vectors."""
    ok, _ = _probe(num, query)
    return ok


def bisect_capacity(query: CapacityQuery) -> CapacityResult:
    """Largest verified vector count, located by bracketed bisection.

    The bracket starts at ``lo = dim`` (always feasible).  The hi end is the
    analytic upper bound when finite, otherwise it grows by doubling until a
    probe fails or the search ceiling is reached.  Bisection assumes probe
    success is monotone in the count; the restart budget is what backs that
    assumption up in practice.
    """
    start = time.perf_counter()
    probes: list[tuple[int, bool]] = []
    analytic = max_num_upper_bound(query.alpha, query.dim)

    lo = query.dim
    _, best_frame = _probe(max(lo, 2), query) if lo >= 2 else (True, None)
    probes.append((lo, True))

    def run_probe(num: int):
        nonlocal best_frame
        ok, frame = _probe(num, query)
        probes.append((num, ok))
        if ok:
            best_frame = frame
        return ok

    ceiling_limited = False
    if analytic is not None and analytic <= lo:
        hi = None  # capacity is exactly dim; nothing above is possible
        ceiling_limited = True
    elif analytic is not None:
        if run_probe(analytic):
            lo, hi = analytic, None
            ceiling_limited = True  # cannot search past the analytic bound
        else:
            hi = analytic
    else:
        hi = None
        cand = lo * 2
        while True:
            if cand >= query.ceiling:
                if run_probe(query.ceiling):
                    lo = query.ceiling
                    ceiling_limited = True
                else:
                    hi = query.ceiling
                break
            if run_probe(cand):
                lo = cand
                cand *= 2
            else:
                hi = cand
                break

    if hi is not None:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if run_probe(mid):
                lo = mid
            else:
                hi = mid

    return CapacityResult(
        max_num_found=lo,
        analytic_upper=analytic,
        probes=probes,
        total_seconds=time.perf_counter() - start,
        best_frame=best_frame,
        ceiling_limited=ceiling_limited,
    )


def sqrt2n_heuristic(num: int) -> int:
    """Suggested dimension for ``num`` classes: ``ceil(sqrt(2 num))``."""
    if num < 2:
        raise ValueError("num must be at least 2")
    root = math.isqrt(2 * num)
    return root if root * root >= 2 * num else root + 1


def head_parameter_counts(embed_dim: int, frame_dim: int, num_classes: int):
    """Trainable classifier parameters: fixed-frame head vs FC head.

    With a fixed frame the network only learns the ``embed_dim x frame_dim``
    projection; a fully connected softmax head learns
    ``embed_dim x num_classes``.
    """
    if min(embed_dim, frame_dim, num_classes) < 1:
        raise ValueError("dimensions must be positive")
    return embed_dim * frame_dim, embed_dim * num_classes
