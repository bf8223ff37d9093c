"""Exception types shared across the package."""


class EBVError(Exception):
    """Base class for domain errors raised by this package."""


class InfeasibleAlphaError(EBVError, ValueError):
    """Requested coherence threshold lies below the analytic floor."""

    def __init__(self, alpha, welch_bound, dim, num):
        self.alpha = alpha
        self.welch_bound = welch_bound
        super().__init__(
            f"alpha={alpha:g} is below the Welch lower bound "
            f"{welch_bound:.12g} for {num} unit vectors in R^{dim}; "
            "no such frame exists"
        )


class FrameFileError(EBVError):
    """Frame file is unreadable: bad magic, version, or byte layout."""


class FrameIntegrityError(FrameFileError):
    """Frame file parses but its payload violates frame invariants."""


class DegenerateEmbeddingError(EBVError, ValueError):
    """Embedding norm is too small to normalize."""
