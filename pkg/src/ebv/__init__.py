"""Equiangular basis vectors.

Generation of near-equiangular unit-vector frames by hinge-loss gradient
descent, analytic coherence bounds, capacity search over (alpha, dim), and
a frozen-frame cosine-softmax classification head with a synthetic training
harness.
"""

from ._accel import BACKEND
from .capacity import (
    CapacityQuery,
    CapacityResult,
    bisect_capacity,
    head_parameter_counts,
    probe,
    sqrt2n_heuristic,
)
from .classifier import (
    ClassifierHead,
    Prediction,
    class_probabilities,
    loss_gradient_wrt_embedding,
    nll_loss,
    predict,
    spherical_distance,
)
from .core import (
    FrameConfig,
    FrameMatrix,
    FrameStats,
    avg_deviation_angle_deg,
    frame_stats,
    gram_abs,
    grassmannian_feasibility,
    max_num_upper_bound,
    min_pairwise_angle_deg,
    mutual_coherence,
    subset,
    welch_lower_bound,
)
from .errors import (
    DegenerateEmbeddingError,
    EBVError,
    FrameFileError,
    FrameIntegrityError,
    InfeasibleAlphaError,
)
from .frameio import FrameMeta, load_frame, save_frame
from .generate import (
    GenerationReport,
    generate,
    generation_step,
    hinge_coherence_loss,
    init_random_frame,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CapacityQuery",
    "CapacityResult",
    "ClassifierHead",
    "DegenerateEmbeddingError",
    "EBVError",
    "FrameConfig",
    "FrameFileError",
    "FrameIntegrityError",
    "FrameMatrix",
    "FrameMeta",
    "FrameStats",
    "GenerationReport",
    "InfeasibleAlphaError",
    "Prediction",
    "avg_deviation_angle_deg",
    "bisect_capacity",
    "class_probabilities",
    "frame_stats",
    "generate",
    "generation_step",
    "gram_abs",
    "grassmannian_feasibility",
    "head_parameter_counts",
    "hinge_coherence_loss",
    "init_random_frame",
    "load_frame",
    "loss_gradient_wrt_embedding",
    "max_num_upper_bound",
    "min_pairwise_angle_deg",
    "mutual_coherence",
    "nll_loss",
    "predict",
    "probe",
    "save_frame",
    "spherical_distance",
    "sqrt2n_heuristic",
    "subset",
    "verify",
    "welch_lower_bound",
]
