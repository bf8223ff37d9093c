"""Fixed-frame classification head: temperature-scaled cosine softmax.

The head binds class ``k`` to row ``k`` of a frozen frame.  An embedding is
l2-normalized, its cosine against every class vector is divided by the
temperature, and a softmax turns the scaled cosines into probabilities.
The frame never receives gradients; training only moves the embeddings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import FrameMatrix
from .errors import DegenerateEmbeddingError

DEFAULT_TEMPERATURE = 0.07
_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class ClassifierHead:
    """Frozen frame plus temperature; class ``k`` is the frame's row ``k``."""

    frame: FrameMatrix
    temperature: float = DEFAULT_TEMPERATURE
    num_classes: int = 0  # 0: every frame row is a class

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.num_classes == 0:
            object.__setattr__(self, "num_classes", self.frame.num)
        if not 1 <= self.num_classes <= self.frame.num:
            raise ValueError(
                f"num_classes={self.num_classes} must lie in [1, {self.frame.num}]"
            )

    @property
    def class_rows(self) -> np.ndarray:
        return self.frame.rows[: self.num_classes]


@dataclass(frozen=True)
class Prediction:
    class_index: int
    probabilities: np.ndarray = field(repr=False)
    max_cosine: float = 0.0


def _normalized(embedding: np.ndarray) -> np.ndarray:
    v = np.asarray(embedding, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm < _NORM_FLOOR:
        raise DegenerateEmbeddingError(
            f"embedding norm {norm:.3e} is below {_NORM_FLOOR:g}; direction undefined"
        )
    return v / norm


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def class_probabilities(head: ClassifierHead, embedding: np.ndarray) -> np.ndarray:
    """Softmax over ``cos(w_k, v) / temperature``; sums to 1."""
    v_hat = _normalized(embedding)
    logits = (head.class_rows @ v_hat) / head.temperature
    return _softmax(logits)


def predict(head: ClassifierHead, embedding: np.ndarray) -> Prediction:
    """Class with the largest cosine (equivalently, largest probability).

    Ties break toward the lowest class index.  The argmax is independent of
    the temperature, which only sharpens or flattens the probabilities.
    """
    v_hat = _normalized(embedding)
    cosines = head.class_rows @ v_hat
    index = int(np.argmax(cosines))
    return Prediction(
        class_index=index,
        probabilities=_softmax(cosines / head.temperature),
        max_cosine=float(cosines[index]),
    )


def nll_loss(head: ClassifierHead, embedding: np.ndarray, label: int) -> float:
    """Negative log probability of ``label`` under the head."""
    if not 0 <= label < head.num_classes:
        raise IndexError(f"label {label} out of range [0, {head.num_classes})")
    v_hat = _normalized(embedding)
    logits = (head.class_rows @ v_hat) / head.temperature
    shifted = logits - logits.max()
    return float(np.log(np.exp(shifted).sum()) - shifted[label])


def loss_gradient_wrt_embedding(
    head: ClassifierHead, embedding: np.ndarray, label: int
) -> np.ndarray:
    """Exact gradient of :func:`nll_loss` with respect to the raw embedding.

    The chain runs through the l2 normalization, so the result is orthogonal
    to the embedding direction; the frozen frame gets no gradient.
    """
    if not 0 <= label < head.num_classes:
        raise IndexError(f"label {label} out of range [0, {head.num_classes})")
    v = np.asarray(embedding, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm < _NORM_FLOOR:
        raise DegenerateEmbeddingError(
            f"embedding norm {norm:.3e} is below {_NORM_FLOOR:g}; direction undefined"
        )
    v_hat = v / norm
    probs = _softmax((head.class_rows @ v_hat) / head.temperature)
    probs[label] -= 1.0
    grad_vhat = (probs @ head.class_rows) / head.temperature
    # project out the radial direction: d(v/|v|)/dv = (I - v_hat v_hat^T)/|v|
    return (grad_vhat - float(grad_vhat @ v_hat) * v_hat) / norm


def spherical_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Geodesic angle ``arccos(a . b / (|a| |b|))`` in radians, in [0, pi]."""
    cos = float(np.clip(_normalized(a) @ _normalized(b), -1.0, 1.0))
    return math.acos(cos)


def batch_probabilities(head: ClassifierHead, embeddings: np.ndarray) -> np.ndarray:
    """Row-wise :func:`class_probabilities` for an ``(m, dim)`` batch."""
    v = np.asarray(embeddings, dtype=np.float64)
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    if (norms < _NORM_FLOOR).any():
        raise DegenerateEmbeddingError("batch contains a near-zero embedding")
    logits = (v / norms) @ head.class_rows.T / head.temperature
    logits -= logits.max(axis=1, keepdims=True)
    exp = np.exp(logits)
    return exp / exp.sum(axis=1, keepdims=True)


def batch_nll_and_gradient(
    head: ClassifierHead, embeddings: np.ndarray, labels: np.ndarray
):
    """Mean NLL over a batch plus per-sample gradients w.r.t. raw embeddings.

    Vectorized counterpart of :func:`nll_loss` and
    :func:`loss_gradient_wrt_embedding`; the returned gradient array holds
    the gradient of each sample's own loss (not yet averaged).
    """
    v = np.asarray(embeddings, dtype=np.float64)
    m = v.shape[0]
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    if (norms < _NORM_FLOOR).any():
        raise DegenerateEmbeddingError("batch contains a near-zero embedding")
    v_hat = v / norms
    logits = v_hat @ head.class_rows.T / head.temperature
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    log_z = np.log(exp.sum(axis=1))
    rows = np.arange(m)
    mean_loss = float((log_z - shifted[rows, labels]).mean())
    probs = exp / exp.sum(axis=1, keepdims=True)
    probs[rows, labels] -= 1.0
    grad_vhat = probs @ head.class_rows / head.temperature
    radial = (grad_vhat * v_hat).sum(axis=1, keepdims=True)
    return mean_loss, (grad_vhat - radial * v_hat) / norms
