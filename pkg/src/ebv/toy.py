"""Desk-scale end-to-end demonstration of training against a frozen head.

A two-layer tanh extractor is trained on synthetic Gaussian-blob data,
either against a frozen frame head (cosine softmax, embeddings learn to
align with their class vector) or against a trainable fully connected
softmax head used as the comparison baseline.  Both arms share the same
extractor architecture, initialization, and data order; only the head
differs.

Plain mini-batch gradient descent, no momentum or weight decay: the whole
pipeline stays finite-difference checkable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifier import ClassifierHead, batch_nll_and_gradient

DEFAULT_RADIUS = 4.0
DEFAULT_HIDDEN = 32
TRAIN_FRACTION = 0.8


@dataclass(frozen=True)
class SyntheticDataset:
    """Gaussian blobs around random unit directions scaled to a sphere."""

    inputs: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    num_classes: int
    train_indices: np.ndarray = field(repr=False)
    test_indices: np.ndarray = field(repr=False)
    class_means: np.ndarray = field(repr=False)
    sigma: float
    radius: float
    seed: int

    @property
    def train_inputs(self):
        return self.inputs[self.train_indices]

    @property
    def train_labels(self):
        return self.labels[self.train_indices]

    @property
    def test_inputs(self):
        return self.inputs[self.test_indices]

    @property
    def test_labels(self):
        return self.labels[self.test_indices]


@dataclass
class Extractor:
    """Affine -> tanh -> affine map from inputs to embeddings."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def hidden(self, x: np.ndarray) -> np.ndarray:
        return np.tanh(x @ self.w1 + self.b1)

    def forward(self, x: np.ndarray) -> np.ndarray:
        return self.hidden(x) @ self.w2 + self.b2

    @property
    def embed_dim(self) -> int:
        return self.w2.shape[1]

    def parameter_count(self) -> int:
        return self.w1.size + self.b1.size + self.w2.size + self.b2.size


@dataclass
class LinearHead:
    """Trainable softmax head for the fully connected baseline arm."""

    weights: np.ndarray
    bias: np.ndarray

    def logits(self, embeddings: np.ndarray) -> np.ndarray:
        return embeddings @ self.weights + self.bias

    def parameter_count(self) -> int:
        return self.weights.size + self.bias.size


@dataclass(frozen=True)
class TrainRecord:
    """Per-epoch trace plus the configuration it was produced under."""

    arm: str
    train_loss: list[float]
    train_acc: list[float]
    test_acc: list[float]
    final_test_acc: float
    head_trainable_params: int
    config: dict


def make_dataset(
    num_classes: int,
    per_class: int,
    input_dim: int,
    sigma: float,
    seed: int,
    radius: float = DEFAULT_RADIUS,
) -> SyntheticDataset:
    """Blobs at ``radius`` times random unit directions, noise ``sigma``.

    Samples are shuffled then split 80/20 into train and test; everything is
    deterministic for a fixed seed.
    """
    if num_classes < 2 or per_class < 2:
        raise ValueError("need num_classes >= 2 and per_class >= 2")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    rng = np.random.default_rng(seed)
    means = rng.standard_normal((num_classes, input_dim))
    means /= np.linalg.norm(means, axis=1, keepdims=True)
    means *= radius
    total = num_classes * per_class
    labels = np.repeat(np.arange(num_classes), per_class)
    inputs = means[labels] + sigma * rng.standard_normal((total, input_dim))
    order = rng.permutation(total)
    inputs, labels = inputs[order], labels[order]
    cut = int(round(TRAIN_FRACTION * total))
    return SyntheticDataset(
        inputs=inputs,
        labels=labels,
        num_classes=num_classes,
        train_indices=np.arange(cut),
        test_indices=np.arange(cut, total),
        class_means=means,
        sigma=sigma,
        radius=radius,
        seed=seed,
    )


def init_extractor(
    input_dim: int, embed_dim: int, seed: int, hidden_dim: int = DEFAULT_HIDDEN
) -> Extractor:
    rng = np.random.default_rng([seed, 0])
    return Extractor(
        w1=rng.standard_normal((input_dim, hidden_dim)) / np.sqrt(input_dim),
        b1=np.zeros(hidden_dim),
        w2=rng.standard_normal((hidden_dim, embed_dim)) / np.sqrt(hidden_dim),
        b2=np.zeros(embed_dim),
    )


def _ebv_batch_loss_grads(extractor: Extractor, head: ClassifierHead, x, y):
    """Mean NLL and gradients for every extractor parameter."""
    h = extractor.hidden(x)
    v = h @ extractor.w2 + extractor.b2
    loss, dv = batch_nll_and_gradient(head, v, y)
    dv = dv / x.shape[0]
    dpre = (dv @ extractor.w2.T) * (1.0 - h * h)
    return loss, {
        "w1": x.T @ dpre,
        "b1": dpre.sum(axis=0),
        "w2": h.T @ dv,
        "b2": dv.sum(axis=0),
    }


def _fc_batch_loss_grads(extractor: Extractor, linear: LinearHead, x, y):
    """Mean cross-entropy and gradients for extractor plus linear head."""
    m = x.shape[0]
    h = extractor.hidden(x)
    v = h @ extractor.w2 + extractor.b2
    logits = linear.logits(v)
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    log_z = np.log(exp.sum(axis=1))
    rows = np.arange(m)
    loss = float((log_z - shifted[rows, y]).mean())
    dlogits = exp / exp.sum(axis=1, keepdims=True)
    dlogits[rows, y] -= 1.0
    dlogits /= m
    dv = dlogits @ linear.weights.T
    dpre = (dv @ extractor.w2.T) * (1.0 - h * h)
    return loss, {
        "w1": x.T @ dpre,
        "b1": dpre.sum(axis=0),
        "w2": h.T @ dv,
        "b2": dv.sum(axis=0),
        "head_w": v.T @ dlogits,
        "head_b": dlogits.sum(axis=0),
    }


def _predicted_classes(extractor: Extractor, head, x: np.ndarray) -> np.ndarray:
    v = extractor.forward(x)
    if isinstance(head, ClassifierHead):
        # positive rescaling of v cannot change this argmax
        return np.argmax(v @ head.class_rows.T, axis=1)
    return np.argmax(head.logits(v), axis=1)


def evaluate(extractor: Extractor, head, dataset: SyntheticDataset, split: str = "test") -> float:
    """Fraction of the split predicted correctly."""
    if split == "train":
        x, y = dataset.train_inputs, dataset.train_labels
    elif split == "test":
        x, y = dataset.test_inputs, dataset.test_labels
    else:
        raise ValueError(f"split must be 'train' or 'test', got {split!r}")
    return float((_predicted_classes(extractor, head, x) == y).mean())


def _run_training(dataset, extractor, head, grad_fn, params, epochs, lr, batch, seed, arm):
    x_train, y_train = dataset.train_inputs, dataset.train_labels
    order_rng = np.random.default_rng([seed, 2])
    train_loss, train_acc, test_acc = [], [], []
    for _ in range(epochs):
        order = order_rng.permutation(len(y_train))
        losses = []
        for start in range(0, len(order), batch):
            idx = order[start : start + batch]
            loss, grads = grad_fn(x_train[idx], y_train[idx])
            losses.append(loss)
            for name, target in params.items():
                target -= lr * grads[name]
        train_loss.append(float(np.mean(losses)))
        train_acc.append(evaluate(extractor, head, dataset, "train"))
        test_acc.append(evaluate(extractor, head, dataset, "test"))
    return TrainRecord(
        arm=arm,
        train_loss=train_loss,
        train_acc=train_acc,
        test_acc=test_acc,
        final_test_acc=test_acc[-1] if test_acc else 0.0,
        head_trainable_params=0 if isinstance(head, ClassifierHead) else head.parameter_count(),
        config={
            "epochs": epochs,
            "lr": lr,
            "batch": batch,
            "seed": seed,
            "tau": head.temperature if isinstance(head, ClassifierHead) else None,
        },
    )


def train_extractor(
    dataset: SyntheticDataset,
    head: ClassifierHead,
    epochs: int = 30,
    lr: float = 0.05,
    batch: int = 32,
    seed: int = 0,
    hidden_dim: int = DEFAULT_HIDDEN,
):
    """Train the extractor against a frozen frame head.

    The head's frame is never written to; gradients stop at the embeddings.
    """
    if head.frame.dim < 1:
        raise ValueError("head frame must be non-empty")
    extractor = init_extractor(
        dataset.inputs.shape[1], head.frame.dim, seed, hidden_dim
    )
    params = {
        "w1": extractor.w1,
        "b1": extractor.b1,
        "w2": extractor.w2,
        "b2": extractor.b2,
    }
    record = _run_training(
        dataset,
        extractor,
        head,
        lambda x, y: _ebv_batch_loss_grads(extractor, head, x, y),
        params,
        epochs,
        lr,
        batch,
        seed,
        arm="ebv",
    )
    return extractor, record


def train_fc_baseline(
    dataset: SyntheticDataset,
    embed_dim: int,
    epochs: int = 30,
    lr: float = 0.05,
    batch: int = 32,
    seed: int = 0,
    hidden_dim: int = DEFAULT_HIDDEN,
):
    """Same protocol with a trainable softmax head instead of a frame."""
    extractor = init_extractor(dataset.inputs.shape[1], embed_dim, seed, hidden_dim)
    head_rng = np.random.default_rng([seed, 1])
    linear = LinearHead(
        weights=head_rng.standard_normal((embed_dim, dataset.num_classes))
        / np.sqrt(embed_dim),
        bias=np.zeros(dataset.num_classes),
    )
    params = {
        "w1": extractor.w1,
        "b1": extractor.b1,
        "w2": extractor.w2,
        "b2": extractor.b2,
        "head_w": linear.weights,
        "head_b": linear.bias,
    }
    record = _run_training(
        dataset,
        extractor,
        linear,
        lambda x, y: _fc_batch_loss_grads(extractor, linear, x, y),
        params,
        epochs,
        lr,
        batch,
        seed,
        arm="fc",
    )
    return (extractor, linear), record


def own_vector_angle_fraction(
    extractor: Extractor, head: ClassifierHead, dataset: SyntheticDataset
) -> float:
    """Fraction of train samples strictly closest in angle to their own class vector."""
    v = extractor.forward(dataset.train_inputs)
    v = v / np.linalg.norm(v, axis=1, keepdims=True)
    cosines = v @ head.class_rows.T
    labels = dataset.train_labels
    rows = np.arange(len(labels))
    own = cosines[rows, labels].copy()
    cosines[rows, labels] = -np.inf
    return float((own > cosines.max(axis=1)).mean())
