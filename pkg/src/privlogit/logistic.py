"""Logistic regression objective, gradient, full-batch descent, and prediction.

This is the noiseless core that every perturbation mechanism wraps. The
training objective is the summed (not averaged) negative log-likelihood

    sum_i ( -y_i (w.x_i + a) + ln(1 + exp(w.x_i + a)) )

so gradients scale with the number of records; callers pick the learning
rate accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Tuple, Union

import numpy as np

from .dataset import EncodedDataset
from .errors import NumericalError


def sigmoid(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Numerically stable 1 / (1 + exp(-x)).

    Computed from exp(-|x|) so neither branch can overflow; exact to within
    an ulp for |x| up to 700 and beyond (saturates cleanly).
    """
    arr = np.asarray(x, dtype=float)
    z = np.exp(-np.abs(arr))
    out = np.where(arr >= 0, 1.0 / (1.0 + z), z / (1.0 + z))
    if arr.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ModelParams:
    """Weight vector plus bias scalar; entries are always finite."""

    weights: np.ndarray
    bias: float

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        if weights.ndim != 1:
            raise ValueError(f"weights must be 1-D, got shape {weights.shape}")
        bias = float(self.bias)
        if not (np.all(np.isfinite(weights)) and math.isfinite(bias)):
            raise ValueError("model parameters must be finite")
        weights.flags.writeable = False
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)

    @property
    def dimension(self) -> int:
        return self.weights.shape[0]

    def to_vector(self) -> np.ndarray:
        """Concatenated (weights, bias) vector of length d+1."""
        return np.concatenate([self.weights, [self.bias]])

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "ModelParams":
        vec = np.asarray(vec, dtype=float)
        return cls(vec[:-1], float(vec[-1]))

    @classmethod
    def zeros(cls, dimension: int) -> "ModelParams":
        return cls(np.zeros(dimension), 0.0)


@dataclass(frozen=True)
class GdSettings:
    """Full-batch gradient descent settings.

    ``clip_radius`` bounds the l2 norm of (weights, bias) after every step;
    None disables clipping. The default radius 50 is effectively inactive for
    noiseless training but guards perturbed objectives that are unbounded
    below.
    """

    learning_rate: float = 0.1
    epochs: int = 40
    clip_radius: Union[float, None] = 50.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.clip_radius is not None and self.clip_radius <= 0:
            raise ValueError("clip_radius must be positive or None")


class Objective(Protocol):
    """Anything minimize() can descend on."""

    def value(self, params: ModelParams) -> float: ...

    def gradient(self, params: ModelParams) -> Tuple[np.ndarray, float]: ...


def _check_dimensions(params: ModelParams, data: EncodedDataset) -> None:
    if params.dimension != data.dimension:
        raise ValueError(
            f"parameter dimension {params.dimension} does not match "
            f"dataset dimension {data.dimension}"
        )


def objective_value(params: ModelParams, data: EncodedDataset) -> float:
    """Summed logistic loss over all records, in log-sum-exp stable form."""
    _check_dimensions(params, data)
    t = data.features @ params.weights + params.bias
    # logaddexp(0, t) == ln(1 + e^t) without overflow for large |t|
    return float(np.sum(np.logaddexp(0.0, t) - data.labels * t))


def objective_gradient(
    params: ModelParams, data: EncodedDataset
) -> Tuple[np.ndarray, float]:
    """Gradient of objective_value over (weights, bias)."""
    _check_dimensions(params, data)
    t = data.features @ params.weights + params.bias
    residual = sigmoid(t) - data.labels
    return data.features.T @ residual, float(residual.sum())


@dataclass(frozen=True)
class LogisticObjective:
    """objective_value / objective_gradient bound to one dataset."""

    data: EncodedDataset

    def value(self, params: ModelParams) -> float:
        return objective_value(params, self.data)

    def gradient(self, params: ModelParams) -> Tuple[np.ndarray, float]:
        return objective_gradient(params, self.data)


def minimize(objective: Objective, init: ModelParams, settings: GdSettings) -> ModelParams:
    """Full-batch gradient descent for exactly ``settings.epochs`` passes.

    After each step the (weights, bias) vector is rescaled onto the ball of
    radius ``clip_radius`` when it leaves it. Deterministic given its inputs.

    Raises NumericalError naming the offending epoch if the iterate leaves
    the finite range.
    """
    weights = init.weights.copy()
    bias = init.bias
    params = init
    for epoch in range(settings.epochs):
        grad_w, grad_b = objective.gradient(params)
        weights = weights - settings.learning_rate * grad_w
        bias = bias - settings.learning_rate * grad_b
        if not (np.all(np.isfinite(weights)) and math.isfinite(bias)):
            raise NumericalError(
                f"non-finite parameters after gradient step at epoch {epoch}"
            )
        if settings.clip_radius is not None:
            norm = math.sqrt(float(weights @ weights) + bias * bias)
            if norm > settings.clip_radius:
                factor = settings.clip_radius / norm
                weights = weights * factor
                bias = bias * factor
        params = ModelParams(weights, bias)
    return params


def predict_proba(params: ModelParams, x: np.ndarray) -> float:
    """Probability of label 1 for a single feature vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (params.dimension,):
        raise ValueError(
            f"feature vector shape {x.shape} does not match dimension {params.dimension}"
        )
    return float(sigmoid(float(x @ params.weights) + params.bias))


def predict_label(params: ModelParams, x: np.ndarray) -> int:
    """1 iff predict_proba > 0.5; a tie at exactly 0.5 maps to 0."""
    return int(predict_proba(params, x) > 0.5)


def misclassification_rate(params: ModelParams, test: EncodedDataset) -> float:
    """Fraction of test records whose predicted label differs from the truth."""
    _check_dimensions(params, test)
    t = test.features @ params.weights + params.bias
    predicted = (sigmoid(t) > 0.5).astype(np.int64)
    return float(np.mean(predicted != test.labels))
