"""Laplace sampling and the three noise-injection mechanisms.

Three ways to privatize a locally trained logistic model:

* parameter perturbation -- add Laplace noise straight to the fitted
  (weights, bias), with a caller-supplied sensitivity;
* objective perturbation (OFPA) -- add v.w to the logistic objective, v drawn
  entrywise from Lap(0, 4/eps);
* coefficient perturbation (OFAA) -- truncate the objective's Taylor
  expansion at degree 2 and add per-degree Laplace noise to every polynomial
  coefficient.

All draws go through LaplaceSampler so a fixed seed reproduces perturbed
objectives bit for bit, and tests can substitute a stub uniform source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .dataset import EncodedDataset
from .logistic import LogisticObjective, ModelParams

#: l2 radius forced onto descent iterates when minimizing a perturbed
#: quadratic objective, which noise can make unbounded below.
OFAA_CLIP_RADIUS = 10.0

_NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class PrivacyBudget:
    """Per-release privacy budget epsilon; smaller means stronger privacy."""

    epsilon: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


class LaplaceSampler:
    """Draws from Lap(0, b) by inverse CDF over a uniform source.

    The source only needs a ``random(size=None)`` method returning uniforms
    on [0, 1), which both numpy Generators and test stubs provide. Identical
    seeds yield identical sample streams. A single sampler is single-owner
    mutable state; use one per thread.
    """

    def __init__(self, scale: float, seed: int | None = None, rng=None):
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.scale = float(scale)
        self.rng = np.random.default_rng(seed) if rng is None else rng

    def _transform(self, u: np.ndarray, scale: float) -> np.ndarray:
        # u = 0 maps to the median; rng.random() can return exactly 0.0,
        # which would put u at -0.5 and log1p at -inf, so remap that point.
        u = np.where(u == -0.5, 0.0, u)
        return -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))

    def sample(self, scale: float | None = None) -> float:
        """One draw from Lap(0, scale), defaulting to the stored scale."""
        b = self.scale if scale is None else float(scale)
        u = np.asarray(self.rng.random()) - 0.5
        return float(self._transform(u, b))

    def sample_vector(self, n: int, scale: float | None = None) -> np.ndarray:
        """n independent draws from Lap(0, scale)."""
        b = self.scale if scale is None else float(scale)
        u = np.asarray(self.rng.random(n)) - 0.5
        return self._transform(u, b)


def laplace_sample(sampler: LaplaceSampler) -> float:
    """One draw from Lap(0, sampler.scale)."""
    return sampler.sample()


def perturb_params(
    optimal: ModelParams,
    sensitivity: float,
    budget: PrivacyBudget,
    sampler: LaplaceSampler,
) -> ModelParams:
    """Add Lap(0, sensitivity/eps) noise to every entry of (weights, bias).

    The global sensitivity is supplied by the caller; computing it for a
    logistic model is out of reach here, which is exactly why the objective
    perturbation routes below exist.
    """
    if sensitivity <= 0:
        raise ValueError("sensitivity must be positive")
    noise = sampler.sample_vector(
        optimal.dimension + 1, scale=sensitivity / budget.epsilon
    )
    return ModelParams(optimal.weights + noise[:-1], optimal.bias + noise[-1])


def ofpa_scale(budget: PrivacyBudget) -> float:
    """Laplace scale 4/eps for objective perturbation.

    4 bounds the l1 change of the stationarity condition between neighboring
    datasets whose records all have l1 norm <= 1.
    """
    return 4.0 / budget.epsilon


def _require_normalized(data: EncodedDataset) -> None:
    if not data.is_normalized(_NORMALIZATION_TOL):
        raise ValueError(
            "dataset is not normalized: some record has l1 norm "
            f"{data.max_l1():.6f} > 1"
        )


@dataclass(frozen=True)
class PerturbedLogisticObjective:
    """Logistic objective plus the linear noise term noise.w.

    Only the weight gradient picks up the noise vector; the bias is not
    perturbed because the noise multiplies the weights alone.
    """

    base: LogisticObjective
    noise: np.ndarray

    def __post_init__(self):
        noise = np.array(self.noise, dtype=float)
        if noise.shape != (self.base.data.dimension,):
            raise ValueError("noise vector must match the dataset dimension")
        noise.flags.writeable = False
        object.__setattr__(self, "noise", noise)

    def value(self, params: ModelParams) -> float:
        return self.base.value(params) + float(self.noise @ params.weights)

    def gradient(self, params: ModelParams) -> Tuple[np.ndarray, float]:
        grad_w, grad_b = self.base.gradient(params)
        return grad_w + self.noise, grad_b


def ofpa_perturb(
    data: EncodedDataset, budget: PrivacyBudget, sampler: LaplaceSampler
) -> PerturbedLogisticObjective:
    """Draw v ~ Lap(0, 4/eps)^d and return the objective l(w, a) + v.w."""
    _require_normalized(data)
    noise = sampler.sample_vector(data.dimension, scale=ofpa_scale(budget))
    return PerturbedLogisticObjective(LogisticObjective(data), noise)


def taylor_coefficients() -> Tuple[float, float, float]:
    """0th, 1st and 2nd derivatives of ln(1 + e^t) at t = 0: (ln2, 1/2, 1/4)."""
    return (math.log(2.0), 0.5, 0.25)


@dataclass(frozen=True)
class QuadraticObjective:
    """Degree-2 polynomial surrogate of the logistic objective.

    Over u = (weights, bias) the value is c0 + c1.u + u.c2.u with c2
    symmetric. Because noise can make c2 indefinite, descend on this only
    with a finite clip radius.
    """

    c0: float
    c1: np.ndarray
    c2: np.ndarray
    truncation_degree: int = 2

    def __post_init__(self):
        c1 = np.array(self.c1, dtype=float)
        c2 = np.array(self.c2, dtype=float)
        if c1.ndim != 1:
            raise ValueError("c1 must be a vector")
        if c2.shape != (c1.shape[0], c1.shape[0]):
            raise ValueError("c2 must be square and match c1")
        if np.abs(c2 - c2.T).max() > 1e-12:
            raise ValueError("c2 must be symmetric")
        c1.flags.writeable = False
        c2.flags.writeable = False
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)

    @property
    def dimension(self) -> int:
        return self.c1.shape[0] - 1

    def value(self, params: ModelParams) -> float:
        u = params.to_vector()
        return self.c0 + float(self.c1 @ u) + float(u @ (self.c2 @ u))

    def gradient(self, params: ModelParams) -> Tuple[np.ndarray, float]:
        u = params.to_vector()
        g = self.c1 + 2.0 * (self.c2 @ u)
        return g[:-1], float(g[-1])


def build_quadratic_objective(data: EncodedDataset) -> QuadraticObjective:
    """Taylor-truncate the logistic objective at degree 2 around 0.

    With z_i = (x_i, 1) augmenting the bias:

        c0 = n ln2,   c1 = sum_i (1/2 - y_i) z_i,   c2 = (1/8) sum_i z_i z_i^T

    where 1/8 is the second derivative 1/4 divided by 2!.
    """
    _require_normalized(data)
    n = data.n_records
    z = np.hstack([data.features, np.ones((n, 1))])
    c0 = n * math.log(2.0)
    c1 = ((0.5 - data.labels)[:, None] * z).sum(axis=0)
    raw = (z.T @ z) / 8.0
    # blocked matmul can leave z.T @ z asymmetric by an ulp; symmetrize exactly
    c2 = (raw + raw.T) / 2.0
    return QuadraticObjective(c0, c1, c2)


def ofaa_sensitivity(degree: int, dimension: int, truncation_degree: int = 2) -> float:
    """Noise sensitivity 2(J+1) * (max per-record coefficient l1 mass) for one degree.

    Per record with z = (x, 1) and l1(x) <= 1:

    * degree 0: the constant term is ln2;
    * degree 1: the published closed bound (9/2) d, d the feature count;
    * degree 2: the monomial coefficients of (z.u)^2 / 8 have total l1 mass
      l1(z)^2 / 8 <= (1 + 1)^2 / 8 = 1/2, so the bound is 2(J+1)/2 = J+1,
      independent of the dimension. (Bounding entrywise by |z_a z_b| <= 1
      instead gives (d+1)^2/8, which drowns the quadratic term in noise and
      inverts the accuracy-vs-dimension behaviour.)
    """
    j_plus_1 = 2 * (truncation_degree + 1)
    if degree == 0:
        return j_plus_1 * math.log(2.0)
    if degree == 1:
        return 4.5 * dimension
    if degree == 2:
        return j_plus_1 * 0.5
    raise ValueError(f"degree must be 0, 1 or 2, got {degree}")


def ofaa_perturb(
    quad: QuadraticObjective,
    budget: PrivacyBudget,
    dimension: int,
    sampler: LaplaceSampler,
) -> QuadraticObjective:
    """Add one independent Lap(0, dS_j/eps) draw to every degree-j coefficient.

    Degree 0 perturbs c0, degree 1 each of the d+1 entries of c1, degree 2
    each upper-triangle entry of c2 (mirrored so c2 stays symmetric). Draws
    happen in that order, so a fixed seed pins the whole perturbation.
    """
    if quad.dimension != dimension:
        raise ValueError(
            f"quadratic dimension {quad.dimension} does not match {dimension}"
        )
    scales = [
        ofaa_sensitivity(j, dimension, quad.truncation_degree) / budget.epsilon
        for j in (0, 1, 2)
    ]
    k = dimension + 1
    c0 = quad.c0 + sampler.sample(scale=scales[0])
    c1 = quad.c1 + sampler.sample_vector(k, scale=scales[1])
    upper = np.triu_indices(k)
    noise = np.zeros((k, k))
    noise[upper] = sampler.sample_vector(len(upper[0]), scale=scales[2])
    noise = noise + np.triu(noise, 1).T
    return QuadraticObjective(c0, c1, quad.c2 + noise, quad.truncation_degree)
