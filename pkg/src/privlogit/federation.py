"""In-process simulation of collaborative training rounds.

Each round every party minimizes its own (freshly perturbed) objective
starting from the current global parameters, the server averages the uploads
weighted by party dataset size, and the loop stops once the global parameter
change drops to the threshold eta or the round cap is hit. The server is a
plain aggregation step; there is no wire protocol.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

import numpy as np

from .dataset import EncodedDataset
from .logistic import GdSettings, LogisticObjective, ModelParams, minimize
from .mechanisms import (
    OFAA_CLIP_RADIUS,
    LaplaceSampler,
    PrivacyBudget,
    build_quadratic_objective,
    ofaa_perturb,
    ofpa_perturb,
    perturb_params,
)


class Mechanism(str, Enum):
    """How a party privatizes what it uploads."""

    NOISELESS = "NOISELESS"
    OFPA = "OFPA"
    OFAA = "OFAA"
    ALG1 = "ALG1"  # parameter perturbation baseline


@dataclass
class Party:
    """One data owner: a local dataset, a mechanism, and its own sampler.

    ``param_sensitivity`` is only consulted by the ALG1 baseline, which needs
    a caller-chosen global sensitivity.
    """

    id: int
    data: EncodedDataset
    mechanism: Mechanism
    sampler: Union[LaplaceSampler, None] = None
    param_sensitivity: float = 4.0


@dataclass(frozen=True)
class FederationConfig:
    budget: PrivacyBudget
    eta: float = 1e-3
    max_rounds: int = 50
    gd: GdSettings = field(default_factory=GdSettings)
    root_seed: int = 0

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")


@dataclass(frozen=True)
class RoundState:
    round_index: int
    global_params: ModelParams
    last_delta: float


@dataclass(frozen=True)
class FederationResult:
    params: ModelParams
    rounds_used: int
    converged: bool
    per_round_deltas: Tuple[float, ...]


def weighted_average(uploads: Sequence[Tuple[ModelParams, int]]) -> ModelParams:
    """Average parameters with weights proportional to dataset sizes.

    Accumulates in exact rational arithmetic so the result is bit-identical
    under permutation of the uploads and under rescaling of all sizes by a
    common factor, and averaging copies of one vector returns it exactly;
    float summation guarantees none of that.
    """
    if not uploads:
        raise ValueError("weighted_average needs at least one upload")
    dimension = uploads[0][0].dimension
    sizes: List[int] = []
    for params, size in uploads:
        if params.dimension != dimension:
            raise ValueError("all uploads must share one dimension")
        if int(size) != size or size <= 0:
            raise ValueError("sizes must be positive integers")
        sizes.append(int(size))
    total = sum(sizes)
    acc = [Fraction(0)] * (dimension + 1)
    for (params, _), size in zip(uploads, sizes):
        vec = params.to_vector()
        for j in range(dimension + 1):
            acc[j] += size * Fraction(float(vec[j]))
    averaged = np.array([float(a / total) for a in acc])
    return ModelParams.from_vector(averaged)


def derive_sampler(root_seed: int, party_id: int, round_index: int) -> LaplaceSampler:
    """Fresh per-(party, round) sampler so noise streams are independent."""
    seq = np.random.SeedSequence([abs(int(root_seed)), abs(int(party_id)), round_index])
    return LaplaceSampler(1.0, rng=np.random.default_rng(seq))


def local_train_round(
    party: Party,
    global_params: ModelParams,
    budget: PrivacyBudget,
    gd: GdSettings,
) -> ModelParams:
    """One party's round: build its perturbed objective and minimize it.

    Minimization starts from the downloaded global parameters. OFPA, OFAA
    and ALG1 consume fresh noise from the party's sampler on every call.
    """
    if party.mechanism is not Mechanism.NOISELESS and party.sampler is None:
        raise ValueError(f"party {party.id} needs a sampler for {party.mechanism.value}")

    if party.mechanism is Mechanism.NOISELESS:
        return minimize(LogisticObjective(party.data), global_params, gd)
    if party.mechanism is Mechanism.OFPA:
        objective = ofpa_perturb(party.data, budget, party.sampler)
        return minimize(objective, global_params, gd)
    if party.mechanism is Mechanism.OFAA:
        objective = ofaa_perturb(
            build_quadratic_objective(party.data),
            budget,
            party.data.dimension,
            party.sampler,
        )
        # perturbed quadratics can be unbounded below: force a finite clip
        radius = OFAA_CLIP_RADIUS if gd.clip_radius is None else min(gd.clip_radius, OFAA_CLIP_RADIUS)
        return minimize(objective, global_params, replace(gd, clip_radius=radius))
    if party.mechanism is Mechanism.ALG1:
        fitted = minimize(LogisticObjective(party.data), global_params, gd)
        return perturb_params(fitted, party.param_sensitivity, budget, party.sampler)
    raise ValueError(f"unknown mechanism {party.mechanism!r}")


def run_federation(parties: Sequence[Party], config: FederationConfig) -> FederationResult:
    """Run the collaborative loop until the global update is below eta.

    Round k reseeds every noisy party's sampler from (root_seed, party id, k),
    so a fixed root seed makes the whole run bit-reproducible. Hitting
    max_rounds without convergence is a normal outcome, not an error.
    """
    if not parties:
        raise ValueError("run_federation needs at least one party")
    ids = [p.id for p in parties]
    if len(set(ids)) != len(ids):
        raise ValueError("party ids must be unique")
    dimension = parties[0].data.dimension
    if any(p.data.dimension != dimension for p in parties):
        raise ValueError("all parties must share one feature dimension")

    state = RoundState(0, ModelParams.zeros(dimension), float("inf"))
    deltas: List[float] = []
    for k in range(config.max_rounds):
        uploads = []
        for party in parties:
            if party.mechanism is not Mechanism.NOISELESS:
                party.sampler = derive_sampler(config.root_seed, party.id, k)
            trained = local_train_round(party, state.global_params, config.budget, config.gd)
            uploads.append((trained, party.data.n_records))
        new_global = weighted_average(uploads)
        diff = new_global.to_vector() - state.global_params.to_vector()
        delta = float(np.linalg.norm(diff))
        deltas.append(delta)
        state = RoundState(k + 1, new_global, delta)
        if delta <= config.eta:
            break
    return FederationResult(
        params=state.global_params,
        rounds_used=state.round_index,
        converged=state.last_delta <= config.eta,
        per_round_deltas=tuple(deltas),
    )


def budget_ledger(result: FederationResult, per_round_epsilon: float) -> float:
    """Naive sequential-composition total: rounds_used * per-round epsilon."""
    return result.rounds_used * per_round_epsilon
