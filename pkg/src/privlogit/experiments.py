"""Sweep harness: epsilon / cardinality / dimensionality scans and timing runs.

Every sweep row averages ``repetitions`` independent federated runs. Per-run
seeds are derived from the root seed and the repetition index but not from
the sweep point, so runs at different points of one axis are paired: the
noiseless baseline is exactly invariant along the epsilon axis, and the
rate-1.0 / full-dimension rows reproduce an unswept run bit for bit.

Sweep reports leave the seconds column at zero so that a repeated invocation
with one seed emits a byte-identical file; wall-clock timing comes from
time_training only.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from .data import (
    SplitSpec,
    concatenate,
    fit_minmax,
    label_encode,
    load_csv,
    load_schema,
    normalize,
    partition,
    project_dims,
    subsample,
    synthesize,
)
from .dataset import EncodedDataset
from .errors import DataError
from .federation import FederationConfig, Mechanism, Party, run_federation
from .logistic import GdSettings, misclassification_rate
from .mechanisms import PrivacyBudget

DEFAULT_EPSILON_GRID = (0.1, 0.2, 0.4, 0.8, 1.6, 3.2)
DEFAULT_CARDINALITY_GRID = (0.2, 0.4, 0.6, 0.8, 1.0)
DEFAULT_ALGORITHMS = (Mechanism.NOISELESS, Mechanism.OFPA, Mechanism.OFAA)

REPORT_HEADER = "algorithm,sweep_axis,sweep_value,mean_miscls,std_miscls,mean_seconds,rounds_used"

# namespace tags for seed derivation, so the partition / subsample / synthetic
# / per-algorithm streams never collide
_TAG_PARTITION = 11
_TAG_SUBSAMPLE = 12
_TAG_SYNTH = 13
_ALGO_TAG = {
    Mechanism.NOISELESS: 20,
    Mechanism.OFPA: 21,
    Mechanism.OFAA: 22,
    Mechanism.ALG1: 23,
}


@dataclass(frozen=True)
class SyntheticSource:
    """Generate a fresh synthetic dataset per repetition."""

    n: int = 2000
    d: int = 10
    separation: float = 3.0
    seed: int = 0


@dataclass(frozen=True)
class CsvSource:
    data_path: str
    schema_path: str
    delimiter: str = ","


DataSource = Union[SyntheticSource, CsvSource]


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one sweep needs; exactly one axis is active per call."""

    source: DataSource
    algorithms: Tuple[Mechanism, ...] = DEFAULT_ALGORITHMS
    epsilon_grid: Tuple[float, ...] = DEFAULT_EPSILON_GRID
    cardinality_grid: Tuple[float, ...] = DEFAULT_CARDINALITY_GRID
    dimension_grid: Union[Tuple[int, ...], None] = None
    fixed_epsilon: float = 0.8
    repetitions: int = 10
    epochs: int = 40
    eta: float = 1e-3
    max_rounds: int = 50
    party_fractions: Tuple[float, ...] = (0.4, 0.3, 0.1)
    test_fraction: float = 0.2
    root_seed: int = 0
    alg1_sensitivity: float = 4.0
    # learning rate is lr_scale / (number of training records): the objective
    # is a sum over records, so a fixed rate would diverge on large datasets
    lr_scale: float = 2.0

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        if any(e <= 0 for e in self.epsilon_grid) or self.fixed_epsilon <= 0:
            raise ValueError("epsilon values must be positive")
        if any(not 0 < r <= 1 for r in self.cardinality_grid):
            raise ValueError("cardinality rates must be in (0, 1]")


@dataclass(frozen=True)
class MetricsRow:
    algorithm: str
    sweep_axis: str
    sweep_value: float
    mean_miscls: float
    std_miscls: float
    mean_seconds: float
    rounds_used: float


@dataclass(frozen=True)
class MetricsReport:
    rows: Tuple[MetricsRow, ...]


@dataclass(frozen=True)
class RunOutcome:
    misclassification: float
    train_seconds: float
    rounds_used: int


def _derive_int(*keys: int) -> int:
    seq = np.random.SeedSequence([abs(int(k)) for k in keys])
    return int(seq.generate_state(1)[0])


def load_source(source: DataSource) -> Union[EncodedDataset, None]:
    """Load a CSV source once (pre-normalization); synthetic sources load per rep."""
    if isinstance(source, SyntheticSource):
        return None
    table = load_csv(source.data_path, delimiter=source.delimiter)
    schema = load_schema(source.schema_path)
    return label_encode(table, schema)


def default_dimension_grid(dimension: int) -> Tuple[int, ...]:
    """Five roughly even integer points from min(5, d) up to d."""
    lo = min(5, dimension)
    points = np.unique(np.rint(np.linspace(lo, dimension, 5)).astype(int))
    return tuple(int(p) for p in points)


def _single_run(
    spec: ExperimentSpec,
    base: Union[EncodedDataset, None],
    algorithm: Mechanism,
    epsilon: float,
    rep: int,
    rate: Union[float, None] = None,
    dims: Union[int, None] = None,
) -> RunOutcome:
    """One federated training run; returns test misclassification and timing."""
    source = spec.source
    if base is None:
        assert isinstance(source, SyntheticSource)
        data = synthesize(
            source.n, source.d, source.separation, seed=_derive_int(source.seed, _TAG_SYNTH, rep)
        )
    else:
        data = base
    if rate is not None:
        data = subsample(data, rate, seed=_derive_int(spec.root_seed, _TAG_SUBSAMPLE, rep))

    split = SplitSpec(
        party_fractions=spec.party_fractions,
        test_fraction=spec.test_fraction,
        shuffle_seed=_derive_int(spec.root_seed, _TAG_PARTITION, rep),
    )
    shares, test = partition(data, split)
    if base is not None:
        # CSV records are raw; fit min-max on the training union only so the
        # test set never leaks into the statistics. Synthetic data arrives
        # already inside the l1 ball.
        stats = fit_minmax(concatenate(shares))
        shares = [normalize(s, stats) for s in shares]
        test = normalize(test, stats)
    if dims is not None:
        shares = [project_dims(s, dims) for s in shares]
        test = project_dims(test, dims)

    if algorithm is Mechanism.NOISELESS:
        parties = [Party(0, concatenate(shares), Mechanism.NOISELESS)]
    else:
        parties = [
            Party(i, share, algorithm, param_sensitivity=spec.alg1_sensitivity)
            for i, share in enumerate(shares)
        ]
    n_train = sum(p.data.n_records for p in parties)
    config = FederationConfig(
        budget=PrivacyBudget(epsilon),
        eta=spec.eta,
        max_rounds=spec.max_rounds,
        gd=GdSettings(learning_rate=spec.lr_scale / n_train, epochs=spec.epochs),
        root_seed=_derive_int(spec.root_seed, _ALGO_TAG[algorithm], rep),
    )
    start = time.perf_counter()
    result = run_federation(parties, config)
    elapsed = time.perf_counter() - start
    return RunOutcome(
        misclassification=misclassification_rate(result.params, test),
        train_seconds=elapsed,
        rounds_used=result.rounds_used,
    )


def _aggregate(
    algorithm: Mechanism,
    axis: str,
    value: float,
    outcomes: Sequence[RunOutcome],
    record_seconds: bool,
) -> MetricsRow:
    miscls = np.array([o.misclassification for o in outcomes])
    rounds = np.array([o.rounds_used for o in outcomes], dtype=float)
    seconds = np.array([o.train_seconds for o in outcomes])
    return MetricsRow(
        algorithm=algorithm.value,
        sweep_axis=axis,
        sweep_value=float(value),
        mean_miscls=float(miscls.mean()),
        std_miscls=float(miscls.std()),
        mean_seconds=float(seconds.mean()) if record_seconds else 0.0,
        rounds_used=float(rounds.mean()),
    )


def _sorted_report(rows: List[MetricsRow]) -> MetricsReport:
    rows = sorted(rows, key=lambda r: (r.algorithm, r.sweep_value))
    return MetricsReport(rows=tuple(rows))


def sweep_epsilon(spec: ExperimentSpec) -> MetricsReport:
    """Misclassification per algorithm at every epsilon on the grid."""
    base = load_source(spec.source)
    rows = []
    for algorithm in spec.algorithms:
        for eps in spec.epsilon_grid:
            outcomes = [
                _single_run(spec, base, algorithm, eps, rep)
                for rep in range(spec.repetitions)
            ]
            rows.append(_aggregate(algorithm, "epsilon", eps, outcomes, False))
    return _sorted_report(rows)


def sweep_cardinality(spec: ExperimentSpec) -> MetricsReport:
    """Subsample at each rate before splitting; epsilon stays fixed."""
    base = load_source(spec.source)
    rows = []
    for algorithm in spec.algorithms:
        for rate in spec.cardinality_grid:
            outcomes = [
                _single_run(spec, base, algorithm, spec.fixed_epsilon, rep, rate=rate)
                for rep in range(spec.repetitions)
            ]
            rows.append(_aggregate(algorithm, "cardinality", rate, outcomes, False))
    return _sorted_report(rows)


def sweep_dimensionality(spec: ExperimentSpec) -> MetricsReport:
    """Project to the first k features per grid point; epsilon stays fixed."""
    base = load_source(spec.source)
    if spec.dimension_grid is not None:
        grid = spec.dimension_grid
    else:
        dimension = base.dimension if base is not None else spec.source.d
        grid = default_dimension_grid(dimension)
    rows = []
    for algorithm in spec.algorithms:
        for k in grid:
            outcomes = [
                _single_run(spec, base, algorithm, spec.fixed_epsilon, rep, dims=int(k))
                for rep in range(spec.repetitions)
            ]
            rows.append(_aggregate(algorithm, "dimensionality", float(k), outcomes, False))
    return _sorted_report(rows)


def time_training(spec: ExperimentSpec) -> MetricsReport:
    """Wall-clock training seconds per algorithm per epsilon.

    Only the federated training call is timed; ingestion and splitting are
    excluded. The seconds column of this report is measured, hence not
    reproducible byte for byte.
    """
    base = load_source(spec.source)
    rows = []
    for algorithm in spec.algorithms:
        for eps in spec.epsilon_grid:
            outcomes = [
                _single_run(spec, base, algorithm, eps, rep)
                for rep in range(spec.repetitions)
            ]
            rows.append(_aggregate(algorithm, "epsilon", eps, outcomes, True))
    return _sorted_report(rows)


def render_report_csv(report: MetricsReport) -> str:
    """Render rows (sorted by algorithm, then sweep value) with 6-decimal reals."""
    rows = sorted(report.rows, key=lambda r: (r.algorithm, r.sweep_value))
    lines = [REPORT_HEADER]
    for r in rows:
        lines.append(
            f"{r.algorithm},{r.sweep_axis},{r.sweep_value:.6f},{r.mean_miscls:.6f},"
            f"{r.std_miscls:.6f},{r.mean_seconds:.6f},{r.rounds_used:.6f}"
        )
    return "\n".join(lines) + "\n"


def emit_report(report: MetricsReport, out_path: str) -> None:
    """Write the report as UTF-8 CSV; re-emitting a report is byte-identical."""
    if not report.rows:
        raise ValueError("refusing to emit an empty report")
    try:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_report_csv(report))
    except OSError as exc:
        raise DataError(f"cannot write report to {out_path}: {exc}") from exc


def parse_report_csv(text: str) -> MetricsReport:
    """Parse the CSV produced by render_report_csv back into a report."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != REPORT_HEADER:
        raise DataError("not a metrics report: bad header")
    rows = []
    for ln in lines[1:]:
        algo, axis, *numbers = ln.split(",")
        value, mean_m, std_m, secs, rounds = (float(x) for x in numbers)
        rows.append(MetricsRow(algo, axis, value, mean_m, std_m, secs, rounds))
    return MetricsReport(rows=tuple(rows))
