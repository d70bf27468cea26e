"""CSV ingestion, encoding, normalization, partitioning, and synthetic data."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from .dataset import EncodedDataset
from .errors import DataError

KIND_NUMERIC = "numeric"
KIND_CATEGORICAL = "categorical"
KIND_TARGET = "target"


@dataclass(frozen=True)
class RawTable:
    """Rectangular table of string cells."""

    header: Tuple[str, ...]
    rows: Tuple[Tuple[str, ...], ...]
    delimiter: str

    @property
    def n_rows(self) -> int:
        return len(self.rows)


def load_csv(path: str, delimiter: str = ",", has_header: bool = True) -> RawTable:
    """Read a CSV file into a RawTable, honoring RFC-4180 quoting.

    Ragged rows, a missing file, and an empty table each raise their own
    DataError.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            raw = [tuple(row) for row in csv.reader(fh, delimiter=delimiter)]
    except FileNotFoundError:
        raise DataError(f"no such data file: {path}") from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    raw = [row for row in raw if row]
    if has_header:
        if not raw:
            raise DataError(f"empty table: {path} has no header row")
        header, rows = raw[0], raw[1:]
    else:
        if not raw:
            raise DataError(f"empty table: {path} has no rows")
        header = tuple(f"c{i}" for i in range(len(raw[0])))
        rows = raw
    if not rows:
        raise DataError(f"empty table: {path} has no data rows")
    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"ragged row {i + 1} in {path}: expected {width} fields, got {len(row)}"
            )
    return RawTable(header=header, rows=tuple(rows), delimiter=delimiter)


@dataclass(frozen=True)
class ColumnSchema:
    """Per-column kinds plus the target's positive-class string."""

    kinds: Dict[str, str]
    positive_label: str

    def __post_init__(self):
        targets = [c for c, k in self.kinds.items() if k == KIND_TARGET]
        if len(targets) != 1:
            raise DataError(
                f"schema must declare exactly one target column, found {len(targets)}"
            )
        for column, kind in self.kinds.items():
            if kind not in (KIND_NUMERIC, KIND_CATEGORICAL, KIND_TARGET):
                raise DataError(f"unknown column kind {kind!r} for {column!r}")

    @property
    def target_column(self) -> str:
        return next(c for c, k in self.kinds.items() if k == KIND_TARGET)


def parse_schema_text(text: str) -> ColumnSchema:
    """Parse ``column = numeric|categorical|target:<positive>`` lines."""
    kinds: Dict[str, str] = {}
    positive = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"schema line {lineno}: expected 'column = kind'")
        column, _, kind = (part.strip() for part in line.partition("="))
        if not column:
            raise DataError(f"schema line {lineno}: missing column name")
        if column in kinds:
            raise DataError(f"schema line {lineno}: duplicate column {column!r}")
        if kind.startswith(KIND_TARGET + ":"):
            positive = kind.split(":", 1)[1]
            kind = KIND_TARGET
        elif kind == KIND_TARGET:
            raise DataError(
                f"schema line {lineno}: target needs a positive class, "
                "write 'target:<positive-class>'"
            )
        kinds[column] = kind
    if not kinds:
        raise DataError("schema is empty")
    if positive is None:
        raise DataError("schema declares no target column")
    return ColumnSchema(kinds=kinds, positive_label=positive)


def load_schema(path: str) -> ColumnSchema:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_schema_text(fh.read())
    except FileNotFoundError:
        raise DataError(f"no such schema file: {path}") from None


def label_encode(table: RawTable, schema: ColumnSchema) -> EncodedDataset:
    """Map a string table to numbers; the result is not yet normalized.

    Categorical columns map their lexicographically sorted distinct values to
    0, 1, 2, ...; numeric cells are parsed as reals; the target maps the
    positive-class string to 1 and everything else to 0.
    """
    missing = [c for c in table.header if c not in schema.kinds]
    if missing:
        raise DataError(f"schema does not cover columns: {', '.join(missing)}")
    unknown = [c for c in schema.kinds if c not in table.header]
    if unknown:
        raise DataError(f"schema names absent columns: {', '.join(unknown)}")

    target = schema.target_column
    columns: List[np.ndarray] = []
    for idx, name in enumerate(table.header):
        cells = [row[idx] for row in table.rows]
        kind = schema.kinds[name]
        if kind == KIND_TARGET:
            continue
        if kind == KIND_NUMERIC:
            values = np.empty(len(cells))
            for i, cell in enumerate(cells):
                try:
                    values[i] = float(cell)
                except ValueError:
                    raise DataError(
                        f"column {name!r}: cannot parse {cell!r} as a number (row {i + 1})"
                    ) from None
        else:
            mapping = {v: j for j, v in enumerate(sorted(set(cells)))}
            values = np.array([mapping[c] for c in cells], dtype=float)
        columns.append(values)

    target_idx = table.header.index(target)
    target_cells = [row[target_idx] for row in table.rows]
    labels = np.array([1 if c == schema.positive_label else 0 for c in target_cells])
    if labels.sum() == 0:
        raise DataError(
            f"column {target!r}: positive class {schema.positive_label!r} never occurs"
        )
    if not columns:
        raise DataError("schema leaves no feature columns")
    return EncodedDataset(np.column_stack(columns), labels)


@dataclass(frozen=True)
class MinMaxStats:
    """Column minima/maxima fitted on training data."""

    col_min: np.ndarray
    col_max: np.ndarray


def fit_minmax(data: EncodedDataset) -> MinMaxStats:
    return MinMaxStats(data.features.min(axis=0), data.features.max(axis=0))


def shrink_to_l1_ball(features: np.ndarray) -> np.ndarray:
    """Divide every row by max(1, its l1 norm) so all rows land in the l1 ball."""
    norms = np.abs(features).sum(axis=1)
    return features / np.maximum(1.0, norms)[:, None]


def normalize(data: EncodedDataset, stats: Union[MinMaxStats, None] = None) -> EncodedDataset:
    """Min-max scale columns to [0, 1], then shrink rows into the l1 ball.

    Without ``stats`` the column extremes are fitted on ``data`` itself; with
    ``stats`` (fitted on training data) they are applied unchanged, and
    out-of-range values are clipped to [0, 1]. A constant column maps to 0.
    """
    if stats is None:
        stats = fit_minmax(data)
    span = stats.col_max - stats.col_min
    safe_span = np.where(span > 0, span, 1.0)
    scaled = (data.features - stats.col_min) / safe_span
    scaled = np.where(span > 0, scaled, 0.0)
    scaled = np.clip(scaled, 0.0, 1.0)
    return EncodedDataset(shrink_to_l1_ball(scaled), data.labels)


@dataclass(frozen=True)
class SplitSpec:
    """Party fractions plus a test fraction and the shuffle seed."""

    party_fractions: Tuple[float, ...]
    test_fraction: float
    shuffle_seed: int = 0

    def __post_init__(self):
        if not self.party_fractions or any(f <= 0 for f in self.party_fractions):
            raise ValueError("party fractions must be positive")
        if self.test_fraction <= 0:
            raise ValueError("test fraction must be positive")
        if sum(self.party_fractions) + self.test_fraction > 1.0 + 1e-9:
            raise ValueError("fractions must sum to at most 1")


def split_counts(n: int, fractions: Sequence[float]) -> List[int]:
    """floor(f * n) per party; whatever remains goes to the test set."""
    return [int(np.floor(f * n)) for f in fractions]


def partition(
    data: EncodedDataset, spec: SplitSpec
) -> Tuple[List[EncodedDataset], EncodedDataset]:
    """Shuffle once, then carve contiguous blocks per party; remainder is test."""
    rng = np.random.default_rng(spec.shuffle_seed)
    order = rng.permutation(data.n_records)
    counts = split_counts(data.n_records, spec.party_fractions)
    if any(c == 0 for c in counts):
        raise DataError(
            f"party would receive 0 records splitting {data.n_records} "
            f"by {spec.party_fractions}"
        )
    parties = []
    offset = 0
    for count in counts:
        parties.append(data.subset(order[offset : offset + count]))
        offset += count
    if offset == data.n_records:
        raise DataError("no records left for the test set")
    return parties, data.subset(order[offset:])


def subsample(data: EncodedDataset, rate: float, seed: int) -> EncodedDataset:
    """Uniform random subset of floor(rate * n) records, kept in original order.

    Keeping original order makes rate = 1.0 the exact identity.
    """
    if not 0 < rate <= 1:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    k = int(np.floor(rate * data.n_records))
    if k == 0:
        raise ValueError(f"rate {rate} selects 0 of {data.n_records} records")
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(data.n_records, size=k, replace=False))
    return data.subset(chosen)


def project_dims(data: EncodedDataset, k: int) -> EncodedDataset:
    """Keep the first k feature columns and re-shrink rows into the l1 ball."""
    if not 1 <= k <= data.dimension:
        raise ValueError(f"k must be in [1, {data.dimension}], got {k}")
    if k == data.dimension:
        return data
    return EncodedDataset(shrink_to_l1_ball(data.features[:, :k]), data.labels)


def synthesize(n: int, d: int, separation: float, seed: int = 0) -> EncodedDataset:
    """Two balanced Gaussian clusters at +/- (separation/sqrt(d)) * ones.

    Rows are shrunk into the l1 ball directly; min-max scaling is skipped
    because mapping both clusters onto the non-negative orthant and then onto
    the l1 sphere collapses them onto the same simplex point, destroying the
    separation the parameter promises.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = np.random.default_rng(seed)
    half = n // 2
    center = (separation / np.sqrt(d)) * np.ones(d)
    positives = rng.normal(center, 1.0, size=(half, d))
    negatives = rng.normal(-center, 1.0, size=(n - half, d))
    features = np.vstack([positives, negatives])
    labels = np.concatenate([np.ones(half, dtype=int), np.zeros(n - half, dtype=int)])
    order = rng.permutation(n)
    return EncodedDataset(shrink_to_l1_ball(features[order]), labels[order])


def concatenate(datasets: Sequence[EncodedDataset]) -> EncodedDataset:
    """Stack datasets (same dimension) into one."""
    if not datasets:
        raise ValueError("nothing to concatenate")
    return EncodedDataset(
        np.vstack([ds.features for ds in datasets]),
        np.concatenate([ds.labels for ds in datasets]),
    )
