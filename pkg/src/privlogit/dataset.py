"""Containers for encoded training data."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class Record(NamedTuple):
    features: np.ndarray
    label: int


@dataclass(frozen=True)
class EncodedDataset:
    """A numeric feature matrix with binary labels.

    ``features`` has shape (n, d), ``labels`` shape (n,) with values in {0, 1}.
    Arrays are copied and frozen at construction; instances are safe to share
    across threads.
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = np.array(self.features, dtype=float)
        labels = np.array(self.labels, dtype=np.int64)
        if features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {features.shape}")
        if labels.ndim != 1 or labels.shape[0] != features.shape[0]:
            raise ValueError("labels must be 1-D with one entry per record")
        if features.shape[0] == 0:
            raise ValueError("dataset must contain at least one record")
        if features.shape[1] == 0:
            raise ValueError("dataset must have at least one feature")
        if not np.all(np.isfinite(features)):
            raise ValueError("features must be finite")
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        features.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def n_records(self) -> int:
        return self.features.shape[0]

    @property
    def dimension(self) -> int:
        return self.features.shape[1]

    def record(self, i: int) -> Record:
        return Record(self.features[i], int(self.labels[i]))

    def max_l1(self) -> float:
        """Largest row-wise l1 norm of the feature matrix."""
        return float(np.abs(self.features).sum(axis=1).max())

    def is_normalized(self, tol: float = 1e-9) -> bool:
        return self.max_l1() <= 1.0 + tol

    def subset(self, indices: np.ndarray) -> "EncodedDataset":
        return EncodedDataset(self.features[indices], self.labels[indices])
