import numpy as np
import pytest

from privlogit import EncodedDataset


class StubUniform:
    """Uniform source for samplers: preset values, else the median 0.5.

    A constant 0.5 makes every Laplace draw exactly zero.
    """

    def __init__(self, values=None):
        self.values = list(values) if values is not None else []

    def _next(self):
        return self.values.pop(0) if self.values else 0.5

    def random(self, size=None):
        if size is None:
            return self._next()
        return np.array([self._next() for _ in range(size)])


class StubSampler:
    """Sampler stand-in yielding preset noise values regardless of scale."""

    def __init__(self, values=None):
        self.values = list(values) if values is not None else []

    def _next(self):
        return self.values.pop(0) if self.values else 0.0

    def sample(self, scale=None):
        return self._next()

    def sample_vector(self, n, scale=None):
        return np.array([self._next() for _ in range(n)])


@pytest.fixture
def tiny_dataset():
    return EncodedDataset(
        features=np.array([[0.5, 0.2], [0.1, 0.3], [0.4, 0.4], [0.2, 0.1]]),
        labels=np.array([1, 0, 1, 0]),
    )


def random_dataset(rng, n=None, d=None, normalized=True):
    n = n or int(rng.integers(2, 50))
    d = d or int(rng.integers(1, 10))
    features = rng.normal(size=(n, d))
    if normalized:
        norms = np.abs(features).sum(axis=1)
        features = features / np.maximum(1.0, norms)[:, None]
    labels = rng.integers(0, 2, size=n)
    return EncodedDataset(features, labels)
