"""Acceptance suite: one test per release criterion, each printing a
PASS line with its wall time. Criterion 9 needs the two UCI datasets and is
skipped unless their paths are provided via environment variables."""

import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from privlogit import (
    EncodedDataset,
    ExperimentSpec,
    FederationConfig,
    GdSettings,
    LaplaceSampler,
    LogisticObjective,
    Mechanism,
    ModelParams,
    Party,
    PrivacyBudget,
    SplitSpec,
    SyntheticSource,
    build_quadratic_objective,
    label_encode,
    load_csv,
    load_schema,
    local_train_round,
    minimize,
    misclassification_rate,
    objective_gradient,
    objective_value,
    run_federation,
    sigmoid,
    sweep_cardinality,
    sweep_dimensionality,
    sweep_epsilon,
    synthesize,
    taylor_coefficients,
    weighted_average,
)
from privlogit.cli import EXIT_OK, main
from conftest import StubUniform, random_dataset

REPO_ROOT = Path(__file__).resolve().parent.parent


class criterion:
    """Times a criterion block, enforces its runtime limit, prints PASS."""

    def __init__(self, ident, label, limit_seconds=None):
        self.ident = ident
        self.label = label
        self.limit = limit_seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is not None:
            print(f"[{self.ident}] {self.label}: FAIL ({elapsed:.2f}s)")
            return False
        if self.limit is not None:
            assert elapsed < self.limit, (
                f"{self.ident} exceeded its runtime limit: {elapsed:.2f}s >= {self.limit}s"
            )
        print(f"[{self.ident}] {self.label}: PASS ({elapsed:.2f}s)")
        return False


def test_a01_gradient_matches_finite_differences():
    with criterion("A01", "gradient vs central finite differences", 5.0):
        rng = np.random.default_rng(101)
        step = 1e-6
        for _ in range(100):
            data = random_dataset(rng)  # d <= 10, n <= 50
            params = ModelParams(rng.normal(size=data.dimension), float(rng.normal()))
            grad_w, grad_b = objective_gradient(params, data)
            analytic = np.concatenate([grad_w, [grad_b]])
            base = params.to_vector()
            numeric = np.empty_like(analytic)
            for j in range(base.size):
                hi, lo = base.copy(), base.copy()
                hi[j] += step
                lo[j] -= step
                numeric[j] = (
                    objective_value(ModelParams.from_vector(hi), data)
                    - objective_value(ModelParams.from_vector(lo), data)
                ) / (2 * step)
            rel = np.linalg.norm(numeric - analytic) / max(
                np.linalg.norm(analytic), 1e-12
            )
            assert rel < 1e-5


def test_a02_laplace_sampler_fidelity():
    with criterion("A02", "Laplace sampler moments and CDF", 10.0):
        for scale in (0.5, 5.0, 76.5):
            draws = LaplaceSampler(scale, seed=202).sample_vector(1_000_000)
            assert abs(draws.mean()) < 0.01 * scale
            assert abs(draws.var() - 2 * scale**2) < 0.05 * 2 * scale**2
            ordered = np.sort(draws)
            n = ordered.size
            analytic = np.where(
                ordered < 0,
                0.5 * np.exp(ordered / scale),
                1.0 - 0.5 * np.exp(-ordered / scale),
            )
            grid = np.arange(1, n + 1) / n
            deviation = max(
                np.abs(grid - analytic).max(),
                np.abs(grid - 1.0 / n - analytic).max(),
            )
            assert deviation < 0.005


def test_a03_per_record_sensitivity_bound():
    with criterion("A03", "per-record gradient difference l1 <= 4", 5.0):
        rng = np.random.default_rng(303)
        trials, d = 10_000, 6
        def normalized(m):
            m = rng.normal(size=(trials, d))
            return m / np.maximum(1.0, np.abs(m).sum(axis=1))[:, None]
        x, x2 = normalized(None), normalized(None)
        y = rng.integers(0, 2, size=trials)
        y2 = rng.integers(0, 2, size=trials)
        w = rng.normal(scale=2.0, size=(trials, d))
        bias = rng.normal(size=trials)
        g1 = (sigmoid((x * w).sum(axis=1) + bias) - y)[:, None] * x
        g2 = (sigmoid((x2 * w).sum(axis=1) + bias) - y2)[:, None] * x2
        worst = np.abs(g1 - g2).sum(axis=1).max()
        assert worst <= 4.0


def test_a04_taylor_truncation_quality():
    with criterion("A04", "degree-2 truncation error below 0.005 on |t|<=1", 1.0):
        t = np.linspace(-1.0, 1.0, 10_000)
        ln2, half, quarter = taylor_coefficients()
        approx = ln2 + half * t + (quarter / 2.0) * t**2
        assert np.abs(np.logaddexp(0.0, t) - approx).max() < 0.005


def test_a05_noiseless_equivalence():
    with criterion("A05", "zero-noise and replicated-party equivalence"):
        rng = np.random.default_rng(505)
        data = random_dataset(rng, n=40, d=5)
        gd = GdSettings(learning_rate=0.02, epochs=30)
        budget = PrivacyBudget(0.8)
        # one-party objective perturbation with zero noise == direct minimize
        party = Party(0, data, Mechanism.OFPA, sampler=LaplaceSampler(1.0, rng=StubUniform()))
        via_ofpa = local_train_round(party, ModelParams.zeros(5), budget, gd)
        direct = minimize(LogisticObjective(data), ModelParams.zeros(5), gd)
        np.testing.assert_array_equal(via_ofpa.weights, direct.weights)
        assert via_ofpa.bias == direct.bias
        # three parties holding copies of one dataset == the single party
        config = FederationConfig(budget, max_rounds=3, gd=gd)
        triple = run_federation(
            [Party(i, data, Mechanism.NOISELESS) for i in range(3)], config
        )
        single = run_federation([Party(0, data, Mechanism.NOISELESS)], config)
        np.testing.assert_array_equal(triple.params.weights, single.params.weights)
        assert triple.params.bias == single.params.bias


def test_a06_quadratic_surrogate_fidelity():
    with criterion("A06", "zero-noise quadratic within 2pp of exact objective"):
        gaps = []
        for seed in range(10):
            data = synthesize(2000, 10, 5.0, seed=seed)
            lr = 2.0 / data.n_records
            exact = minimize(
                LogisticObjective(data),
                ModelParams.zeros(10),
                GdSettings(learning_rate=lr, epochs=40),
            )
            quad = minimize(
                build_quadratic_objective(data),
                ModelParams.zeros(10),
                GdSettings(learning_rate=lr, epochs=40, clip_radius=10.0),
            )
            gaps.append(
                abs(
                    misclassification_rate(quad, data)
                    - misclassification_rate(exact, data)
                )
            )
        assert max(gaps) <= 0.02


TREND_SOURCE = SyntheticSource(n=4000, d=6, separation=3.0, seed=7)


def _trend_spec(**overrides):
    defaults = dict(
        source=TREND_SOURCE,
        algorithms=(Mechanism.OFPA, Mechanism.OFAA),
        repetitions=20,
        epochs=40,
        max_rounds=50,
        root_seed=1,
    )
    defaults.update(overrides)
    return ExperimentSpec(**defaults)


def _endpoint_means(report, algorithm):
    rows = sorted(
        (r for r in report.rows if r.algorithm == algorithm),
        key=lambda r: r.sweep_value,
    )
    return rows[0].mean_miscls, rows[-1].mean_miscls


def test_a07_epsilon_trend():
    with criterion("A07a", "misclassification non-increasing in epsilon", 120.0):
        report = sweep_epsilon(_trend_spec(epsilon_grid=(0.1, 3.2)))
        for algorithm in ("OFPA", "OFAA"):
            at_small, at_large = _endpoint_means(report, algorithm)
            assert at_large <= at_small, (algorithm, at_small, at_large)


def test_a07_cardinality_trend():
    with criterion("A07b", "misclassification non-increasing in cardinality", 120.0):
        report = sweep_cardinality(_trend_spec(cardinality_grid=(0.2, 1.0)))
        for algorithm in ("OFPA", "OFAA"):
            at_small, at_large = _endpoint_means(report, algorithm)
            assert at_large <= at_small, (algorithm, at_small, at_large)


def test_a07_dimensionality_trend():
    with criterion("A07c", "misclassification non-increasing in dimension", 120.0):
        report = sweep_dimensionality(_trend_spec(dimension_grid=(1, 6)))
        for algorithm in ("OFPA", "OFAA"):
            at_small, at_large = _endpoint_means(report, algorithm)
            assert at_large <= at_small, (algorithm, at_small, at_large)


def test_a08_cli_determinism(tmp_path):
    with criterion("A08", "repeated CLI invocation is byte-identical"):
        args = [
            "--synthetic",
            "n=200,d=4,separation=3,seed=3",
            "--grid",
            "0.4,1.6",
            "--repetitions",
            "2",
            "--epochs",
            "5",
            "--max-rounds",
            "3",
            "--seed",
            "17",
        ]
        outputs = []
        for name in ("one.csv", "two.csv"):
            out = tmp_path / name
            assert main(["sweep-epsilon", *args, "--out", str(out)]) == EXIT_OK
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        outputs = []
        for name in ("c1.csv", "c2.csv"):
            out = tmp_path / name
            assert (
                main(["sweep-cardinality", *args, "--grid", "0.5,1.0", "--out", str(out)])
                == EXIT_OK
            )
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]


_BANK_CSV = os.environ.get("PRIVLOGIT_BANK_CSV")
_CREDIT_CSV = os.environ.get("PRIVLOGIT_CREDIT_CSV")


@pytest.mark.skipif(
    not (_BANK_CSV and _CREDIT_CSV),
    reason="set PRIVLOGIT_BANK_CSV and PRIVLOGIT_CREDIT_CSV to run the real-data check",
)
def test_a09_real_data_accuracy_gap():
    with criterion("A09", "UCI private models within 5pp of noiseless", 900.0):
        from privlogit import CsvSource

        cases = [
            (_BANK_CSV, REPO_ROOT / "schemas" / "bank_marketing.schema", ";", 45211),
            (_CREDIT_CSV, REPO_ROOT / "schemas" / "credit_card.schema", ",", 30000),
        ]
        for csv_path, schema_path, delimiter, expected_rows in cases:
            table = load_csv(csv_path, delimiter=delimiter)
            assert table.n_rows == expected_rows
            label_encode(table, load_schema(str(schema_path)))
            spec = ExperimentSpec(
                source=CsvSource(csv_path, str(schema_path), delimiter),
                algorithms=(Mechanism.NOISELESS, Mechanism.OFPA, Mechanism.OFAA),
                epsilon_grid=(0.8,),
                repetitions=10,
                epochs=40,
                root_seed=3,
            )
            rows = {r.algorithm: r for r in sweep_epsilon(spec).rows}
            baseline = rows["NOISELESS"].mean_miscls
            assert abs(rows["OFPA"].mean_miscls - baseline) <= 0.05
            assert abs(rows["OFAA"].mean_miscls - baseline) <= 0.05


def test_a10_weighted_average_algebra():
    with criterion("A10", "weighted averaging exactness on 1000 instances", 1.0):
        rng = np.random.default_rng(909)
        for _ in range(1000):
            k = int(rng.integers(1, 6))
            d = int(rng.integers(1, 8))
            uploads = [
                (
                    ModelParams(rng.normal(size=d), float(rng.normal())),
                    int(rng.integers(1, 1000)),
                )
                for _ in range(k)
            ]
            copies = [(uploads[0][0], size) for _, size in uploads]
            out = weighted_average(copies)
            np.testing.assert_array_equal(out.weights, copies[0][0].weights)
            assert out.bias == copies[0][0].bias
            perm = [uploads[i] for i in rng.permutation(k)]
            a, b = weighted_average(uploads), weighted_average(perm)
            np.testing.assert_array_equal(a.weights, b.weights)
            assert a.bias == b.bias
            factor = int(rng.integers(2, 10))
            c = weighted_average([(p, s * factor) for p, s in uploads])
            np.testing.assert_array_equal(a.weights, c.weights)
            assert a.bias == c.bias
