"""Request/response models for the sweep service."""

from __future__ import annotations

from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field

from ..experiments import (
    CsvSource,
    DEFAULT_CARDINALITY_GRID,
    DEFAULT_EPSILON_GRID,
    ExperimentSpec,
    MetricsReport,
    SyntheticSource,
)
from ..federation import Mechanism


class SyntheticSourceModel(BaseModel):
    kind: Literal["synthetic"] = "synthetic"
    n: int = Field(default=2000, ge=2)
    d: int = Field(default=10, ge=1)
    separation: float = 3.0
    seed: int = Field(default=0, ge=0)

    def to_source(self) -> SyntheticSource:
        return SyntheticSource(n=self.n, d=self.d, separation=self.separation, seed=self.seed)


class CsvSourceModel(BaseModel):
    kind: Literal["csv"] = "csv"
    data_path: str
    schema_path: str
    delimiter: str = ","

    def to_source(self) -> CsvSource:
        return CsvSource(
            data_path=self.data_path,
            schema_path=self.schema_path,
            delimiter=self.delimiter,
        )


SourceModel = Union[SyntheticSourceModel, CsvSourceModel]


class SweepRequest(BaseModel):
    """One sweep: the grid applies to whichever axis the endpoint scans."""

    source: SourceModel = Field(discriminator="kind")
    algorithms: List[str] = ["NOISELESS", "OFPA", "OFAA"]
    grid: Optional[List[float]] = None
    epsilon: float = Field(default=0.8, gt=0)
    repetitions: int = Field(default=10, ge=1)
    epochs: int = Field(default=40, ge=1)
    eta: float = Field(default=1e-3, gt=0)
    max_rounds: int = Field(default=50, ge=1)
    party_fractions: List[float] = [0.4, 0.3, 0.1]
    test_fraction: float = Field(default=0.2, gt=0)
    seed: int = Field(default=0, ge=0)
    alg1_sensitivity: float = Field(default=4.0, gt=0)
    lr_scale: float = Field(default=2.0, gt=0)

    def to_spec(self, axis: str) -> ExperimentSpec:
        try:
            algorithms = tuple(Mechanism(a.upper()) for a in self.algorithms)
        except ValueError as exc:
            raise ValueError(f"unknown algorithm: {exc}") from None
        kwargs = dict(
            source=self.source.to_source(),
            algorithms=algorithms,
            fixed_epsilon=self.epsilon,
            repetitions=self.repetitions,
            epochs=self.epochs,
            eta=self.eta,
            max_rounds=self.max_rounds,
            party_fractions=tuple(self.party_fractions),
            test_fraction=self.test_fraction,
            root_seed=self.seed,
            alg1_sensitivity=self.alg1_sensitivity,
            lr_scale=self.lr_scale,
        )
        if axis == "epsilon":
            kwargs["epsilon_grid"] = tuple(self.grid) if self.grid else DEFAULT_EPSILON_GRID
        elif axis == "cardinality":
            kwargs["cardinality_grid"] = (
                tuple(self.grid) if self.grid else DEFAULT_CARDINALITY_GRID
            )
        elif axis == "dimensionality":
            if self.grid:
                if any(v != int(v) or v < 1 for v in self.grid):
                    raise ValueError("dimensionality grid must hold positive integers")
                kwargs["dimension_grid"] = tuple(int(v) for v in self.grid)
        return ExperimentSpec(**kwargs)


class MetricsRowModel(BaseModel):
    algorithm: str
    sweep_axis: str
    sweep_value: float
    mean_miscls: float
    std_miscls: float
    mean_seconds: float
    rounds_used: float


class ReportResponse(BaseModel):
    """Structured rows plus the rendered CSV so clients can write it verbatim."""

    rows: List[MetricsRowModel]
    csv: str

    @classmethod
    def from_report(cls, report: MetricsReport, csv_text: str) -> "ReportResponse":
        return cls(
            rows=[MetricsRowModel(**row.__dict__) for row in report.rows],
            csv=csv_text,
        )


class ErrorBody(BaseModel):
    kind: Literal["usage_error", "data_error", "numerical_error"]
    detail: str


class HealthResponse(BaseModel):
    status: str
    version: str
