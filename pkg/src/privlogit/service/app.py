"""FastAPI service exposing the sweep harness over HTTP."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import DataError, NumericalError
from ..experiments import (
    render_report_csv,
    sweep_cardinality,
    sweep_dimensionality,
    sweep_epsilon,
    time_training,
)
from .schemas import ErrorBody, HealthResponse, ReportResponse, SweepRequest

_SWEEPS = {
    "epsilon": sweep_epsilon,
    "cardinality": sweep_cardinality,
    "dimensionality": sweep_dimensionality,
    "timing": time_training,
}

# the timing endpoint sweeps the epsilon grid too
_AXIS_FOR_SPEC = {"timing": "epsilon"}


def create_app() -> FastAPI:
    app = FastAPI(title="privlogit", version=__version__)

    @app.exception_handler(DataError)
    async def _data_error(_: Request, exc: DataError):
        body = ErrorBody(kind="data_error", detail=str(exc))
        return JSONResponse(status_code=400, content=body.model_dump())

    @app.exception_handler(NumericalError)
    async def _numerical_error(_: Request, exc: NumericalError):
        body = ErrorBody(kind="numerical_error", detail=str(exc))
        return JSONResponse(status_code=400, content=body.model_dump())

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, exc: ValueError):
        body = ErrorBody(kind="usage_error", detail=str(exc))
        return JSONResponse(status_code=400, content=body.model_dump())

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    def _register(axis: str):
        run = _SWEEPS[axis]

        @app.post(f"/sweeps/{axis}", response_model=ReportResponse, name=f"sweep_{axis}")
        def endpoint(request: SweepRequest) -> ReportResponse:
            spec = request.to_spec(_AXIS_FOR_SPEC.get(axis, axis))
            report = run(spec)
            return ReportResponse.from_report(report, render_report_csv(report))

    for axis in _SWEEPS:
        _register(axis)
    return app


app = create_app()
