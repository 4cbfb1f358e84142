"""FastAPI service exposing the noise-conversion datasets over HTTP.

Run with:  uvicorn cavnoise.service:app
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from . import __version__, datasets
from .errors import CavNoiseError, NumericalFailureError, ParameterError
from .schemas import (
    BifurcationRequest,
    CriticalRequest,
    DatasetOut,
    OracleRequest,
    ReflectanceRequest,
    RotationRequest,
    SweepRequest,
    resolve_cavity,
)


def _dataset_out(dataset: datasets.Dataset) -> DatasetOut:
    return DatasetOut(
        command=dataset.command,
        columns=dataset.columns,
        rows=dataset.rows,
        metadata=dataset.metadata,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="cavnoise", version=__version__)

    @app.exception_handler(ParameterError)
    async def _parameter_error(request, exc):
        return JSONResponse(
            status_code=400,
            content={"detail": {"kind": "invalid-parameters", "message": str(exc)}},
        )

    @app.exception_handler(NumericalFailureError)
    async def _numerical_error(request, exc):
        return JSONResponse(
            status_code=500,
            content={"detail": {"kind": "numerical-failure", "message": str(exc)}},
        )

    @app.exception_handler(CavNoiseError)
    async def _other_error(request, exc):
        return JSONResponse(
            status_code=500,
            content={"detail": {"kind": "numerical-failure", "message": str(exc)}},
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/reflectance", response_model=DatasetOut)
    def reflectance(req: ReflectanceRequest):
        r1, t2, model = resolve_cavity(req.cavity)
        grid = req.grid
        return _dataset_out(
            datasets.build_reflectance(
                r1,
                t2,
                model,
                delta_min=grid.delta_min if grid else None,
                delta_max=grid.delta_max if grid else None,
                points=grid.points if grid else 2001,
            )
        )

    @app.post("/v1/sweep", response_model=DatasetOut)
    def sweep(req: SweepRequest):
        r1, t2, model = resolve_cavity(req.cavity)
        return _dataset_out(
            datasets.build_sweep(
                r1,
                t2,
                model,
                sp=req.state.sp,
                sq=req.state.sq,
                nu=req.nu,
                delta_min=req.grid.delta_min,
                delta_max=req.grid.delta_max,
                points=req.grid.points,
            )
        )

    @app.post("/v1/rotation", response_model=DatasetOut)
    def rotation(req: RotationRequest):
        r1, t2, model = resolve_cavity(req.cavity)
        return _dataset_out(
            datasets.build_rotation(
                r1,
                t2,
                model,
                nu=req.nu,
                delta_min=req.grid.delta_min,
                delta_max=req.grid.delta_max,
                points=req.grid.points,
            )
        )

    @app.post("/v1/critical", response_model=DatasetOut)
    def critical(req: CriticalRequest):
        r1, t2, model = resolve_cavity(req.cavity)
        return _dataset_out(
            datasets.build_critical(
                r1, t2, model, sp=req.state.sp, sq=req.state.sq, nu=req.nu, tol=req.tol
            )
        )

    @app.post("/v1/bifurcation", response_model=DatasetOut)
    def bifurcation(req: BifurcationRequest):
        r1, t2, model = resolve_cavity(req.cavity)
        return _dataset_out(
            datasets.build_bifurcation(
                r1,
                t2,
                model,
                sp=req.state.sp,
                sq=req.state.sq,
                nu_min=req.nu_min,
                nu_max=req.nu_max,
                steps=req.steps,
                tol=req.tol,
            )
        )

    @app.post("/v1/oracle", response_model=DatasetOut)
    def oracle(req: OracleRequest):
        r1, t2, model = resolve_cavity(req.cavity)
        return _dataset_out(
            datasets.build_oracle(
                r1,
                t2,
                model,
                sp=req.state.sp,
                sq=req.state.sq,
                nu=req.nu,
                deltas=req.deltas,
                delta_min=req.grid.delta_min,
                delta_max=req.grid.delta_max,
                points=req.grid.points,
                seed=req.seed,
                samples=req.samples,
                partitions=req.partitions,
            )
        )

    return app


app = create_app()
