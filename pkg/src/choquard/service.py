"""FastAPI compute service wrapping the solver library.

Stateless: every request carries its full run configuration, so concurrent
clients and repeated calls are independent.  The CLI talks to this app either
over the wire or in-process through an ASGI transport.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field as PydanticField

from . import __version__
from .config import RunConfig
from .errors import (ChoquardError, ConfigError, DomainError, NoRootsError,
                     NonConvergenceError)
from .runs import run_extremal, run_fibering, run_solve, run_sweep
from .verify import run_verify


class ExtremalRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: RunConfig


class SolveRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: RunConfig
    lam: float
    relative_to_lambda_n: bool = False
    branch: str = "plus"


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: RunConfig
    lambda_min: float
    lambda_max: float
    steps: int
    relative_to_lambda_n: bool = False


class FiberingRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: RunConfig
    profile: str = "gaussian"
    t_min: float = 0.0
    t_max: float = 10.0
    samples: int = 400


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: RunConfig
    suite: str = "fast"


class ExtremalResponse(BaseModel):
    lambda_n: float
    lambda_e: float
    ratio: float
    iterations: int
    el_residual_sup: float
    grid: dict
    params: dict
    minimizer_values: list[float]
    config: dict


class SolveResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    lam: float = PydanticField(alias="lambda")
    branch: str
    energy: float
    A: float
    B: float
    G: float
    second_form: float
    residual_sup: float
    iterations: int
    values: list[float]
    config: dict
    lambda_n: float | None = None


class TableResponse(BaseModel):
    columns: list[str]
    rows: list[list[float]]
    config_hash: str
    config: dict
    any_failed: bool | None = None
    lambda_n: float | None = None
    markers: dict[str, float] | None = None
    clipped: bool | None = None


class VerifyResponse(BaseModel):
    suite: str
    passed: bool
    checks: list[dict]
    config: dict


app = FastAPI(title="choquard solver service", version=__version__)


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ConfigError, DomainError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    except (NonConvergenceError, NoRootsError) as exc:
        raise HTTPException(status_code=409, detail=str(exc))
    except ChoquardError as exc:
        raise HTTPException(status_code=500, detail=str(exc))


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/extremal", response_model=ExtremalResponse)
def extremal(req: ExtremalRequest):
    return _guard(run_extremal, req.config)


@app.post("/solve", response_model=SolveResponse, response_model_by_alias=True)
def solve(req: SolveRequest):
    return _guard(run_solve, req.config, req.lam, req.relative_to_lambda_n,
                  req.branch)


@app.post("/sweep", response_model=TableResponse)
def sweep_endpoint(req: SweepRequest):
    return _guard(run_sweep, req.config, req.lambda_min, req.lambda_max,
                  req.steps, req.relative_to_lambda_n)


@app.post("/fibering", response_model=TableResponse)
def fibering_endpoint(req: FiberingRequest):
    return _guard(run_fibering, req.config, req.profile, req.t_min, req.t_max,
                  req.samples)


@app.post("/verify", response_model=VerifyResponse)
def verify_endpoint(req: VerifyRequest):
    return _guard(run_verify, req.config, req.suite)
