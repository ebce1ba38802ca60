"""Run configuration: JSON schema, validation and object construction.

The config file has exactly four top-level entries (``grid``, ``params``,
``solver``, ``rng_seed``); unknown keys anywhere are rejected so typos in
exponents cannot silently change the problem.
"""

from __future__ import annotations

import hashlib
import json

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from .errors import ConfigError
from .extremal import ExtremalOptions
from .functional import ProblemParams
from .grid import PotentialSpec, RadialGrid, build_grid
from .solver import SolverOptions


class GridBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    N: int = 3
    r_max: float = 20.0
    count: int = 2048
    spacing: str = "uniform"

    @model_validator(mode="after")
    def _ranges(self):
        if self.N < 3:
            raise ValueError("grid.N must be >= 3")
        if self.r_max <= 0:
            raise ValueError("grid.r_max must be positive")
        if self.count < 16:
            raise ValueError("grid.count must be >= 16")
        if self.spacing not in ("uniform", "graded"):
            raise ValueError("grid.spacing must be 'uniform' or 'graded'")
        return self


class ParamsBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float = 2.0
    p: float = 2.0
    q: float = 1.5
    v0: float = 1.0
    s: float = 4.0


class SolverBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tol_residual: float = 1e-8
    max_iters: int = 400
    step0: float = 1.0
    multistarts: int = 3
    warm_start: bool = True

    @model_validator(mode="after")
    def _positive(self):
        if self.tol_residual <= 0 or self.step0 <= 0:
            raise ValueError("solver tolerances and step sizes must be positive")
        if self.max_iters <= 0 or self.multistarts <= 0:
            raise ValueError("solver iteration counts must be positive")
        return self


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    grid: GridBlock = GridBlock()
    params: ParamsBlock = ParamsBlock()
    solver: SolverBlock = SolverBlock()
    rng_seed: int = 0

    @model_validator(mode="after")
    def _hypotheses(self):
        N, alpha, p, q, s = (self.grid.N, self.params.alpha, self.params.p,
                             self.params.q, self.params.s)
        if not 0.0 < alpha < N:
            raise ValueError(f"alpha must lie in (0, N), got {alpha}")
        lo, hi = (N + alpha) / N, (N + alpha) / (N - 2)
        if not lo < p < hi:
            raise ValueError(f"p must lie in ({lo:g}, {hi:g}), got {p}")
        if not 1.1 <= q <= 1.9:
            raise ValueError(f"q must lie in [1.1, 1.9], got {q}")
        if not s > N:
            raise ValueError(f"potential exponent s must exceed N = {N}, got {s}")
        if self.params.v0 <= 0:
            raise ValueError("v0 must be positive")
        return self

    # --- object construction -------------------------------------------------
    def make_grid(self) -> RadialGrid:
        return build_grid(self.grid.N, self.grid.r_max, self.grid.count,
                          self.grid.spacing)

    def make_params(self, lam: float = 0.0) -> ProblemParams:
        pot = PotentialSpec(v0=self.params.v0, growth_exponent=self.params.s)
        return ProblemParams(N=self.grid.N, alpha=self.params.alpha,
                             p=self.params.p, q=self.params.q, pot=pot, lam=lam)

    def make_solver_options(self) -> SolverOptions:
        return SolverOptions(tol_residual=self.solver.tol_residual,
                             max_iters=self.solver.max_iters,
                             step0=self.solver.step0,
                             multistarts=self.solver.multistarts,
                             warm_start=self.solver.warm_start,
                             rng_seed=self.rng_seed)

    def make_extremal_options(self) -> ExtremalOptions:
        return ExtremalOptions(multistarts=self.solver.multistarts,
                               rng_seed=self.rng_seed)

    def config_hash(self) -> str:
        payload = json.dumps(self.model_dump(), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(data)


def parse_config(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
