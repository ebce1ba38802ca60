"""Run orchestration shared by the service endpoints and the CLI client.

Each function takes a validated :class:`RunConfig` (plus per-run arguments),
executes deterministically, and returns a plain payload dictionary that both
the HTTP layer and the file writers can serialize.
"""

from __future__ import annotations

import numpy as np

from .config import RunConfig
from .errors import DomainError, NoRootsError
from .extremal import ExtremalResult, minimize_lambda_n
from .fibering import (BranchTag, lambda_e_value, lambda_n_value, q_e, q_n, t_e,
                       t_n, t_zero)
from .functional import fiber_coefficients
from .grid import Field
from .riesz import make_riesz
from .solver import solve_branch, solve_lambda_zero, sweep


def seed_field(grid, profile: str) -> Field:
    r = grid.nodes
    if profile == "gaussian":
        return Field(grid, np.exp(-r ** 2))
    if profile == "exp":
        return Field(grid, (1.0 + r) * np.exp(-r))
    raise DomainError(f"unknown seed profile {profile!r}")


def run_extremal(config: RunConfig) -> dict:
    grid = config.make_grid()
    params = config.make_params(lam=0.0)
    result = minimize_lambda_n(grid, params, config.make_extremal_options())
    return extremal_payload(config, result)


def extremal_payload(config: RunConfig, result: ExtremalResult) -> dict:
    return {
        "lambda_n": result.lambda_n,
        "lambda_e": result.lambda_e,
        "ratio": result.lambda_e / result.lambda_n,
        "iterations": result.iterations,
        "el_residual_sup": result.el_residual_sup,
        "grid": {"N": config.grid.N, "r_max": config.grid.r_max,
                 "count": config.grid.count},
        "params": {"alpha": config.params.alpha, "p": config.params.p,
                   "q": config.params.q, "v0": config.params.v0,
                   "s": config.params.s},
        "minimizer_values": [float(v) for v in result.minimizer.values],
        "config": config.model_dump(),
    }


def _resolve_lambda(config: RunConfig, lam: float, relative: bool) -> tuple[float, float | None]:
    if not relative:
        return lam, None
    grid = config.make_grid()
    params = config.make_params(lam=0.0)
    res = minimize_lambda_n(grid, params, config.make_extremal_options())
    return lam * res.lambda_n, res.lambda_n


def run_solve(config: RunConfig, lam: float, relative: bool, branch: str) -> dict:
    if branch not in ("plus", "minus"):
        raise DomainError("branch must be 'plus' or 'minus'")
    lam_abs, lam_n = _resolve_lambda(config, lam, relative)
    grid = config.make_grid()
    opts = config.make_solver_options()
    op = make_riesz(grid, config.params.alpha, "auto")
    if lam_abs == 0.0:
        if branch != "minus":
            raise NoRootsError("at lam = 0 only the loss branch exists")
        sol = solve_lambda_zero(grid, config.make_params(0.0), opts, op)
    else:
        params = config.make_params(lam_abs)
        tag = BranchTag.N_PLUS if branch == "plus" else BranchTag.N_MINUS
        # cold solves multistart over the standard seed profiles and keep
        # the lowest energy (tie-break between local loss-branch minimizers)
        from .extremal import seed_profiles
        sol = None
        for seed in seed_profiles(grid, max(1, opts.multistarts), opts.rng_seed):
            try:
                cand = solve_branch(grid, params, tag, seed, opts, op)
            except NoRootsError:
                # reseed from the extremal minimizer, whose quotient is minimal
                res = minimize_lambda_n(grid, config.make_params(0.0),
                                        config.make_extremal_options(), op)
                cand = solve_branch(grid, params, tag, res.minimizer, opts, op)
            if sol is None or cand.energy < sol.energy:
                sol = cand
    payload = {
        "lambda": sol.lam,
        "branch": sol.branch.value,
        "energy": sol.energy,
        "A": sol.coef.A,
        "B": sol.coef.B,
        "G": sol.coef.G,
        "second_form": sol.second_form_val,
        "residual_sup": sol.residual_sup,
        "iterations": sol.iterations,
        "values": [float(v) for v in sol.u.values],
        "config": config.model_dump(),
    }
    if lam_n is not None:
        payload["lambda_n"] = lam_n
    return payload


SWEEP_COLUMNS = ["lambda", "E1", "E2", "sign_E2", "norm_u", "norm_v",
                 "iter_u", "iter_v", "residual_u", "residual_v"]


def run_sweep(config: RunConfig, lambda_min: float, lambda_max: float,
              steps: int, relative: bool) -> dict:
    if steps < 2:
        raise DomainError("sweep needs at least 2 steps")
    if not 0.0 < lambda_min < lambda_max:
        raise DomainError("need 0 < lambda_min < lambda_max")
    scale, lam_n = 1.0, None
    if relative:
        _, lam_n = _resolve_lambda(config, 1.0, True)
        scale = lam_n
    lambdas = [scale * (lambda_min + i * (lambda_max - lambda_min) / (steps - 1))
               for i in range(steps)]
    grid = config.make_grid()
    diagram = sweep(grid, config.make_params(lambdas[0]), lambdas,
                    config.make_solver_options())
    rows = [[r.lam, r.E1, r.E2, r.sign_E2, r.norm_u, r.norm_v,
             r.iter_u, r.iter_v, r.residual_u, r.residual_v]
            for r in diagram.rows]
    payload = {
        "columns": SWEEP_COLUMNS,
        "rows": rows,
        "any_failed": diagram.any_failed,
        "config_hash": config.config_hash(),
        "config": config.model_dump(),
    }
    if lam_n is not None:
        payload["lambda_n"] = lam_n
    return payload


def run_fibering(config: RunConfig, profile: str, t_min: float, t_max: float,
                 samples: int) -> dict:
    """Sample (t, q_n(t), q_e(t)) along the ray of a seed profile.

    The t-range is clipped to (0, t_zero]; marker values for the critical
    points and maximal quotients ride along for the plotting component.
    """
    if samples < 2:
        raise DomainError("need at least 2 samples")
    grid = config.make_grid()
    params = config.make_params(lam=0.0)
    u = seed_field(grid, profile)
    coef = fiber_coefficients(u, params)
    tz = t_zero(coef)
    clipped = False
    lo, hi = t_min, t_max
    if lo <= 0.0:
        lo, clipped = tz * 1e-3, True
    if hi > tz:
        hi, clipped = tz, True
    if not lo < hi:
        raise DomainError("empty t range after clipping")
    ts = np.linspace(lo, hi, samples)
    rows = [[float(t), q_n(coef, float(t)), q_e(coef, float(t))] for t in ts]
    return {
        "columns": ["t", "Qn", "Qe"],
        "rows": rows,
        "markers": {
            "t_n": t_n(coef),
            "t_e": t_e(coef),
            "lambda_n_u": lambda_n_value(coef),
            "lambda_e_u": lambda_e_value(coef),
        },
        "clipped": clipped,
        "config_hash": config.config_hash(),
        "config": config.model_dump(),
    }
