"""Two-branch Nehari minimization and parameter-continuation sweeps.

``solve_branch`` minimizes the energy on the gain branch (N+) or the loss
branch (N-) by alternating a preconditioned residual step with an exact
re-projection onto the requested branch along the ray, accepting steps on
energy decrease.  ``sweep`` continues the two solutions across an increasing
ladder of parameter values with warm starts; ``limit_to_lambda_n`` drives the
ladder into the extremal parameter itself, and ``solve_lambda_zero`` handles
the degenerate lam = 0 loss-branch problem via the single zero-root
projection.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.linalg import solve_banded

from .errors import NoRootsError, NonConvergenceError
from .fibering import (BranchTag, classify, energy_zero_root, nehari_roots)
from .functional import (FiberCoefficients, ProblemParams, energy_from_coefficients,
                         fiber_coefficients, residual, residual_scale,
                         second_form_from_coefficients)
from .grid import Field, RadialGrid, operator_bands
from .riesz import RieszOperator, make_riesz


@dataclass(frozen=True)
class SolverOptions:
    tol_residual: float = 1e-8     # relative to the node-wise term scale
    max_iters: int = 400
    step0: float = 1.0
    multistarts: int = 1
    warm_start: bool = True
    rng_seed: int = 0


@dataclass
class Solution:
    u: Field
    lam: float
    branch: BranchTag
    energy: float
    coef: FiberCoefficients
    second_form_val: float
    residual_sup: float
    iterations: int


@dataclass
class SweepRow:
    lam: float
    E1: float
    E2: float
    sign_E2: int
    norm_u: float
    norm_v: float
    iter_u: int
    iter_v: int
    residual_u: float
    residual_v: float
    failed: bool = False


@dataclass
class BranchDiagram:
    rows: list[SweepRow] = dc_field(default_factory=list)

    @property
    def any_failed(self) -> bool:
        return any(r.failed for r in self.rows)


def project_nehari(u: Field, params: ProblemParams, branch: BranchTag,
                   op: RieszOperator | None = None) -> Field:
    """Scale u onto the requested Nehari branch: t_plus u or t_minus u."""
    if branch not in (BranchTag.N_PLUS, BranchTag.N_MINUS):
        raise ValueError("projection targets N_plus or N_minus")
    coef = fiber_coefficients(u, params, op)
    roots = nehari_roots(coef, params.lam)   # NoRootsError when lam too large
    t = roots.t_plus if branch is BranchTag.N_PLUS else roots.t_minus
    return Field(u.grid, t * u.values)


def _project_zero(u: Field, params: ProblemParams, op) -> Field:
    coef = fiber_coefficients(u, params, op)
    return Field(u.grid, energy_zero_root(coef) * u.values)


def _energy_of(u, params, op):
    coef = fiber_coefficients(u, params, op)
    return energy_from_coefficients(coef, params.lam), coef


def _descent_loop(grid, params, op, u, project, opts, trace=None):
    """Alternate preconditioned residual steps with ray re-projection.

    Steps are accepted on energy decrease; once the energy is flat to
    round-off, a step may also be accepted on residual decrease, which lets
    the iteration polish past the floating-point granularity of the energy.
    """
    bands = operator_bands(grid, params.pot.table(grid))
    E, coef = _energy_of(u, params, op)
    step = opts.step0
    res_rel = np.inf
    iters = 0
    stall = 0
    for it in range(opts.max_iters):
        iters = it + 1
        if trace is not None:
            trace.append(coef)
        res = residual(u, params, op)
        scale = residual_scale(u, params, op)
        res_rel = float(np.max(np.abs(res.values)) / scale)
        if res_rel <= opts.tol_residual:
            break
        d = -solve_banded((1, 1), bands, res.values)
        s = step
        accepted = False
        e_mag = coef.A / 2.0 + coef.B / (2 * coef.p) + params.lam * coef.G / coef.q
        for _ in range(50):
            try:
                cand = project(Field(grid, u.values + s * d), params, op)
            except NoRootsError:
                s *= 0.5
                continue
            E_c, coef_c = _energy_of(cand, params, op)
            # demand a clear decrease; once the energy is flat to round-off
            # the weighted-L2 residual (smoother than the sup) takes over
            ok = E_c < E - 1e-14 * e_mag
            if not ok and E_c <= E + 1e-13 * e_mag:
                res_c = residual(cand, params, op)
                l2_c = float(np.dot(res_c.values ** 2, grid.weights))
                l2_u = float(np.dot(res.values ** 2, grid.weights))
                ok = l2_c < l2_u
            if ok:
                u, E, coef = cand, E_c, coef_c
                step = min(1.5 * s, 1.0)
                accepted = True
                break
            s *= 0.5
        if not accepted:
            stall += 1
            if stall >= 3:
                break
        else:
            stall = 0
    return u, E, coef, res_rel, iters


def _polish_loop(grid, params, op, u, project, opts, budget, trace=None):
    """Residual-monotone polish near a constrained stationary point.

    The energy line search goes blind once the energy is flat to round-off
    (near-axis residual components carry almost no quadrature weight), so
    the final digits are driven by the weighted-L2 residual instead.
    """
    bands = operator_bands(grid, params.pot.table(grid))
    res = residual(u, params, op)
    l2 = float(np.dot(res.values ** 2, grid.weights))
    scale = residual_scale(u, params, op)
    res_rel = float(np.max(np.abs(res.values)) / scale)
    iters = 0
    for _ in range(budget):
        if res_rel <= opts.tol_residual:
            break
        iters += 1
        coef = fiber_coefficients(u, params, op)
        if trace is not None:
            trace.append(coef)
        d = -solve_banded((1, 1), bands, res.values)
        s = 1.0
        accepted = False
        for _ in range(40):
            try:
                cand = project(Field(grid, u.values + s * d), params, op)
            except NoRootsError:
                s *= 0.5
                continue
            res_c = residual(cand, params, op)
            l2_c = float(np.dot(res_c.values ** 2, grid.weights))
            if l2_c < l2:
                u, res, l2 = cand, res_c, l2_c
                scale = residual_scale(u, params, op)
                res_rel = float(np.max(np.abs(res.values)) / scale)
                accepted = True
                break
            s *= 0.5
        if not accepted:
            break
    return u, res_rel, iters


def solve_branch(grid: RadialGrid, params: ProblemParams, branch: BranchTag,
                 seed: Field, opts: SolverOptions = SolverOptions(),
                 op: RieszOperator | None = None, trace: list | None = None) -> Solution:
    """Minimize the energy on one Nehari branch starting from ``seed``.

    The seed must be projectable (its maximal ray quotient above lam); the
    converged solution is sign-fixed positive and re-polished.
    """
    op = op or make_riesz(grid, params.alpha, "auto")
    if params.lam <= 0.0:
        raise NoRootsError("solve_branch requires lam > 0; use solve_lambda_zero")

    def proj(f, prm, operator):
        return project_nehari(f, prm, branch, operator)

    u = proj(seed, params, op)
    u, E, coef, res_rel, iters = _descent_loop(grid, params, op, u, proj, opts, trace)

    # positivity fix: the energy depends on |u| through B and G; re-polish
    if np.any(u.values < 0.0):
        u = Field(grid, np.abs(u.values))
        u = proj(u, params, op)
        u, E, coef, res_rel, it2 = _descent_loop(grid, params, op, u, proj, opts, trace)
        iters += it2

    if res_rel > opts.tol_residual:
        budget = max(opts.max_iters - iters, min(50, opts.max_iters))
        u, res_rel, it2 = _polish_loop(grid, params, op, u, proj, opts,
                                       budget, trace)
        iters += it2
        E, coef = _energy_of(u, params, op)

    if res_rel > opts.tol_residual:
        raise NonConvergenceError(
            f"branch solve stalled at relative residual {res_rel:.3e}",
            partial=Solution(u, params.lam, classify(coef, params.lam), E, coef,
                             second_form_from_coefficients(coef, params.lam),
                             res_rel, iters))
    return Solution(
        u=u, lam=params.lam, branch=classify(coef, params.lam), energy=E,
        coef=coef, second_form_val=second_form_from_coefficients(coef, params.lam),
        residual_sup=res_rel, iterations=iters)


def solve_lambda_zero(grid: RadialGrid, params: ProblemParams,
                      opts: SolverOptions = SolverOptions(),
                      op: RieszOperator | None = None,
                      seed: Field | None = None) -> Solution:
    """Loss-branch solution of the lam = 0 problem via the zero-root projection."""
    op = op or make_riesz(grid, params.alpha, "auto")
    params0 = params.with_lambda(0.0)
    if seed is None:
        seed = Field(grid, np.exp(-grid.nodes ** 2))
    u = _project_zero(seed, params0, op)
    u, E, coef, res_rel, iters = _descent_loop(grid, params0, op, u, _project_zero, opts)
    if np.any(u.values < 0.0):
        u = _project_zero(Field(grid, np.abs(u.values)), params0, op)
        u, E, coef, res_rel, it2 = _descent_loop(grid, params0, op, u, _project_zero, opts)
        iters += it2
    if res_rel > opts.tol_residual:
        raise NonConvergenceError(f"lam=0 solve stalled at {res_rel:.3e}")
    return Solution(
        u=u, lam=0.0, branch=BranchTag.N_MINUS, energy=E, coef=coef,
        second_form_val=second_form_from_coefficients(coef, 0.0),
        residual_sup=res_rel, iterations=iters)


def _sign_with_band(E2: float, coef: FiberCoefficients, lam: float) -> int:
    scale = coef.A / 2.0 + coef.B / (2.0 * coef.p) + lam * coef.G / coef.q
    if abs(E2) <= 1e-6 * scale:
        return 0
    return 1 if E2 > 0.0 else -1


def sweep(grid: RadialGrid, params_base: ProblemParams, lambdas,
          opts: SolverOptions = SolverOptions(),
          op: RieszOperator | None = None,
          seed: Field | None = None) -> BranchDiagram:
    """Two-branch solve per parameter value with warm-start continuation.

    Per-row failures are recorded and the sweep continues.
    """
    lambdas = list(lambdas)
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("sweep expects strictly increasing parameter values")
    op = op or make_riesz(grid, params_base.alpha, "auto")
    if seed is None:
        seed = Field(grid, np.exp(-grid.nodes ** 2))
    diagram = BranchDiagram()
    warm_u, warm_v = seed, seed
    for lam in lambdas:
        prm = params_base.with_lambda(lam)
        try:
            sol_u = solve_branch(grid, prm, BranchTag.N_PLUS, warm_u, opts, op)
            sol_v = solve_branch(grid, prm, BranchTag.N_MINUS, warm_v, opts, op)
        except (NoRootsError, NonConvergenceError):
            diagram.rows.append(SweepRow(lam, np.nan, np.nan, 0, np.nan, np.nan,
                                         0, 0, np.nan, np.nan, failed=True))
            continue
        if opts.warm_start:
            warm_u, warm_v = sol_u.u, sol_v.u
        diagram.rows.append(SweepRow(
            lam=lam, E1=sol_u.energy, E2=sol_v.energy,
            sign_E2=_sign_with_band(sol_v.energy, sol_v.coef, lam),
            norm_u=float(np.sqrt(sol_u.coef.A)), norm_v=float(np.sqrt(sol_v.coef.A)),
            iter_u=sol_u.iterations, iter_v=sol_v.iterations,
            residual_u=sol_u.residual_sup, residual_v=sol_v.residual_sup))
    return diagram


def limit_to_lambda_n(grid: RadialGrid, params_base: ProblemParams, lambda_n: float,
                      opts: SolverOptions = SolverOptions(),
                      op: RieszOperator | None = None,
                      stages: int = 8,
                      seed: Field | None = None) -> tuple[Solution, Solution]:
    """Reach lam = lambda_n by the decreasing-gap ladder lam_j = (1 - 2^-j) lambda_n.

    Warm starts along the ladder keep the iterates clear of the tangency set;
    the final polish runs at lam = lambda_n exactly.  Both solutions must
    classify away from N_zero there.
    """
    op = op or make_riesz(grid, params_base.alpha, "auto")
    if seed is None:
        seed = Field(grid, np.exp(-grid.nodes ** 2))
    warm_u, warm_v = seed, seed
    for j in range(1, stages + 1):
        lam_j = (1.0 - 2.0 ** (-j)) * lambda_n
        prm = params_base.with_lambda(lam_j)
        warm_u = solve_branch(grid, prm, BranchTag.N_PLUS, warm_u, opts, op).u
        warm_v = solve_branch(grid, prm, BranchTag.N_MINUS, warm_v, opts, op).u
    prm = params_base.with_lambda(lambda_n)
    sol_u = solve_branch(grid, prm, BranchTag.N_PLUS, warm_u, opts, op)
    sol_v = solve_branch(grid, prm, BranchTag.N_MINUS, warm_v, opts, op)
    for sol, want in ((sol_u, BranchTag.N_PLUS), (sol_v, BranchTag.N_MINUS)):
        if sol.branch is BranchTag.N_ZERO:
            raise NonConvergenceError("solution at lambda_n degenerated onto N_zero")
        if sol.branch is not want:
            raise NonConvergenceError(f"solution at lambda_n classifies as {sol.branch}")
    if not sol_u.energy < sol_v.energy:
        raise NonConvergenceError("branch energies at lambda_n failed to separate")
    return sol_u, sol_v
