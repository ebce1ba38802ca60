"""Shared fixtures: the flagship configuration and its expensive artifacts.

Flagship: N=3, alpha=2, p=2, q=1.5, V = 1 + r^4, r_max=20, 2048 nodes.
Session-scoped so the extremal run, the 24-point sweep and the branch solves
are computed once and shared by the module tests and the acceptance suite.
"""

import numpy as np
import pytest

from choquard.extremal import ExtremalOptions, minimize_lambda_n
from choquard.fibering import BranchTag
from choquard.functional import ProblemParams
from choquard.grid import Field, PotentialSpec, build_grid
from choquard.riesz import make_riesz
from choquard.solver import SolverOptions, solve_branch, solve_lambda_zero


FLAGSHIP = dict(N=3, alpha=2.0, p=2.0, q=1.5, v0=1.0, s=4.0, r_max=20.0, count=2048)


@pytest.fixture(scope="session")
def flagship_grid():
    return build_grid(FLAGSHIP["N"], FLAGSHIP["r_max"], FLAGSHIP["count"])


@pytest.fixture(scope="session")
def flagship_params(flagship_grid):
    pot = PotentialSpec(v0=FLAGSHIP["v0"], growth_exponent=FLAGSHIP["s"])
    return ProblemParams(N=FLAGSHIP["N"], alpha=FLAGSHIP["alpha"],
                         p=FLAGSHIP["p"], q=FLAGSHIP["q"], pot=pot, lam=0.0)


@pytest.fixture(scope="session")
def flagship_op(flagship_grid):
    return make_riesz(flagship_grid, FLAGSHIP["alpha"], "newtonian-exact")


@pytest.fixture(scope="session")
def extremal_flagship(flagship_grid, flagship_params):
    return minimize_lambda_n(flagship_grid, flagship_params,
                             ExtremalOptions(multistarts=3, rng_seed=0))


@pytest.fixture(scope="session")
def solver_opts():
    return SolverOptions(tol_residual=1e-8, max_iters=400)


@pytest.fixture(scope="session")
def gaussian_seed(flagship_grid):
    return Field(flagship_grid, np.exp(-flagship_grid.nodes ** 2))


@pytest.fixture(scope="session")
def branch_solutions(flagship_grid, flagship_params, flagship_op,
                     extremal_flagship, solver_opts, gaussian_seed):
    """Converged (N+, N-) pairs at the four acceptance fractions of lambda_n."""
    out = {}
    for frac in (0.3, 0.5, 0.7, 0.95):
        lam = frac * extremal_flagship.lambda_n
        prm = flagship_params.with_lambda(lam)
        out[frac] = (
            solve_branch(flagship_grid, prm, BranchTag.N_PLUS, gaussian_seed,
                         solver_opts, flagship_op),
            solve_branch(flagship_grid, prm, BranchTag.N_MINUS, gaussian_seed,
                         solver_opts, flagship_op),
        )
    return out


@pytest.fixture(scope="session")
def lambda_zero_solution(flagship_grid, flagship_params, flagship_op, solver_opts):
    return solve_lambda_zero(flagship_grid, flagship_params, solver_opts, flagship_op)


@pytest.fixture(scope="session")
def smooth_corpus(flagship_grid):
    """Positive smooth decaying profiles for randomized property checks."""
    rng = np.random.default_rng(11)
    r = flagship_grid.nodes
    fields = []
    for _ in range(120):
        a = rng.uniform(0.2, 3.0)
        b = rng.uniform(0.0, 2.0)
        c = rng.uniform(0.0, 2 * np.pi)
        fields.append(Field(flagship_grid,
                            np.exp(-a * r ** 2) * (1.0 + b * np.sin(r + c))))
    return fields
