"""Energy functional of the concave-convex Choquard problem.

    E_lam(u) = 1/2 ||u||_X^2 - 1/(2p) int (I_alpha*|u|^p)|u|^p - lam/q int |u|^q

with the working-space norm from :mod:`choquard.grid` and the nonlocal term
from :mod:`choquard.riesz`.  Everything downstream (fibering maps, extremal
parameters, branch solves) consumes the coefficient triple

    A = ||u||_X^2,  B = int (I_alpha*|u|^p)|u|^p,  G = int |u|^q.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, ZeroFieldError
from .grid import (Field, PotentialSpec, RadialGrid, apply_operator, lq_norm_pow,
                   x_inner, x_norm_sq)
from .riesz import RieszOperator, choquard_energy, choquard_force, make_riesz, signed_power


@dataclass(frozen=True)
class ProblemParams:
    """Parameters (N, alpha, p, q, V, lam) of the problem.

    Admissibility: ``(N+alpha)/N < p < (N+alpha)/(N-2)``, ``1 < q < 2``,
    ``lam >= 0`` (lam = 0 only for the vanishing-parameter limit runs).
    """

    N: int
    alpha: float
    p: float
    q: float
    pot: PotentialSpec
    lam: float

    def __post_init__(self):
        if self.N < 3:
            raise DomainError("N must be >= 3")
        if not 0.0 < self.alpha < self.N:
            raise DomainError("alpha must lie in (0, N)")
        lo = (self.N + self.alpha) / self.N
        hi = (self.N + self.alpha) / (self.N - 2)
        if not lo < self.p < hi:
            raise DomainError(f"p must lie in ({lo}, {hi}), got {self.p}")
        if not 1.0 < self.q < 2.0:
            raise DomainError(f"q must lie in (1, 2), got {self.q}")
        if self.lam < 0.0:
            raise DomainError("lam must be nonnegative")
        if self.pot.growth_exponent <= self.N:
            raise DomainError("potential growth exponent must exceed N")

    def with_lambda(self, lam: float) -> "ProblemParams":
        return replace(self, lam=lam)


@dataclass(frozen=True)
class FiberCoefficients:
    """Triple (A, B, G) of a nonzero field, plus the exponents (p, q)."""

    A: float
    B: float
    G: float
    p: float
    q: float

    def __post_init__(self):
        for name in ("A", "B", "G"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0.0:
                raise DomainError(f"coefficient {name} must be finite and positive, got {v}")


def default_riesz(grid: RadialGrid, params: ProblemParams) -> RieszOperator:
    return make_riesz(grid, params.alpha, "auto")


def fiber_coefficients(u: Field, params: ProblemParams,
                       op: RieszOperator | None = None) -> FiberCoefficients:
    """Compute (A, B, G) for a nonzero field."""
    scale = float(np.max(np.abs(u.values), initial=0.0))
    if scale == 0.0 or not np.any(np.abs(u.values) > 1e-14 * scale):
        raise ZeroFieldError("fiber coefficients require a nonzero field")
    op = op or default_riesz(u.grid, params)
    A = x_norm_sq(u, params.pot)
    B = choquard_energy(op, u, params.p)
    G = lq_norm_pow(u, params.q)
    return FiberCoefficients(A=A, B=B, G=G, p=params.p, q=params.q)


def energy_from_coefficients(coef: FiberCoefficients, lam: float, t: float = 1.0) -> float:
    """E_lam(t u) expressed through the coefficients of u."""
    p, q = coef.p, coef.q
    return (t ** 2 * coef.A / 2.0
            - t ** (2 * p) * coef.B / (2.0 * p)
            - lam * t ** q * coef.G / q)


def energy(u: Field, params: ProblemParams, op: RieszOperator | None = None) -> float:
    """E_lam(u) = A/2 - B/(2p) - lam G/q (zero for the zero field)."""
    if not np.any(u.values):
        return 0.0
    coef = fiber_coefficients(u, params, op)
    return energy_from_coefficients(coef, params.lam)


def directional_derivative(u: Field, w: Field, params: ProblemParams,
                           op: RieszOperator | None = None) -> float:
    """Gateaux derivative E'_lam(u)w.

    The sublinear term uses the convention ``|u|^{q-2} u = 0`` where u = 0.
    """
    u.grid.require_same(w.grid)
    op = op or default_riesz(u.grid, params)
    t1 = x_inner(u, w, params.pot)
    t2 = float(np.dot(choquard_force(op, u, params.p).values * w.values, u.grid.weights))
    t3 = float(np.dot(signed_power(u.values, params.q - 1.0) * w.values, u.grid.weights))
    return t1 - t2 - params.lam * t3


def second_form(u: Field, params: ProblemParams, op: RieszOperator | None = None) -> float:
    """Second-derivative form E''_lam(u)(u,u) = A - (2p-1)B - lam(q-1)G."""
    coef = fiber_coefficients(u, params, op)
    return second_form_from_coefficients(coef, params.lam)


def second_form_from_coefficients(coef: FiberCoefficients, lam: float) -> float:
    return coef.A - (2 * coef.p - 1) * coef.B - lam * (coef.q - 1) * coef.G


def residual(u: Field, params: ProblemParams, op: RieszOperator | None = None) -> Field:
    """Strong-form residual ``-Delta u + V u - (I_alpha*|u|^p)|u|^{p-2}u - lam |u|^{q-2}u``.

    Exactly dual to :func:`directional_derivative` under the grid quadrature.
    """
    op = op or default_riesz(u.grid, params)
    Au = apply_operator(u, params.pot)
    F = choquard_force(op, u, params.p)
    sub = signed_power(u.values, params.q - 1.0)
    return Field(u.grid, Au.values - F.values - params.lam * sub)


def residual_scale(u: Field, params: ProblemParams, op: RieszOperator | None = None) -> float:
    """Node-wise magnitude scale of the three residual terms (for relative tests)."""
    op = op or default_riesz(u.grid, params)
    Au = apply_operator(u, params.pot)
    F = choquard_force(op, u, params.p)
    sub = signed_power(u.values, params.q - 1.0)
    return float(np.max(np.abs(Au.values) + np.abs(F.values) + params.lam * np.abs(sub)))
