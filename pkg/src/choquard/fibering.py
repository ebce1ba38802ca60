"""Scalar fibering algebra on coefficient triples.

For a fixed nonzero profile with coefficients (A, B, G) the two fibering maps

    q_n(t) = (t^{2-q} A - t^{2p-q} B) / G
    q_e(t) = (q/G) (t^{2-q} A / 2 - t^{2p-q} B / (2p))

are the parameter values that put ``t u`` on the Nehari set (respectively on
the zero-energy set).  Everything here is exact scalar arithmetic: critical
points, the constants behind their maximal values, the two roots of
``q_n(t) = lam`` / ``q_e(t) = lam`` and the branch classification.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DomainError, NoRootsError
from .functional import FiberCoefficients, second_form_from_coefficients


def _check_pq(p: float, q: float) -> None:
    if not (1.0 < q < 2.0 < 2.0 * p):
        raise DomainError(f"need 1 < q < 2 < 2p, got p={p}, q={q}")


def cpq(p: float, q: float) -> float:
    """Constant turning (A, B, G) into the maximal Nehari quotient value."""
    _check_pq(p, q)
    return ((2 - q) / (2 * p - q)) ** ((2 - q) / (2 * p - 2)) * ((2 * p - 2) / (2 * p - q))


def cpq_tilde(p: float, q: float) -> float:
    """Constant for the maximal zero-energy quotient value; always < cpq."""
    _check_pq(p, q)
    return ((p * (2 - q) / (2 * p - q)) ** ((2 - q) / (2 * p - 2))
            * (q * (p - 1) / (2 * p - q)))


def quotient_ratio(p: float, q: float) -> float:
    """cpq_tilde / cpq, simplified: p^{(2-q)/(2p-2)} * q/2."""
    _check_pq(p, q)
    return p ** ((2 - q) / (2 * p - 2)) * q / 2.0


def q_n(coef: FiberCoefficients, t: float) -> float:
    p, q = coef.p, coef.q
    if t <= 0:
        raise DomainError("t must be positive")
    return (t ** (2 - q) * coef.A - t ** (2 * p - q) * coef.B) / coef.G


def q_e(coef: FiberCoefficients, t: float) -> float:
    p, q = coef.p, coef.q
    if t <= 0:
        raise DomainError("t must be positive")
    return (q / coef.G) * (t ** (2 - q) * coef.A / 2.0 - t ** (2 * p - q) * coef.B / (2.0 * p))


def q_n_prime(coef: FiberCoefficients, t: float) -> float:
    p, q = coef.p, coef.q
    return ((2 - q) * t ** (1 - q) * coef.A
            - (2 * p - q) * t ** (2 * p - q - 1) * coef.B) / coef.G


def q_e_prime(coef: FiberCoefficients, t: float) -> float:
    p, q = coef.p, coef.q
    return (q / coef.G) * ((2 - q) / 2.0 * t ** (1 - q) * coef.A
                           - (2 * p - q) / (2.0 * p) * t ** (2 * p - q - 1) * coef.B)


def t_n(coef: FiberCoefficients) -> float:
    """Unique critical point (maximum) of q_n."""
    p, q = coef.p, coef.q
    return ((2 - q) / (2 * p - q) * coef.A / coef.B) ** (1.0 / (2 * p - 2))


def t_e(coef: FiberCoefficients) -> float:
    """Unique critical point (maximum) of q_e; equals p^{1/(2p-2)} t_n."""
    p, q = coef.p, coef.q
    return (p * (2 - q) / (2 * p - q) * coef.A / coef.B) ** (1.0 / (2 * p - 2))


def t_zero(coef: FiberCoefficients) -> float:
    """Positive root of q_n (the ray scale where the Nehari value vanishes)."""
    return (coef.A / coef.B) ** (1.0 / (2 * coef.p - 2))


def energy_zero_root(coef: FiberCoefficients) -> float:
    """Single positive scale with ``t u`` on the Nehari set at lam = 0.

    This is the degenerate-branch projection used by the vanishing-parameter
    runs; at lam = 0 the gain-branch root does not exist.
    """
    return t_zero(coef)


def lambda_n_value(coef: FiberCoefficients) -> float:
    """Maximal Nehari quotient of the ray: q_n(t_n) expressed through (A,B,G)."""
    p, q = coef.p, coef.q
    return (cpq(p, q) * coef.A ** ((2 * p - q) / (2 * p - 2))
            / (coef.G * coef.B ** ((2 - q) / (2 * p - 2))))


def lambda_e_value(coef: FiberCoefficients) -> float:
    """Maximal zero-energy quotient of the ray: q_e(t_e)."""
    p, q = coef.p, coef.q
    return (cpq_tilde(p, q) * coef.A ** ((2 * p - q) / (2 * p - 2))
            / (coef.G * coef.B ** ((2 - q) / (2 * p - 2))))


def scale_coefficients(coef: FiberCoefficients, c: float) -> FiberCoefficients:
    """Coefficients of ``c u`` given those of ``u``."""
    if c <= 0:
        raise DomainError("scale must be positive")
    return FiberCoefficients(A=c ** 2 * coef.A, B=c ** (2 * coef.p) * coef.B,
                             G=c ** coef.q * coef.G, p=coef.p, q=coef.q)


@dataclass(frozen=True)
class NehariRoots:
    """The two solutions of q_n(t) = lam with their derivative signs."""

    t_plus: float
    t_minus: float
    qn_prime_plus: float
    qn_prime_minus: float


def _refine_root(coef, lam, value_fn, prime_fn, lo, hi, target_rel=1e-12):
    """Safeguarded Newton-bisection for value_fn(t) = lam on a bracket.

    value_fn is strictly monotone on [lo, hi].  Every iterate shrinks the
    bracket by the sign of the defect, Newton steps are taken whenever they
    stay inside it, and a root sitting on a bracket endpoint is accepted.
    """
    a, b = lo, hi
    sign_a = (value_fn(coef, a) - lam) > 0.0
    t = 0.5 * (a + b)
    for _ in range(200):
        f = value_fn(coef, t) - lam
        if abs(f) <= target_rel * abs(lam):
            return t
        if (f > 0.0) == sign_a:
            a = t
        else:
            b = t
        df = prime_fn(coef, t)
        t_new = t - f / df if df != 0.0 else 0.5 * (a + b)
        if not (a <= t_new <= b) or t_new == t:
            t_new = 0.5 * (a + b)
        if t_new == t:          # bracket exhausted at float resolution
            return t
        t = t_new
    return t


def nehari_roots(coef: FiberCoefficients, lam: float) -> NehariRoots:
    """Both roots of q_n(t) = lam for 0 < lam < lambda_n_value(coef).

    t_plus lies in (0, t_n), t_minus in (t_n, t_zero); each satisfies
    ``|q_n(t) - lam| <= 1e-12 lam``.
    """
    if lam <= 0.0:
        raise NoRootsError("nehari_roots requires lam > 0; use energy_zero_root at lam = 0")
    peak = lambda_n_value(coef)
    if lam >= peak:
        raise NoRootsError(f"lam = {lam} >= maximal quotient {peak}: no Nehari roots")
    tn = t_n(coef)
    tz = t_zero(coef)
    # left bracket endpoint where q_n < lam: q_n ~ t^{2-q} A/G near zero
    t_lo = min(tn * 1e-8, (lam * coef.G / (2.0 * coef.A)) ** (1.0 / (2.0 - coef.q)))
    t_plus = _refine_root(coef, lam, q_n, q_n_prime, t_lo, tn)
    t_minus = _refine_root(coef, lam, q_n, q_n_prime, tn, tz)
    return NehariRoots(t_plus=t_plus, t_minus=t_minus,
                       qn_prime_plus=q_n_prime(coef, t_plus),
                       qn_prime_minus=q_n_prime(coef, t_minus))


def energy_roots(coef: FiberCoefficients, lam: float) -> tuple[float, float]:
    """Both roots of q_e(t) = lam for 0 < lam < lambda_e_value(coef)."""
    if lam <= 0.0:
        raise NoRootsError("energy_roots requires lam > 0")
    peak = lambda_e_value(coef)
    if lam >= peak:
        raise NoRootsError(f"lam = {lam} >= maximal energy quotient {peak}")
    te = t_e(coef)
    tez = (coef.p * coef.A / coef.B) ** (1.0 / (2 * coef.p - 2))
    t_lo = min(te * 1e-8,
               (lam * coef.G / coef.q / coef.A) ** (1.0 / (2.0 - coef.q)))
    t_plus = _refine_root(coef, lam, q_e, q_e_prime, t_lo, te)
    t_minus = _refine_root(coef, lam, q_e, q_e_prime, te, tez)
    return t_plus, t_minus


class BranchTag(enum.Enum):
    N_PLUS = "N_plus"
    N_MINUS = "N_minus"
    N_ZERO = "N_zero"
    OFF_NEHARI = "off_nehari"


def classify(coef: FiberCoefficients, lam: float, tol: float = 1e-8) -> BranchTag:
    """Branch tag of a field from its coefficients.

    off_nehari when |A - B - lam G| exceeds ``tol`` times the coefficient
    scale; otherwise the sign of the second-derivative form against a
    scale-relative tangency band.
    """
    if lam < 0.0:
        raise DomainError("lam must be nonnegative")
    nehari_defect = coef.A - coef.B - lam * coef.G
    nehari_scale = coef.A + coef.B + lam * coef.G
    if abs(nehari_defect) > tol * nehari_scale:
        return BranchTag.OFF_NEHARI
    sf = second_form_from_coefficients(coef, lam)
    sf_scale = coef.A + (2 * coef.p - 1) * coef.B + lam * (coef.q - 1) * coef.G
    if abs(sf) <= tol * sf_scale:
        return BranchTag.N_ZERO
    return BranchTag.N_PLUS if sf > 0.0 else BranchTag.N_MINUS
