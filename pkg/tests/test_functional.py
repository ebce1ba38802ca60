import numpy as np
import pytest

from choquard.errors import DomainError, ZeroFieldError
from choquard.functional import (FiberCoefficients, ProblemParams,
                                 directional_derivative, energy,
                                 energy_from_coefficients, fiber_coefficients,
                                 residual, second_form,
                                 second_form_from_coefficients)
from choquard.grid import Field, PotentialSpec, build_grid


@pytest.fixture()
def params(flagship_params):
    return flagship_params.with_lambda(0.4)


def test_problem_params_validation():
    pot = PotentialSpec(1.0, 4.0)
    with pytest.raises(DomainError):
        ProblemParams(N=3, alpha=2.0, p=1.5, q=1.5, pot=pot, lam=0.1)   # p <= 5/3
    with pytest.raises(DomainError):
        ProblemParams(N=3, alpha=2.0, p=5.5, q=1.5, pot=pot, lam=0.1)   # p >= 5
    with pytest.raises(DomainError):
        ProblemParams(N=3, alpha=2.0, p=2.0, q=2.2, pot=pot, lam=0.1)
    with pytest.raises(DomainError):
        ProblemParams(N=3, alpha=2.0, p=2.0, q=1.5, pot=pot, lam=-0.1)
    with pytest.raises(DomainError):
        ProblemParams(N=3, alpha=2.0, p=2.0, q=1.5,
                      pot=PotentialSpec(1.0, 2.5), lam=0.1)             # s <= N
    ProblemParams(N=3, alpha=2.0, p=2.0, q=1.5, pot=pot, lam=0.0)       # lam=0 allowed


def test_fiber_coefficients_zero_field(flagship_grid, params):
    with pytest.raises(ZeroFieldError):
        fiber_coefficients(Field(flagship_grid, np.zeros(flagship_grid.count)), params)


def test_fiber_coefficients_scaling(flagship_grid, params, flagship_op):
    u = Field(flagship_grid, np.exp(-flagship_grid.nodes ** 2))
    c = fiber_coefficients(u, params, flagship_op)
    c3 = fiber_coefficients(3.0 * u, params, flagship_op)
    assert abs(c3.A - 9 * c.A) <= 1e-12 * c3.A
    assert abs(c3.B - 3 ** (2 * params.p) * c.B) <= 1e-12 * c3.B
    assert abs(c3.G - 3 ** params.q * c.G) <= 1e-12 * c3.G


# measured floor of the flagship-vs-doubled agreement for the Gaussian seed:
# A and B carry the O(h^2) gradient/kernel bias (~1.9e-5 at 2048 nodes) while
# G superconverges; frozen with margin
FLAGSHIP_REFINED_RTOL_AB = 2.5e-5
FLAGSHIP_REFINED_RTOL_G = 1e-5


def test_fiber_coefficients_flagship_refined_oracle(flagship_grid, params):
    u = Field(flagship_grid, np.exp(-flagship_grid.nodes ** 2))
    coarse = fiber_coefficients(u, params)
    fine_grid = build_grid(3, flagship_grid.r_max, 2 * flagship_grid.count)
    uf = Field(fine_grid, np.exp(-fine_grid.nodes ** 2))
    fine = fiber_coefficients(uf, params)
    assert abs(coarse.A - fine.A) <= FLAGSHIP_REFINED_RTOL_AB * fine.A
    assert abs(coarse.B - fine.B) <= FLAGSHIP_REFINED_RTOL_AB * fine.B
    assert abs(coarse.G - fine.G) <= FLAGSHIP_REFINED_RTOL_G * fine.G


def test_energy_zero_and_scaling_consistency(flagship_grid, params, flagship_op):
    zero = Field(flagship_grid, np.zeros(flagship_grid.count))
    assert energy(zero, params) == 0.0
    u = Field(flagship_grid, np.exp(-flagship_grid.nodes ** 2))
    coef = fiber_coefficients(u, params, flagship_op)
    for t in (0.5, 1.0, 2.0):
        direct = energy(t * u, params, flagship_op)
        via_coef = energy_from_coefficients(coef, params.lam, t)
        assert abs(direct - via_coef) <= 1e-12 * max(abs(direct), 1e-12)


def test_energy_unit_coefficients_arithmetic():
    coef = FiberCoefficients(A=1.0, B=1.0, G=1.0, p=2.0, q=1.5)
    got = energy_from_coefficients(coef, 0.4)
    assert abs(got - (0.5 - 0.25 - 0.4 / 1.5)) <= 1e-15


def test_directional_derivative_identities(flagship_grid, params, flagship_op):
    u = Field(flagship_grid, np.exp(-flagship_grid.nodes ** 2)
              * (1 + 0.2 * np.sin(flagship_grid.nodes)))
    zero = Field(flagship_grid, np.zeros(flagship_grid.count))
    assert directional_derivative(u, zero, params, flagship_op) == 0.0
    coef = fiber_coefficients(u, params, flagship_op)
    dd_uu = directional_derivative(u, u, params, flagship_op)
    expected = coef.A - coef.B - params.lam * coef.G
    assert abs(dd_uu - expected) <= 1e-12 * abs(expected)


def test_directional_derivative_matches_finite_difference(flagship_grid, params,
                                                          flagship_op):
    rng = np.random.default_rng(6)
    r = flagship_grid.nodes
    worst = 0.0
    for _ in range(10):
        a = rng.uniform(0.3, 2.0)
        u = Field(flagship_grid, np.exp(-a * r ** 2) * (1 + 0.3 * np.sin(r)))
        w = Field(flagship_grid,
                  u.values * (0.4 * np.cos(rng.uniform(0.5, 2) * r) + 0.2))
        eps = 1e-5 * float(np.max(np.abs(u.values)))
        fd = (energy(u + eps * w, params, flagship_op)
              - energy(u - eps * w, params, flagship_op)) / (2 * eps)
        dd = directional_derivative(u, w, params, flagship_op)
        worst = max(worst, abs(dd - fd) / abs(fd))
    assert worst <= 1e-6


def test_second_form_arithmetic_and_limits():
    coef = FiberCoefficients(A=1.0, B=1.0, G=1.0, p=2.0, q=1.5)
    assert abs(second_form_from_coefficients(coef, 0.4) - (-2.2)) <= 1e-15
    # vanishing nonlocal term and parameter: the form reduces to A > 0
    tiny = FiberCoefficients(A=1.0, B=1e-300, G=1.0, p=2.0, q=1.5)
    assert second_form_from_coefficients(tiny, 0.0) > 0.0


def test_second_form_matches_second_difference(flagship_grid, params, flagship_op):
    u = Field(flagship_grid, np.exp(-flagship_grid.nodes ** 2))
    sf = second_form(u, params, flagship_op)
    dt = 1e-4
    e = lambda t: energy(t * u, params, flagship_op)
    num = (e(1 + dt) - 2 * e(1.0) + e(1 - dt)) / dt ** 2
    assert abs(sf - num) <= 1e-6 * abs(num)


def test_residual_duality(flagship_grid, params, flagship_op):
    rng = np.random.default_rng(7)
    r = flagship_grid.nodes
    u = Field(flagship_grid, np.exp(-r ** 2) * (1 + 0.5 * np.sin(2 * r)))
    w = Field(flagship_grid, np.exp(-0.7 * r ** 2) * rng.uniform(0.5, 1.5))
    res = residual(u, params, flagship_op)
    pairing = float(np.dot(res.values * w.values, flagship_grid.weights))
    dd = directional_derivative(u, w, params, flagship_op)
    assert abs(pairing - dd) <= 1e-11 * max(abs(dd), 1.0)
    zero = Field(flagship_grid, np.zeros(flagship_grid.count))
    assert np.all(residual(zero, params, flagship_op).values == 0.0)


def test_sign_equivalences_coefficient_level():
    # R_n(u) - lam and E'(u)u share their sign; R_e(u) - lam and E(u) likewise
    rng = np.random.default_rng(8)
    for _ in range(1000):
        coef = FiberCoefficients(A=rng.uniform(0.1, 10), B=rng.uniform(0.1, 10),
                                 G=rng.uniform(0.1, 10),
                                 p=rng.uniform(1.2, 3.0), q=rng.uniform(1.1, 1.9))
        lam = rng.uniform(0.01, 5.0)
        rn_minus_lam = (coef.A - coef.B) / coef.G - lam
        dd = coef.A - coef.B - lam * coef.G
        assert np.sign(rn_minus_lam) == np.sign(dd)
        re_minus_lam = (coef.A / 2 - coef.B / (2 * coef.p)) * coef.q / coef.G - lam
        en = energy_from_coefficients(coef, lam)
        assert np.sign(re_minus_lam) == np.sign(en)


def test_evenness_of_nonlinear_terms(flagship_grid, params, flagship_op):
    r = flagship_grid.nodes
    u = Field(flagship_grid, np.exp(-r ** 2) * np.sin(3 * r))   # sign-changing
    pos = abs(u)
    # B and G are built from |u| only: bitwise equal
    from choquard.grid import lq_norm_pow
    from choquard.riesz import choquard_energy
    assert choquard_energy(flagship_op, u, params.p) == \
        choquard_energy(flagship_op, pos, params.p)
    assert lq_norm_pow(u, params.q) == lq_norm_pow(pos, params.q)


def test_energy_affine_decreasing_in_lambda(flagship_grid, flagship_params, flagship_op):
    u = Field(flagship_grid, np.exp(-flagship_grid.nodes ** 2))
    coef = fiber_coefficients(u, flagship_params, flagship_op)
    lams = np.linspace(0.0, 2.0, 9)
    vals = [energy_from_coefficients(coef, lam) for lam in lams]
    slopes = np.diff(vals) / np.diff(lams)
    assert np.all(np.abs(slopes - (-coef.G / coef.q)) <= 1e-12 * coef.G)
