import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import i_ref
from fracosc.errors import DomainError, GridError
from fracosc.fraccalc import (GridFunction, ResidualReport, caputo_derivative, convergence_study,
                              duality_check, hamilton_residual, jseries_check, residual_eq2,
                              residual_eq3, residual_eq4, rl_integral)
from fracosc.ml_core import Kind
from fracosc.oscillations import OscParams, e_alpha_values, i_alpha_values


def grid(f, horizon=4.0, n=400):
    return GridFunction.sample(f, horizon, n)


def order(fn, n):
    return math.log2(fn(n) / fn(2 * n))


def test_grid_function_validation():
    with pytest.raises(GridError):
        GridFunction(0.1, [1.0, 2.0])
    with pytest.raises(DomainError):
        GridFunction(0.0, [1.0, 2.0, 3.0])
    g = grid(np.sin, 1.0, 10)
    assert g.n == 11 and g.t[-1] == pytest.approx(1.0)


def test_rl_integral_exact_on_constants_and_lines():
    g = grid(np.ones_like)
    assert np.max(np.abs(rl_integral(g, 0.5).values - g.t ** 0.5 / math.gamma(1.5))) <= 1e-10
    g = grid(lambda t: t)
    assert np.max(np.abs(rl_integral(g, 0.9).values - g.t ** 1.9 / math.gamma(2.9))) <= 1e-10
    assert rl_integral(g, 0.9).values[0] == 0.0


def test_rl_integral_domain():
    with pytest.raises(DomainError):
        rl_integral(grid(np.sin), 2.0)
    with pytest.raises(DomainError):
        rl_integral(grid(np.sin), 0.0)


def test_rl_integral_second_order_on_smooth_input():
    def err(n):
        g = grid(np.cos, 4.0, n)
        ref = np.array([_j_cos(0.7, t) for t in g.t])
        return np.max(np.abs(rl_integral(g, 0.7).values - ref))

    assert order(err, 200) == pytest.approx(2.0, abs=0.2)


def _j_cos(beta, t):
    # J^beta cos(t) = sum (-1)^k t^(2k+beta) / Gamma(2k+beta+1)
    return sum((-1) ** k * t ** (2 * k + beta) / math.gamma(2 * k + beta + 1) for k in range(40))


def test_half_integral_of_e_is_i():
    a = 1.6
    p = OscParams(a)
    g = grid(lambda t: e_alpha_values(p, t)[0], 5.0, 1000)
    ref, _ = i_alpha_values(p, g.t)
    assert np.max(np.abs(rl_integral(g, a / 2).values - ref)) <= 1e-4


def test_caputo_of_monomial():
    def err(n):
        g = grid(np.square, 2.0, n)
        exact = 2 * g.t ** 1.5 / math.gamma(2.5)
        return np.max(np.abs(caputo_derivative(g, 0.5).values - exact))

    assert order(err, 256) >= 1.4


@pytest.mark.parametrize("beta", [0.3, 0.5, 1.0, 1.4, 2.0])
def test_caputo_of_constant_vanishes(beta):
    g = grid(lambda t: 3.5 + 0 * t)
    assert np.max(np.abs(caputo_derivative(g, beta).values)) <= 1e-13


def test_caputo_half_derivative_of_e():
    a = 1.6
    p = OscParams(a)
    g = grid(lambda t: e_alpha_values(p, t)[0], 5.0, 2000)
    ref, _ = i_alpha_values(p, g.t)
    d = caputo_derivative(g, a / 2).values
    assert np.max(np.abs(d + ref)[g.t >= 1]) <= 5e-3


def test_caputo_needs_five_points_and_valid_order():
    with pytest.raises(GridError):
        caputo_derivative(GridFunction(0.1, [1.0, 2.0, 3.0, 4.0]), 0.5)
    with pytest.raises(DomainError):
        caputo_derivative(grid(np.sin), 2.5)


def test_semigroup_on_t_squared():
    g = grid(np.square, 3.0, 600)
    lhs = rl_integral(rl_integral(g, 0.4), 0.7).values
    exact = 2 * g.t ** 3.1 / math.gamma(4.1)
    assert np.max(np.abs(lhs - exact)) <= 1e-4
    assert np.max(np.abs(rl_integral(g, 1.1).values - exact)) <= 1e-4


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-3, 3), b=st.floats(-3, 3), beta=st.floats(0.05, 1.95))
def test_linearity(a, b, beta):
    f, g = grid(np.sin, 3.0, 200), grid(np.exp, 3.0, 200)
    combo = f.like(a * f.values + b * g.values)
    for op in (rl_integral, caputo_derivative):
        lhs = op(combo, beta).values
        rhs = a * op(f, beta).values + b * op(g, beta).values
        scale = 1 + np.max(np.abs(op(f, beta).values)) + np.max(np.abs(op(g, beta).values))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale * (1 + abs(a) + abs(b))


# ---------------------------------------------------------------- residual checks

def test_report_norms():
    r = ResidualReport.from_residual("x", GridFunction(0.5, [3.0, -1.0, 2.0]), 2.0, 0.5)
    assert r.sup_norm == 2.0 and r.sup_norm_full == 3.0
    assert r.l2_norm == pytest.approx(math.sqrt(0.5 * 5.0))


def test_integral_equation_residual():
    r = residual_eq2(2.0, 2 * math.pi, 512)
    assert r.sup_norm <= 5e-4
    assert order(lambda n: residual_eq2(2.0, 2 * math.pi, n).sup_norm, 512) == pytest.approx(2, abs=0.3)
    assert order(lambda n: residual_eq2(1.0, 5.0, n).sup_norm, 512) == pytest.approx(2, abs=0.3)
    r = residual_eq2(1.5, 10.0, 1024)
    assert r.expected_order == 2.0
    assert order(lambda n: residual_eq2(1.5, 10.0, n).sup_norm, 1024) == pytest.approx(2, abs=0.3)


def test_integral_equation_rejects_coarse_grids():
    with pytest.raises(GridError):
        residual_eq2(1.5, 10.0, 32)


@pytest.mark.parametrize("kind", list(Kind))
def test_second_order_equation_classical(kind):
    r = residual_eq3(kind, 2.0, 2 * math.pi, 512)
    assert r.sup_norm <= 1e-3
    assert order(lambda n: residual_eq3(kind, 2.0, 2 * math.pi, n).sup_norm, 512) == pytest.approx(2, abs=0.3)


def test_second_order_equation_fractional_rate():
    m = order(lambda n: residual_eq3(Kind.E, 1.7, 10.0, n).sup_norm, 1024)
    assert m >= 0.3
    assert m == pytest.approx(residual_eq3(Kind.E, 1.7, 10.0, 1024).expected_order, abs=0.3)


def test_second_order_equation_for_i_diverges():
    # i'' is not integrable at 0 for alpha < 2, so the discrete residual grows
    r1, r2 = residual_eq3(Kind.I, 1.5, 10.0, 1024), residual_eq3(Kind.I, 1.5, 10.0, 2048)
    assert r1.expected_order < 0
    assert r2.sup_norm > r1.sup_norm


@pytest.mark.parametrize("alpha", [2.0, 1.5, 1.2])
def test_mixed_equation_orders(alpha):
    r = residual_eq4(alpha, 10.0, 1024)
    m = order(lambda n: residual_eq4(alpha, 10.0, n).sup_norm, 1024)
    assert m == pytest.approx(r.expected_order, abs=0.3)
    if alpha < 2:
        assert r.expected_order == pytest.approx(2 - alpha / 2)


def test_duality_at_alpha_2_is_classical():
    reps = duality_check(2.0, 2 * math.pi, 512)
    assert set(reps) == {"D_e=-i", "D_i=e", "J_e=i", "J_i=1-e"}
    assert all(r.sup_norm <= 1e-3 for r in reps.values())


@pytest.mark.parametrize("omega", [1.0, 2.0])
def test_duality_orders(omega):
    c, f = duality_check(1.5, 10.0, 1024, omega), duality_check(1.5, 10.0, 2048, omega)
    for key in c:
        m = math.log2(c[key].sup_norm / f[key].sup_norm)
        assert f[key].sup_norm < c[key].sup_norm
        assert m == pytest.approx(c[key].expected_order, abs=0.3), key


def test_termwise_series_j_identities():
    for a in (1.2, 1.5, 1.8):
        t = np.linspace(0, 5 ** (1 / a), 60)
        d1, d2 = jseries_check(a, t)
        assert d1 <= 1e-10 and d2 <= 1e-10
    with pytest.raises(DomainError):
        jseries_check(1.5, [10.0])


@pytest.mark.parametrize("p", [OscParams(2.0), OscParams(1.8), OscParams(1.8, omega=2.0, q0=0.5)])
def test_hamilton(p):
    c, f = hamilton_residual(p, 10.0, 1024), hamilton_residual(p, 10.0, 2048)
    for rc, rf in zip(c, f):
        assert rf.sup_norm < rc.sup_norm
        assert math.log2(rc.sup_norm / rf.sup_norm) == pytest.approx(rc.expected_order, abs=0.3)
    if p.alpha == 2.0:
        assert max(r.sup_norm for r in c) <= 1e-3


def test_convergence_study_all_pass():
    res = convergence_study(1.8, 10.0, 1024)
    assert len(res) == 9
    assert all(r.passed for r in res), [(r.name, r.measured_order, r.expected_order) for r in res]


def test_series_reference_side():
    # the reference trajectories themselves match the high-precision oracle
    p = OscParams(1.5)
    t = np.array([0.5, 3.0, 9.0])
    i, _ = i_alpha_values(p, t)
    assert np.allclose(i, [i_ref(1.5, x) for x in t], atol=1e-13, rtol=0)
