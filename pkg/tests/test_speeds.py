import math

import numpy as np
import pytest
from conftest import BUILTIN_CASES, case_id, full_speed
from hypothesis import given, settings
from hypothesis import strategies as st

from translators.errors import (
    DegenerateSpeed,
    DomainError,
    ExpressionError,
    ParameterError,
    SpeedValidationError,
)
from translators.expression import Expression
from translators.speeds import (
    CurvaturePair,
    Family,
    cone_membership,
    is_nondegenerate,
    make_speed,
    normalize,
    sample_cone_points,
    symmetric_reduced,
)


@pytest.mark.parametrize("case", BUILTIN_CASES, ids=case_id)
def test_reduced_formula_matches_full_function(case):
    f = make_speed(*case)
    x, y = sample_cone_points(f, 30, seed=3)
    for xi, yi in zip(x, y):
        assert f(xi, yi) == pytest.approx(full_speed(*case, xi, yi), rel=1e-12)


def test_mean_n3_formula_and_partials():
    f = make_speed("mean", 3)
    assert f(0.3, 0.7) == pytest.approx(0.3 + 1.4)
    assert f.dx(0.3, 0.7) == 1.0
    assert f.dy(0.3, 0.7) == 2.0


def test_quotient_n3_k1_cylinder_value():
    # direct evaluation of the quotient at (0, 1): C(2,2)/C(2,1)
    assert make_speed("quotient", 3, 1)(0.0, 1.0) == pytest.approx(0.5, abs=1e-15)


def test_degenerate_gauss_root_formula():
    for n in (2, 3, 4, 5):
        f = make_speed("sk_root", n, n)
        assert f(0.7, 1.3) == pytest.approx((0.7 * 1.3 ** (n - 1)) ** (1 / n), rel=1e-14)
        assert f.value_at_cylinder() == 0.0
        assert not is_nondegenerate(f)
        with pytest.raises(DegenerateSpeed):
            normalize(f)


@pytest.mark.parametrize("n,k", [(n, k) for n in range(3, 7) for k in range(2, n)])
def test_sk_root_nondegenerate_and_partial_at_cylinder(n, k):
    f = make_speed("sk_root", n, k)
    assert is_nondegenerate(f)
    assert f(0.0, 1.0) == pytest.approx(math.comb(n - 1, k) ** (1 / k), rel=1e-14)
    expected = (1 / k) * math.comb(n - 1, k - 1) * math.comb(n - 1, k) ** ((1 - k) / k)
    assert f.dx(0.0, 1.0) == pytest.approx(expected, rel=1e-13)
    h = 1e-6
    assert (f(h, 1.0) - f(-h, 1.0)) / (2 * h) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_normalize_scales(n):
    assert normalize(make_speed("mean", n)).normalization_scale == n - 1
    assert normalize(make_speed("sk_root", n, 1)).normalization_scale == pytest.approx(n - 1)


@pytest.mark.parametrize("case", BUILTIN_CASES, ids=case_id)
def test_normalize_idempotent(case):
    f = normalize(make_speed(*case))
    assert abs(f(0.0, 1.0) - 1.0) <= 1e-12
    g = normalize(f)
    assert abs(g.normalization_scale / f.normalization_scale - 1.0) <= 1e-14


@pytest.mark.parametrize("case", BUILTIN_CASES, ids=case_id)
def test_homogeneity_monotonicity_euler(case):
    f = make_speed(*case)
    x, y = sample_cone_points(f, 100, seed=1)
    val = f(x, y)
    for c in (0.5, 2.0, 10.0):
        assert np.all(np.abs(f(c * x, c * y) - c * val) <= 1e-10 * (1 + np.abs(val)))
    fx, fy = f.dx(x, y), f.dy(x, y)
    assert np.all(fx > 0) and np.all(fy > 0)
    assert np.all(np.abs(val - (fx * x + fy * y)) <= 1e-9 * (1 + np.abs(val)))


@pytest.mark.parametrize("case", BUILTIN_CASES, ids=case_id)
def test_partials_match_finite_differences(case):
    f = make_speed(*case)
    x, y = sample_cone_points(f, 50, seed=7, margin=0.2)
    h = 1e-6
    fd_x = (f(x + h, y) - f(x - h, y)) / (2 * h)
    fd_y = (f(x, y + h) - f(x, y - h)) / (2 * h)
    fd_xx = (f(x + 1e-4, y) - 2 * f(x, y) + f(x - 1e-4, y)) / 1e-8
    assert np.allclose(f.dx(x, y), fd_x, rtol=1e-6, atol=1e-9)
    assert np.allclose(f.dy(x, y), fd_y, rtol=1e-6, atol=1e-9)
    assert np.allclose(f.dxx(x, y), fd_xx, rtol=1e-4, atol=1e-6)


def test_inverse_harmonic_top_index_is_mean():
    for n in (3, 4):
        f = make_speed("inverse_harmonic", n, n)
        assert f(0.4, 0.9) == pytest.approx(0.4 + (n - 1) * 0.9, rel=1e-14)


def test_domain_error_names_condition():
    f = make_speed("quotient", 3, 1)
    with pytest.raises(DomainError, match="denominator"):
        f(-3.0, 1.0)
    with pytest.raises(DomainError, match="y > 0"):
        make_speed("mean", 3)(1.0, -1.0)


@pytest.mark.parametrize("args", [("mean", 1), ("sk_root", 3, 0), ("sk_root", 3, 4), ("quotient", 3, 3),
                                  ("sk_root", 3, None), ("nope", 3, 1), ("mean", 2.5)])
def test_invalid_parameters(args):
    with pytest.raises(ParameterError):
        make_speed(*args)


def test_custom_speed_matches_builtin():
    f = make_speed("custom", 3, expr="(x + 2*y)/2")
    g = normalize(make_speed("mean", 3))
    assert f(0.3, 0.8) == pytest.approx(g(0.3, 0.8))
    assert f.dx(0.3, 0.8) == pytest.approx(0.5, rel=1e-8)
    assert f.is_normalized


def test_custom_rational_power():
    f = make_speed("custom", 3, expr="(y^2 + 2*x*y)^(1/2)")
    g = make_speed("sk_root", 3, 2)
    assert f(0.5, 1.5) == pytest.approx(g(0.5, 1.5), rel=1e-14)


@pytest.mark.parametrize("expr", ["x*y", "x + y + 1", "x - y", "(x*y)^(1/3)"])
def test_custom_validation_rejects(expr):
    with pytest.raises(SpeedValidationError):
        make_speed("custom", 3, expr=expr)


@pytest.mark.parametrize("src", ["", "x +", "z + y", "exp(x)", "__import__('os')", "x if y else 1", "True"])
def test_expression_parser_rejects(src):
    with pytest.raises(ExpressionError):
        Expression(src)


def test_expression_power_is_right_associative():
    assert Expression("2^3^2")(0, 0) == 2.0**9
    assert Expression("-x^2")(3.0, 0) == -9.0


def test_cone_membership_examples():
    r = cone_membership(3, CurvaturePair(1.0, 1.0))
    assert r.max_gamma_k == 3 and not r.on_boundary
    r = cone_membership(3, CurvaturePair(0.0, 1.0))
    assert r.max_gamma_k == 2 and r.on_boundary


def test_symmetric_reduced_matches_enumeration():
    from conftest import elementary

    for n in (3, 5):
        for l in range(1, n + 1):
            assert symmetric_reduced(n, l, -0.3, 1.1) == pytest.approx(elementary([-0.3] + [1.1] * (n - 1), l))


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 7), lam=st.floats(0.05, 5), x1=st.floats(-10, 10), dx=st.floats(0, 10))
def test_cone_membership_monotone_in_radial_curvature(n, lam, x1, dx):
    a = cone_membership(n, CurvaturePair(x1, lam))
    b = cone_membership(n, CurvaturePair(x1 + dx, lam))
    assert b.max_gamma_k >= a.max_gamma_k


@settings(max_examples=100, deadline=None)
@given(y=st.floats(0.1, 10), t=st.floats(0.01, 5), c=st.floats(0.1, 20),
       case=st.sampled_from([c for c in BUILTIN_CASES]))
def test_homogeneity_property(y, t, c, case):
    f = make_speed(*case)
    lb = f.x_lower_bound(y)
    x = (0.0 if not math.isfinite(lb) else lb) + t * y
    val = f(x, y)
    assert abs(f(c * x, c * y) - c * val) <= 1e-10 * (1 + abs(c * val))


def test_family_enum_values():
    assert {f.value for f in Family} == {"mean", "sk_root", "quotient", "inverse_harmonic", "custom"}
