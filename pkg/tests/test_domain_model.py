import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthup.domain_model import (
    OrthantSpec,
    PolyGauss,
    ScaledGaussianMeasure,
    WeightExponents,
    dilate_field,
    field_eval,
    field_from_residual_descriptor,
    make_extremal,
    sphere_area,
)
from orthup.errors import DomainError, ParameterError


def test_orthant_spec_validation():
    spec = OrthantSpec(3, 2)
    assert list(spec.wall_axes) == [1, 2]
    assert list(spec.free_axes) == [0]
    with pytest.raises(ParameterError):
        OrthantSpec(0, 0)
    with pytest.raises(ParameterError):
        OrthantSpec(2, 3)
    with pytest.raises(ParameterError):
        OrthantSpec(2, -1)


def test_weight_exponents():
    w = WeightExponents((0.0, 2.0))
    assert w.positive_axes == (1,)
    assert w.zero_axes == (0,)
    assert w.total == 2.0
    with pytest.raises(ParameterError):
        WeightExponents((-1.0,))
    with pytest.raises(ParameterError):
        WeightExponents((0.5,)).require_integer()


def test_sphere_area_values():
    assert sphere_area(0) == pytest.approx(2.0, rel=1e-15)
    assert sphere_area(2) == pytest.approx(4 * math.pi, rel=1e-15)
    assert sphere_area(3) == pytest.approx(2 * math.pi**2, rel=1e-14)
    with pytest.raises(ParameterError):
        sphere_area(-1)


def test_make_extremal_1d():
    f = make_extremal(OrthantSpec(1, 1), 1.0, 0.5)
    u, g = field_eval(f, np.array([1.0]))
    assert u == pytest.approx(math.exp(-0.5), rel=1e-15)
    # u'(x) = (1 - x^2) e^{-x^2/2} vanishes at x = 1
    assert abs(g[0]) < 1e-15


def test_make_extremal_zero_field():
    f = make_extremal(OrthantSpec(2, 1), 0.0, 1.0)
    u, g = field_eval(f, np.array([0.3, 0.7]))
    assert u == 0.0
    assert np.all(g == 0.0)


def test_make_extremal_exact_form_terms():
    f = make_extremal(OrthantSpec(2, 2), 2.0, 1.0)
    assert f.exact_form is not None
    (rate, poly), = f.exact_form.parts
    assert rate == pytest.approx(2.0)
    assert poly == {(1, 1): 2.0}
    u, _ = field_eval(f, np.array([1.0, 1.0]))
    assert u == pytest.approx(2.0 * math.exp(-2.0), rel=1e-15)


def test_make_extremal_rejects_bad_beta():
    with pytest.raises(ParameterError):
        make_extremal(OrthantSpec(1, 1), 1.0, 0.0)


def test_field_eval_gradient_product_rule():
    # u = x1 x2 e^{-|x|^2/2} on the half plane: gradient vanishes at (1,1)
    spec = OrthantSpec(2, 1)
    v = PolyGauss.from_poly(2, 1.0, {(1, 0): 1.0})
    f = field_from_residual_descriptor(spec, (0, 1), v)
    u, g = field_eval(f, np.array([1.0, 1.0]))
    assert u == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert np.allclose(g, 0.0, atol=1e-15)


def test_field_eval_rejects_wall_points():
    f = make_extremal(OrthantSpec(2, 1), 1.0, 0.5)
    with pytest.raises(DomainError):
        field_eval(f, np.array([0.5, 0.0]))
    with pytest.raises(DomainError):
        field_eval(f, np.array([0.5, -0.2]))


def test_extremal_vanishes_at_walls():
    f = make_extremal(OrthantSpec(2, 2), 1.0, 0.5)
    sup = abs(field_eval(f, np.array([1.0, 1.0]))[0])
    u, _ = field_eval(f, np.array([1e-8, 1.0]))
    assert abs(u) < 1e-7 * sup


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=-2.0, max_value=2.0),
    st.floats(min_value=0.1, max_value=1.5),
    st.floats(min_value=0.05, max_value=2.5),
    st.floats(min_value=-2.5, max_value=2.5),
)
def test_field_matches_descriptor_pointwise(c, beta, xw, xf):
    f = make_extremal(OrthantSpec(2, 1), c, beta)
    x = np.array([xf, xw])
    u, _ = field_eval(f, x)
    assert u == pytest.approx(f.exact_form.eval(x[None, :])[0], rel=1e-12, abs=1e-300)


def test_descriptor_algebra_closure():
    d = PolyGauss.from_poly(2, 1.0, {(1, 1): 2.0, (0, 0): 1.0})
    e = PolyGauss.from_poly(2, 2.0, {(2, 0): 1.0})
    s = d.add(e, scale=3.0)
    assert len(s.parts) == 2  # distinct rates stay separate components
    p = d.mul(e)
    assert p.parts[0][0] == pytest.approx(3.0)  # rates add
    dd = d.diff(0)
    # d/dx1 of (2 x1 x2 + 1) e^{-|x|^2/2} = (2 x2 - x1 (2 x1 x2 + 1)) e^{...}
    x = np.array([[0.7, 0.3]])
    expect = (2 * 0.3 - 0.7 * (2 * 0.7 * 0.3 + 1.0)) * math.exp(-0.5 * (0.7**2 + 0.3**2))
    assert dd.eval(x)[0] == pytest.approx(expect, rel=1e-14)


def test_descriptor_grad_matches_diff():
    d = PolyGauss.from_poly(2, 1.4, {(2, 1): 0.7, (0, 1): -0.4})
    x = np.array([[0.9, 1.3], [0.2, 0.5]])
    g = d.grad_eval(x)
    for i in range(2):
        assert np.allclose(g[:, i], d.diff(i).eval(x), rtol=1e-13)


def test_dilation_rescales_descriptor():
    f = make_extremal(OrthantSpec(1, 1), 1.0, 0.5)
    f2 = dilate_field(f, 2.0)
    x = np.array([0.8])
    u2, _ = field_eval(f2, x)
    u, _ = field_eval(f, x / 2.0)
    assert u2 == pytest.approx(u, rel=1e-14)


def test_measure_normalization_closed_form():
    m = ScaledGaussianMeasure(WeightExponents((0.0, 2.0)), 1.5)
    lam = 1.5
    sigma = lam * math.sqrt(2.0)
    # full axis: lam sqrt(2 pi); half axis with a=2: sigma^3 Gamma(3/2)/2
    expect = (lam * math.sqrt(2 * math.pi)) * (sigma**3 * math.gamma(1.5) / 2.0)
    assert m.normalization == pytest.approx(expect, rel=1e-12)
    with pytest.raises(ParameterError):
        ScaledGaussianMeasure(WeightExponents((0.0,)), 0.0)
