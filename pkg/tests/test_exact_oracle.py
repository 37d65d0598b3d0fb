import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthup.domain_model import OrthantSpec, PolyGauss, field_from_residual_descriptor, make_extremal
from orthup.errors import CapabilityError, ParameterError
from orthup.exact_oracle import (
    descriptor_dirichlet,
    descriptor_integral,
    full_moment,
    gaussian_inner_profile,
    half_moment,
    hardy_denominator_integral,
)
from orthup.field_catalog import make_polygauss_random
from orthup.functionals import core_functionals

SQPI = math.sqrt(math.pi)


def test_half_moment_values():
    assert half_moment(0, 1.0) == pytest.approx(SQPI / 2, rel=1e-15)
    assert half_moment(2, 1.0) == pytest.approx(SQPI / 4, rel=1e-15)
    assert half_moment(3, 0.5) == pytest.approx(2.0, rel=1e-14)
    with pytest.raises(ParameterError):
        half_moment(2, 0.0)
    with pytest.raises(ParameterError):
        half_moment(-1, 1.0)


def test_full_moment_values():
    assert full_moment(1, 1.0) == 0.0
    assert full_moment(2, 1.0) == pytest.approx(SQPI / 2, rel=1e-15)
    assert full_moment(4, 1.0) == pytest.approx(3 * SQPI / 4, rel=1e-15)


def test_descriptor_integral_examples():
    # u^2 for the 1-d extremal with beta=1/2: x^2 e^{-x^2}
    d = PolyGauss.from_poly(1, 2.0, {(2,): 1.0})
    spec = OrthantSpec(1, 1)
    assert descriptor_integral(d, spec) == pytest.approx(SQPI / 4, rel=1e-14)
    assert descriptor_integral(d, spec, extra=(2,)) == pytest.approx(
        3 * SQPI / 8, rel=1e-14
    )
    # odd full-line factor kills the integral
    d2 = PolyGauss.from_poly(2, 2.0, {(1, 1): 1.0})
    assert descriptor_integral(d2, OrthantSpec(2, 1)) == 0.0


def test_descriptor_dirichlet_examples():
    spec = OrthantSpec(1, 1)
    u = make_extremal(spec, 1.0, 0.5)
    assert descriptor_dirichlet(u.exact_form, spec) == pytest.approx(3 * SQPI / 8, rel=1e-14)
    spec2 = OrthantSpec(2, 1)
    d = PolyGauss.from_poly(2, 1.0, {(1, 1): 1.0})
    assert descriptor_dirichlet(d, spec2) == pytest.approx(3 * math.pi / 8, rel=1e-14)
    assert descriptor_dirichlet(PolyGauss.zero(2), spec2) == 0.0


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=-3, max_value=3), st.integers(min_value=0, max_value=40))
def test_descriptor_integral_linearity(alpha, seed):
    rng = np.random.default_rng(seed)
    spec = OrthantSpec(2, 1)
    polys = []
    for _ in range(2):
        poly = {
            (int(i), int(j)): float(rng.uniform(-1, 1))
            for i in range(3)
            for j in range(3)
        }
        polys.append(PolyGauss.from_poly(2, 1.0, poly))
    d1, d2 = polys
    lhs = descriptor_integral(d1.scale(alpha).add(d2), spec)
    rhs = alpha * descriptor_integral(d1, spec) + descriptor_integral(d2, spec)
    assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-13)


def test_backend_agreement_on_catalogue():
    for n, k, seed in ((1, 1, 3), (2, 1, 5), (2, 2, 8), (3, 2, 11)):
        fld = make_polygauss_random(OrthantSpec(n, k), seed=seed)
        a = core_functionals(fld, "oracle")
        b = core_functionals(fld, "quadrature")
        for x, y in ((a.N, b.N), (a.M, b.M), (a.E, b.E)):
            assert y == pytest.approx(x, rel=1e-10), (n, k)


def test_descriptor_gradient_matches_field_eval():
    from orthup.domain_model import field_eval

    fld = make_polygauss_random(OrthantSpec(2, 1), seed=21)
    rng = np.random.default_rng(0)
    x = np.column_stack([rng.normal(size=50), rng.uniform(0.05, 2.5, size=50)])
    _, grad = field_eval(fld, x)
    grad_desc = fld.exact_form.grad_eval(x)
    assert np.allclose(grad, grad_desc, rtol=1e-12, atol=1e-12)


def test_hardy_denominator_closed_form_1d():
    # u = x e^{-x^2/2}: integral u^2/x^2 = integral e^{-x^2} = sqrt(pi)/2
    spec = OrthantSpec(1, 1)
    u = make_extremal(spec, 1.0, 0.5)
    usq = u.exact_form.mul(u.exact_form)
    assert hardy_denominator_integral(usq, spec) == pytest.approx(SQPI / 2, rel=1e-13)


def test_hardy_denominator_divergence_guard():
    spec = OrthantSpec(1, 0)
    d = PolyGauss.from_poly(1, 2.0, {(0,): 1.0})
    with pytest.raises(CapabilityError):
        hardy_denominator_integral(d, spec)


def test_hardy_denominator_vs_quadrature_2d():
    # cross-check the tau-representation closed form against direct quadrature
    from orthup.functionals import _hardy_denominator_quadrature
    from orthup.quadrature import DEFAULT_CONFIG

    fld = make_polygauss_random(OrthantSpec(2, 1), seed=4)
    usq = fld.exact_form.mul(fld.exact_form)
    exact = hardy_denominator_integral(usq, fld.spec)
    quad = _hardy_denominator_quadrature(fld, 48, DEFAULT_CONFIG)
    assert quad == pytest.approx(exact, rel=1e-10)


def test_gaussian_inner_profile_matches_direct():
    fld = make_polygauss_random(OrthantSpec(2, 1), seed=9)
    prof = gaussian_inner_profile(fld.exact_form, fld.spec, (0, 1))
    for beta in (0.3, 1.0, 4.2):
        g = PolyGauss.from_poly(2, 2.0 * beta, {(0, 1): 1.0})
        direct = descriptor_integral(fld.exact_form.mul(g), fld.spec)
        assert prof(beta) == pytest.approx(direct, rel=1e-13)
