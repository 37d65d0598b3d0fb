import math

import numpy as np
import pytest

from orthup.deficits import additive_deficit
from orthup.domain_model import OrthantSpec, ScaledGaussianMeasure, WeightExponents
from orthup.errors import DegenerateFieldError
from orthup.field_catalog import make_polygauss_random
from orthup.functionals import measure_integral
from orthup.poincare import (
    poincare_gap,
    poincare_stability_gap,
    polynomial_function,
    rayleigh_quotient,
)


def test_rayleigh_classical_gaussian():
    m = ScaledGaussianMeasure(WeightExponents((0.0,)), 1.0)
    f = polynomial_function({(1,): 1.0}, 1)
    assert rayleigh_quotient(f, m) == pytest.approx(1.0, rel=1e-12)


def test_rayleigh_weighted_value():
    m = ScaledGaussianMeasure(WeightExponents((2.0,)), 1.0)
    f = polynomial_function({(1,): 1.0}, 1)
    assert rayleigh_quotient(f, m) == pytest.approx(1.0 / (3 - 8 / math.pi), rel=1e-10)


def test_rayleigh_equality_on_free_coordinate():
    m = ScaledGaussianMeasure(WeightExponents((0.0, 2.0)), 2.0)
    f = polynomial_function({(1, 0): 1.0}, 2)
    assert rayleigh_quotient(f, m) == pytest.approx(0.25, rel=1e-12)


def test_poincare_gap_values():
    m = ScaledGaussianMeasure(WeightExponents((2.0,)), 1.0)
    f = polynomial_function({(1,): 1.0}, 1)
    g = poincare_gap(f, m)
    assert not g.degenerate
    assert g.gap == pytest.approx(8 / math.pi - 2, rel=1e-11)
    # affine functions of the free coordinates close the gap
    m2 = ScaledGaussianMeasure(WeightExponents((0.0, 2.0)), 1.0)
    f2 = polynomial_function({(1, 0): 2.0, (0, 0): -1.0}, 2)
    assert abs(poincare_gap(f2, m2).gap) < 1e-12


def test_poincare_gap_constant_degenerate():
    m = ScaledGaussianMeasure(WeightExponents((0.0,)), 1.0)
    f = polynomial_function({(0,): 3.0}, 1)
    g = poincare_gap(f, m)
    assert g.degenerate and g.gap == 0.0
    with pytest.raises(DegenerateFieldError):
        rayleigh_quotient(f, m)


def test_stability_gap_linear_field_vanishes():
    m = ScaledGaussianMeasure(WeightExponents((0.0, 2.0)), 1.0)
    f = polynomial_function({(1, 0): 1.5, (0, 0): 0.3}, 2)
    s = poincare_stability_gap(f, m)
    assert abs(s.lhs_gap) < 1e-12
    assert abs(s.rhs_bound) < 1e-12


def test_stability_gap_product_field():
    # f = x1 x2 under A=(0,2): the regression slope in x1 is E[x2] > 0
    m = ScaledGaussianMeasure(WeightExponents((0.0, 2.0)), 1.0)
    f = polynomial_function({(1, 1): 1.0}, 2)
    s = poincare_stability_gap(f, m)
    e_x2 = measure_integral(m, lambda x: x[..., 1])
    assert s.coefficients[1] == pytest.approx(e_x2, rel=1e-10)
    assert s.margin >= -1e-10


def test_stability_gap_no_free_axes():
    # A=(2): d is forced to zero, so rhs_bound is the subtracted variance term
    # and the stability margin is the plain gap minus that same term
    m = ScaledGaussianMeasure(WeightExponents((2.0,)), 1.0)
    f = polynomial_function({(1,): 1.0}, 1)
    s = poincare_stability_gap(f, m)
    var = (
        measure_integral(m, lambda x: x[..., 0] ** 2)
        - measure_integral(m, lambda x: x[..., 0]) ** 2
    )
    assert s.rhs_bound == pytest.approx(var, rel=1e-10)
    assert s.lhs_gap == pytest.approx(poincare_gap(f, m).gap, rel=1e-12)
    assert s.margin == pytest.approx(s.lhs_gap - var, rel=1e-10)
    assert s.margin >= 0


def test_cross_covariances_vanish():
    # product structure: distinct coordinates are uncorrelated under mu
    m = ScaledGaussianMeasure(WeightExponents((0.0, 2.0, 0.0)), 1.0)
    means = [measure_integral(m, lambda x, i=i: x[..., i]) for i in range(3)]
    for i in range(3):
        for j in range(i + 1, 3):
            cov = measure_integral(
                m, lambda x, i=i, j=j: (x[..., i] - means[i]) * (x[..., j] - means[j])
            )
            assert abs(cov) < 1e-12


def test_consistency_with_additive_deficit():
    # the proof-path route: additive(u, 1) equals the weighted Dirichlet form of
    # g = (u/w) e^{|x|^2/2} under x^{2 on walls} e^{-|x|^2}, i.e. the unnormalised
    # mu_{A, lambda=1/sqrt 2} Dirichlet integral times Z
    for n, k, seed in ((1, 1, 0), (2, 1, 3), (2, 2, 5), (3, 1, 7), (2, 1, 9)):
        spec = OrthantSpec(n, k)
        for j in range(4):
            fld = make_polygauss_random(spec, seed=seed + 31 * j)
            a = tuple(2.0 if i in spec.wall_axes else 0.0 for i in range(n))
            measure = ScaledGaussianMeasure(WeightExponents(a), 1.0 / math.sqrt(2.0))

            def g(x):
                v, gv = fld.residual(x)
                mono = np.ones(x.shape[:-1])
                for i in spec.wall_axes:
                    p = fld.wall_exponents[i]
                    if p > 1:
                        mono = mono * x[..., i] ** (p - 1)
                q = mono * v
                gq = mono[..., None] * gv
                for i in spec.wall_axes:
                    p = fld.wall_exponents[i]
                    if p > 1:
                        gq[..., i] += (p - 1) * (mono / x[..., i]) * v
                boost = np.exp(0.5 * np.sum(x * x, axis=-1))
                val = q * boost
                grad = (gq + x * q[..., None]) * boost[..., None]
                return val, grad

            dirichlet = measure_integral(
                measure, lambda x: np.sum(g(x)[1] ** 2, axis=-1), order=40
            )
            lhs = dirichlet * measure.normalization
            rhs = additive_deficit(fld, 1.0)
            assert lhs == pytest.approx(rhs, rel=1e-8), (n, k, seed, j)
