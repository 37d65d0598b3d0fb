import math

import numpy as np
import pytest

from orthup.deficits import (
    additive_deficit,
    deficit_report,
    full_space_deficits,
    identity_residual,
    identity_rhs,
    optimal_alpha,
    rho1,
)
from orthup.domain_model import (
    OrthantSpec,
    PolyGauss,
    field_from_residual_descriptor,
    make_extremal,
)
from orthup.errors import CapabilityError, DegenerateFieldError, ParameterError
from orthup.field_catalog import make_polygauss_random, make_sharp_example
from orthup.functionals import core_functionals
from orthup.lifting import _residual_descriptor

SQPI = math.sqrt(math.pi)


def test_rho1_vanishes_on_extremals():
    for n, k in ((1, 1), (2, 1), (3, 2)):
        for beta in (0.25, 1.0):
            f = make_extremal(OrthantSpec(n, k), 1.7, beta)
            scale = core_functionals(f, "oracle").N
            assert abs(rho1(f)) <= 1e-10 * scale


def test_rho1_sharp_example_value():
    u = make_sharp_example(OrthantSpec(2, 1))
    assert rho1(u) == pytest.approx(math.pi / 8, rel=1e-12)


def test_rho1_homogeneity():
    fld = make_polygauss_random(OrthantSpec(2, 1), seed=12)
    doubled = field_from_residual_descriptor(
        fld.spec, fld.wall_exponents, _residual_descriptor(fld).scale(2.0)
    )
    assert rho1(doubled) == pytest.approx(4 * rho1(fld), rel=1e-12)


def test_additive_deficit_examples():
    f = make_extremal(OrthantSpec(1, 1), 1.0, 0.5)
    assert additive_deficit(f, 1.0) == pytest.approx(0.0, abs=1e-14)
    assert additive_deficit(f, math.sqrt(2.0)) == pytest.approx(3 * SQPI / 16, rel=1e-13)
    with pytest.raises(ParameterError):
        additive_deficit(f, 0.0)


def test_identity_examples():
    f = make_extremal(OrthantSpec(2, 1), 1.0, 0.5)
    # alpha matched to beta: the residual of u/w is constant, rhs vanishes
    assert identity_rhs(f, 1.0) == pytest.approx(0.0, abs=1e-12)
    zero = make_extremal(OrthantSpec(2, 1), 0.0, 1.0)
    assert identity_rhs(zero, 1.0) == 0.0


def test_identity_residual_random_fields():
    for n, k, seed in ((1, 1, 1), (2, 1, 2), (2, 2, 3), (3, 1, 4)):
        fld = make_polygauss_random(OrthantSpec(n, k), seed=seed)
        for alpha in (0.5, 1.0, 2.0):
            add = additive_deficit(fld, alpha)
            res = identity_residual(fld, alpha, order=24)
            assert abs(res) <= 1e-8 * (1.0 + abs(add)), (n, k, alpha)


def test_identity_rhs_needs_wall_exponents():
    spec = OrthantSpec(1, 1)
    v = PolyGauss.from_poly(1, 1.0, {(0,): 1.0})
    f = field_from_residual_descriptor(spec, (0,), v)  # does not vanish on the wall
    with pytest.raises(CapabilityError):
        identity_rhs(f, 1.0)


def test_additive_nonnegative_on_suite():
    for seed in range(8):
        fld = make_polygauss_random(OrthantSpec(2, 2), seed=seed)
        core = core_functionals(fld, "oracle")
        scale = max(core.N, core.M, core.E)
        for alpha in (0.5, 1.0, 2.0):
            assert additive_deficit(fld, alpha) >= -1e-8 * scale


def test_optimal_alpha_examples():
    f = make_extremal(OrthantSpec(1, 1), 1.0, 0.5)
    assert optimal_alpha(f) == pytest.approx(1.0, rel=1e-13)
    g = make_extremal(OrthantSpec(1, 1), 1.0, 1.0)
    assert optimal_alpha(g) == pytest.approx(1 / math.sqrt(2), rel=1e-13)
    u = make_sharp_example(OrthantSpec(2, 1))
    assert optimal_alpha(u) == pytest.approx(1.0, rel=1e-13)
    assert 0.5 * additive_deficit(u, 1.0) == pytest.approx(rho1(u), rel=1e-13)
    with pytest.raises(DegenerateFieldError):
        optimal_alpha(make_extremal(OrthantSpec(1, 1), 0.0, 1.0))


def test_envelope_via_golden_section():
    # rho1 = (1/2) min over alpha of the additive deficit; check the closed-form
    # alpha* against a direct golden-section minimisation over log alpha
    fld = make_polygauss_random(OrthantSpec(2, 1), seed=77)
    core = core_functionals(fld, "oracle")

    def additive(t):
        a = math.exp(t)
        return a**2 * core.E + core.M / a**2 - 4 * core.N

    phi = (math.sqrt(5) - 1) / 2
    a, b = math.log(1e-3), math.log(1e3)
    x1, x2 = b - phi * (b - a), a + phi * (b - a)
    f1, f2 = additive(x1), additive(x2)
    while b - a > 1e-12:
        if f1 > f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + phi * (b - a)
            f2 = additive(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - phi * (b - a)
            f1 = additive(x1)
    golden_min = additive(0.5 * (a + b))
    closed = additive(math.log(optimal_alpha(fld)))
    assert golden_min == pytest.approx(closed, rel=1e-9)
    assert 0.5 * closed == pytest.approx(rho1(fld), rel=1e-9)


def test_full_space_deficits_examples():
    spec = OrthantSpec(1, 0)
    gaussian = make_extremal(spec, 1.0, 0.5)
    d1, d2, dist = full_space_deficits(gaussian)
    assert abs(d1) < 1e-12 and abs(d2) < 1e-12 and dist < 1e-10

    hermite1 = field_from_residual_descriptor(
        spec, (0,), PolyGauss.from_poly(1, 1.0, {(1,): 1.0})
    )
    d1, d2, dist = full_space_deficits(hermite1)
    assert d1 == pytest.approx(SQPI / 2, rel=1e-12)
    # Theorem-A-type chain with the computed distance
    n_val = core_functionals(hermite1, "oracle").N
    assert d2 >= 1 * n_val * dist + dist**2 - 1e-7 * max(1.0, d2)

    zero = make_extremal(spec, 0.0, 1.0)
    assert full_space_deficits(zero) == (0.0, 0.0, 0.0)


def test_full_space_requires_no_walls():
    with pytest.raises(CapabilityError):
        full_space_deficits(make_extremal(OrthantSpec(2, 1), 1.0, 0.5))


def test_theorem_a_chain_random_suite():
    for n in (1, 2, 3):
        spec = OrthantSpec(n, 0)
        for seed in range(4):
            fld = make_polygauss_random(spec, seed=100 + seed)
            d1, d2, dist = full_space_deficits(fld)
            core = core_functionals(fld, "oracle")
            scale = max(core.N, math.sqrt(core.E * core.M))
            assert d1 >= dist - 1e-7 * scale
            assert d2 >= n * core.N * dist + dist**2 - 1e-7 * scale**2


def test_deficit_report_serializes():
    rep = deficit_report(make_sharp_example(OrthantSpec(2, 1)), alpha=1.0)
    d = rep.to_dict()
    assert d["core"]["nk"] == [2, 1]
    assert d["residual"] == pytest.approx(0.0, abs=1e-12)
    assert d["rho1"] == pytest.approx(math.pi / 8, rel=1e-12)
