import math

import numpy as np
import pytest

from orthup.domain_model import OrthantSpec, make_extremal, sphere_area
from orthup.errors import CapabilityError, DomainError, ParameterError
from orthup.field_catalog import make_bump, make_polygauss_random, make_sharp_example
from orthup.functionals import core_functionals
from orthup.lifting import (
    LiftPlan,
    lifted_eval,
    lifted_gradient,
    verify_dilation_pairing,
    verify_gradient_lift,
    verify_mass_lift,
    verify_moment_lift,
)

PI = math.pi


def plan_ones(spec):
    return LiftPlan(spec, tuple(1 if i in spec.wall_axes else 0 for i in range(spec.n)))


def test_lift_plan_geometry():
    spec = OrthantSpec(2, 1)
    plan = LiftPlan(spec, (0, 2))
    assert plan.lifted_dim == 6
    assert plan.sphere_factor == pytest.approx(sphere_area(4), rel=1e-14)
    with pytest.raises(ParameterError):
        LiftPlan(spec, (1, 1))  # multiplicity on a free axis


def test_lifted_eval_composition():
    spec = OrthantSpec(1, 1)
    f = make_extremal(spec, 1.0, 0.5)
    plan = plan_ones(spec)
    val = lifted_eval(f, plan, np.array([1.0, 0.0, 0.0]))
    assert val == pytest.approx(math.exp(-0.5), rel=1e-14)
    # block-norm invariance
    assert lifted_eval(f, plan, np.array([0.0, 1.0, 0.0])) == pytest.approx(val, rel=1e-14)
    with pytest.raises(DomainError):
        lifted_eval(f, plan, np.array([0.0, 0.0, 0.0]))


def test_lifted_eval_uses_residual():
    # u = x1 x2 e^{-|x|^2/2}: residual v = x1 e^{-|x|^2/2}
    spec = OrthantSpec(2, 1)
    u = make_sharp_example(spec)
    plan = plan_ones(spec)
    z = np.array([1.0, 0.0, 0.0, 2.0])
    assert lifted_eval(u, plan, z) == pytest.approx(math.exp(-2.5), rel=1e-13)


def test_gradient_norm_transport():
    spec = OrthantSpec(2, 1)
    fld = make_polygauss_random(spec, seed=13)
    plan = plan_ones(spec)
    rng = np.random.default_rng(5)
    z = np.column_stack(
        [rng.normal(size=100)] + [rng.normal(size=100) for _ in range(3)]
    )
    # keep block norms well away from zero
    z[:, 1:] += np.sign(z[:, 1:]) * 0.2
    g = lifted_gradient(fld, plan, z)
    lifted_sq = np.sum(g * g, axis=-1)
    x = np.empty((100, 2))
    x[:, 0] = z[:, 0]
    x[:, 1] = np.sqrt(np.sum(z[:, 1:] ** 2, axis=-1))
    _, gv = fld.residual(x)
    orthant_sq = np.sum(gv * gv, axis=-1)
    assert np.allclose(lifted_sq, orthant_sq, rtol=1e-10)


def test_mass_lift_extremal_values():
    spec = OrthantSpec(1, 1)
    f = make_extremal(spec, 1.0, 0.5)
    chk = verify_mass_lift(f, plan_ones(spec))
    assert chk.lhs == pytest.approx(PI**1.5, rel=1e-13)
    assert chk.rhs == pytest.approx(4 * PI * math.sqrt(PI) / 4, rel=1e-13)
    assert chk.gap < 1e-13
    assert chk.cartesian_gap is not None and chk.cartesian_gap < 1e-9


def test_mass_lift_zero_field():
    spec = OrthantSpec(1, 1)
    f = make_extremal(spec, 0.0, 0.5)
    chk = verify_mass_lift(f, plan_ones(spec))
    assert chk.lhs == 0.0 and chk.rhs == 0.0 and chk.gap == 0.0


def test_moment_lift_extremal_values():
    spec = OrthantSpec(1, 1)
    f = make_extremal(spec, 1.0, 0.5)
    plan = plan_ones(spec)
    chk0 = verify_moment_lift(f, plan, 0.0)
    mass = verify_mass_lift(f, plan)
    assert chk0.lhs == pytest.approx(mass.lhs, rel=1e-14)
    chk1 = verify_moment_lift(f, plan, 1.0)
    assert chk1.lhs == pytest.approx(1.5 * PI**1.5, rel=1e-13)
    assert chk1.gap < 1e-13
    chk2 = verify_moment_lift(f, plan, 2.0)
    assert chk2.lhs == pytest.approx(3.75 * PI**1.5, rel=1e-13)
    with pytest.raises(ParameterError):
        verify_moment_lift(f, plan, -1.0)


def test_mass_lift_bump():
    spec = OrthantSpec(1, 1)
    bump = make_bump(spec, [(1.0, 2.0)])
    chk = verify_mass_lift(bump, plan_ones(spec))
    assert chk.gap < 1e-6
    assert chk.cartesian_gap is not None and chk.cartesian_gap < 1e-6


def test_gradient_lift_bump_all_cases():
    for n, k in ((1, 1), (2, 1)):
        spec = OrthantSpec(n, k)
        box = [(1.0, 2.0)] * n
        for l in (1, 2):
            p = tuple(l if i in spec.wall_axes else 0 for i in range(n))
            bump = make_bump(spec, box, wall_exponents=p)
            plan = LiftPlan(spec, p)
            for b in (0, 1):
                chk = verify_gradient_lift(bump, plan, b, cartesian=False)
                assert chk.gap < 1e-6, (n, k, l, b, chk.gap)


def test_gradient_lift_guards():
    spec = OrthantSpec(1, 1)
    f = make_extremal(spec, 1.0, 0.5)
    plan = plan_ones(spec)
    with pytest.raises(CapabilityError):
        verify_gradient_lift(f, plan, 0)  # not a bump
    bump = make_bump(spec, [(1.0, 2.0)])
    with pytest.raises(ParameterError):
        verify_gradient_lift(bump, plan, 2)


def test_dilation_pairing_extremal():
    spec = OrthantSpec(1, 1)
    f = make_extremal(spec, 1.0, 0.5)
    plan = plan_ones(spec)
    chk = verify_dilation_pairing(f, plan)
    n_val = core_functionals(f, "oracle").N
    expect = -0.5 * (1 + 2 * 1) * plan.sphere_factor * n_val
    assert chk.lhs == pytest.approx(expect, rel=1e-8)
    assert chk.gap < 1e-8


def test_dilation_pairing_bump():
    spec = OrthantSpec(1, 1)
    bump = make_bump(spec, [(1.0, 2.0)])
    chk = verify_dilation_pairing(bump, plan_ones(spec))
    assert chk.gap < 1e-6


def test_capability_limits():
    spec = OrthantSpec(3, 2)
    f = make_extremal(spec, 1.0, 0.5)
    plan = LiftPlan(spec, (0, 2, 2))
    with pytest.raises(CapabilityError):
        # lifted dimension 3 + 2*4 = 11 over budget
        verify_mass_lift(
            type(f)(
                spec=f.spec,
                wall_exponents=(0, 2, 2),
                residual=f.residual,
                decay_rate=f.decay_rate,
                exact_form=f.exact_form,
            ),
            plan,
        )
    # mismatched multiplicities
    with pytest.raises(CapabilityError):
        verify_mass_lift(f, LiftPlan(spec, (0, 2, 1)))


def test_l2_mass_lift_oracle():
    # u = x^2 e^{-|x|^2/2} with l=2: both sides Gamma-exact
    from orthup.suites import _squared_wall_gaussian

    spec = OrthantSpec(2, 2)
    sq = _squared_wall_gaussian(spec)
    plan = LiftPlan(spec, (2, 2))
    chk = verify_mass_lift(sq, plan, cartesian=False)
    assert chk.gap < 1e-12
