"""Lifting calculus between an orthant and its covering Euclidean space.

A residual v on the orthant lifts to  tv(x', y) = v(x', |y_1|, ..., |y_k|)
on R^{n + 2|l|}, with one block y_i of dimension 2 l_i + 1 per wall axis.
Integrals of tv reduce to orthant integrals against the monomial weight
prod x_i^{2 l_i} times sphere-area factors, and the verification operations
here evaluate both sides of the mass, weighted-moment, weighted-gradient and
dilation-pairing formulas by independent routes:

* the "lifted" side by block-radial reduction (and, for lifted dimension at
  most 4, by a full Cartesian tensor grid, which touches the sphere factors
  and the radial calculus not at all);
* the orthant side through the factored field u = (prod x_i^{l_i}) v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import exact_oracle as oracle
from .domain_model import OrthantSpec, PolyGauss, TestField, field_eval, sphere_area
from .errors import CapabilityError, DomainError, ParameterError
from .functionals import field_integral
from .quadrature import (
    QuadratureGrid,
    composite_panel_axis,
    hermite_rule,
    tensor_integrate,
)

__all__ = [
    "LiftPlan",
    "LiftCheck",
    "lifted_eval",
    "lifted_gradient",
    "verify_mass_lift",
    "verify_moment_lift",
    "verify_gradient_lift",
    "verify_dilation_pairing",
]

_MAX_LIFTED_DIM = 8
_CART_MAX_DIM = 4


@dataclass(frozen=True)
class LiftPlan:
    """Per-axis lift multiplicities l_i (zero off the wall axes)."""

    spec: OrthantSpec
    l: tuple

    def __post_init__(self):
        l = tuple(int(v) for v in self.l)
        if len(l) != self.spec.n or any(v < 0 for v in l):
            raise ParameterError(f"bad lift multiplicities {l}")
        for i in self.spec.free_axes:
            if l[i] != 0:
                raise ParameterError("lift multiplicities must vanish off the wall axes")
        object.__setattr__(self, "l", l)

    @property
    def total(self) -> int:
        return sum(self.l)

    @property
    def lifted_dim(self) -> int:
        return self.spec.n + 2 * self.total

    @property
    def block_slices(self) -> tuple:
        """Coordinate slices of the lifted space: free axes, then one block per wall axis."""
        out = []
        pos = self.spec.n - self.spec.k
        for i in self.spec.wall_axes:
            size = 2 * self.l[i] + 1
            out.append((i, slice(pos, pos + size)))
            pos += size
        return tuple(out)

    @property
    def sphere_factor(self) -> float:
        out = 1.0
        for i in self.spec.wall_axes:
            out *= sphere_area(2 * self.l[i])
        return out


def _project(plan: LiftPlan, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    nfree = plan.spec.n - plan.spec.k
    x = np.empty(z.shape[:-1] + (plan.spec.n,))
    x[..., :nfree] = z[..., :nfree]
    for i, sl in plan.block_slices:
        x[..., i] = np.sqrt(np.sum(z[..., sl] ** 2, axis=-1))
    return x


def _check_plan(field: TestField, plan: LiftPlan):
    if plan.spec != field.spec:
        raise ParameterError("plan and field live on different orthants")
    for i in field.spec.wall_axes:
        if plan.l[i] != field.wall_exponents[i]:
            raise CapabilityError(
                "lift multiplicities must match the field's wall exponents "
                f"(l={plan.l}, p={field.wall_exponents})"
            )


def lifted_eval(field: TestField, plan: LiftPlan, z: np.ndarray) -> np.ndarray:
    """tv(z) = v at the projected orthant point (the residual, not u)."""
    z = np.asarray(z, dtype=float)
    squeeze = z.ndim == 1
    if squeeze:
        z = z[None, :]
    if z.shape[-1] != plan.lifted_dim:
        raise ParameterError(f"points must have dimension {plan.lifted_dim}")
    x = _project(plan, z)
    if not (x[..., list(field.spec.wall_axes)] > 0).all():
        raise DomainError("lifted_eval needs |y_i| > 0 for every block")
    v, _ = field.residual(x)
    return float(v[0]) if squeeze else v


def lifted_gradient(field: TestField, plan: LiftPlan, z: np.ndarray) -> np.ndarray:
    """Chain-rule gradient of tv: block components are (d_i v) z_j / |y_i|."""
    z = np.asarray(z, dtype=float)
    squeeze = z.ndim == 1
    if squeeze:
        z = z[None, :]
    x = _project(plan, z)
    if not (x[..., list(field.spec.wall_axes)] > 0).all():
        raise DomainError("lifted_gradient needs |y_i| > 0 for every block")
    _, gv = field.residual(x)
    out = np.empty(z.shape)
    nfree = field.spec.n - field.spec.k
    out[..., :nfree] = gv[..., :nfree]
    for i, sl in plan.block_slices:
        out[..., sl] = gv[..., i][..., None] * z[..., sl] / x[..., i][..., None]
    return out[0] if squeeze else out


@dataclass(frozen=True)
class LiftCheck:
    """Both sides of one integration formula plus the relative gap."""

    lhs: float
    rhs: float
    gap: float
    cartesian_lhs: Optional[float] = None
    cartesian_gap: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "cartesian_lhs": self.cartesian_lhs,
            "cartesian_gap": self.cartesian_gap,
        }


def _gap(lhs: float, rhs: float) -> float:
    return abs(lhs - rhs) / (1.0 + abs(rhs))


def _residual_descriptor(field: TestField) -> PolyGauss:
    """Descriptor of v obtained by dividing u's descriptor by the wall monomial."""
    if field.exact_form is None:
        raise CapabilityError("field carries no exact descriptor")
    p = field.wall_exponents
    parts = []
    for rate, poly in field.exact_form.parts:
        q = {}
        for g, c in poly.items():
            h = list(g)
            for i in field.spec.wall_axes:
                h[i] -= p[i]
                if h[i] < 0:
                    raise CapabilityError("descriptor is not divisible by the wall monomial")
            q[tuple(h)] = c
        parts.append((rate, q))
    return PolyGauss(field.spec.n, tuple(parts))


def _radial_weight_exponents(plan: LiftPlan) -> tuple:
    return tuple(2 * plan.l[i] for i in range(plan.spec.n))


def _radial_integral(field: TestField, plan: LiftPlan, kind: str, power: float = 0.0) -> float:
    """S * integral_orthant F(v) prod x^{2 l_i} dx by the block-radial reduction.

    kind selects F: 'mass' -> v^2 (times |x|^{2 power} for the moment formula),
    'grad' -> |x|^{2 power} |grad v|^2, 'pair' -> v (x . grad v).
    Descriptor-backed fields with integer power go through the Gamma oracle;
    everything else is quadrature with the monomial written into the integrand.
    """
    s_fac = plan.sphere_factor
    wexp = _radial_weight_exponents(plan)
    if field.exact_form is not None and float(power).is_integer():
        vd = _residual_descriptor(field)
        ip = int(power)
        if kind == "mass":
            base = vd.mul(vd)
            return s_fac * _poly_radial_moment(base, field.spec, wexp, ip)
        if kind == "grad":
            total = 0.0
            for i in range(field.spec.n):
                di = vd.diff(i)
                total += _poly_radial_moment(di.mul(di), field.spec, wexp, ip)
            return s_fac * total
        if kind == "pair":
            total = 0.0
            for i in range(field.spec.n):
                prod = vd.mul(vd.diff(i)).mul_monomial(_unit(field.spec.n, i))
                total += oracle.descriptor_integral(prod, field.spec, extra=wexp)
            return s_fac * total
        raise ParameterError(f"unknown kind {kind!r}")

    def integrand(x: np.ndarray) -> np.ndarray:
        v, gv = field.residual(x)
        mono = np.ones(x.shape[:-1])
        for i, e in enumerate(wexp):
            if e:
                mono = mono * x[..., i] ** e
        if kind == "mass":
            core = np.asarray(v) ** 2
        elif kind == "grad":
            core = np.sum(np.asarray(gv) ** 2, axis=-1)
        elif kind == "pair":
            core = np.asarray(v) * np.sum(x * np.asarray(gv), axis=-1)
        else:
            raise ParameterError(f"unknown kind {kind!r}")
        if power:
            core = core * np.sum(x * x, axis=-1) ** power
        return core * mono

    return s_fac * field_integral(field, integrand)


def _unit(n: int, i: int) -> tuple:
    out = [0] * n
    out[i] = 1
    return tuple(out)


def _poly_radial_moment(d: PolyGauss, spec: OrthantSpec, wexp: tuple, power: int) -> float:
    """integral d(x) |x|^{2 power} x^{wexp} over the orthant, oracle-exact."""
    if power == 0:
        return oracle.descriptor_integral(d, spec, extra=wexp)
    total = 0.0
    # |x|^{2p} expanded one power at a time keeps the multinomial bookkeeping trivial
    for i in range(spec.n):
        sq = d.mul_monomial(tuple(2 if j == i else 0 for j in range(spec.n)))
        total += _poly_radial_moment(sq, spec, wexp, power - 1)
    return total


def _cartesian_grid(field: TestField, plan: LiftPlan, order: int) -> QuadratureGrid:
    if field.is_bump:
        rules = []
        for i in field.spec.free_axes:
            lo, hi = field.support_box[i]
            rules.append(composite_panel_axis(24, np.linspace(lo, hi, 4)))
        for i, sl in plan.block_slices:
            hi = field.support_box[i][1]
            # 4 panels per block coordinate; 0 lands on a panel edge, never a node
            rules.extend(
                composite_panel_axis(18, np.linspace(-hi, hi, 5))
                for _ in range(sl.stop - sl.start)
            )
        return QuadratureGrid(tuple(rules), (1.0,) * plan.lifted_dim, plain=True)
    sigma = 1.0 / math.sqrt(field.decay_rate)
    rule = hermite_rule(order if order % 2 == 0 else order + 1)
    return QuadratureGrid((rule,) * plan.lifted_dim, (sigma,) * plan.lifted_dim, plain=True)


def _cartesian_integral(
    field: TestField, plan: LiftPlan, kind: str, power: float = 0.0, order: int = 40
) -> float:
    grid = _cartesian_grid(field, plan, order)

    def integrand(z: np.ndarray) -> np.ndarray:
        x = _project(plan, z)
        v, gv = field.residual(x)
        if kind == "mass":
            core = np.asarray(v) ** 2
        elif kind == "grad":
            core = np.sum(np.asarray(gv) ** 2, axis=-1)
        elif kind == "pair":
            # z . grad tv collapses to x . grad v at the projected point
            core = np.asarray(v) * np.sum(x * np.asarray(gv), axis=-1)
        else:
            raise ParameterError(f"unknown kind {kind!r}")
        if power:
            core = core * np.sum(z * z, axis=-1) ** power
        return core

    return tensor_integrate(grid, integrand)


def _budget(plan: LiftPlan):
    if plan.lifted_dim > _MAX_LIFTED_DIM:
        raise CapabilityError(
            f"lifted dimension {plan.lifted_dim} exceeds the grid budget ({_MAX_LIFTED_DIM})"
        )


def verify_mass_lift(field: TestField, plan: LiftPlan, cartesian: bool = True) -> LiftCheck:
    """integral tv^2 over the covering space  vs  S * integral u^2 on the orthant."""
    _check_plan(field, plan)
    _budget(plan)
    lhs = _radial_integral(field, plan, "mass")
    rhs = plan.sphere_factor * _usq_moment(field, 0.0)
    out = LiftCheck(lhs, rhs, _gap(lhs, rhs))
    if cartesian and plan.lifted_dim <= _CART_MAX_DIM:
        cart = _cartesian_integral(field, plan, "mass")
        out = LiftCheck(lhs, rhs, out.gap, cart, _gap(cart, lhs))
    return out


def verify_moment_lift(
    field: TestField, plan: LiftPlan, a: float, cartesian: bool = True
) -> LiftCheck:
    """integral (|x'|^2 + sum |y_i|^2)^a tv^2  vs  S * integral |x|^{2a} u^2."""
    if a < 0:
        raise ParameterError("moment exponent a must be >= 0")
    _check_plan(field, plan)
    _budget(plan)
    lhs = _radial_integral(field, plan, "mass", power=a)
    rhs = plan.sphere_factor * _usq_moment(field, a)
    out = LiftCheck(lhs, rhs, _gap(lhs, rhs))
    if cartesian and plan.lifted_dim <= _CART_MAX_DIM:
        cart = _cartesian_integral(field, plan, "mass", power=a)
        out = LiftCheck(lhs, rhs, out.gap, cart, _gap(cart, lhs))
    return out


def _usq_moment(field: TestField, a: float) -> float:
    """integral |x|^{2a} u^2 through the u-side evaluation path."""
    if field.exact_form is not None and float(a).is_integer():
        d = field.exact_form
        if d.is_zero:
            return 0.0
        return _poly_radial_moment(d.mul(d), field.spec, (0,) * field.spec.n, int(a))

    def integrand(x: np.ndarray) -> np.ndarray:
        u, _ = field_eval(field, x)
        out = u * u
        if a:
            out = out * np.sum(x * x, axis=-1) ** a
        return out

    return field_integral(field, integrand)


def verify_gradient_lift(
    field: TestField, plan: LiftPlan, b: int, cartesian: bool = True
) -> LiftCheck:
    """S^{-1} integral |x|^{2b} |grad tv|^2  vs the orthant-side combination

        integral [ |x|^{2b} |grad u|^2 + sum_i l_i (l_i - 1) x_i^{-2} u^2
                   + 2 b |l| |x|^{2b-2} u^2 ] dx.

    The underlying formula assumes the residual vanishes near the walls, so
    only bump-type fields are admitted; b is restricted to {0, 1} (negative b
    would need singular-weight rules).
    """
    if b not in (0, 1):
        raise ParameterError("gradient lift supports b in {0, 1} only")
    if not field.is_bump:
        raise CapabilityError(
            "gradient lift needs a residual vanishing near the walls (bump catalogue)"
        )
    _check_plan(field, plan)
    _budget(plan)
    # the formula's lhs carries the reciprocal sphere factor
    lhs = _radial_integral(field, plan, "grad", power=float(b)) / plan.sphere_factor

    l = plan.l
    total_l = plan.total

    def rhs_integrand(x: np.ndarray) -> np.ndarray:
        u, gu = field_eval(field, x)
        xsq = np.sum(x * x, axis=-1)
        out = np.sum(gu * gu, axis=-1)
        # the singular term inherits the |x|^{2b} weight: it enters the
        # derivation inside the same |x|^{2b}-multiplied bracket as Delta u
        for i in field.spec.wall_axes:
            c = l[i] * (l[i] - 1)
            if c:
                out = out + c * u * u / x[..., i] ** 2
        if b:
            out = out * xsq**b
            out = out + 2.0 * b * total_l * xsq ** (b - 1) * u * u
        return out

    rhs = field_integral(field, rhs_integrand)
    out = LiftCheck(lhs, rhs, _gap(lhs, rhs))
    if cartesian and plan.lifted_dim <= _CART_MAX_DIM:
        cart = _cartesian_integral(field, plan, "grad", power=float(b)) / plan.sphere_factor
        out = LiftCheck(lhs, rhs, out.gap, cart, _gap(cart, lhs))
    return out


def verify_dilation_pairing(field: TestField, plan: LiftPlan, cartesian: bool = True) -> LiftCheck:
    """integral tv (z . grad tv)  vs  S * integral (u/w) [x . grad(u/w)] w^2."""
    for i in field.spec.wall_axes:
        if plan.l[i] != 1 or field.wall_exponents[i] != 1:
            raise CapabilityError("dilation pairing is stated for unit lift multiplicities")
    _check_plan(field, plan)
    _budget(plan)
    lhs = _radial_integral(field, plan, "pair")

    wall = list(field.spec.wall_axes)

    def rhs_integrand(x: np.ndarray) -> np.ndarray:
        u, gu = field_eval(field, x)
        w = np.ones(x.shape[:-1])
        for i in wall:
            w = w * x[..., i]
        q = u / w
        xdotdq = np.zeros(x.shape[:-1])
        for i in range(field.spec.n):
            dq = gu[..., i] / w
            if i in field.spec.wall_axes:
                dq = dq - u / (w * x[..., i])
            xdotdq = xdotdq + x[..., i] * dq
        return q * xdotdq * w * w

    rhs = plan.sphere_factor * field_integral(field, rhs_integrand)
    out = LiftCheck(lhs, rhs, _gap(lhs, rhs))
    if cartesian and plan.lifted_dim <= _CART_MAX_DIM:
        cart = _cartesian_integral(field, plan, "pair")
        out = LiftCheck(lhs, rhs, out.gap, cart, _gap(cart, lhs))
    return out
