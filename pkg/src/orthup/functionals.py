"""Core scalar functionals: mass, second moment, Dirichlet energy, Hardy
denominator, uncertainty ratios, and moments under weighted Gaussian measures.

Every functional runs on either backend:

* ``oracle``     -- exact Gamma moments of the field's symbolic descriptor;
* ``quadrature`` -- tensor Gauss grids scaled by the declared decay, with an
  order-doubling convergence check.

The Hardy denominator integral of u^2/|x|^2 is special: the |x|^-2 kink makes
plain tensor rules converge like O(1/m), so the quadrature backend integrates
the exponential-representation profile  G(tau) = integral u^2 e^{-tau|x|^2}
over tau with the substitution rho = (s+tau)^{-1/2}, under which the profile
of a polynomial-Gaussian integrand is again polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import exact_oracle as oracle
from .domain_model import OrthantSpec, ScaledGaussianMeasure, TestField, field_eval
from .errors import CapabilityError, DegenerateFieldError, ParameterError
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    QuadratureGrid,
    grid_for_box,
    grid_for_gaussian_decay,
    half_gauss_rule,
    hermite_rule,
    integrate_refined,
    legendre_panel_rule,
    tensor_integrate,
)

__all__ = [
    "CoreFunctionals",
    "core_functionals",
    "core_bilinear",
    "hup_ratio",
    "hardy_ratio",
    "measure_mean_var",
    "measure_integral",
    "measure_grid",
    "field_integral",
    "TINY_NORM",
]

TINY_NORM = 1e-300


@dataclass(frozen=True)
class CoreFunctionals:
    """N = integral u^2, M = integral |x|^2 u^2, E = integral |grad u|^2."""

    N: float
    M: float
    E: float
    backend: str
    spec: OrthantSpec

    def __post_init__(self):
        if min(self.N, self.M, self.E) < -1e-12 * max(1.0, self.N, self.M, self.E):
            raise ParameterError("core functionals must be non-negative")


def _half_axes(spec: OrthantSpec) -> tuple:
    return tuple(i in spec.wall_axes for i in range(spec.n))


def field_grid(field: TestField, order: int, rate: Optional[float] = None) -> QuadratureGrid:
    """Plain grid adapted to integrands ~ poly * exp(-rate |x|^2) over the field's orthant."""
    if field.is_bump:
        # panels resolve the mollifier comfortably at ~20 points each; order
        # doubling still refines through the points-per-panel count
        pts = min(64, max(12, order // 3))
        return grid_for_box(field.support_box, order=pts, panels_per_axis=4)
    return grid_for_gaussian_decay(_half_axes(field.spec), rate or field.decay_rate, order)


def field_integral(
    field: TestField,
    integrand: Callable[[np.ndarray], np.ndarray],
    order: Optional[int] = None,
    rate: Optional[float] = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
    refine: bool = True,
) -> float:
    """Quadrature of an explicit integrand over the field's natural grid."""
    order = order or config.gauss_order
    if not refine:
        return tensor_integrate(field_grid(field, order, rate), integrand)
    return integrate_refined(
        lambda m: field_grid(field, m, rate),
        integrand,
        order,
        factor=config.refine_factor,
        rtol=config.refine_rtol,
    )


def core_functionals(
    field: TestField,
    backend: str = "oracle",
    order: Optional[int] = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> CoreFunctionals:
    """All three integrals of the uncertainty inequality, on the chosen backend."""
    if backend == "oracle":
        if field.exact_form is None:
            raise CapabilityError("oracle backend needs an exact descriptor")
        d = field.exact_form
        if d.is_zero:
            return CoreFunctionals(0.0, 0.0, 0.0, "oracle", field.spec)
        dsq = d.mul(d)
        n_val = oracle.descriptor_integral(dsq, field.spec)
        m_val = sum(
            oracle.descriptor_integral(dsq, field.spec, extra=_unit(field.n, i, 2))
            for i in range(field.n)
        )
        e_val = oracle.descriptor_dirichlet(d, field.spec)
        return CoreFunctionals(n_val, m_val, e_val, "oracle", field.spec)
    if backend != "quadrature":
        raise ParameterError(f"unknown backend {backend!r}")

    def usq(x):
        u, _ = field_eval(field, x)
        return u * u

    def xsq_usq(x):
        u, _ = field_eval(field, x)
        return np.sum(x * x, axis=-1) * u * u

    def gradsq(x):
        _, g = field_eval(field, x)
        return np.sum(g * g, axis=-1)

    n_val = field_integral(field, usq, order, config=config)
    m_val = field_integral(field, xsq_usq, order, config=config)
    e_val = field_integral(field, gradsq, order, config=config)
    return CoreFunctionals(n_val, m_val, e_val, "quadrature", field.spec)


def _unit(n: int, i: int, value: int) -> tuple:
    out = [0] * n
    out[i] = value
    return tuple(out)


def core_bilinear(f1: TestField, f2: TestField) -> tuple:
    """(integral f1 f2, integral |x|^2 f1 f2, integral grad f1 . grad f2), oracle-exact."""
    if f1.exact_form is None or f2.exact_form is None:
        raise CapabilityError("core_bilinear needs exact descriptors on both fields")
    if f1.spec != f2.spec:
        raise ParameterError("fields live on different orthants")
    d1, d2 = f1.exact_form, f2.exact_form
    if d1.is_zero or d2.is_zero:
        return 0.0, 0.0, 0.0
    prod = d1.mul(d2)
    n_b = oracle.descriptor_integral(prod, f1.spec)
    m_b = sum(
        oracle.descriptor_integral(prod, f1.spec, extra=_unit(f1.n, i, 2)) for i in range(f1.n)
    )
    e_b = oracle.dirichlet_product(d1, d2, f1.spec)
    return n_b, m_b, e_b


def hup_ratio(
    field: TestField,
    backend: str = "oracle",
    order: Optional[int] = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> float:
    """E M / N^2; bounded below by (n+2k)^2/4 for admissible fields."""
    c = core_functionals(field, backend, order, config)
    if c.N <= TINY_NORM:
        raise DegenerateFieldError("hup_ratio undefined: field mass vanishes")
    return c.E * c.M / c.N**2


def _hardy_denominator_quadrature(
    field: TestField, order: int, config: QuadratureConfig
) -> float:
    """integral u^2 / |x|^2 by quadrature, via the tau-profile substitution."""
    if field.is_bump:
        lo_sq = sum(max(lo, 0.0) ** 2 for lo, _ in field.support_box)
        if lo_sq <= 0:
            raise CapabilityError("bump support touches the origin; Hardy integral refused")

        def f(x):
            u, _ = field_eval(field, x)
            return u * u / np.sum(x * x, axis=-1)

        return field_integral(field, f, order, config=config)

    s_ref = field.decay_rate
    rho_max = 1.0 / math.sqrt(s_ref)
    outer = legendre_panel_rule(48, 0.0, rho_max)
    grid = field_grid(field, order)  # unit-rate layout; rescale nodes per tau

    def inner(tau: float) -> float:
        scale = math.sqrt(s_ref / (s_ref + tau))

        def f(x):
            u, _ = field_eval(field, x)
            return u * u * np.exp(-tau * np.sum(x * x, axis=-1))

        scaled = QuadratureGrid(grid.rules, tuple(s * scale for s in grid.scales), plain=True)
        return tensor_integrate(scaled, f)

    total = 0.0
    for rho, w in zip(outer.nodes, outer.weights):
        if rho <= 0:
            continue
        tau = rho**-2 - s_ref
        total += w * inner(tau) * 2.0 * rho**-3
    return total


def hardy_ratio(
    field: TestField,
    backend: str = "oracle",
    order: Optional[int] = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> float:
    """integral |grad u|^2  /  integral u^2/|x|^2; >= (n+2k-2)^2/4 one-sided.

    Refused for k = 0 with n <= 2, where the constant degenerates and the
    denominator need not converge.
    """
    spec = field.spec
    if spec.k == 0 and spec.n <= 2:
        raise CapabilityError("hardy_ratio refused for k=0 with n<=2")
    order = order or config.gauss_order
    if backend == "oracle":
        if field.exact_form is None:
            raise CapabilityError("oracle backend needs an exact descriptor")
        if field.exact_form.is_zero:
            raise DegenerateFieldError("hardy_ratio undefined for the zero field")
        den = oracle.hardy_denominator_integral(
            field.exact_form.mul(field.exact_form), spec
        )
        num = oracle.descriptor_dirichlet(field.exact_form, spec)
    elif backend == "quadrature":
        den = _hardy_denominator_quadrature(field, order, config)

        def gradsq(x):
            _, g = field_eval(field, x)
            return np.sum(g * g, axis=-1)

        num = field_integral(field, gradsq, order, config=config)
    else:
        raise ParameterError(f"unknown backend {backend!r}")
    if den <= TINY_NORM:
        raise DegenerateFieldError("hardy_ratio undefined: denominator vanishes")
    return num / den


# ---------------------------------------------------------------------------
# weighted Gaussian measures


def measure_grid(measure: ScaledGaussianMeasure, order: int) -> QuadratureGrid:
    """Grid whose implicit weight is x^A exp(-|x|^2/(2 lambda^2)) (unnormalised)."""
    sigma = measure.lam * math.sqrt(2.0)
    rules = []
    for a in measure.exponents.a:
        rules.append(half_gauss_rule(order, a) if a > 0 else hermite_rule(order))
    return QuadratureGrid(tuple(rules), (sigma,) * measure.n, plain=False)


def measure_integral(
    measure: ScaledGaussianMeasure,
    f: Callable[[np.ndarray], np.ndarray],
    order: int = 60,
) -> float:
    """integral f dmu, normalised."""
    # the grid's implicit weight equals the measure weight up to a constant
    # sigma^{-|A|} factor, which the mass ratio cancels exactly
    grid = measure_grid(measure, order)
    return tensor_integrate(grid, f) / grid.weight_mass


def measure_mean_var(
    measure: ScaledGaussianMeasure,
    f: Callable[[np.ndarray], np.ndarray],
    order: int = 60,
) -> tuple:
    """Mean and variance of f under the measure (f of at-most-polynomial growth)."""
    mean = measure_integral(measure, f, order)
    var = measure_integral(measure, lambda x: (np.asarray(f(x)) - mean) ** 2, order)
    return mean, var
