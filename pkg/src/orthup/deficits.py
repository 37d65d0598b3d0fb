"""Deficit functionals of the sharp uncertainty inequality on orthants.

The scale-invariant deficit

    rho1(u) = sqrt(E M) - ((n+2k)/2) N

vanishes exactly on the extremal family c w(x) e^{-beta|x|^2}.  The additive
(scale non-invariant) deficit  alpha^2 E + alpha^-2 M - (n+2k) N  equals an
explicit weighted Dirichlet integral of the residual; its minimum over alpha,
attained at alpha* = (M/E)^{1/4}, is 2 rho1.

The right-hand side of that identity is integrated in its fully cancelled
form |alpha grad q + x q / alpha|^2 w(x)^2 with q = u/w, so the catastrophic
e^{+|x|^2} factors of the raw statement never appear; it is evaluated by
quadrature only, keeping it independent of the Gamma backend that computes
the left side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from .domain_model import TestField
from .errors import CapabilityError, DegenerateFieldError, ParameterError
from .functionals import (
    CoreFunctionals,
    TINY_NORM,
    core_functionals,
    field_integral,
)
from .quadrature import DEFAULT_CONFIG, QuadratureConfig

__all__ = [
    "DeficitReport",
    "rho1",
    "rho1_from_core",
    "additive_deficit",
    "additive_from_core",
    "identity_rhs",
    "identity_residual",
    "optimal_alpha",
    "full_space_deficits",
    "deficit_report",
]


@dataclass(frozen=True)
class DeficitReport:
    """Everything the identity suite needs for one (field, alpha) pair."""

    rho1: float
    alpha: float
    additive: float
    identity_rhs: float
    residual: float
    alpha_star: float
    backend: str
    core: CoreFunctionals

    def to_dict(self) -> dict:
        out = asdict(self)
        out["core"] = {
            "N": self.core.N,
            "M": self.core.M,
            "E": self.core.E,
            "backend": self.core.backend,
            "nk": [self.core.spec.n, self.core.spec.k],
        }
        return out


def rho1_from_core(core: CoreFunctionals) -> float:
    const = (core.spec.n + 2 * core.spec.k) / 2.0
    return math.sqrt(core.E * core.M) - const * core.N


def rho1(
    field: TestField,
    backend: str = "oracle",
    order: Optional[int] = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> float:
    """sqrt(E M) - ((n+2k)/2) N; zero exactly on the extremal family."""
    return rho1_from_core(core_functionals(field, backend, order, config))


def additive_from_core(core: CoreFunctionals, alpha: float) -> float:
    if alpha == 0.0:
        raise ParameterError("alpha must be non-zero")
    const = core.spec.n + 2 * core.spec.k
    return alpha**2 * core.E + core.M / alpha**2 - const * core.N


def additive_deficit(
    field: TestField,
    alpha: float,
    backend: str = "oracle",
    order: Optional[int] = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> float:
    """alpha^2 E + alpha^-2 M - (n+2k) N; non-negative for admissible fields."""
    return additive_from_core(core_functionals(field, backend, order, config), alpha)


def identity_rhs(
    field: TestField,
    alpha: float,
    order: Optional[int] = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> float:
    """Weighted Dirichlet form equal to the additive deficit (quadrature only).

    Integrates alpha^2 |grad q + x q / alpha^2|^2 w^2 with q = u / w over the
    orthant; requires every wall exponent >= 1 so that q is smooth.
    """
    if alpha == 0.0:
        raise ParameterError("alpha must be non-zero")
    spec = field.spec
    for i in spec.wall_axes:
        if field.wall_exponents[i] < 1:
            raise CapabilityError("identity_rhs needs wall exponents >= 1 on every wall axis")

    wall = list(spec.wall_axes)
    p = field.wall_exponents
    inv_a2 = 1.0 / alpha**2

    def integrand(x: np.ndarray) -> np.ndarray:
        v, gv = field.residual(x)
        v = np.asarray(v, dtype=float)
        gv = np.asarray(gv, dtype=float)
        # mono_q = prod over walls x^{p_i - 1};   q = mono_q * v
        mono_q = np.ones(x.shape[:-1])
        for i in wall:
            if p[i] - 1:
                mono_q = mono_q * x[..., i] ** (p[i] - 1)
        q = mono_q * v
        wsq = np.ones(x.shape[:-1])
        for i in wall:
            wsq = wsq * x[..., i] ** 2
        total = np.zeros(x.shape[:-1])
        for i in range(spec.n):
            dq = mono_q * gv[..., i]
            if i in spec.wall_axes and p[i] - 1:
                dq = dq + (p[i] - 1) * (mono_q / x[..., i]) * v
            term = alpha * dq + x[..., i] * q * (inv_a2 * alpha)
            total = total + term * term
        return total * wsq

    return field_integral(field, integrand, order, config=config)


def identity_residual(
    field: TestField,
    alpha: float,
    backend: str = "oracle",
    order: Optional[int] = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> float:
    """additive_deficit minus identity_rhs; an exact identity, so ~0."""
    return additive_deficit(field, alpha, backend, order, config) - identity_rhs(
        field, alpha, order, config
    )


def optimal_alpha(
    field: TestField,
    backend: str = "oracle",
    order: Optional[int] = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> float:
    """alpha* = (M/E)^{1/4}; at it, additive = 2 rho1."""
    core = core_functionals(field, backend, order, config)
    if core.E <= TINY_NORM or core.M <= TINY_NORM:
        raise DegenerateFieldError("optimal_alpha undefined when E or M vanishes")
    return (core.M / core.E) ** 0.25


def full_space_deficits(
    field: TestField,
    backend: str = "oracle",
    order: Optional[int] = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> tuple:
    """(delta1, delta2, dist^2 to the Gaussian family) for wall-free fields.

    delta1 = sqrt(E) sqrt(M) - (n/2) N and delta2 = E M - (n^2/4) N^2 are the
    full-space reference deficits; the distance is the squared L2 distance to
    { c e^{-beta |x|^2} }.
    """
    if field.spec.k != 0:
        raise CapabilityError("full_space_deficits requires a wall-free field (k = 0)")
    core = core_functionals(field, backend, order, config)
    n = field.spec.n
    delta1 = math.sqrt(core.E * core.M) - 0.5 * n * core.N
    delta2 = core.E * core.M - 0.25 * n**2 * core.N**2
    if core.N <= TINY_NORM:
        return 0.0, 0.0, 0.0
    from .projection import dist_to_E  # deferred: projection builds on this module's siblings

    dist = dist_to_E(field).dist_sq
    return delta1, delta2, dist


def deficit_report(
    field: TestField,
    alpha: float = 1.0,
    backend: str = "oracle",
    order: Optional[int] = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> DeficitReport:
    core = core_functionals(field, backend, order, config)
    add = additive_from_core(core, alpha)
    rhs = identity_rhs(field, alpha, order, config)
    if core.E > TINY_NORM and core.M > TINY_NORM:
        a_star = (core.M / core.E) ** 0.25
    else:
        a_star = float("nan")
    return DeficitReport(
        rho1=rho1_from_core(core),
        alpha=alpha,
        additive=add,
        identity_rhs=rhs,
        residual=add - rhs,
        alpha_star=a_star,
        backend=backend,
        core=core,
    )
