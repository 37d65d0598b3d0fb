"""Orthant geometry, monomial weights, Gaussian measures and factored test fields.

An orthant R^{n-k} x R_{>0}^k carries its k "wall" axes as the *last* k
coordinates.  Admissible fields vanish on the walls and are therefore stored
in factored form

    u(x) = (prod_i x_i^{p_i}) * v(x),

with a smooth residual v that is evaluable (with gradient) at interior
points.  Fields built from polynomial-times-Gaussian data additionally carry
an exact symbolic descriptor, which the Gamma-moment oracle consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import CapabilityError, DomainError, ParameterError

__all__ = [
    "OrthantSpec",
    "WeightExponents",
    "ScaledGaussianMeasure",
    "PolyGauss",
    "TestField",
    "sphere_area",
    "make_extremal",
    "field_eval",
    "dilate_field",
    "field_from_residual_descriptor",
]


# ---------------------------------------------------------------------------
# geometry


@dataclass(frozen=True)
class OrthantSpec:
    """Ambient dimension n and number of wall axes k (the last k coordinates)."""

    n: int
    k: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and isinstance(self.k, int)):
            raise ParameterError("n and k must be integers")
        if self.n < 1:
            raise ParameterError(f"need n >= 1, got n={self.n}")
        if not 0 <= self.k <= self.n:
            raise ParameterError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")

    @property
    def wall_axes(self) -> range:
        """0-based indices of the wall axes: the last k coordinates."""
        return range(self.n - self.k, self.n)

    @property
    def free_axes(self) -> range:
        """0-based indices of the full-line axes."""
        return range(self.n - self.k)

    def interior_mask(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.k == 0:
            return np.ones(x.shape[:-1], dtype=bool)
        return (x[..., self.n - self.k :] > 0.0).all(axis=-1)


@dataclass(frozen=True)
class WeightExponents:
    """Per-axis exponents a_i >= 0 of a monomial weight x^A = prod x_i^{a_i}.

    The induced domain restricts to x_i > 0 exactly where a_i > 0.  Lifting
    needs integer entries; measures and quadrature accept any a_i >= 0.
    """

    a: tuple

    def __init__(self, a: Sequence[float]):
        a = tuple(float(v) for v in a)
        if any(v < 0 for v in a):
            raise ParameterError(f"weight exponents must be >= 0, got {a}")
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def total(self) -> float:
        """|A| = sum a_i."""
        return float(sum(self.a))

    @property
    def positive_axes(self) -> tuple:
        return tuple(i for i, v in enumerate(self.a) if v > 0)

    @property
    def zero_axes(self) -> tuple:
        return tuple(i for i, v in enumerate(self.a) if v == 0)

    def require_integer(self) -> tuple:
        if any(v != int(v) for v in self.a):
            raise ParameterError(f"operation needs integer exponents, got {self.a}")
        return tuple(int(v) for v in self.a)

    @staticmethod
    def from_orthant(spec: OrthantSpec, wall_value: float = 1.0) -> "WeightExponents":
        a = [0.0] * spec.n
        for i in spec.wall_axes:
            a[i] = wall_value
        return WeightExponents(a)


def sphere_area(d: int) -> float:
    """Surface measure |S^d| = 2 pi^{(d+1)/2} / Gamma((d+1)/2) of the unit d-sphere."""
    if d < 0 or d != int(d):
        raise ParameterError(f"sphere dimension must be a non-negative integer, got {d}")
    d = int(d)
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


# ---------------------------------------------------------------------------
# sparse multivariate polynomials (exponent multi-index -> coefficient)


def _poly_clean(p: dict) -> dict:
    return {g: c for g, c in p.items() if c != 0.0}


def _poly_add(p: dict, q: dict, scale: float = 1.0) -> dict:
    out = dict(p)
    for g, c in q.items():
        out[g] = out.get(g, 0.0) + scale * c
    return _poly_clean(out)


def _poly_scale(p: dict, c: float) -> dict:
    return _poly_clean({g: c * v for g, v in p.items()})


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for g1, c1 in p.items():
        for g2, c2 in q.items():
            g = tuple(a + b for a, b in zip(g1, g2))
            out[g] = out.get(g, 0.0) + c1 * c2
    return _poly_clean(out)


def _poly_diff(p: dict, axis: int) -> dict:
    out: dict = {}
    for g, c in p.items():
        if g[axis] > 0:
            h = list(g)
            h[axis] -= 1
            out[tuple(h)] = out.get(tuple(h), 0.0) + c * g[axis]
    return out


def _poly_mul_coord(p: dict, axis: int, power: int = 1) -> dict:
    out: dict = {}
    for g, c in p.items():
        h = list(g)
        h[axis] += power
        out[tuple(h)] = c
    return out


def _poly_eval(p: dict, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape[:-1])
    if not p:
        return out
    n = x.shape[-1]
    max_e = [0] * n
    for g in p:
        for i, e in enumerate(g):
            if e > max_e[i]:
                max_e[i] = e
    # power tables: one cumulative product per axis instead of x**e per term
    pows = []
    for i in range(n):
        tab = [None] * (max_e[i] + 1)
        tab[0] = np.ones(x.shape[:-1])
        for e in range(max_e[i]):
            tab[e + 1] = tab[e] * x[..., i]
        pows.append(tab)
    for g in sorted(p):
        term = p[g]
        for i, e in enumerate(g):
            if e:
                term = term * pows[i][e]
        out = out + term
    return out


# ---------------------------------------------------------------------------
# polynomial-times-Gaussian descriptors


@dataclass(frozen=True)
class PolyGauss:
    """Exact descriptor  sum_parts P_s(x) * exp(-(s/2)|x|^2).

    ``parts`` maps Gaussian rate s > 0 to a sparse polynomial; a single part
    is the common case.  The rate convention stores exp(-(s/2)|x|^2), so the
    extremal factor exp(-beta |x|^2) carries s = 2 beta.  Closed under
    addition, scaling, products (rates add), coordinate multiplication and
    partial differentiation.  Treat instances as immutable.
    """

    dim: int
    parts: tuple  # ((rate, poly-dict), ...) sorted by rate

    @staticmethod
    def from_poly(dim: int, rate: float, poly: Mapping[tuple, float]) -> "PolyGauss":
        if rate <= 0:
            raise ParameterError(f"Gaussian rate must be positive, got {rate}")
        poly = _poly_clean({tuple(int(e) for e in g): float(c) for g, c in poly.items()})
        for g in poly:
            if len(g) != dim or any(e < 0 for e in g):
                raise ParameterError(f"bad multi-index {g} for dimension {dim}")
        return PolyGauss(dim, ((float(rate), poly),))

    @staticmethod
    def zero(dim: int) -> "PolyGauss":
        return PolyGauss(dim, ())

    # -- algebra ------------------------------------------------------------

    def _merged(self, items) -> "PolyGauss":
        acc: dict = {}
        for rate, poly in items:
            if rate in acc:
                acc[rate] = _poly_add(acc[rate], poly)
            else:
                acc[rate] = dict(poly)
        parts = tuple((r, _poly_clean(p)) for r, p in sorted(acc.items()) if _poly_clean(p))
        return PolyGauss(self.dim, parts)

    def add(self, other: "PolyGauss", scale: float = 1.0) -> "PolyGauss":
        if other.dim != self.dim:
            raise ParameterError("dimension mismatch")
        return self._merged(
            list(self.parts) + [(r, _poly_scale(p, scale)) for r, p in other.parts]
        )

    def scale(self, c: float) -> "PolyGauss":
        return self._merged([(r, _poly_scale(p, c)) for r, p in self.parts])

    def mul(self, other: "PolyGauss") -> "PolyGauss":
        if other.dim != self.dim:
            raise ParameterError("dimension mismatch")
        items = []
        for r1, p1 in self.parts:
            for r2, p2 in other.parts:
                items.append((r1 + r2, _poly_mul(p1, p2)))
        return self._merged(items)

    def mul_monomial(self, gamma: Sequence[int]) -> "PolyGauss":
        gamma = tuple(int(e) for e in gamma)
        items = []
        for r, p in self.parts:
            q = p
            for i, e in enumerate(gamma):
                if e:
                    q = _poly_mul_coord(q, i, e)
            items.append((r, q))
        return self._merged(items)

    def diff(self, axis: int) -> "PolyGauss":
        """d/dx_axis:  (P' - s x_axis P) exp(-(s/2)|x|^2), per part."""
        items = []
        for r, p in self.parts:
            dp = _poly_add(_poly_diff(p, axis), _poly_mul_coord(p, axis, 1), scale=-r)
            items.append((r, dp))
        return self._merged(items)

    def dilate(self, lam: float) -> "PolyGauss":
        """Descriptor of x -> self(x / lam): coefficients pick up lam^{-|g|}, rates s/lam^2."""
        if lam <= 0:
            raise ParameterError("dilation factor must be positive")
        items = []
        for r, p in self.parts:
            q = {g: c * lam ** (-sum(g)) for g, c in p.items()}
            items.append((r / lam**2, q))
        return self._merged(items)

    # -- evaluation ----------------------------------------------------------

    def eval(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        if not self.parts:
            return out
        sq = np.sum(x * x, axis=-1)
        for r, p in self.parts:
            out = out + _poly_eval(p, x) * np.exp(-0.5 * r * sq)
        return out

    def grad_eval(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        if not self.parts:
            return out
        sq = np.sum(x * x, axis=-1)
        for r, p in self.parts:
            g = np.exp(-0.5 * r * sq)
            pv = _poly_eval(p, x)
            for i in range(self.dim):
                out[..., i] += (_poly_eval(_poly_diff(p, i), x) - r * x[..., i] * pv) * g
        return out

    @property
    def min_rate(self) -> float:
        if not self.parts:
            raise CapabilityError("zero descriptor has no decay rate")
        return self.parts[0][0]

    @property
    def is_zero(self) -> bool:
        return not self.parts

    def term_count(self) -> int:
        return sum(len(p) for _, p in self.parts)


# ---------------------------------------------------------------------------
# test fields


@dataclass(frozen=True)
class TestField:
    """Scalar field on an orthant stored wall-factored:  u = (prod x_i^{p_i}) v.

    ``residual`` evaluates (v, grad v) at strictly interior points, vectorised
    over a leading batch axis.  ``decay_rate`` is a caller-declared s > 0 with
    |u|, |grad u| <= C exp(-s|x|^2 / 2) outside a bounded set; quadrature
    scales its grids by it.  Bump-type fields carry ``support_box`` instead of
    genuine decay and are integrated on panels.

    Immutable after construction; residual callables must be pure so fields
    can be evaluated concurrently.
    """

    spec: OrthantSpec
    wall_exponents: tuple
    residual: Callable[[np.ndarray], tuple]
    decay_rate: float
    exact_form: Optional[PolyGauss] = None
    support_box: Optional[tuple] = None
    label: str = ""

    def __post_init__(self):
        p = tuple(int(v) for v in self.wall_exponents)
        if len(p) != self.spec.n or any(v < 0 for v in p):
            raise ParameterError(f"bad wall exponents {p} for n={self.spec.n}")
        for i in self.spec.free_axes:
            if p[i] != 0:
                raise ParameterError("wall exponents must vanish on non-wall axes")
        if self.decay_rate <= 0:
            raise ParameterError("decay_rate must be positive")
        object.__setattr__(self, "wall_exponents", p)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def is_bump(self) -> bool:
        return self.support_box is not None

    def wall_monomial(self, x: np.ndarray, shift: int = 0) -> np.ndarray:
        """prod over wall axes x_i^{p_i + shift} (shift lets callers form u/w)."""
        x = np.asarray(x, dtype=float)
        out = np.ones(x.shape[:-1])
        for i in self.spec.wall_axes:
            e = self.wall_exponents[i] + shift
            if e:
                out = out * x[..., i] ** e
        return out


def field_eval(field: TestField, x: np.ndarray) -> tuple:
    """Value and gradient of u at interior points (product rule on the factored form)."""
    x = np.asarray(x, dtype=float)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[None, :]
    if x.shape[-1] != field.n:
        raise ParameterError(f"points have dimension {x.shape[-1]}, field has {field.n}")
    if not field.spec.interior_mask(x).all():
        raise DomainError("field_eval requires strictly interior points (x_i > 0 on walls)")
    v, gv = field.residual(x)
    v = np.asarray(v, dtype=float)
    gv = np.asarray(gv, dtype=float)
    mono = field.wall_monomial(x)
    u = mono * v
    grad = mono[..., None] * gv
    for i in field.spec.wall_axes:
        p = field.wall_exponents[i]
        if p:
            grad[..., i] += p * (mono / x[..., i]) * v
    if squeeze:
        return float(u[0]), grad[0]
    return u, grad


def field_from_residual_descriptor(
    spec: OrthantSpec,
    wall_exponents: Sequence[int],
    residual_descriptor: PolyGauss,
    label: str = "",
) -> TestField:
    """Build a field from an exact residual descriptor; u's descriptor is derived."""
    if residual_descriptor.dim != spec.n:
        raise ParameterError("descriptor dimension mismatch")
    p = tuple(int(v) for v in wall_exponents)

    def residual(x: np.ndarray):
        return residual_descriptor.eval(x), residual_descriptor.grad_eval(x)

    if residual_descriptor.is_zero:
        exact = PolyGauss.zero(spec.n)
        rate = 1.0
    else:
        exact = residual_descriptor.mul_monomial(p)
        rate = residual_descriptor.min_rate
    return TestField(
        spec=spec,
        wall_exponents=p,
        residual=residual,
        decay_rate=rate,
        exact_form=exact,
        label=label,
    )


def make_extremal(spec: OrthantSpec, c: float, beta: float) -> TestField:
    """The optimizer family member  u(x) = c (prod wall x_i) exp(-beta |x|^2)."""
    if beta <= 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    zero_idx = (0,) * spec.n
    v_desc = PolyGauss.from_poly(spec.n, 2.0 * beta, {zero_idx: float(c)}) if c != 0.0 else PolyGauss(
        spec.n, ((2.0 * beta, {}),)
    )
    p = tuple(1 if i in spec.wall_axes else 0 for i in range(spec.n))
    fld = field_from_residual_descriptor(spec, p, v_desc, label=f"extremal(c={c}, beta={beta})")
    if c == 0.0:
        # keep the declared rate of the zero field tied to beta
        fld = replace(fld, decay_rate=2.0 * beta)
    return fld


def dilate_field(fld: TestField, lam: float) -> TestField:
    """u_lam(x) = u(x / lam); only exact-form fields support this."""
    if lam <= 0:
        raise ParameterError("dilation factor must be positive")
    if fld.exact_form is None:
        raise CapabilityError("dilate_field needs an exact descriptor")
    # residual descriptor of the dilated field: divide by the wall monomial again
    desc = fld.exact_form.dilate(lam)
    vparts = []
    for r, p in desc.parts:
        q = {}
        for g, cc in p.items():
            h = list(g)
            for i in fld.spec.wall_axes:
                h[i] -= fld.wall_exponents[i]
                if h[i] < 0:
                    raise CapabilityError("dilated descriptor not divisible by wall monomial")
            q[tuple(h)] = cc
        vparts.append((r, q))
    v_desc = PolyGauss(fld.n, tuple(vparts))
    out = field_from_residual_descriptor(
        fld.spec, fld.wall_exponents, v_desc, label=f"{fld.label}|dilated({lam})"
    )
    return out


# ---------------------------------------------------------------------------
# monomial-weighted Gaussian measures


@dataclass(frozen=True)
class ScaledGaussianMeasure:
    """Probability measure  x^A exp(-|x|^2 / (2 lambda^2)) dx / Z  on its orthant.

    Z is computed at construction from per-axis Gamma integrals:
        integral_0^inf x^a exp(-x^2/(2 l^2)) dx = (l sqrt 2)^{a+1} Gamma((a+1)/2) / 2
    with the full-line value doubled at a = 0.
    """

    exponents: WeightExponents
    lam: float
    normalization: float = field(init=False)

    def __post_init__(self):
        if self.lam <= 0:
            raise ParameterError(f"lambda must be positive, got {self.lam}")
        logz = 0.0
        sigma = self.lam * math.sqrt(2.0)
        for a in self.exponents.a:
            logz += (a + 1) * math.log(sigma) + gammaln((a + 1) / 2.0) - math.log(2.0)
            if a == 0:
                logz += math.log(2.0)  # full line
        object.__setattr__(self, "normalization", math.exp(logz))

    @property
    def n(self) -> int:
        return self.exponents.n

    def log_weight(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = -np.sum(x * x, axis=-1) / (2.0 * self.lam**2)
        for i, a in enumerate(self.exponents.a):
            if a:
                out = out + a * np.log(x[..., i])
        return out
