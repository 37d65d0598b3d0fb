"""Reproducible generators for every test field the suites use.

Catalogue names double as the CLI's field-description language:

* ``extremal``          c w(x) e^{-beta |x|^2}              (deficit zero)
* ``affine_equality``   w(x) e^{-B|x|^2} (sum b_i x_i + b0) (stability equality set)
* ``sharp_example``     x_1 w(x) e^{-|x|^2/2}               (constrained-theorem witness)
* ``polygauss_random``  w(x) Q(x) e^{-(s/2)|x|^2}, Q random of total degree <= 4
* ``bump``              prod_i exp(-1/(1 - t_i^2)) on a box, extended by zero

Identical (name, params, seed) yield bit-identical descriptors: the random
draw is a fixed-order consumption of a seeded Generator.
"""

from __future__ import annotations

import itertools
import math
from typing import Optional, Sequence

import numpy as np

from .domain_model import (
    OrthantSpec,
    PolyGauss,
    TestField,
    field_from_residual_descriptor,
    make_extremal,
)
from .errors import CatalogError, ParameterError

__all__ = [
    "catalog_get",
    "make_affine_equality",
    "make_sharp_example",
    "make_polygauss_random",
    "make_bump",
    "add_fields",
    "random_suite",
    "SUITE_NK",
]

SUITE_NK = ((1, 1), (2, 1), (2, 2), (3, 1), (3, 2))


def make_affine_equality(
    spec: OrthantSpec, b: Sequence[float], b0: float, big_b: float = 0.5
) -> TestField:
    """w(x) e^{-B |x|^2} (sum over free axes b_i x_i + b0)."""
    if big_b <= 0:
        raise ParameterError("Gaussian exponent B must be positive")
    b = tuple(float(v) for v in b)
    if len(b) != spec.n - spec.k:
        raise ParameterError(f"need {spec.n - spec.k} linear coefficients, got {len(b)}")
    poly = {(0,) * spec.n: float(b0)}
    for j, coeff in enumerate(b):
        if coeff:
            g = [0] * spec.n
            g[j] = 1
            poly[tuple(g)] = coeff
    v_desc = PolyGauss.from_poly(spec.n, 2.0 * big_b, poly)
    p = tuple(1 if i in spec.wall_axes else 0 for i in range(spec.n))
    return field_from_residual_descriptor(
        spec, p, v_desc, label=f"affine_equality(b={b}, b0={b0}, B={big_b})"
    )


def make_sharp_example(spec: OrthantSpec) -> TestField:
    """x_1 w(x) e^{-|x|^2/2}: the sharpness witness of the constrained theorem.

    The multiplying coordinate is always the first one; it is a genuine
    unweighted axis only when n - k >= 1, which is what the closed-form value
    pi^{(n+2k)/2} / (2 (4 pi)^k) of its deficit requires.
    """
    if spec.k < 1:
        raise CatalogError("sharp_example needs at least one wall axis")
    poly = {tuple(1 if i == 0 else 0 for i in range(spec.n)): 1.0}
    v_desc = PolyGauss.from_poly(spec.n, 1.0, poly)
    p = tuple(1 if i in spec.wall_axes else 0 for i in range(spec.n))
    return field_from_residual_descriptor(spec, p, v_desc, label=f"sharp_example{spec.n, spec.k}")


def _multi_indices(n: int, max_degree: int):
    for total in range(max_degree + 1):
        for comb in itertools.combinations_with_replacement(range(n), total):
            g = [0] * n
            for i in comb:
                g[i] += 1
            yield tuple(g)


def make_polygauss_random(spec: OrthantSpec, seed: int, max_degree: int = 4) -> TestField:
    """w(x) Q(x) e^{-(s/2)|x|^2} with Q uniform on [-1,1]^terms, s in {1, 2}."""
    rng = np.random.default_rng(seed)
    idx = list(_multi_indices(spec.n, max_degree))
    coeffs = rng.uniform(-1.0, 1.0, size=len(idx))
    rate = float(rng.choice([1.0, 2.0]))
    poly = {g: float(c) for g, c in zip(idx, coeffs)}
    v_desc = PolyGauss.from_poly(spec.n, rate, poly)
    p = tuple(1 if i in spec.wall_axes else 0 for i in range(spec.n))
    return field_from_residual_descriptor(
        spec, p, v_desc, label=f"polygauss_random(nk={spec.n},{spec.k}, seed={seed})"
    )


def make_bump(
    spec: OrthantSpec,
    box: Sequence,
    wall_exponents: Optional[Sequence[int]] = None,
) -> TestField:
    """(prod wall x^{p_i}) times the standard mollifier supported on the box."""
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    if len(box) != spec.n or any(lo >= hi for lo, hi in box):
        raise CatalogError(f"bad support box {box}")
    for i in spec.wall_axes:
        if box[i][0] <= 0:
            raise CatalogError("bump support must avoid the walls (lo > 0 on wall axes)")
    if wall_exponents is None:
        p = tuple(1 if i in spec.wall_axes else 0 for i in range(spec.n))
    else:
        p = tuple(int(v) for v in wall_exponents)

    mids = np.array([(lo + hi) / 2.0 for lo, hi in box])
    halves = np.array([(hi - lo) / 2.0 for lo, hi in box])

    def residual(x: np.ndarray):
        x = np.asarray(x, dtype=float)
        t = (x - mids) / halves
        inside = (np.abs(t) < 1.0).all(axis=-1)
        v = np.zeros(x.shape[:-1])
        g = np.zeros(x.shape)
        if inside.any():
            ti = t[inside]
            one_m = 1.0 - ti * ti
            factors = np.exp(-1.0 / one_m)
            vi = np.prod(factors, axis=-1)
            v[inside] = vi
            # d/dt exp(-1/(1-t^2)) = exp(.) * (-2t/(1-t^2)^2); chain rule by axis
            g[inside] = vi[..., None] * (-2.0 * ti / one_m**2) / halves
        return v, g

    return TestField(
        spec=spec,
        wall_exponents=p,
        residual=residual,
        decay_rate=1.0,
        exact_form=None,
        support_box=box,
        label=f"bump(box={box})",
    )


def add_fields(f1: TestField, f2: TestField, c: float = 1.0) -> TestField:
    """f1 + c f2 for descriptor-backed fields with matching wall exponents."""
    if f1.spec != f2.spec or f1.wall_exponents != f2.wall_exponents:
        raise CatalogError("can only add fields with identical orthant and wall exponents")
    if f1.exact_form is None or f2.exact_form is None:
        raise CatalogError("field addition needs exact descriptors")
    from .lifting import _residual_descriptor

    v = _residual_descriptor(f1).add(_residual_descriptor(f2), scale=c)
    return field_from_residual_descriptor(
        f1.spec, f1.wall_exponents, v, label=f"{f1.label}+{c}*{f2.label}"
    )


def catalog_get(name: str, spec: OrthantSpec, **params) -> TestField:
    """Field-description entry point shared by the CLI and the suites."""
    if name == "extremal":
        return make_extremal(spec, params.get("c", 1.0), params.get("beta", 0.5))
    if name == "affine_equality":
        b = params.get("b", (1.0,) * (spec.n - spec.k))
        return make_affine_equality(spec, b, params.get("b0", 1.0), params.get("B", 0.5))
    if name == "sharp_example":
        return make_sharp_example(spec)
    if name == "polygauss_random":
        return make_polygauss_random(spec, int(params.get("seed", 0)))
    if name == "bump":
        box = params.get("box")
        if box is None:
            box = [(1.0, 2.0)] * spec.n
        return make_bump(spec, box, params.get("wall_exponents"))
    raise CatalogError(f"unknown catalogue field {name!r}")


def random_suite(
    nk_list: Sequence = SUITE_NK, per_nk: int = 50, seed0: int = 1000
) -> list:
    """The standard random field suite: per_nk draws for every (n, k)."""
    fields = []
    for n, k in nk_list:
        spec = OrthantSpec(n, k)
        for j in range(per_nk):
            fields.append(make_polygauss_random(spec, seed=seed0 + 97 * n + 13 * k + j))
    return fields
