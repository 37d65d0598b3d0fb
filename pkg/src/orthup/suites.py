"""Named verification suites: batches of inequality/identity checks with
margins, shared between the command-line runner and the acceptance tests.

Margins are signed so that "pass" is margin >= 0 after the stated tolerance
has been folded in; every case records the raw values it compared so report
consumers can recompute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .deficits import (
    additive_from_core,
    identity_rhs,
    rho1_from_core,
)
from .domain_model import (
    OrthantSpec,
    ScaledGaussianMeasure,
    WeightExponents,
    make_extremal,
)
from .errors import DegenerateFieldError
from .field_catalog import (
    SUITE_NK,
    make_affine_equality,
    make_bump,
    make_polygauss_random,
    make_sharp_example,
)
from .functionals import core_functionals, hardy_ratio, hup_ratio
from .lifting import (
    LiftPlan,
    verify_dilation_pairing,
    verify_gradient_lift,
    verify_mass_lift,
    verify_moment_lift,
)
from .domain_model import PolyGauss, field_from_residual_descriptor
from .poincare import polynomial_function, poincare_stability_gap, rayleigh_quotient
from .projection import (
    centered_triple_form,
    dist_to_E,
    dist_to_E_norm_constrained,
    dist_to_affine_family,
    gaussian_center_dist,
)

__all__ = [
    "SuiteCase",
    "identity_suite",
    "lifting_suite",
    "poincare_suite",
    "stability_suite",
    "run_suite",
    "SUITE_NAMES",
]

SUITE_NAMES = ("identity", "lifting", "poincare", "stability")


@dataclass(frozen=True)
class SuiteCase:
    name: str
    nk: tuple
    backend: str
    values: dict
    margin: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "nk": list(self.nk),
            "backend": self.backend,
            "values": {k: (None if v is None else float(v)) for k, v in self.values.items()},
            "margin": float(self.margin),
            "pass": bool(self.passed),
        }


def _case(name, nk, backend, values, margin) -> SuiteCase:
    return SuiteCase(name, nk, backend, values, margin, bool(margin >= 0.0))


def _scale(core) -> float:
    return max(core.N, math.sqrt(core.E * core.M), 1e-30)


# ---------------------------------------------------------------------------
# identity suite (scale non-invariant identity + envelope)


def identity_suite(
    nk_list: Sequence = SUITE_NK,
    n_fields: int = 50,
    alphas: Sequence[float] = (0.5, 1.0, 2.0),
    seed: int = 20_250_101,
    rtol: float = 1e-8,
    envelope_rtol: float = 1e-9,
    order: int = 24,
) -> list:
    """Residual of the additive-deficit identity on random wall-vanishing
    fields, plus the envelope relation  rho1 = additive(alpha*)/2."""
    cases = []
    per = max(1, n_fields // len(nk_list))
    fields = []
    for n, k in nk_list:
        spec = OrthantSpec(n, k)
        fields.extend(
            make_polygauss_random(spec, seed=seed + 7919 * n + 101 * k + j) for j in range(per)
        )
    fields = fields[:n_fields]
    for idx, fld in enumerate(fields):
        nk = (fld.n, fld.k)
        core = core_functionals(fld, "oracle")
        for alpha in alphas:
            add = additive_from_core(core, alpha)
            rhs = identity_rhs(fld, alpha, order=order)
            resid = add - rhs
            tol = rtol * (1.0 + abs(add))
            cases.append(
                _case(
                    f"identity/field{idx:03d}/alpha={alpha}",
                    nk,
                    "oracle+quadrature",
                    {"additive": add, "identity_rhs": rhs, "residual": resid},
                    tol - abs(resid),
                )
            )
        r1 = rho1_from_core(core)
        a_star = (core.M / core.E) ** 0.25
        env = 0.5 * additive_from_core(core, a_star) - r1
        tol = envelope_rtol * (1.0 + abs(r1))
        cases.append(
            _case(
                f"identity/field{idx:03d}/envelope",
                nk,
                "oracle",
                {"rho1": r1, "half_additive_at_alpha_star": r1 + env, "residual": env},
                tol - abs(env),
            )
        )
    return cases


# ---------------------------------------------------------------------------
# lifting suite


def _squared_wall_gaussian(spec: OrthantSpec, beta: float = 0.5):
    """u = (prod wall x_i^2) e^{-beta |x|^2}: the lift-multiplicity-2 witness."""
    v = PolyGauss.from_poly(spec.n, 2.0 * beta, {(0,) * spec.n: 1.0})
    p = tuple(2 if i in spec.wall_axes else 0 for i in range(spec.n))
    return field_from_residual_descriptor(spec, p, v, label="squared_wall_gaussian")


def lifting_suite(
    nk_list: Sequence = ((1, 1), (2, 1), (2, 2)),
    seed: int = 411,
    poly_tol: float = 1e-9,
    bump_tol: float = 1e-6,
) -> list:
    """Mass/moment/gradient/pairing formula gaps for extremal, random
    polynomial-Gaussian and bump fields, with Cartesian cross-checks where the
    lifted dimension stays within budget."""
    cases = []
    for n, k in nk_list:
        spec = OrthantSpec(n, k)
        nk = (n, k)
        plan1 = LiftPlan(spec, tuple(1 if i in spec.wall_axes else 0 for i in range(n)))
        if plan1.lifted_dim > 8:
            continue
        witnesses = [
            ("extremal", make_extremal(spec, 1.0, 0.5), poly_tol, True),
            ("polygauss", make_polygauss_random(spec, seed=seed + n * 17 + k), poly_tol, False),
        ]
        for label, fld, tol, cart in witnesses:
            mass_chk = verify_mass_lift(fld, plan1, cartesian=cart)
            cases.append(
                _case(f"lifting/{label}/mass/nk={n},{k}", nk, "oracle+radial",
                      mass_chk.to_dict(), tol - mass_chk.gap)
            )
            if mass_chk.cartesian_gap is not None:
                cases.append(
                    _case(f"lifting/{label}/cartesian/nk={n},{k}", nk, "cartesian",
                          mass_chk.to_dict(), bump_tol - mass_chk.cartesian_gap)
                )
            for a in (0.0, 1.0, 2.0):
                chk = verify_moment_lift(fld, plan1, a, cartesian=False)
                cases.append(
                    _case(f"lifting/{label}/moment_a={a}/nk={n},{k}", nk, "oracle+radial",
                          chk.to_dict(), tol - chk.gap)
                )
            chk = verify_dilation_pairing(fld, plan1, cartesian=cart)
            cases.append(
                _case(f"lifting/{label}/pairing/nk={n},{k}", nk, "quadrature",
                      chk.to_dict(), (1e-8 if label == "extremal" else bump_tol) - chk.gap)
            )

        # bump fields: the gradient formula's hypothesis needs wall-vanishing residuals
        box = [(1.0, 2.0)] * n
        bump1 = make_bump(spec, box)
        chk = verify_mass_lift(bump1, plan1)
        cases.append(
            _case(f"lifting/bump/mass/nk={n},{k}", nk, "radial+quadrature",
                  chk.to_dict(), bump_tol - chk.gap)
        )
        for b in (0, 1):
            chk = verify_gradient_lift(bump1, plan1, b)
            cases.append(
                _case(f"lifting/bump/gradient_b={b}_l=1/nk={n},{k}", nk, "quadrature",
                      chk.to_dict(), bump_tol - chk.gap)
            )
        chk = verify_dilation_pairing(bump1, plan1)
        cases.append(
            _case(f"lifting/bump/pairing/nk={n},{k}", nk, "quadrature",
                  chk.to_dict(), bump_tol - chk.gap)
        )
        plan2 = LiftPlan(spec, tuple(2 if i in spec.wall_axes else 0 for i in range(n)))
        if plan2.lifted_dim <= 8:
            bump2 = make_bump(spec, box, wall_exponents=[2 if i in spec.wall_axes else 0 for i in range(n)])
            for b in (0, 1):
                chk = verify_gradient_lift(bump2, plan2, b)
                cases.append(
                    _case(f"lifting/bump/gradient_b={b}_l=2/nk={n},{k}", nk, "quadrature",
                          chk.to_dict(), bump_tol - chk.gap)
                )
            sq = _squared_wall_gaussian(spec)
            chk = verify_mass_lift(sq, plan2, cartesian=False)
            cases.append(
                _case(f"lifting/squared_wall/mass_l=2/nk={n},{k}", nk, "oracle+radial",
                      chk.to_dict(), poly_tol - chk.gap)
            )
    return cases


# ---------------------------------------------------------------------------
# poincare suite


def _random_poly(n: int, rng, max_degree: int = 4) -> dict:
    from .field_catalog import _multi_indices

    idx = list(_multi_indices(n, max_degree))
    coeffs = rng.uniform(-1.0, 1.0, size=len(idx))
    return {g: float(c) for g, c in zip(idx, coeffs)}


def poincare_suite(
    a_list: Sequence = ((0, 2), (2, 2), (0, 0, 2)),
    lambdas: Sequence[float] = (0.5, 1.0, 2.0),
    n_funcs: int = 100,
    seed: int = 515,
    quotient_tol: float = 1e-9,
    stability_tol: float = 1e-8,
    order: int = 36,
) -> list:
    """Quotient lower bound, equality family, classic value, and the
    stability-margin inequality for the weighted Gaussian Poincare setup."""
    cases = []
    rng = np.random.default_rng(seed)
    combos = [(tuple(a), lam) for a in a_list for lam in lambdas]
    per = max(1, n_funcs // len(combos))
    for a, lam in combos:
        measure = ScaledGaussianMeasure(WeightExponents(a), lam)
        n = len(a)
        bound = 1.0 / lam**2
        for j in range(per):
            f = polynomial_function(_random_poly(n, rng), n)
            try:
                q = rayleigh_quotient(f, measure, order=order)
            except DegenerateFieldError:
                continue
            cases.append(
                _case(
                    f"poincare/quotient/A={a}/lam={lam}/f{j:02d}",
                    (n, 0),
                    "quadrature",
                    {"quotient": q, "bound": bound},
                    q - bound + quotient_tol,
                )
            )
            s = poincare_stability_gap(f, measure, order=order)
            scale = max(abs(s.lhs_gap), abs(s.rhs_bound), 1.0)
            cases.append(
                _case(
                    f"poincare/stability/A={a}/lam={lam}/f{j:02d}",
                    (n, 0),
                    "quadrature",
                    {"lhs_gap": s.lhs_gap, "rhs_bound": s.rhs_bound},
                    s.margin + stability_tol * scale,
                )
            )
        # equality family: affine in the zero-weight coordinates
        zero_axes = [i for i, v in enumerate(a) if v == 0]
        if zero_axes:
            poly = {(0,) * n: 0.3}
            for i in zero_axes:
                g = [0] * n
                g[i] = 1
                poly[tuple(g)] = 1.0 + 0.25 * i
            f = polynomial_function(poly, n)
            q = rayleigh_quotient(f, measure, order=order)
            cases.append(
                _case(
                    f"poincare/equality/A={a}/lam={lam}",
                    (n, 0),
                    "quadrature",
                    {"quotient": q, "bound": bound},
                    quotient_tol * bound - abs(q - bound),
                )
            )
    # classic derived value: A=(2), lambda=1, f=x
    measure = ScaledGaussianMeasure(WeightExponents((2.0,)), 1.0)
    f = polynomial_function({(1,): 1.0}, 1)
    q = rayleigh_quotient(f, measure, order=order)
    ref = 1.0 / (3.0 - 8.0 / math.pi)
    cases.append(
        _case(
            "poincare/classic_value/A=(2)/lam=1",
            (1, 0),
            "quadrature",
            {"quotient": q, "reference": ref},
            1e-10 * ref - abs(q - ref),
        )
    )
    return cases


# ---------------------------------------------------------------------------
# stability suite


def _stability_cases_for_field(fld, label: str, alphas, tol: float) -> list:
    nk = (fld.n, fld.k)
    core = core_functionals(fld, "oracle")
    scale = _scale(core)
    r1 = rho1_from_core(core)
    cases = []

    # sharp-constant one-sided probes
    const_hup = (fld.n + 2 * fld.k) ** 2 / 4.0
    const_hardy = (fld.n + 2 * fld.k - 2) ** 2 / 4.0
    ratio = core.E * core.M / core.N**2
    cases.append(
        _case(f"{label}/hup_bound", nk, "oracle",
              {"ratio": ratio, "bound": const_hup}, ratio - const_hup + 1e-8)
    )
    hr = hardy_ratio(fld, "oracle")
    cases.append(
        _case(f"{label}/hardy_bound", nk, "oracle",
              {"ratio": hr, "bound": const_hardy}, hr - const_hardy + 1e-8)
    )
    cases.append(
        _case(f"{label}/weak_chain", nk, "oracle",
              {"ratio": ratio, "bound": const_hardy}, ratio - const_hardy + 1e-8)
    )

    # Theorem: rho1 dominates the squared distance to the extremal family
    de = dist_to_E(fld)
    cases.append(
        _case(f"{label}/deficit_vs_dist", nk, "oracle",
              {"rho1": r1, "dist_sq": de.dist_sq}, r1 - de.dist_sq + tol * scale)
    )
    # additive deficit dominates twice the centred distance
    add1 = additive_from_core(core, 1.0)
    gc = gaussian_center_dist(fld, 1.0)
    cases.append(
        _case(f"{label}/additive_vs_centered", nk, "oracle",
              {"additive": add1, "dist_sq": gc.dist_sq}, add1 - 2.0 * gc.dist_sq + tol * scale)
    )
    # half-constant constrained variant
    dc = dist_to_E_norm_constrained(fld)
    cases.append(
        _case(f"{label}/constrained_half", nk, "oracle",
              {"rho1": r1, "dist_sq": dc.dist_sq}, r1 - 0.5 * dc.dist_sq + tol * scale)
    )
    # 2/(n+2k+3) triple-form variant
    triple, _ = centered_triple_form(fld, 1.0)
    coef = 2.0 / (fld.n + 2 * fld.k + 3)
    cases.append(
        _case(f"{label}/triple_form", nk, "oracle",
              {"additive": add1, "triple_inf": triple}, add1 - coef * triple + tol * scale)
    )
    # scale-indexed refinement (stability of the stability estimate)
    for alpha in alphas:
        lhs = 0.5 * additive_from_core(core, alpha)
        g_a = gaussian_center_dist(fld, alpha)
        af = dist_to_affine_family(fld, beta_fixed=1.0 / (2.0 * alpha**2))
        cases.append(
            _case(f"{label}/meta_alpha={alpha}", nk, "oracle",
                  {"half_additive": lhs, "centered": g_a.dist_sq, "affine": af.dist_sq},
                  lhs - g_a.dist_sq - af.dist_sq + tol * scale)
        )
    return cases


def _equality_cases(alphas, tol: float) -> list:
    """Catalogued equality families: margins must vanish within tolerance."""
    cases = []
    for n, k in ((2, 1), (3, 1), (3, 2)):
        spec = OrthantSpec(n, k)
        nk = (n, k)
        # affine family: equality in the deficit-vs-distance theorem
        ae = make_affine_equality(spec, tuple(1.0 + 0.1 * j for j in range(n - k)), 0.7, 0.5)
        core = core_functionals(ae, "oracle")
        scale = _scale(core)
        r1 = rho1_from_core(core)
        de = dist_to_E(ae)
        cases.append(
            _case(f"equality/affine/deficit_vs_dist/nk={n},{k}", nk, "oracle",
                  {"rho1": r1, "dist_sq": de.dist_sq}, tol * scale - abs(r1 - de.dist_sq))
        )
        add1 = additive_from_core(core, 1.0)
        gc = gaussian_center_dist(ae, 1.0)
        cases.append(
            _case(f"equality/affine/additive_vs_centered/nk={n},{k}", nk, "oracle",
                  {"additive": add1, "dist_sq": gc.dist_sq},
                  tol * scale - abs(add1 - 2.0 * gc.dist_sq))
        )
        for alpha in alphas:
            ae_a = make_affine_equality(
                spec, tuple(1.0 + 0.1 * j for j in range(n - k)), 0.7, 1.0 / (2.0 * alpha**2)
            )
            core_a = core_functionals(ae_a, "oracle")
            lhs = 0.5 * additive_from_core(core_a, alpha)
            g_a = gaussian_center_dist(ae_a, alpha)
            af = dist_to_affine_family(ae_a, beta_fixed=1.0 / (2.0 * alpha**2))
            cases.append(
                _case(f"equality/affine/meta_alpha={alpha}/nk={n},{k}", nk, "oracle",
                      {"half_additive": lhs, "centered": g_a.dist_sq, "affine": af.dist_sq},
                      tol * _scale(core_a) - abs(lhs - g_a.dist_sq - af.dist_sq))
            )
        if n - k >= 1:
            sx = make_sharp_example(spec)
            core_s = core_functionals(sx, "oracle")
            r1s = rho1_from_core(core_s)
            dcs = dist_to_E_norm_constrained(sx)
            cases.append(
                _case(f"equality/sharp/constrained_half/nk={n},{k}", nk, "oracle",
                      {"rho1": r1s, "dist_sq": dcs.dist_sq},
                      tol * _scale(core_s) - abs(r1s - 0.5 * dcs.dist_sq))
            )
            adds = additive_from_core(core_s, 1.0)
            triple, _ = centered_triple_form(sx, 1.0)
            coef = 2.0 / (n + 2 * k + 3)
            cases.append(
                _case(f"equality/sharp/triple_form/nk={n},{k}", nk, "oracle",
                      {"additive": adds, "triple_inf": triple},
                      tol * _scale(core_s) - abs(adds - coef * triple))
            )
    return cases


def stability_suite(
    nk_list: Sequence = SUITE_NK,
    per_nk: int = 50,
    alphas: Sequence[float] = (0.5, 1.0, 2.0),
    seed: int = 1000,
    tol: float = 1e-7,
) -> list:
    """Every stability estimate over the random suite plus the catalogued
    equality families and the extremal sharp-equality checks."""
    cases = []
    for n, k in nk_list:
        spec = OrthantSpec(n, k)
        for beta in (0.25, 0.5, 2.0):
            fld = make_extremal(spec, 1.3, beta)
            core = core_functionals(fld, "oracle")
            ratio = core.E * core.M / core.N**2
            const = (n + 2 * k) ** 2 / 4.0
            cases.append(
                _case(f"extremal/sharp_equality/nk={n},{k}/beta={beta}", (n, k), "oracle",
                      {"ratio": ratio, "constant": const},
                      1e-9 * const - abs(ratio - const))
            )
        for j in range(per_nk):
            fld = make_polygauss_random(spec, seed=seed + 97 * n + 13 * k + j)
            cases.extend(
                _stability_cases_for_field(fld, f"random/nk={n},{k}/f{j:03d}", alphas, tol)
            )
    cases.extend(_equality_cases(alphas, tol))
    return cases


def run_suite(name: str, **kwargs) -> list:
    if name == "identity":
        return identity_suite(**kwargs)
    if name == "lifting":
        return lifting_suite(**kwargs)
    if name == "poincare":
        return poincare_suite(**kwargs)
    if name == "stability":
        return stability_suite(**kwargs)
    raise ValueError(f"unknown suite {name!r}; choose from {SUITE_NAMES} or 'all'")
