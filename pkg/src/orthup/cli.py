"""Command-line entry point: verification suites, per-field deficit reports,
and perturbation sweeps, emitted as machine-readable JSON/CSV artifacts.

Exit codes: 0 all checks within tolerance, 1 at least one violated
inequality/identity (the report lists the witness case and margin), 2 on
configuration or usage errors.  All state comes from flags or the JSON
config file; environment variables are never consulted.  Reruns with the
same configuration are bit-identical: seeds are fixed, case lists are sorted
by name, and the quadrature reductions are deterministic.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional

from . import __version__
from .deficits import deficit_report
from .domain_model import OrthantSpec
from .errors import CatalogError, ParameterError
from .field_catalog import add_fields, catalog_get
from .projection import (
    dist_to_E,
    dist_to_E_norm_constrained,
    dist_to_affine_family,
    gaussian_center_dist,
)
from .quadrature import (
    axis_rule_csv,
    half_gauss_rule,
    half_monomial_rule,
    hermite_rule,
    legendre_panel_rule,
)
from .suites import SUITE_NAMES, run_suite

_FMT = "{:.17g}"


def _fmt(x) -> str:
    if isinstance(x, float):
        return _FMT.format(x)
    return str(x)


def _parse_nk(text: str) -> tuple:
    try:
        n, k = (int(v) for v in text.split(","))
        OrthantSpec(n, k)
        return n, k
    except Exception as exc:
        raise ParameterError(f"bad --nk value {text!r}: {exc}") from exc


def _report(suite: str, cases: list, config_echo: dict) -> dict:
    cases = sorted(cases, key=lambda c: c.name)
    return {
        "version": __version__,
        "config_echo": config_echo,
        "suite": suite,
        "cases": [c.to_dict() for c in cases],
        "summary": {
            "cases": len(cases),
            "passed": sum(c.passed for c in cases),
            "failed": sum(not c.passed for c in cases),
        },
    }


def _emit(report: dict, out: Optional[str], fmt: str):
    if fmt == "json":
        text = json.dumps(report, indent=2, allow_nan=True)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        keys = ["name", "nk", "backend", "margin", "pass"]
        value_keys = sorted({k for c in report["cases"] for k in c["values"]})
        writer.writerow(keys + value_keys)
        for c in report["cases"]:
            row = [
                c["name"],
                f"{c['nk'][0]},{c['nk'][1]}",
                c["backend"],
                _fmt(c["margin"]),
                c["pass"],
            ]
            row += [_fmt(c["values"].get(k, "")) if c["values"].get(k) is not None else "" for k in value_keys]
            writer.writerow(row)
        text = buf.getvalue()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text + ("\n" if not text.endswith("\n") else ""))


def _print_table(cases: list):
    for c in sorted(cases, key=lambda x: x.name):
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}  {c.name}  margin={_fmt(c.margin)}")
    failed = [c for c in cases if not c.passed]
    print(f"summary: {len(cases) - len(failed)}/{len(cases)} passed")
    for c in failed:
        print(f"violation: {c.name}  margin={_fmt(c.margin)}  values={ {k: _fmt(v) for k, v in c.values.items()} }")


def cmd_verify(args) -> int:
    names = list(SUITE_NAMES) if args.suite == "all" else [args.suite]
    cases = []
    config_echo = {
        "suite": args.suite,
        "nk": args.nk,
        "order": args.order,
        "seed": args.seed,
        "tol": args.tol,
        "l": args.l,
    }
    for name in names:
        kwargs = {}
        if args.seed is not None:
            kwargs["seed"] = args.seed
        if args.nk is not None and name in ("identity", "lifting", "stability"):
            kwargs["nk_list"] = [_parse_nk(args.nk)]
        if args.order is not None and name in ("identity", "poincare"):
            kwargs["order"] = args.order
        if args.tol is not None:
            key = {"identity": "rtol", "lifting": "poly_tol", "poincare": "quotient_tol",
                   "stability": "tol"}[name]
            kwargs[key] = args.tol
        cases.extend(run_suite(name, **kwargs))
    report = _report(args.suite, cases, config_echo)
    _print_table(cases)
    if args.out:
        _emit(report, args.out, args.format)
    return 0 if report["summary"]["failed"] == 0 else 1


def _field_from_args(args):
    spec = OrthantSpec(*_parse_nk(args.nk))
    params = {}
    if args.beta is not None:
        params["beta"] = args.beta
    if args.seed is not None:
        params["seed"] = args.seed
    return catalog_get(args.field, spec, **params), spec


def cmd_deficit(args) -> int:
    fld, spec = _field_from_args(args)
    backend = args.backend
    rep = deficit_report(fld, alpha=args.alpha, backend=backend, order=args.order)
    out = {
        "version": __version__,
        "config_echo": {"field": args.field, "nk": args.nk, "alpha": args.alpha,
                        "beta": args.beta, "seed": args.seed, "backend": backend},
        "deficit": rep.to_dict(),
        "projections": {
            "extremal": dist_to_E(fld).to_dict(),
            "affine": dist_to_affine_family(fld).to_dict(),
            "constrained": dist_to_E_norm_constrained(fld).to_dict(),
            "centered": gaussian_center_dist(fld, args.lam).to_dict(),
        },
    }
    out["checks"] = {
        "rho1_ge_dist": out["deficit"]["rho1"] >= out["projections"]["extremal"]["dist_sq"] - 1e-7,
    }
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        flat = {
            "field": args.field, "nk": args.nk,
            "rho1": rep.rho1, "additive": rep.additive, "identity_rhs": rep.identity_rhs,
            "residual": rep.residual, "alpha_star": rep.alpha_star,
            "dist_E": out["projections"]["extremal"]["dist_sq"],
            "dist_affine": out["projections"]["affine"]["dist_sq"],
            "dist_constrained": out["projections"]["constrained"]["dist_sq"],
        }
        writer.writerow(flat.keys())
        writer.writerow([_fmt(v) for v in flat.values()])
        text = buf.getvalue()
        if args.out:
            open(args.out, "w").write(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(out, args.out, "json")
    return 0


def cmd_sweep(args) -> int:
    spec = OrthantSpec(*_parse_nk(args.nk))
    base = catalog_get(args.base, spec, beta=args.beta) if args.base != "polygauss_random" else \
        catalog_get(args.base, spec, seed=args.seed or 0)
    pert = catalog_get(args.perturbation, spec, beta=args.beta) if args.perturbation != "polygauss_random" else \
        catalog_get(args.perturbation, spec, seed=(args.seed or 0) + 1)
    if args.eps_count < 1 or args.eps_max < args.eps_min:
        raise ParameterError("bad epsilon range")
    rows = []
    for i in range(args.eps_count):
        eps = args.eps_min + (args.eps_max - args.eps_min) * i / max(args.eps_count - 1, 1)
        fld = add_fields(base, pert, c=eps) if eps != 0.0 else base
        rep = deficit_report(fld, alpha=1.0)
        d_e = dist_to_E(fld).dist_sq
        d_aff = dist_to_affine_family(fld).dist_sq
        d_con = dist_to_E_norm_constrained(fld).dist_sq
        g_c = gaussian_center_dist(fld, 1.0).dist_sq
        rows.append({
            "eps": eps,
            "rho1": rep.rho1,
            "additive_1": rep.additive,
            "dist_E": d_e,
            "dist_affine": d_aff,
            "dist_constrained": d_con,
            "margin_deficit_vs_dist": rep.rho1 - d_e,
            "margin_additive_vs_centered": rep.additive - 2.0 * g_c,
            "margin_constrained_half": rep.rho1 - 0.5 * d_con,
        })
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(rows[0].keys())
    for row in rows:
        writer.writerow([_fmt(v) for v in row.values()])
    text = buf.getvalue()
    if args.out:
        open(args.out, "w").write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_rule(args) -> int:
    if args.kind == "hermite":
        rule = hermite_rule(args.order)
    elif args.kind == "half_monomial":
        rule = half_monomial_rule(args.order, args.a)
    elif args.kind == "half_gauss":
        rule = half_gauss_rule(args.order, args.a)
    elif args.kind == "legendre":
        rule = legendre_panel_rule(args.order, args.lo, args.hi)
    else:
        raise ParameterError(f"unknown rule kind {args.kind!r}")
    text = axis_rule_csv(rule)
    if args.out:
        open(args.out, "w").write(text)
    else:
        sys.stdout.write(text)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="orthup",
        description="verify sharp uncertainty-principle identities and stability "
        "inequalities on orthants",
    )
    ap.add_argument("--config", help="JSON file with flag defaults (flags win)")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument("suite", choices=list(SUITE_NAMES) + ["all"])
    v.add_argument("--nk", help="restrict to one orthant, e.g. 2,1")
    v.add_argument("--l", type=int, default=None, help="lift multiplicity hint")
    v.add_argument("--order", type=int, default=None)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--out", default=None)
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("deficit", help="deficit + projection report for one field")
    d.add_argument("field", help="catalogue name: extremal, affine_equality, "
                                 "sharp_example, polygauss_random, bump")
    d.add_argument("--nk", required=True)
    d.add_argument("--beta", type=float, default=None)
    d.add_argument("--alpha", type=float, default=1.0)
    d.add_argument("--lam", "--lambda", dest="lam", type=float, default=1.0)
    d.add_argument("--seed", type=int, default=None)
    d.add_argument("--order", type=int, default=None)
    d.add_argument("--backend", choices=("oracle", "quadrature"), default="oracle")
    d.add_argument("--out", default=None)
    d.add_argument("--format", choices=("json", "csv"), default="json")
    d.set_defaults(func=cmd_deficit)

    s = sub.add_parser("sweep", help="deficit-vs-distance curve along u + eps*perturbation")
    s.add_argument("--base", default="extremal")
    s.add_argument("--perturbation", default="sharp_example")
    s.add_argument("--nk", required=True)
    s.add_argument("--beta", type=float, default=0.5)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--eps-min", type=float, default=0.0)
    s.add_argument("--eps-max", type=float, default=1.0)
    s.add_argument("--eps-count", type=int, default=11)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_sweep)

    r = sub.add_parser("rule", help="dump quadrature nodes/weights as CSV")
    r.add_argument("kind", choices=("hermite", "half_monomial", "half_gauss", "legendre"))
    r.add_argument("--order", type=int, required=True)
    r.add_argument("--a", type=float, default=0.0)
    r.add_argument("--lo", type=float, default=-1.0)
    r.add_argument("--hi", type=float, default=1.0)
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_rule)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args, remaining = ap.parse_known_args(argv)
        if remaining:
            ap.error(f"unrecognized arguments: {remaining}")
        if args.config:
            with open(args.config) as fh:
                defaults = json.load(fh)
            if not isinstance(defaults, dict):
                raise ParameterError("config file must hold a JSON object")
            for key, value in defaults.items():
                attr = key.replace("-", "_")
                if hasattr(args, attr) and getattr(args, attr) is None:
                    setattr(args, attr, value)
        return args.func(args)
    except SystemExit as exc:
        # argparse signals usage errors with its own exit codes; remap to 2
        return 2 if exc.code not in (0, None) else 0
    except (ParameterError, CatalogError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
