"""Command-line interface: ``gbchern {coefficients,verify,gauss-bonnet,density}``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on a
configuration error (unknown model, bad flag value, unavailable mode).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import combinat as cb
from . import gauss_bonnet as gb
from . import geometry_models as gm
from . import metric_engine as me
from . import verify
from .errors import ConfigError, DomainError, MetricError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
M_MAX_LIMIT = 20


def _frac(x) -> str:
    return str(Fraction(x))


# --- commands --------------------------------------------------------------

def coefficient_rows(m_max: int) -> tuple[list[dict], list[str]]:
    rows, problems = [], []
    for m in range(2, m_max + 1, 2):
        ks = range(m // 2)
        row = {"m": m}
        for k in ks:
            if cb.coeff_b(m, k) != cb.coeff_a(m, k) * 2 ** k * math.factorial(k) * math.factorial(m - 2 * k - 1):
                problems.append(f"m={m}, k={k}: b != a 2^k k! (m-2k-1)!")
        try:
            row["a"] = [_frac(cb.coeff_a(m, k)) for k in ks]
            row["b"] = [_frac(cb.coeff_b(m, k)) for k in ks]
            row["c"] = [_frac(cb.coeff_c(m, k)) for k in ks]
            gam = [cb.coeff_gamma(m, k) for k in ks]
        except ArithmeticError as exc:
            problems.append(f"m={m}: {exc}")
            rows.append(row)
            continue
        row["gamma"] = [_frac(g) for g in gam]
        row["gamma_sum"] = _frac(sum(gam))
        row["double_factorial_m_minus_2"] = cb.double_factorial(m - 2)
        if sum(gam) != cb.double_factorial(m - 2):
            problems.append(f"m={m}: sum of gamma {sum(gam)} != (m-2)!!")
        row["lambda"] = [[_frac(cb.coeff_lambda(m, k, r)) for r in ks] for k in ks]
        rows.append(row)
    return rows, problems


def cmd_coefficients(args) -> tuple[object, int]:
    if args.m_max < 2 or args.m_max % 2 or args.m_max > M_MAX_LIMIT:
        raise ConfigError(f"--m-max must be even and in [2, {M_MAX_LIMIT}]")
    rows, problems = coefficient_rows(args.m_max)
    try:
        diag = [{k: (_frac(v) if isinstance(v, Fraction) else v) for k, v in d.items()}
                for d in cb.gamma_discrepancies(args.m_max)]
    except ArithmeticError as exc:
        diag = []
        problems.append(f"gamma diagnostic: {exc}")
    payload = {"schema": 1, "command": "coefficients", "m_max": args.m_max, "rows": rows,
               "gamma_alt_discrepancies": diag, "problems": problems}
    return payload, EXIT_FAIL if problems else EXIT_OK


def cmd_verify(args) -> tuple[object, int]:
    reports = verify.run_suite(args.suite)
    payload = {"schema": 1, "command": "verify", "suite": args.suite,
               "passed": all(r.passed for r in reports),
               "reports": [r.to_json() for r in reports]}
    return payload, EXIT_OK if payload["passed"] else EXIT_FAIL


def cmd_gauss_bonnet(args) -> tuple[object, int]:
    exact = None if args.mode is None else args.mode == "exact"
    model = gm.build_model(args.model, exact)
    try:
        report = gb.euler_estimate(model, args.method, args.quad_level, args.quad_nodes)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    payload = report.to_json()
    payload["command"] = "gauss-bonnet"
    if payload.get("kind") != "flat" and args.formulation != "both":
        drop = "c" if args.formulation == "b" else "b"
        for key in (f"boundary_{drop}", f"chi_estimate_{drop}", f"abs_err_{drop}"):
            payload.pop(key, None)
            payload.get("exact", {}).pop(key, None)
    errs = [v for k, v in payload.items() if k.startswith("abs_err")]
    payload["tolerance"] = args.tol
    payload["passed"] = all(e <= args.tol for e in errs)
    return payload, EXIT_OK if payload["passed"] else EXIT_FAIL


def _parse_point(text: str | None, chart) -> np.ndarray:
    if text is None:
        return me.default_point(chart)
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise ConfigError(f"--point must be comma-separated numbers, got {text!r}") from exc


def cmd_density(args) -> tuple[object, int]:
    name = gm.parse_selector(args.selector)[0]
    if name in gm.REGISTRY:
        exact = None if args.mode is None else args.mode == "exact"
        model = gm.build_model(args.selector, exact)
        R = model.curvature_at()
        out = {"schema": 1, "command": "density", "source": "model", "model": model.name, "m": model.m}
        if model.m % 2 == 0:
            out["gb_density"] = str(gb.gb_density(R, model.m))
        out["lk_densities"] = [str(gb.lk_density(R, model.m, k)) for k in range(model.m // 2 + 1)]
        if model.boundary is not None:
            out["boundary_gauss_kronecker"] = str(gb.gauss_kronecker(model.boundary.h))
        out["curvature"] = R.to_json()
        return out, EXIT_OK
    if args.mode == "exact":
        raise ConfigError("chart densities are finite-difference values; exact mode is not available")
    chart = me.build_chart(args.selector, args.fd_step)
    x = _parse_point(args.point, chart)
    try:
        fc = me.curvature_frame(chart, x)
        res = me.structure_residuals(chart, x)
    except MetricError as exc:
        raise ConfigError(str(exc)) from exc
    out = {"schema": 1, "command": "density", "source": "chart", "chart": chart.name,
           "m": chart.dim, "point": x.tolist(), "fd_step": chart.fd_step,
           "sectional": {f"{i},{j}": v for (i, j), v in fc.sectional.items()},
           "residuals": res.as_dict()}
    if chart.dim % 2 == 0:
        out["gb_density"] = float(gb.gb_density(fc.R_frame, chart.dim))
    out["scalar_curvature"] = float(fc.R_frame.full_contract())
    return out, EXIT_OK


# --- output ----------------------------------------------------------------

def _text(payload: dict) -> str:
    cmd = payload.get("command")
    lines = []
    if cmd == "verify":
        for r in payload["reports"]:
            lines.append(f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']}: {r['computed']}")
            lines.extend(f"      {d}" for d in r["details"])
    elif cmd == "coefficients":
        for row in payload["rows"]:
            lines.append(f"m={row['m']}")
            for key in ("a", "b", "c", "gamma"):
                if key in row:
                    lines.append(f"  {key:6s} {', '.join(row[key])}")
            if "gamma_sum" in row:
                lines.append(f"  sum gamma = {row['gamma_sum']}  (m-2)!! = {row['double_factorial_m_minus_2']}")
        lines.extend(f"problem: {p}" for p in payload["problems"])
    else:
        for key, value in payload.items():
            if key not in ("schema", "command", "curvature"):
                lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _csv(payload: dict) -> str:
    buf = io.StringIO()
    cmd = payload.get("command")
    if cmd == "verify":
        rows = [{k: r[k] for k in ("name", "passed", "expected", "computed", "tolerance", "provenance")}
                for r in payload["reports"]]
    elif cmd == "coefficients":
        rows = []
        for row in payload["rows"]:
            for k in range(len(row.get("a", []))):
                rows.append({"m": row["m"], "k": k, "a": row["a"][k], "b": row["b"][k],
                             "c": row["c"][k], "gamma": row["gamma"][k]})
    else:
        rows = [{k: v for k, v in payload.items() if not isinstance(v, (dict, list))}]
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def render(payload: dict, fmt: str, timestamp: bool) -> str:
    if fmt == "json":
        if timestamp:
            payload = dict(payload, generated=datetime.now(timezone.utc).isoformat())
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return _csv(payload)
    return _text(payload)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--no-timestamp", action="store_true", help="omit the generation time")

    p = argparse.ArgumentParser(prog="gbchern", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coefficients", parents=[common], help="print exact coefficient tables")
    c.add_argument("--m-max", type=int, default=12)
    c.set_defaults(func=cmd_coefficients)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=tuple(verify.SUITES))
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gauss-bonnet", parents=[common], help="Euler characteristic estimate for a model")
    g.add_argument("model", help='model selector such as "sphere:m=4"')
    g.add_argument("--mode", choices=("exact", "float"), default=None)
    g.add_argument("--formulation", choices=("b", "c", "both"), default="both")
    g.add_argument("--method", choices=("auto", "closed-form", "quadrature"), default="auto")
    g.add_argument("--quad-level", type=int, default=3)
    g.add_argument("--quad-nodes", type=int, default=32)
    g.add_argument("--tol", type=float, default=1e-6)
    g.set_defaults(func=cmd_gauss_bonnet)

    d = sub.add_parser("density", parents=[common], help="curvature densities of a model or chart")
    d.add_argument("selector", help='model or chart selector such as "round-sphere:m=2"')
    d.add_argument("--mode", choices=("exact", "float"), default=None)
    d.add_argument("--point", help="comma-separated chart coordinates")
    d.add_argument("--fd-step", type=float, default=me.DEFAULT_STEP)
    d.set_defaults(func=cmd_density)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, code = args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"gbchern: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = render(payload, args.format, not args.no_timestamp)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
