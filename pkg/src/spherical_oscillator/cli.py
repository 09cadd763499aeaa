"""Command-line front end.

    sphosc spectrum   -d 2 --omega 3.4641016151 --lambda-max 50
    sphosc partition  -d 1 --omega 0 -t 1 --check-poisson
    sphosc verify     -d 2 --omega 0 -n 0,1 --count 3
    sphosc mulholland --order 3
    sphosc chiral     -t 2 --k-max 6 --exponent-mode shifted

Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from typing import Any, Optional, Sequence

from . import __version__
from .chiral import EXPONENT_MODES, chiral_partition
from .oracle import DiscretizationConfig, lowest_eigenvalues
from .partition import BudgetExceeded, mulholland_coeffs, partition_function, poisson_dual_d1
from .spectrum import (
    DEFAULT_GROUPING_TOL,
    ModelParams,
    eigenvalue,
    enumerate_spectrum,
    group_degeneracies,
    lowest_records,
)

FORMATS = ("table", "json", "csv")


class NumericFailure(RuntimeError):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(value: Any, digits: int) -> str:
    if isinstance(value, float):
        return format(value, f".{digits}g")
    if isinstance(value, (list, tuple)):
        return " ".join(_fmt(v, digits) for v in value)
    return str(value)


def render(payload: dict, fmt: str) -> str:
    """Serialize a payload; ``payload["rows"]`` with ``payload["columns"]`` drives table/csv."""
    if fmt == "json":
        return json.dumps(payload, indent=2, allow_nan=True) + "\n"
    columns, rows = payload["columns"], payload["rows"]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c], 17) for c in columns])
        return buf.getvalue()
    cells = [[_fmt(row[c], 10) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells]
    lines += [f"# {note}" for note in payload.get("notes", [])]
    return "\n".join(lines) + "\n"


def _payload(command: str, parameters: dict, results: dict, columns, rows, notes=()) -> dict:
    return {
        "command": command,
        "version": __version__,
        "parameters": parameters,
        "results": results,
        "columns": list(columns),
        "rows": rows,
        "notes": list(notes),
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_spectrum(args) -> dict:
    params = ModelParams(args.d, args.omega)
    if args.lambda_max is not None:
        records = enumerate_spectrum(params, args.lambda_max)
    else:
        records = lowest_records(params, args.count)
    groups = group_degeneracies(records, args.tol)
    group_of = {}
    for gi, g in enumerate(groups):
        for mode in g.members:
            group_of[mode] = gi
    rows = [
        {
            "lambda": g.value,
            "multiplicity": g.total_multiplicity,
            "modes": ";".join(f"({m.m},{m.n})" for m in g.members),
            "degenerate": g.degenerate,
        }
        for g in groups
    ]
    results = {
        "records": [
            {
                "m": r.mode.m,
                "n": r.mode.n,
                "lambda": r.lam,
                "lambda_shifted": r.lam_shifted,
                "multiplicity": r.multiplicity,
                "group": group_of[r.mode],
            }
            for r in records
        ],
        "groups": [
            {
                "value": g.value,
                "members": [[m.m, m.n] for m in g.members],
                "total_multiplicity": g.total_multiplicity,
                "degenerate": g.degenerate,
            }
            for g in groups
        ],
    }
    notes = [f"degenerate: lambda={g.value:.10g} modes {rows[i]['modes']}" for i, g in enumerate(groups) if g.degenerate]
    parameters = {"d": args.d, "omega": args.omega, "lambda_max": args.lambda_max, "count": args.count, "grouping_tol": args.tol}
    return _payload("spectrum", parameters, results, ["lambda", "multiplicity", "modes", "degenerate"], rows, notes)


def cmd_partition(args) -> dict:
    params = ModelParams(args.d, args.omega)
    if args.check_poisson and (args.d != 1 or args.omega != 0.0):
        raise NumericFailure("--check-poisson applies to d=1, omega=0 only")
    rows = []
    for t in args.t:
        res = partition_function(params, t, args.tol)
        row = {"t": t, "value": res.value, "tail_bound": res.tail_bound, "terms_used": res.terms_used}
        if args.check_poisson:
            dual = poisson_dual_d1(t)
            row["poisson_dual"] = dual
            row["deviation"] = abs(res.value - dual)
        rows.append(row)
    columns = ["t", "value", "tail_bound", "terms_used"]
    results = {"values": rows}
    if args.check_poisson:
        columns += ["poisson_dual", "deviation"]
        results["max_deviation"] = max(r["deviation"] for r in rows)
    parameters = {"d": args.d, "omega": args.omega, "t": args.t, "abs_tol": args.tol}
    return _payload("partition", parameters, results, columns, rows)


def _closed_forms(params: ModelParams, n: int, count: int) -> list[float]:
    if params.d == 1:
        values: list[float] = []
        for rec in lowest_records(params, count):
            values += [rec.lam] * rec.multiplicity
        return values[:count]
    return [eigenvalue(params, (m, n)) for m in range(count)]


def cmd_verify(args) -> dict:
    params = ModelParams(args.d, args.omega)
    degrees = [0] if args.d == 1 else args.n
    rows = []
    notes = []
    for n in degrees:
        sol = lowest_eigenvalues(DiscretizationConfig(args.grid, n, params), args.count)
        exact = _closed_forms(params, n, args.count)
        for i, (o, e, err) in enumerate(zip(sol.eigenvalues, exact, sol.estimated_error)):
            rel = abs(o - e) / max(1.0, abs(e))
            rows.append(
                {"n": n, "index": i, "closed_form": e, "oracle": o, "rel_error": rel, "estimated_error": err}
            )
    worst = max(r["rel_error"] for r in rows)
    ok = worst <= args.rtol
    if args.d == 1:
        notes.append("d=1: full circle assembled; closed forms listed with multiplicity")
    results = {"rows": rows, "max_rel_error": worst, "rtol": args.rtol, "passed": ok}
    parameters = {"d": args.d, "omega": args.omega, "n": degrees, "count": args.count, "grid": args.grid}
    payload = _payload(
        "verify", parameters, results,
        ["n", "index", "closed_form", "oracle", "rel_error", "estimated_error"], rows, notes,
    )
    payload["exit_code"] = 0 if ok else 1
    return payload


def cmd_mulholland(args) -> dict:
    coeffs = mulholland_coeffs(args.order)
    rows = [
        {"n": i, "fraction": f"{c.numerator}/{c.denominator}", "decimal": float(c)}
        for i, c in enumerate(coeffs.coefficients)
    ]
    return _payload("mulholland", {"order": args.order}, {"coefficients": rows}, ["n", "fraction", "decimal"], rows)


def cmd_chiral(args) -> dict:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = chiral_partition(args.t, args.k_max, args.tol, args.exponent_mode)
    row = {
        "t": res.t,
        "k_max": res.k_max,
        "exponent_mode": res.exponent_mode,
        "value": res.value,
        "rel_error_bound": res.rel_error_bound,
        "level_diagnostic": res.level_diagnostic,
        "converged": res.converged,
    }
    results = dict(row, level_factors=list(res.level_factors), eta=res.eta, terms_used=res.terms_used)
    notes = [f"exponent mode: {res.exponent_mode}"]
    if not res.converged:
        notes.append("level product not converged: last factor differs from 1 by more than --tol")
    parameters = {"t": args.t, "k_max": args.k_max, "abs_tol": args.tol, "exponent_mode": args.exponent_mode}
    return _payload("chiral", parameters, results, list(row), [row], notes)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sphosc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("-d", type=int, required=True, help="sphere dimension d >= 1")
            p.add_argument("--omega", type=float, required=True, help="frequency omega >= 0")
        p.add_argument("--format", choices=FORMATS, default="table")
        p.add_argument("--out", help="also write the output to this file")

    p = sub.add_parser("spectrum", help="eigenvalues, multiplicities and degeneracies")
    common(p)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--lambda-max", type=float)
    grp.add_argument("--count", type=int)
    p.add_argument("--tol", type=float, default=DEFAULT_GROUPING_TOL, help="degeneracy grouping tolerance")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("partition", help="certified heat traces tr exp(-t L)")
    common(p)
    p.add_argument("-t", type=_float_list, action="extend", required=True, help="t values (repeat or comma-separate)")
    p.add_argument("--tol", type=float, default=1e-12, help="absolute tolerance")
    p.add_argument("--check-poisson", action="store_true", help="compare with the dual theta series (d=1, omega=0)")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("verify", help="closed forms against the finite-volume oracle")
    common(p)
    p.add_argument("-n", type=_int_list, default=[0], help="angular degrees (comma-separated)")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--grid", type=int, default=4000)
    p.add_argument("--rtol", type=float, default=1e-3)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mulholland", help="exact small-t coefficients of sum (2n+1) exp(-t (n+1/2)^2)")
    common(p, model=False)
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=cmd_mulholland)

    p = sub.add_parser("chiral", help="conjectural chiral-model partition function")
    common(p, model=False)
    p.add_argument("-t", type=float, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--exponent-mode", choices=EXPONENT_MODES, default="verbatim")
    p.set_defaults(func=cmd_chiral)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = args.func(args)
    except (BudgetExceeded, NumericFailure, ArithmeticError) as exc:
        print(f"sphosc: numerical failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # invalid parameter values that argparse cannot see (omega < 0, d = 0, ...)
        if "abs_tol" in str(exc):
            print(f"sphosc: numerical failure: {exc}", file=sys.stderr)
            return 1
        parser.error(str(exc))
    exit_code = payload.pop("exit_code", 0)
    text = render(payload, args.format)
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
