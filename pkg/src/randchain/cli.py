"""Command-line interface: ``randchain {pk,moments,verify,simulate,compare}``.

Every command builds one JSON-shaped record; ``--format`` picks the
renderer. Exit status is 0 when everything checked passes, 1 when a check
fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .distribution import (
    COMPOSITION_CAP,
    CompositionCapError,
    pgf_recurrence,
    pk_closed,
    pk_composition,
    pk_table_recurrence,
)
from .exact import fmt_rational, parse_rational
from .moments import Route, moment_table
from .simulator import SimSummary, compare_to_exact, default_jobs, estimate, exact_targets
from .verify import SUITES, all_passed, run_suite

FORMAT_VERSION = "1"
MAX_N_LIMIT = 60
MAX_K_LIMIT = 60
DEGREE_LIMIT = 40
DEFAULT_MAX_N = 16
DEFAULT_MAX_K = 16
DEFAULT_DEGREE = 12

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- serialisation ------------------------------------------------------------


def fmt_float(x: float) -> str:
    return format(x, ".15g")


def _plain(value: Any) -> Any:
    """Rationals to "p/q", floats rounded to 15 significant digits."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return fmt_rational(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return fmt_float(value)
        return float(fmt_float(value))
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    raise TypeError(f"cannot serialise {type(value).__name__}")


def make_record(command: str, params: Dict[str, Any], payload: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "command": command,
        "params": _plain(params),
        "payload": _plain(payload),
    }


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return ""
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


def _tabular(payload: Dict[str, Any]):
    if "columns" in payload:
        return payload["columns"], payload["rows"]
    if "checks" in payload:
        cols = ["statistic", "empirical", "exact", "se", "z", "pass"]
        rows = [[c[k] for k in cols] for c in payload["checks"]]
        chi = payload["chi_square"]
        rows.append([f"chi2 (dof={chi['dof']})", chi["statistic"], None, None, f"p={_cell(chi['p_value'])}", chi["pass"]])
        return cols, rows
    return ["key", "value"], [[k, v] for k, v in payload.items()]


def render(record: Dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, indent=2) + "\n"
    columns, rows = _tabular(record["payload"])
    cells = [[_cell(v) for v in row] for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(cells)
        return buf.getvalue()
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


# -- commands -----------------------------------------------------------------


def cmd_pk(args) -> tuple:
    n, method = args.n, args.method
    if method in ("composition", "all") and n > COMPOSITION_CAP:
        raise CompositionCapError(
            f"composition enumeration is capped at n <= {COMPOSITION_CAP} (got n={n})"
        )
    if args.k is not None:
        ks = [args.k]
    else:
        # p_0 vanishes for n >= 1, and p_0^(0) = 1 is the only row at n = 0
        ks = [0] if n == 0 else list(range(1, n + 1))
    if method == "all":
        table = pk_table_recurrence(n)
        pgf = pgf_recurrence(n)[n]
        rows, agree_all = [], True
        for k in ks:
            vals = [pk_composition(n, k), table.get((n, k), Fraction(0)), pgf.coefficient(k), pk_closed(n, k)]
            agree = all(v == vals[0] for v in vals)
            agree_all &= agree
            rows.append([n, k, vals[3]] + vals + [agree])
        columns = ["n", "k", "p", "composition", "recurrence", "pgf", "closed", "agree"]
        return {"columns": columns, "rows": rows}, agree_all
    if method == "composition":
        value = lambda k: pk_composition(n, k)  # noqa: E731
    elif method == "recurrence":
        table = pk_table_recurrence(n)
        value = lambda k: table.get((n, k), Fraction(0))  # noqa: E731
    else:
        value = lambda k: pk_closed(n, k)  # noqa: E731
    return {"columns": ["n", "k", "p"], "rows": [[n, k, value(k)] for k in ks]}, True


def cmd_moments(args) -> tuple:
    routes = [Route.RECURRENCE, Route.CLOSED, Route.FROM_P] if args.method == "all" else [Route(args.method)]
    tables = {r: moment_table(args.max_n, args.max_k, r) for r in routes}
    first = tables[routes[0]]
    columns = ["n", "k", "EV", "q", "route"]
    if len(routes) > 1:
        columns += [r.value for r in routes] + ["agree"]
    if args.raw:
        columns.append("EV_raw")
    if args.decimal:
        columns.append("EV_decimal")
    rows, agree_all = [], True
    for cell in first.cells():
        ev = first[cell]
        row: List[Any] = [cell[0], cell[1], ev, first.q[cell], first.route[cell].value]
        if len(routes) > 1:
            vals = [tables[r][cell] for r in routes]
            agree = all(v == ev for v in vals)
            agree_all &= agree
            row += vals + [agree]
        if args.raw:
            row.append(ev / 2 ** cell[1])
        if args.decimal:
            row.append(fmt_float(float(ev)))
        rows.append(row)
    return {"columns": columns, "rows": rows}, agree_all


def cmd_verify(args) -> tuple:
    results = run_suite(args.suite, args.max_n, args.max_k, args.degree)
    rows = [[r.suite, r.name, r.passed, r.cases, r.residual] for r in results]
    return {"columns": ["suite", "check", "pass", "cases", "max_residual"], "rows": rows}, all_passed(results)


def cmd_simulate(args) -> tuple:
    summary = estimate(
        args.n, args.samples, args.seed, args.max_k, jobs=args.jobs, exact_area=args.exact_area
    )
    return summary.to_dict(), True


def _load_json(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _payload(doc: Dict[str, Any]) -> Dict[str, Any]:
    return doc["payload"] if "payload" in doc and "format_version" in doc else doc


def _column(payload: Dict[str, Any], name: str) -> int:
    try:
        return payload["columns"].index(name)
    except (KeyError, ValueError):
        raise UsageError(f"table has no column {name!r}") from None


def _exact_from_files(n: int, max_k: int, moments_path: Optional[str], pk_path: Optional[str]) -> dict:
    exact = exact_targets(n, max_k)
    if moments_path:
        p = _payload(_load_json(moments_path))
        ni, ki, ei = (_column(p, c) for c in ("n", "k", "EV"))
        ev = {int(r[ki]): parse_rational(r[ei]) for r in p["rows"] if int(r[ni]) == n}
        missing = [k for k in range(1, max_k + 1) if k not in ev]
        if missing:
            raise UsageError(f"exact moments table lacks n={n}, k={missing}")
        exact["EV"] = {k: ev[k] for k in range(1, max_k + 1)}
    if pk_path:
        p = _payload(_load_json(pk_path))
        ni, ki, pi = (_column(p, c) for c in ("n", "k", "p"))
        probs = {int(r[ki]): parse_rational(r[pi]) for r in p["rows"] if int(r[ni]) == n}
        if not probs:
            raise UsageError(f"probability table has no rows for n={n}")
        row = [probs.get(k, Fraction(0)) for k in range(n + 1)]
        if sum(row) != 1:
            raise UsageError(f"probabilities for n={n} do not sum to 1")
        exact["pk"] = row
        exact["EN"] = sum((k * p for k, p in enumerate(row)), Fraction(0))
        exact["EN2"] = sum((k * k * p for k, p in enumerate(row)), Fraction(0))
    return exact


def cmd_compare(args) -> tuple:
    doc = _payload(_load_json(args.summary))
    try:
        summary = SimSummary.from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"not a simulation summary: {exc}") from None
    if summary.samples < 1 or not summary.counts:
        return {"n": summary.n, "samples": summary.samples, "error": "summary has no samples", "pass": False}, False
    exact = _exact_from_files(summary.n, summary.max_k, args.exact, args.pk)
    report = compare_to_exact(summary, exact)
    return report, report["pass"]


# -- argument parsing -----------------------------------------------------------


def _bounded_int(lo: int, hi: Optional[int] = None):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid integer: {text!r}") from None
        if v < lo or (hi is not None and v > hi):
            bound = f">= {lo}" if hi is None else f"in [{lo}, {hi}]"
            raise argparse.ArgumentTypeError(f"must be {bound} (got {v})")
        return v

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randchain",
        description="Exact vertex-count distribution and area moments of random convex chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("pk", help="probabilities P(N_n = k)")
    p.add_argument("--n", type=_bounded_int(0, MAX_N_LIMIT), required=True)
    p.add_argument("--k", type=_bounded_int(0))
    p.add_argument("--method", choices=("composition", "recurrence", "closed", "all"), default="closed")
    add_format(p)
    p.set_defaults(func=cmd_pk)

    p = sub.add_parser("moments", help="moments E V_n^k of the normalized area")
    p.add_argument("--max-n", type=_bounded_int(0, MAX_N_LIMIT), default=DEFAULT_MAX_N)
    p.add_argument("--max-k", type=_bounded_int(0, MAX_K_LIMIT), default=DEFAULT_MAX_K)
    p.add_argument("--method", choices=[r.value for r in Route] + ["all"], default="recurrence")
    p.add_argument("--raw", action="store_true", help="add E vol(T_n)^k = E V_n^k / 2^k")
    p.add_argument("--decimal", action="store_true", help="add a 15-digit decimal column")
    add_format(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("verify", help="run cross-route and identity checks")
    p.add_argument("--max-n", type=_bounded_int(0, MAX_N_LIMIT), default=DEFAULT_MAX_N)
    p.add_argument("--max-k", type=_bounded_int(0, MAX_K_LIMIT), default=DEFAULT_MAX_K)
    p.add_argument("--degree", type=_bounded_int(0, DEGREE_LIMIT), default=DEFAULT_DEGREE)
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    add_format(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo estimates for one n")
    p.add_argument("--n", type=_bounded_int(0), required=True)
    p.add_argument("--samples", type=_bounded_int(1), required=True)
    p.add_argument("--seed", type=_bounded_int(0, 2**64 - 1), required=True)
    p.add_argument("--max-k", type=_bounded_int(1), default=2)
    p.add_argument("--jobs", type=_bounded_int(1), default=None,
                   help="worker processes (default: $RANDCHAIN_JOBS or 1)")
    p.add_argument("--exact-area", action="store_true", help="rational shoelace per replicate")
    p.add_argument("--format", choices=("table", "csv", "json"), default="json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="z-scores of a simulation summary against exact values")
    p.add_argument("--summary", required=True, help="JSON from `simulate`")
    p.add_argument("--exact", help="JSON from `moments --format json` (computed if omitted)")
    p.add_argument("--pk", help="JSON from `pk --format json` (computed if omitted)")
    add_format(p)
    p.set_defaults(func=cmd_compare)
    return parser


def _params(args) -> Dict[str, Any]:
    skip = {"func", "command", "format"}
    if args.command == "simulate":
        skip.add("jobs")  # worker count never changes the output
    return {k: v for k, v in vars(args).items() if k not in skip}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and args.jobs is None:
        args.jobs = default_jobs()
    try:
        payload, ok = args.func(args)
    except (CompositionCapError, UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"randchain {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    record = make_record(args.command, _params(args), payload)
    sys.stdout.write(render(record, args.format))
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
