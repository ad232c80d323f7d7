"""Command-line front end.

Subcommands: ``pmf`` (one table), ``roots`` (one level crossing), ``bounds``
(threshold constants over a k range), ``scan`` (shape reports over a
parameter grid), ``verify`` (built-in cross-validation suites), ``figs``
(datasets for the four reference figures).

Output is CSV (default) or JSON with the same fields, written to stdout or
``--out``; all floats are printed with 12 significant digits so identical
configurations produce byte-identical output.  Diagnostics and scan
summaries go to stderr.  Exit codes: 0 success, 1 invalid parameters,
2 computation failure, 3 verification-suite failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import oracle, roots, structure
from .pmf import (
    Params,
    build_adaptive_table,
    build_table,
    build_table_km,
    diff_forward,
    diff_km,
    normalize,
)

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract reserves 2 for
    # computation failures, so remap parse errors to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _json_value(x):
    if isinstance(x, float):
        # reparse the 12-digit form so JSON and CSV carry identical values
        return float(format(x, ".12g"))
    return x


def _emit(rows: list[dict], header: list[str], args) -> None:
    out = sys.stdout
    close = False
    if args.out is not None:
        out = open(args.out, "w", encoding="utf-8", newline="")
        close = True
    try:
        if args.format == "csv":
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(row[h]) for h in header])
        else:
            payload = [{h: _json_value(row[h]) for h in header} for row in rows]
            out.write(json.dumps(payload, indent=2))
            out.write("\n")
    finally:
        if close:
            out.close()


# ---------------------------------------------------------------------------
# pmf


def _cmd_pmf(args) -> int:
    params = Params(args.k, args.lam)
    if args.n_max is not None:
        table = build_table(params, args.n_max)
    else:
        table = build_adaptive_table(params, args.epsilon)
    probs = normalize(table)
    rows = []
    cum = 0.0
    for n, (w, f) in enumerate(zip(table.values, probs)):
        cum += f
        rows.append(
            {"n": n, "unnormalized": w, "probability": f, "cumulative": cum}
        )
    _emit(rows, ["n", "unnormalized", "probability", "cumulative"], args)
    return 0


# ---------------------------------------------------------------------------
# roots


def _cmd_roots(args) -> int:
    result = roots.solve_weight_equals(args.k, args.n, args.c, tol=args.tol)
    row = {
        "k": result.k,
        "n": result.n,
        "c": result.c,
        "root": result.root,
        "bracket_low": result.bracket_low,
        "bracket_high": result.bracket_high,
        "tol": result.tol,
        "iterations": result.iterations,
    }
    _emit(
        [row],
        ["k", "n", "c", "root", "bracket_low", "bracket_high", "tol", "iterations"],
        args,
    )
    return 0


# ---------------------------------------------------------------------------
# bounds


def _bounds_status(rec: roots.BoundsRecord) -> str:
    bad = []
    slack = 1e-9
    if rec.k > 2:
        if not rec.root1 < rec.root1_upper:
            bad.append("root1_bound")
    elif abs(rec.root1 - rec.root1_upper) > slack:
        bad.append("root1_bound")
    if rec.root2 > rec.root2_upper * (1.0 + slack):
        bad.append("root2_bound")
    if rec.rise_threshold is not None:
        lo, hi = roots.SQRT5_MINUS_1, (math.sqrt(33.0) - 3.0) / 2.0
        if not lo < rec.rise_threshold <= hi * (1.0 + slack):
            bad.append("rise_range")
    if rec.tail_bound is not None and rec.tail_bound > rec.root2 * (1.0 + slack):
        bad.append("tail_bound")
    return "ok" if not bad else ";".join(bad)


def _cmd_bounds(args) -> int:
    if args.k_max < args.k_min:
        raise ValueError(f"--k-max {args.k_max} below --k-min {args.k_min}")
    rows = []
    for k in range(args.k_min, args.k_max + 1):
        rec = roots.bounds_record(k, tol=args.tol, with_shoulder=not args.no_shoulder)
        rows.append(
            {
                "k": rec.k,
                "root1": rec.root1,
                "root1_upper": rec.root1_upper,
                "root2": rec.root2,
                "root2_upper": rec.root2_upper,
                "rise_threshold": rec.rise_threshold,
                "tail_bound": rec.tail_bound,
                "shoulder": rec.shoulder,
                "status": _bounds_status(rec),
            }
        )
    _emit(
        rows,
        [
            "k",
            "root1",
            "root1_upper",
            "root2",
            "root2_upper",
            "rise_threshold",
            "tail_bound",
            "shoulder",
            "status",
        ],
        args,
    )
    return 0


# ---------------------------------------------------------------------------
# scan


_SCAN_HEADER = [
    "k",
    "lambda",
    "n_max",
    "modes",
    "local_maxima",
    "initial_increase",
    "monotone_tail_from_k",
    "first_tail_violation",
    "mean",
    "mean_mode_gap",
    "mode_bounds_ok",
    "mode_floor_ok",
    "block_nonincreasing",
    "triple_ties",
    "error",
]


def _scan_point(task: tuple) -> dict:
    k, lam, tie_tol, tail_tol, epsilon = task
    row = {h: None for h in _SCAN_HEADER}
    row["k"], row["lambda"], row["error"] = k, lam, ""
    try:
        table = build_adaptive_table(Params(k, lam), epsilon)
        rep = structure.build_report(table, tie_tol=tie_tol, tail_tol=tail_tol)
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        row["error"] = str(exc)
        return row
    row.update(
        {
            "n_max": table.n_max,
            "modes": ";".join(map(str, rep.mode_set.indices)),
            "local_maxima": ";".join(map(str, rep.local_maxima)),
            "initial_increase": rep.initial_increase_ok,
            "monotone_tail_from_k": rep.monotone_tail_from_k,
            "first_tail_violation": rep.first_tail_violation,
            "mean": rep.mean,
            "mean_mode_gap": rep.mean_mode_gap,
            "mode_bounds_ok": rep.thm_bounds_ok,
            "mode_floor_ok": rep.conj_floor_ok,
            "block_nonincreasing": rep.block_assumption_ok,
            "triple_ties": rep.triple_tie_found,
        }
    )
    return row


def _lambda_grid(args, k: int) -> list[float]:
    if args.lam is not None:
        return [args.lam]
    if args.lambda_rule == "mean-k":
        return [2.0 / (k + 1)]
    if args.lambda_rule == "tail-bound":
        return [roots.monotone_tail_bound(k)]
    if args.lambda_rule == "shoulder":
        return [roots.shoulder_lambda(k)]
    start, stop, count = args.lambda_grid
    n = int(count)
    if n < 1 or start <= 0 or stop < start:
        raise ValueError(f"bad lambda grid ({start}, {stop}, {count})")
    if n == 1:
        return [start]
    if args.lambda_spacing == "linear":
        step = (stop - start) / (n - 1)
        return [start + i * step for i in range(n)]
    ratio = (stop / start) ** (1.0 / (n - 1))
    return [start * ratio**i for i in range(n)]


def _cmd_scan(args) -> int:
    if args.k_min < 1:
        raise ValueError(f"--k-min must be >= 1, got {args.k_min}")
    if args.k_max < args.k_min:
        raise ValueError(f"--k-max {args.k_max} below --k-min {args.k_min}")
    if args.k_step < 1:
        raise ValueError(f"--k-step must be >= 1, got {args.k_step}")
    if args.lam is None and args.lambda_grid is None and args.lambda_rule is None:
        raise ValueError(
            "one of --lambda, --lambda-grid, or --lambda-rule is required"
        )
    tasks = []
    for k in range(args.k_min, args.k_max + 1, args.k_step):
        if args.lambda_rule in ("mean-k", "tail-bound", "shoulder") and k < 2:
            raise ValueError(f"--lambda-rule {args.lambda_rule} needs k >= 2")
        for lam in _lambda_grid(args, k):
            tasks.append((k, lam, args.tie_tol, args.tol, args.epsilon))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_scan_point, tasks, chunksize=8))
    else:
        rows = [_scan_point(t) for t in tasks]
    _emit(rows, _SCAN_HEADER, args)

    failures = sum(1 for r in rows if r["error"])
    clean = [r for r in rows if not r["error"]]
    summary = {
        "points": len(rows),
        "errors": failures,
        "mode_bounds_violations": sum(1 for r in clean if r["mode_bounds_ok"] is False),
        "mode_floor_violations": sum(1 for r in clean if r["mode_floor_ok"] is False),
        "triple_ties": sum(1 for r in clean if r["triple_ties"]),
        "tail_violations": sum(
            1 for r in clean if r["monotone_tail_from_k"] is False
        ),
    }
    print(
        "scan summary: " + " ".join(f"{k}={v}" for k, v in summary.items()),
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------------------
# verify


def _suite_oracle_equivalence() -> tuple[bool, str]:
    worst = 0.0
    for k in (2, 3, 4, 5):
        for lam in (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2)):
            table = build_table(Params(k, float(lam)), 15)
            for n in range(16):
                exact = float(oracle.weight_exact(k, n, lam))
                rel = abs(table.values[n] - exact) / exact
                worst = max(worst, rel)
                if rel > 1e-12:
                    return False, (
                        f"k={k} n={n} lam={lam}: got {table.values[n]!r}, "
                        f"want {exact!r} (rel {rel:.3e})"
                    )
    return True, f"k<=5, n<=15, worst rel {worst:.3e}"


def _suite_recurrence_cross_check() -> tuple[bool, str]:
    worst = 0.0
    fmin = sys.float_info.min
    for k in range(1, 11):
        for lam in (0.1, 0.6026076, 4.0 / 3.0, 3.0):
            a = build_table(Params(k, lam), 200)
            b = build_table_km(Params(k, lam), 200)
            for n in range(201):
                x, y = a.values[n], b.values[n]
                if max(x, y) < fmin:
                    # below the normal range floats hold no relative precision
                    if abs(x - y) >= fmin:
                        return False, f"k={k} n={n} lam={lam}: subnormal mismatch"
                    continue
                rel = abs(x - y) / max(x, y)
                worst = max(worst, rel)
                if rel > 1e-10:
                    return False, f"k={k} n={n} lam={lam}: rel gap {rel:.3e}"
    return True, f"k<=10, n<=200, worst rel {worst:.3e}"


def _suite_difference_identities() -> tuple[bool, str]:
    worst = 0.0
    for k in range(1, 7):
        for lam in (0.3, 1.0, 2.0):
            table = build_table(Params(k, lam), 100)
            for n in range(1, 100):
                rep = diff_forward(table, n)
                scale = max(1.0, table.values[n])
                worst = max(worst, rep.abs_gap / scale)
                if rep.abs_gap > 1e-12 * scale:
                    return False, f"forward k={k} n={n} lam={lam}: gap {rep.abs_gap:.3e}"
            for n in range(2, 101):
                rep = diff_km(table, n)
                scale = max(1.0, table.values[n])
                worst = max(worst, rep.abs_gap / scale)
                if rep.abs_gap > 1e-12 * scale:
                    return False, f"km k={k} n={n} lam={lam}: gap {rep.abs_gap:.3e}"
    return True, f"k<=6, n<=100, worst scaled gap {worst:.3e}"


def _suite_closed_form_roots() -> tuple[bool, str]:
    worst = 0.0
    for c in (0.5, 1.0, 2.0, 10.0):
        want = roots.closed_form_root_n2(c)
        for k in (2, 5, 10):
            got = roots.solve_weight_equals(k, 2, c).root
            worst = max(worst, abs(got - want))
            if abs(got - want) > 1e-12:
                return False, f"k={k} c={c}: got {got!r}, want {want!r}"
    return True, f"c in {{0.5,1,2,10}}, k in {{2,5,10}}, worst abs {worst:.3e}"


def _suite_lambda2_coefficients() -> tuple[bool, str]:
    for k in range(2, 13):
        for j in range(1, k + 1):
            got = oracle.lambda2_coefficient(k, j)
            want = Fraction(k + 1 - j, 2)
            if got != want:
                return False, f"k={k} j={j}: got {got}, want {want}"
    return True, "k<=12, exact rational comparison"


def _cmd_verify(args) -> int:
    suites = [
        ("oracle-equivalence", _suite_oracle_equivalence),
        ("recurrence-cross-check", _suite_recurrence_cross_check),
        ("difference-identities", _suite_difference_identities),
        ("closed-form-roots", _suite_closed_form_roots),
        ("lambda2-coefficients", _suite_lambda2_coefficients),
    ]
    failed = False
    for name, run in suites:
        ok, detail = run()
        if ok:
            print(f"{name}: pass ({detail})")
        else:
            failed = True
            print(f"{name}: FAIL ({detail})")
    return 3 if failed else 0


# ---------------------------------------------------------------------------
# figs


_FIG_PARAMS = {2: (4, 0.6026076), 3: (2, 4.0 / 3.0), 4: (2, 4.02373 / 3.0)}


def _cmd_figs(args) -> int:
    if args.figure == 1:
        rows = [
            {
                "k": k,
                "rise_threshold": roots.rise_threshold(k),
                "asymptote": roots.SQRT5_MINUS_1,
            }
            for k in range(2, 101)
        ]
        _emit(rows, ["k", "rise_threshold", "asymptote"], args)
    else:
        k, lam = _FIG_PARAMS[args.figure]
        table = build_adaptive_table(Params(k, lam), args.epsilon)
        rows = [{"n": n, "unnormalized": w} for n, w in enumerate(table.values)]
        _emit(rows, ["n", "unnormalized"], args)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_output_options(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="poisson-order-k",
        description="Poisson distribution of order k: tables, thresholds, audits.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("pmf", help="emit one weight/probability table")
    p.add_argument("--k", type=int, required=True, help="order (>= 1)")
    p.add_argument("--lambda", dest="lam", type=float, required=True, help="rate (> 0)")
    p.add_argument("--n-max", type=int, default=None, help="fixed table length")
    p.add_argument(
        "--epsilon",
        type=float,
        default=1e-10,
        help="mass tolerance for adaptive length (when --n-max is omitted)",
    )
    _add_output_options(p)
    p.set_defaults(func=_cmd_pmf)

    p = sub.add_parser("roots", help="solve one level crossing of the weights")
    p.add_argument("--k", type=int, required=True, help="order (>= 1)")
    p.add_argument("--n", type=int, required=True, help="weight index (>= 1)")
    p.add_argument("--c", type=float, required=True, help="level (> 0)")
    p.add_argument("--tol", type=float, default=1e-13, help="relative tolerance")
    _add_output_options(p)
    p.set_defaults(func=_cmd_roots)

    p = sub.add_parser("bounds", help="threshold constants over a k range")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-13, help="solver tolerance")
    p.add_argument(
        "--no-shoulder", action="store_true", help="skip the shoulder column"
    )
    _add_output_options(p)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("scan", help="shape reports over a (k, lambda) grid")
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--k-step", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="fixed rate")
    p.add_argument(
        "--lambda-grid",
        nargs=3,
        type=float,
        metavar=("START", "STOP", "COUNT"),
        default=None,
        help="rate grid as start stop count",
    )
    p.add_argument(
        "--lambda-spacing",
        choices=("linear", "geometric"),
        default="geometric",
        help="spacing of --lambda-grid",
    )
    p.add_argument(
        "--lambda-rule",
        choices=("mean-k", "tail-bound", "shoulder"),
        default=None,
        help="per-k rate rule: mean-k is 2/(k+1) (mean equals k), tail-bound "
        "the proved monotone-tail bound, shoulder the equal-pair rate",
    )
    p.add_argument("--tie-tol", type=float, default=1e-9, help="mode tie tolerance")
    p.add_argument("--tol", type=float, default=1e-12, help="tail comparison tolerance")
    p.add_argument("--epsilon", type=float, default=1e-10, help="mass tolerance")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    _add_output_options(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("verify", help="run the built-in cross-validation suites")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("figs", help="emit the dataset for one reference figure")
    p.add_argument("figure", type=int, choices=(1, 2, 3, 4), help="figure id")
    p.add_argument("--epsilon", type=float, default=1e-10, help="mass tolerance")
    _add_output_options(p)
    p.set_defaults(func=_cmd_figs)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, ArithmeticError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
