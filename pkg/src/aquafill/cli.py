"""Command-line interface: ``aquafill <subcommand> ...`` or ``python -m aquafill``.

Exit codes: 0 on success, 1 on invalid input (or a failed ``check``), 2 when
a computational guard trips.
"""

from __future__ import annotations

import argparse
import glob as globlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from .core import Majorization, compare_majorization, format_rational, to_rational
from .errors import AquafillError, GuardError, NotNested, ValidationError
from .hindsight import solve_hindsight
from .objectives import objective
from .policies import ExpectationMode, make_policy, run_policy
from .regret import (
    SearchConfig,
    alpha_regret,
    cr_table,
    numeric_minimax_regret,
)
from .sequences import is_nested, load_sequence
from .transforms import adaptive_game, deviate, nestify, worstcase_upper_triangular
from .waterfill import run_waterfill


def _mode(args) -> ExpectationMode:
    samples = getattr(args, "samples", None)
    if samples:
        return ExpectationMode.monte_carlo(samples, args.seed)
    return ExpectationMode.exact()


def _nested_input(E, args):
    if getattr(args, "chain", False):
        return nestify(E)[0]
    if not is_nested(E):
        raise NotNested("input is not nested; pass --chain to nestify it first")
    return E


# -- per-instance commands ---------------------------------------------------


def do_run(E, args) -> dict:
    trace = run_policy(E, make_policy(args.policy), args.seed)
    if args.summary:
        out = {"final_loads": trace.final_loads.to_json()}
        if args.objective:
            out["objectives"] = {o: objective(o)(trace.final_loads) for o in args.objective}
        return out
    return trace.to_dict()


def do_opt(E, args) -> dict:
    sol = solve_hindsight(E)
    return {
        "loads": sol.loads.to_json(),
        "levels": [format_rational(v) for v in sol.levels],
        "blocks": [sorted(b) for b in sol.blocks],
        "allocation": [x.to_json() for x in sol.allocation],
    }


def do_nestify(E, args) -> dict:
    out, audit = nestify(E)
    if args.audit:
        return {"instance": out.to_dict(), "audit": audit.to_dict()}
    return out.to_dict()


def do_deviate(E, args) -> dict:
    out, audit = deviate(_nested_input(E, args), make_policy(args.policy), _mode(args))
    if args.audit:
        return {"instance": out.to_dict(), "audit": audit.to_dict()}
    return out.to_dict()


def do_worstcase(E, args) -> dict:
    out = worstcase_upper_triangular(_nested_input(E, args))
    return out.to_dict()


def do_transform(E, args) -> dict:
    kind = {"nestify": do_nestify, "deviate": do_deviate, "worstcase": do_worstcase}
    return kind[args.kind](E, args)


def do_game(E, args) -> dict:
    return adaptive_game(make_policy(args.policy), _nested_input(E, args), args.seed).to_dict()


def do_regret(E, args) -> dict:
    spec = objective(args.objective[0] if args.objective else "nsw")
    report = alpha_regret(E, make_policy(args.policy), spec, args.alpha, _mode(args))
    return report.to_dict()


def do_check(E, args) -> dict:
    """Validity, nestedness, and (with ``--source``) the nestification guarantees."""
    wf = run_waterfill(E).final_loads
    opt = solve_hindsight(E).loads
    out = {"valid": True, "nested": is_nested(E), "n": E.n, "m": E.m,
           "total": format_rational(E.total_quantity()),
           "waterfill": wf.to_json(), "opt": opt.to_json()}
    ok = True
    if args.source:
        src = load_sequence(args.source)
        src_wf = run_waterfill(src).final_loads
        src_opt = solve_hindsight(src).loads
        wf_rel = compare_majorization(src_wf, wf)
        opt_rel = compare_majorization(src_opt, opt)
        out["source"] = args.source
        out["waterfill_relation"] = wf_rel.value
        out["opt_relation"] = opt_rel.value
        ok = (out["nested"]
              and wf_rel in (Majorization.RIGHT_MAJORIZES_LEFT, Majorization.EQUIVALENT)
              and opt_rel in (Majorization.LEFT_MAJORIZES_RIGHT, Majorization.EQUIVALENT))
    out["ok"] = bool(ok)
    return out


def _run_one(task):
    func, path, args = task
    return func(load_sequence(path), args)


def _per_instance(func):
    def handler(args) -> dict:
        if args.glob:
            paths = sorted(globlib.glob(args.glob))
            plain = argparse.Namespace(**{k: v for k, v in vars(args).items() if k != "handler"})
            tasks = [(func, p, plain) for p in paths]
            if args.jobs > 1 and len(tasks) > 1:
                with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                    results = list(pool.map(_run_one, tasks))
            else:
                results = [_run_one(t) for t in tasks]
            return {p: r for p, r in zip(paths, results)}
        if not args.input:
            raise ValidationError("an input file (or --glob) is required")
        return _run_one((func, args.input, args))
    return handler


# -- instance-free commands ----------------------------------------------------


def parse_range(text: str) -> list:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise ValidationError(f"bad n range {text!r}; use 'k' or 'a..b'") from None
    if lo < 1 or hi < lo:
        raise ValidationError(f"bad n range {text!r}")
    return list(range(lo, hi + 1))


def do_cr(args) -> dict:
    name = args.objective[0] if args.objective else "nsw"
    config = SearchConfig(seed=args.seed)
    return {"objective": name, "rows": cr_table(name, parse_range(args.n), args.mode, config)}


def do_regret_numeric(args) -> dict:
    spec = objective(args.objective[0] if args.objective else "nsw")
    ns = parse_range(args.n)
    q = to_rational(args.q)
    return {"reports": [numeric_minimax_regret(n, spec, args.alpha, q,
                                               SearchConfig(seed=args.seed)).to_dict()
                        for n in ns]}


# -- rendering -------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    if isinstance(v, list):
        return "(" + ", ".join(_cell(x) for x in v) + ")"
    if isinstance(v, dict) and "neighbors" in v:
        return "{" + ",".join(str(i) for i in v["neighbors"]) + "}:" + v["q"]
    return str(v)


def render_table(result) -> str:
    if isinstance(result, dict) and "rows" in result:
        rows = result["rows"]
        cols = [c for c in ("n", "closed_exact", "closed", "numeric", "lower_bound")
                if any(c in r for r in rows)]
        table = [cols] + [[_cell(r.get(c, "")) for c in cols] for r in rows]
        widths = [max(len(row[k]) for row in table) for k in range(len(cols))]
        lines = [f"objective: {result['objective']}"]
        for row in table:
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        return "\n".join(lines) + "\n"
    if isinstance(result, dict):
        width = max((len(str(k)) for k in result), default=0)
        lines = []
        for k, v in result.items():
            if isinstance(v, dict):
                lines.append(f"{k}:")
                lines.extend("  " + line for line in render_table(v).splitlines())
            else:
                lines.append(f"{str(k).ljust(width)}  {_cell(v)}")
        return "\n".join(lines) + "\n"
    return _cell(result) + "\n"


def emit(result, args) -> None:
    if args.format == "table":
        text = render_table(result)
    else:
        text = json.dumps(result, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aquafill", description="Online fractional allocation with water-filling.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("input", nargs="?", help="instance JSON file")
            p.add_argument("--glob", help="run on every file matching this pattern")
            p.add_argument("--jobs", type=int, default=1, help="worker processes for --glob")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json", "table"), default="json")
        p.add_argument("--output", "-o", help="write to this file instead of stdout")

    p = sub.add_parser("run", help="run a policy on an instance")
    common(p)
    p.add_argument("--policy", default="wf")
    p.add_argument("--summary", action="store_true")
    p.add_argument("--objective", action="append")
    p.set_defaults(handler=_per_instance(do_run))

    p = sub.add_parser("opt", help="hindsight-optimal loads and a witness allocation")
    common(p)
    p.set_defaults(handler=_per_instance(do_opt))

    p = sub.add_parser("nestify", help="nested sequence transformation")
    common(p)
    p.add_argument("--audit", action="store_true")
    p.set_defaults(handler=_per_instance(do_nestify))

    p = sub.add_parser("deviate", help="relabel a nested sequence against a policy")
    common(p)
    p.add_argument("--policy", default="wf")
    p.add_argument("--chain", action="store_true", help="nestify the input first")
    p.add_argument("--samples", type=int, help="Monte Carlo samples (default: exact)")
    p.add_argument("--audit", action="store_true")
    p.set_defaults(handler=_per_instance(do_deviate))

    p = sub.add_parser("worstcase", help="complete upper-triangular worst case")
    common(p)
    p.add_argument("--chain", action="store_true", help="nestify the input first")
    p.set_defaults(handler=_per_instance(do_worstcase))

    p = sub.add_parser("transform", help="nestify | deviate | worstcase")
    common(p)
    p.add_argument("--kind", choices=("nestify", "deviate", "worstcase"), required=True)
    p.add_argument("--policy", default="wf")
    p.add_argument("--chain", action="store_true", help="nestify the input first")
    p.add_argument("--samples", type=int, help="Monte Carlo samples (default: exact)")
    p.add_argument("--audit", action="store_true")
    p.set_defaults(handler=_per_instance(do_transform))

    p = sub.add_parser("game", help="adaptive relabeling game against a policy")
    common(p)
    p.add_argument("--policy", default="wf")
    p.add_argument("--chain", action="store_true", help="nestify the input first")
    p.set_defaults(handler=_per_instance(do_game))

    p = sub.add_parser("regret", help="alpha-regret on an instance, or numeric search with --n")
    common(p)
    p.add_argument("--policy", default="wf")
    p.add_argument("--objective", action="append")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--samples", type=int, help="Monte Carlo samples (default: exact)")
    p.add_argument("--n", help="search the sorted simplex for these n instead")
    p.add_argument("--q", default="1", help="total quantity for the numeric search")
    p.set_defaults(handler=_regret_handler)

    p = sub.add_parser("cr", help="competitive-ratio table")
    common(p, instance=False)
    p.add_argument("--objective", action="append")
    p.add_argument("--n", default="2..6")
    p.add_argument("--mode", choices=("closed", "numeric", "both"), default="closed")
    p.set_defaults(handler=do_cr)

    p = sub.add_parser("check", help="validate an instance; --source checks nestification")
    common(p)
    p.add_argument("--source", help="original instance the input was derived from")
    p.set_defaults(handler=_per_instance(do_check))
    return parser


def _regret_handler(args) -> dict:
    if args.n:
        return do_regret_numeric(args)
    return _per_instance(do_regret)(args)


def _failed_check(args, result) -> bool:
    if args.command != "check":
        return False
    if args.glob:
        return not all(r["ok"] for r in result.values())
    return not result["ok"]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.handler(args)
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, OSError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AquafillError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    emit(result, args)
    return 1 if _failed_check(args, result) else 0


if __name__ == "__main__":
    sys.exit(main())
