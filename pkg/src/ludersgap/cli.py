"""Command-line interface.

Subcommands::

    evaluate   both update rules side by side at one parameter point
    sweep      all three combinations along one parameter
    maximize   optimize one combination over chosen parameters
    reproduce  recompute a published table or figure, with pass/fail checks
    audit      closed forms against direct simulation

Numeric flags accept symbolic values such as ``pi/2``, ``-pi/3``, ``2pi/3``
or ``1/sqrt2``.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import re
import sys
from typing import Sequence

from . import scenarios
from .audit import audit
from .lgi import KValue
from .nci import BetaValue
from .optim import default_points, default_workers, maximize
from .reproduce import TARGETS, reproduce

__all__ = ["main", "parse_value", "build_parser"]

_NAMES = {"pi": math.pi, "sqrt2": math.sqrt(2.0), "sqrt3": math.sqrt(3.0)}
_FUNCS = {"sqrt": math.sqrt}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}

# CLI flag -> internal parameter name
_FLAG_PARAMS = {
    "g1": "g1",
    "g2": "g2",
    "xi": "xi",
    "theta": "theta",
    "phi": "phi",
    "eps": "eps",
    "lam": "lam",
    "del": "delta",
}
_PARAM_FLAGS = {v: k for k, v in _FLAG_PARAMS.items()}


def _eval_node(node: ast.AST) -> float:
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval_node(node.operand))
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id in _FUNCS
        and len(node.args) == 1
        and not node.keywords
    ):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise ValueError("unsupported expression")


def parse_value(text: str) -> float:
    """Parse a real number or a small arithmetic expression in ``pi``/``sqrt2``.

    >>> parse_value("2pi/3") == 2 * math.pi / 3
    True
    """
    s = text.strip().lower().replace("π", "pi")
    # implicit multiplication: "2pi" -> "2*pi", "3(" -> "3*("
    s = re.sub(r"(?<=[0-9.])(?=[a-z(])", "*", s)
    try:
        v = _eval_node(ast.parse(s, mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError, OverflowError) as exc:
        raise argparse.ArgumentTypeError(f"cannot parse numeric value {text!r}") from exc
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"value {text!r} is not finite")
    return v


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


# ---------------------------------------------------------------- output


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".12g")
    if isinstance(v, dict):
        return ";".join(f"{k}={_fmt(x)}" for k, x in v.items())
    return str(v)


def to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def to_json(doc) -> str:
    # repr-based float output round-trips exactly
    return json.dumps(doc, indent=2) + "\n"


def _records_csv(records: list[dict]) -> str:
    header = list(records[0]) if records else []
    return to_csv(header, [[r[k] for k in header] for r in records])


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands


class UsageError(ValueError):
    pass


def _scenario(args) -> str:
    scen = args.scenario_pos or args.scenario
    if scen is None:
        raise UsageError("missing scenario: give 'lgi' or 'nci' (positionally or via --scenario)")
    if args.scenario_pos and args.scenario and args.scenario_pos != args.scenario:
        raise UsageError(f"conflicting scenarios {args.scenario_pos!r} and {args.scenario!r}")
    return scen


def _collect(args, scen: str, free: Sequence[str] = ()) -> dict[str, float]:
    """Parameter map for ``scen``; every parameter not in ``free`` is required."""
    out = {}
    missing = []
    for name in scenarios.PARAMS[scen]:
        v = getattr(args, name)
        if v is not None:
            out[name] = v
        elif name not in free:
            missing.append("--" + _PARAM_FLAGS[name])
    if scen == "lgi" and args.state is None:
        missing.append("--state")
    if args.rule is None:
        missing.append("--rule")
    if missing:
        raise UsageError(f"missing required parameter(s) for {scen}: {', '.join(missing)}")
    foreign = [
        "--" + _PARAM_FLAGS[n]
        for n in scenarios.PARAMS["nci" if scen == "lgi" else "lgi"]
        if getattr(args, n) is not None
    ]
    if foreign:
        raise UsageError(f"parameter(s) {', '.join(foreign)} do not apply to {scen}")
    return out


def cmd_evaluate(args) -> int:
    scen = _scenario(args)
    p = _collect(args, scen)
    state = args.state or "001"
    rep = scenarios.evaluate_report(scen, p, state)
    gap = rep["gap"]
    if scen == "lgi":
        combo_gap = KValue.from_correlators(gap["c12"], gap["c23"], gap["c13"]).as_dict()
    else:
        combo_gap = BetaValue.from_correlators(gap["a12"], gap["a23"], gap["a31"]).as_dict()
    gap_all = {**combo_gap, **gap}
    quantities = list(rep["vn"])
    records = [
        {
            "quantity": q,
            "value": rep[args.rule][q],
            "luders": rep["luders"][q],
            "vn": rep["vn"][q],
            "luders_minus_vn": gap_all[q],
        }
        for q in quantities
    ]
    if args.output == "json":
        doc = {
            "command": "evaluate",
            "scenario": scen,
            "rule": args.rule,
            "parameters": {**p, **({"state": state} if scen == "lgi" else {})},
            "results": records,
        }
        _emit(to_json(doc), args.out)
    else:
        _emit(_records_csv(records), args.out)
    return 0


def cmd_sweep(args) -> int:
    scen = _scenario(args)
    axis = _FLAG_PARAMS.get(args.axis, args.axis)
    if axis not in scenarios.PARAMS[scen]:
        legal = ", ".join(_PARAM_FLAGS[n] for n in scenarios.PARAMS[scen])
        raise UsageError(f"axis {args.axis!r} is not a parameter of {scen} (choose from {legal})")
    p = _collect(args, scen, free=(axis,))
    header, rows = scenarios.sweep(
        scen, p, axis, args.start, args.stop, args.steps, rule=args.rule, state=args.state or "001"
    )
    header[0] = _PARAM_FLAGS[axis]
    if args.output == "json":
        doc = {
            "command": "sweep",
            "scenario": scen,
            "rule": args.rule,
            "axis": header[0],
            "fixed": p,
            "rows": [dict(zip(header, r)) for r in rows],
        }
        _emit(to_json(doc), args.out)
    else:
        _emit(to_csv(header, rows), args.out)
    return 0


def cmd_maximize(args) -> int:
    scen = _scenario(args)
    if args.vary:
        free = [_FLAG_PARAMS.get(n.strip(), n.strip()) for n in args.vary.split(",") if n.strip()]
    else:
        free = ["g1", "g2"] if scen == "lgi" else list(scenarios.PARAMS["nci"])
    bad = [n for n in free if n not in scenarios.PARAMS[scen]]
    if bad:
        raise UsageError(f"cannot vary {bad} in {scen}")
    p = _collect(args, scen, free=free)
    fixed = {k: v for k, v in p.items() if k not in free}
    comp = args.objective or scenarios.COMPONENTS[scen][0]
    f = scenarios.objective(scen, comp, fixed, rule=args.rule, state=args.state or "001")
    box = scenarios.param_box(free)
    points = args.points or default_points(len(free))
    res = maximize(f, box, points)
    point = {_PARAM_FLAGS[k]: v for k, v in res.point.items()}
    record = {
        "objective": comp,
        "value": res.value,
        "grid_best": res.grid_best,
        "evaluations": res.evaluations,
        "points_per_dim": points,
        **point,
    }
    if args.output == "json":
        doc = {
            "command": "maximize",
            "scenario": scen,
            "rule": args.rule,
            "fixed": fixed,
            "point": point,
            "value": res.value,
            "grid_best": res.grid_best,
            "evaluations": res.evaluations,
            "points_per_dim": points,
        }
        _emit(to_json(doc), args.out)
    else:
        _emit(_records_csv([record]), args.out)
    return 0


def cmd_reproduce(args) -> int:
    rep = reproduce(args.target, steps=args.steps, points_per_dim=args.points)
    records = [c.record() for c in rep.checks]
    if args.output == "json":
        doc = {"command": "reproduce", "target": rep.target, "pass": rep.passed, "checks": records}
        if rep.header:
            doc["data"] = [dict(zip(rep.header, r)) for r in rep.data]
        _emit(to_json(doc), args.out)
    elif rep.header:
        # figures: curve data on the output, check summary on stderr
        _emit(to_csv(rep.header, rep.data), args.out)
        sys.stderr.write(_records_csv(records))
    else:
        _emit(_records_csv(records), args.out)
    for c in rep.checks:
        if not c.passed:
            sys.stderr.write(
                f"FAIL {rep.target} {c.label}: reproduced {c.reproduced:.6g}, published {c.published_value:.6g}"
                f", value at quoted point {c.value_at_published_point:.6g}, argmax {_fmt(c.argmax)}\n"
            )
    return 0 if rep.passed else 1


def cmd_audit(args) -> int:
    entries = audit(n_points=args.points or 500)
    records = [e.record() for e in entries]
    if args.output == "json":
        _emit(to_json({"command": "audit", "entries": records}), args.out)
    else:
        _emit(_records_csv(records), args.out)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("csv", "json"), default="csv", help="output format (default csv)")
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("scenario_pos", nargs="?", choices=scenarios.SCENARIOS, metavar="SCENARIO",
                      help="lgi or nci (alternative to --scenario)")
    scen.add_argument("--scenario", choices=scenarios.SCENARIOS)
    scen.add_argument("--rule", choices=("luders", "vn"))
    scen.add_argument("--state", choices=("001", "100"), help="initial lgi state")
    for flag, name in _FLAG_PARAMS.items():
        scen.add_argument(f"--{flag}", dest=name, type=parse_value, metavar="X")

    parser = argparse.ArgumentParser(
        prog="ludersgap",
        description="Sequential qutrit measurements under the Lüders and von Neumann update rules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", parents=[common, scen], help="both rules at one parameter point")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", parents=[common, scen], help="values along one parameter")
    p.add_argument("--axis", required=True, help="parameter to sweep, e.g. xi or theta")
    p.add_argument("--start", type=parse_value, required=True, metavar="X")
    p.add_argument("--stop", type=parse_value, required=True, metavar="X")
    p.add_argument("--steps", type=_positive_int, default=101, help="number of points, ends included")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("maximize", parents=[common, scen], help="maximize one combination")
    p.add_argument("--objective", help="k13, k23, k12 (lgi) or b31, b23, b12 (nci)")
    p.add_argument("--vary", help="comma-separated parameters to optimize (default: g1,g2 or all nci)")
    p.add_argument("--points", type=_positive_int, help="lattice points per dimension")
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("reproduce", parents=[common], help="recompute a published table or figure")
    p.add_argument("target", choices=TARGETS)
    p.add_argument("--steps", type=_positive_int, help="sweep points for figure targets")
    p.add_argument("--points", type=_positive_int, help="lattice points per dimension for table targets")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("audit", parents=[common], help="closed forms vs simulation")
    p.add_argument("--points", type=_positive_int, help="random points per expression (default 500)")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        default_workers()
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ValueError as exc:
        sys.stderr.write(f"ludersgap: error: {exc}\n")
        return 2
    return 0  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
