"""``jgap`` command line: CSV ingestion, subcommand dispatch, report emission.

Exit status: 0 success, 1 malformed input file, 2 a violated hypothesis or
domain error, 3 a verification run that found violations.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from typing import List, Optional

from . import applications as app
from .bounds import jensen_bounds, mercer_bounds
from .characteristic import (CharacteristicEstimate, GridConfig, characteristic_closed_form,
                             characteristic_numeric)
from .core import (Interval, WeightedSample, jensen_functional, mercer_functional,
                   mercer_quadratic_gap, quadratic_gap)
from .errors import JensenGapError, PreconditionError
from .functions import parse_function
from .verify import VerificationConfig, default_tags, lemma1_check, verify_inequalities

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INPUT, EXIT_HYPOTHESIS, EXIT_VIOLATIONS = 0, 1, 2, 3


class InputError(Exception):
    """Malformed data file; carries the offending line number."""


def read_sample_csv(path: str) -> WeightedSample:
    """Read a ``x[,w]`` CSV file. Missing ``w`` means uniform weights."""
    with open(path, newline="") as fh:
        text = fh.read()
    return parse_sample_csv(text, path)


def parse_sample_csv(text: str, name: str = "<data>") -> WeightedSample:
    reader = csv.reader(io.StringIO(text))
    header = None
    xs: List[float] = []
    ws: List[float] = []
    for lineno, row in enumerate(reader, start=1):
        if not row or not "".join(row).strip():
            continue
        cells = [c.strip() for c in row]
        if header is None:
            if cells not in (["x"], ["x", "w"]):
                raise InputError(f"{name}:{lineno}: expected header 'x' or 'x,w', got {row!r}")
            header = cells
            continue
        if len(cells) != len(header):
            raise InputError(f"{name}:{lineno}: expected {len(header)} column(s), got {len(cells)}")
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise InputError(f"{name}:{lineno}: not a number in {row!r}")
        if not all(math.isfinite(v) for v in values):
            raise InputError(f"{name}:{lineno}: non-finite value in {row!r}")
        xs.append(values[0])
        if len(values) == 2:
            ws.append(values[1])
    if header is None or not xs:
        raise InputError(f"{name}:1: no data rows")
    if not ws:
        return WeightedSample.uniform(xs)
    try:
        return WeightedSample(xs, ws)
    except PreconditionError as exc:
        raise InputError(f"{name}: {exc}")


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _interval(text: str) -> Interval:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"interval must be 'a,b', got {text!r}")
    try:
        return Interval(*vals)
    except PreconditionError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _sample(args) -> WeightedSample:
    if args.data:
        return read_sample_csv(args.data)
    if args.points:
        xs = _floats(args.points)
        if args.weights:
            return WeightedSample(xs, _floats(args.weights))
        return WeightedSample.uniform(xs)
    raise PreconditionError("no data: pass --data FILE or --points x1,x2,...")


def _need_interval(args) -> Interval:
    if args.interval is None:
        raise PreconditionError(f"'{args.command}' requires --interval a,b")
    return args.interval


# -- output ------------------------------------------------------------------


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix.rstrip("."), obj


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2)
    rows = list(_flatten(report))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in rows:
            w.writerow([k, _fmt(v)])
        return buf.getvalue().rstrip("\n")
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k:<{width}}  {_fmt(v)}" for k, v in rows)


# -- subcommands -------------------------------------------------------------


def cmd_eval(args) -> dict:
    f = parse_function(args.fn)
    out = {"function": f.to_spec()}
    if args.at is not None:
        out["f"] = f.eval(args.at)
        out["f2"] = f.second_derivative(args.at)
    if args.data or args.points:
        s = _sample(args)
        out["jensen"] = jensen_functional(s, f)
        out["quadratic_gap"] = quadratic_gap(s)
        if args.interval is not None:
            out["mercer"] = mercer_functional(s, args.interval, f)
            out["mercer_quadratic_gap"] = mercer_quadratic_gap(s, args.interval)
    if args.interval is not None:
        out["convexity"] = f.classify_convexity(args.interval).value
        out["d2_range"] = f.second_derivative_range(args.interval).to_dict()
    return out


def _supplied_c(args) -> Optional[CharacteristicEstimate]:
    if args.c is None:
        return None
    return CharacteristicEstimate(args.c, "supplied")


def cmd_bounds(args) -> dict:
    return jensen_bounds(_sample(args), _need_interval(args), parse_function(args.fn),
                         _supplied_c(args)).to_dict()


def cmd_mercer(args) -> dict:
    return mercer_bounds(_sample(args), _need_interval(args), parse_function(args.fn),
                         _supplied_c(args)).to_dict()


def cmd_charnum(args) -> dict:
    f = parse_function(args.fn)
    if args.window is None:
        est = characteristic_closed_form(f)
        if est is None:
            raise PreconditionError(
                f"no closed form for c({f.to_spec()}); pass --window a,b for a numeric estimate")
    else:
        cfg = GridConfig(n_p=args.grid, n_ab=args.grid, rounds=args.rounds)
        est = characteristic_numeric(f, args.window, cfg)
    return {"function": f.to_spec(), **est.to_dict()}


def cmd_means(args) -> dict:
    s = _sample(args)
    out = {"means": app.classical_means(s).to_dict()}
    if args.interval is not None:
        args.interval.require_contains(s, tag="Thm3.1")
        q, d = app.mean_comparison_bounds(args.interval)
        out["quotient_bound"] = {"value": q, "source": "Thm3.1"}
        out["difference_bound"] = {"value": d, "source": "Thm3.2"}
    return out


def cmd_powermean(args) -> dict:
    s = _sample(args)
    out = {"alpha": args.alpha, "power_mean": app.power_mean(s, args.alpha),
           "arithmetic": app.power_mean(s, 1.0)}
    if args.interval is not None:
        source = "Eq6" if args.alpha < 1 else "Eq7"
        args.interval.require_contains(s, tag=source)
        out["gap"] = app.power_mean_gap(s, args.alpha)
        out["gap_bound"] = {"value": app.power_mean_gap_bound(args.interval, args.alpha),
                            "source": source}
    return out


def cmd_kyfan(args) -> dict:
    return app.kyfan_report(_sample(args), _need_interval(args)).to_dict()


def cmd_moments(args) -> dict:
    r = app.moment_bounds(_sample(args), _need_interval(args), args.order)
    return {**r.to_dict(), "variance_source": r.variance_source,
            "char_source": r.char_source}


def cmd_verify(args):
    f = parse_function(args.fn)
    e = _need_interval(args)
    if args.lemma1:
        return lemma1_check(f, e, args.trials, args.seed).to_dict()
    tags = tuple(args.tags.split(",")) if args.tags else default_tags(f, e)
    cfg = VerificationConfig(f, e, tags, n_range=tuple(args.n_range), trials=args.trials,
                             seed=args.seed, workers=args.workers)
    return verify_inequalities(cfg).to_dict()


COMMANDS = {
    "eval": cmd_eval, "bounds": cmd_bounds, "mercer": cmd_mercer,
    "charnum": cmd_charnum, "means": cmd_means, "powermean": cmd_powermean,
    "kyfan": cmd_kyfan, "moments": cmd_moments, "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jgap",
                                description="Jensen gap functionals and their bounds.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help, fn=False, data=False):
        sp = sub.add_parser(name, help=help)
        if fn:
            sp.add_argument("--fn", required=True,
                            help="function spec: pow:<s>, exp, neglog, xlogx, logit, "
                                 "negpow:<s>, affine:<c0>,<c1>, table:<path>, optional @slow/@rapid")
        sp.add_argument("--interval", type=_interval, help="closed interval a,b")
        if data:
            sp.add_argument("--data", help="CSV file with header x[,w]")
            sp.add_argument("--points", help="inline points x1,x2,...")
            sp.add_argument("--weights", help="inline weights for --points")
        sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
        return sp

    sp = add("eval", "evaluate f, J_n, K_n and the f'' range", fn=True, data=True)
    sp.add_argument("--at", type=float, help="evaluate f and f'' at this point")
    for name, help in (("bounds", "Jensen gap with every bound"),
                       ("mercer", "Jensen-Mercer gap with every bound")):
        sp = add(name, help, fn=True, data=True)
        sp.add_argument("--c", type=float, help="characteristic number to use for Eq4/Eq5")
    sp = add("charnum", "characteristic number c(f)", fn=True)
    sp.add_argument("--window", type=_interval, help="search window for the numeric estimate")
    sp.add_argument("--grid", type=int, default=64)
    sp.add_argument("--rounds", type=int, default=4)
    add("means", "arithmetic, geometric and harmonic means", data=True)
    sp = add("powermean", "power mean and its gap bound", data=True)
    sp.add_argument("--alpha", type=float, required=True)
    add("kyfan", "Ky Fan ratios and factors", data=True)
    sp = add("moments", "moment gap bounds", data=True)
    sp.add_argument("--order", type=float, required=True, help="moment order s")
    sp = add("verify", "randomized check of the inequalities", fn=True)
    sp.add_argument("--tags", help="comma-separated bound tags (default: all applicable)")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=int(os.environ.get("JGAP_SEED", "0")))
    sp.add_argument("--n-range", type=int, nargs=2, default=(1, 10), metavar=("MIN", "MAX"))
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--lemma1", action="store_true",
                    help="check 2f(mid) <= f(x)+f(a+b-x) <= f(a)+f(b) instead")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except JensenGapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    print(render(report, args.format))
    if args.command == "verify" and report.get("violations", 0) > 0:
        return EXIT_VIOLATIONS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
