"""Command-line front end.

JSON goes to stdout, diagnostics to stderr, CSV only to named files.
Exit codes: 0 success, 1 verification failure, 2 malformed input,
3 monotonicity violations (or none under ``--expect-violations``),
4 solver non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import capacity as cap
from . import monotonicity as mono
from .algebra import SpinElement, as_state, center, pure_state
from .divergence import bregman, generator_from_spec, local_divergence
from .errors import DomainError, NotAStateError
from .verification import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_VIOLATIONS, EXIT_NONCONVERGED = 0, 1, 2, 3, 4

STATE_HELP = (
    "states: 'center', 'pure:eK' (K-th basis direction, 1-based), 'v:[a,b,...]' (s = 1/2), "
    "or JSON {\"v\": [...], \"s\": 0.5}"
)
CSV_HELP = "witness CSV columns: trial, d, excess, A (row-major, space separated), c, rho, sigma"


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    generator: str | None = None
    d: int | None = None
    seed: int | None = None
    trials: int | None = None
    tolerances: dict = field(default_factory=dict)
    output: str | None = None


def _clean(x):
    """Non-finite floats become the strings "inf", "-inf", "nan"; numpy scalars become Python ones."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def _emit(payload: dict, reproducible: bool):
    if not reproducible:
        payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    sys.stdout.write(json.dumps(_clean(payload), allow_nan=False) + "\n")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# state grammar

_PURE = re.compile(r"^pure:e(\d+)$")


def _explicit_dim(text: str) -> int | None:
    text = text.strip()
    if text.startswith("v:"):
        return len(json.loads(text[2:]))
    if text.startswith("{") or text.startswith("["):
        data = json.loads(text)
        v = data["v"] if isinstance(data, dict) else data
        return len(v)
    return None


def parse_state(text, d: int | None) -> SpinElement:
    """Parse one state in the shorthand grammar (or an already-decoded JSON value)."""
    try:
        if isinstance(text, dict):
            x = SpinElement.from_json({"s": 0.5, **text})
        elif isinstance(text, list):
            x = SpinElement(text, 0.5)
        else:
            t = text.strip()
            if t == "center":
                return center(d or 1)
            m = _PURE.match(t)
            if m:
                k = int(m.group(1))
                dim = d or k
                if not 1 <= k <= dim:
                    raise InputError(f"pure:e{k} needs 1 <= K <= d={dim}")
                e = np.zeros(dim)
                e[k - 1] = 1.0
                return pure_state(e)
            if t.startswith("v:"):
                x = SpinElement(json.loads(t[2:]), 0.5)
            elif t.startswith("{") or t.startswith("["):
                return parse_state(json.loads(t), d)
            else:
                raise InputError(f"unrecognised state {t!r}; {STATE_HELP}")
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"malformed state {text!r}: {exc}") from None
    if d is not None and x.d != d:
        raise InputError(f"state {text!r} has d={x.d}, expected {d}")
    try:
        return as_state(x)
    except NotAStateError as exc:
        raise InputError(str(exc)) from None


def _dimension(texts, d: int | None) -> int:
    if d is not None:
        return d
    dims = {_explicit_dim(t) for t in texts if isinstance(t, str)} - {None}
    if len(dims) > 1:
        raise InputError(f"states disagree on dimension: {sorted(dims)}")
    if dims:
        return dims.pop()
    ks = [int(m.group(1)) for t in texts if isinstance(t, str) and (m := _PURE.match(t.strip()))]
    return max(ks, default=1)


def _generator(spec: str):
    try:
        return generator_from_spec(spec)
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands


def cmd_div(args) -> int:
    f = _generator(args.gen)
    d = _dimension([args.rho, args.sigma], args.d)
    rho, sigma = parse_state(args.rho, d), parse_state(args.sigma, d)
    D = bregman(f, rho, sigma)
    try:
        local = local_divergence(f, rho, sigma)
    except DomainError:
        local = math.inf
    cfg = RunConfig("div", args.gen, d)
    _emit({"D_F": D, "D^F": local, "config": asdict(cfg)}, args.reproducible)
    return EXIT_OK


def cmd_critical_alpha(args) -> int:
    a = mono.critical_alpha(tol=args.tol)
    if args.emit_curve:
        alphas = np.linspace(3.0, 8.0, 500)
        with open(args.emit_curve, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["alpha", "g"])
            for al in alphas:
                w.writerow([_fmt(al), _fmt(mono.critical_gap(float(al)))])
    cfg = RunConfig("critical-alpha", tolerances={"tol": args.tol}, output=args.emit_curve)
    _emit(
        {
            "alpha_star": a,
            "residual": abs(mono.critical_gap(a)),
            "minimizer_z": mono.sign_expression_minimizer(a),
            "config": asdict(cfg),
        },
        args.reproducible,
    )
    return EXIT_OK


def _write_witnesses(path: str, report: mono.MonotonicityReport):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "d", "excess", "A", "c", "rho", "sigma"])
        for v in report.violations:
            w.writerow(
                [
                    v.trial,
                    report.d,
                    _fmt(v.excess),
                    " ".join(_fmt(a) for a in v.channel.A.ravel()),
                    " ".join(_fmt(a) for a in v.channel.c),
                    " ".join(_fmt(a) for a in v.rho.v),
                    " ".join(_fmt(a) for a in v.sigma.v),
                ]
            )


def cmd_monotone(args) -> int:
    f = _generator(args.gen)
    if args.d < 1 or args.trials < 0:
        raise InputError("need d >= 1 and trials >= 0")
    rep = mono.empirical_monotonicity(f, args.d, args.trials, args.seed, args.tol, args.dilations_only)
    if args.csv:
        _write_witnesses(args.csv, rep)
    payload = rep.to_json()
    payload["witnesses"] = payload["witnesses"][: args.max_witnesses]
    cfg = RunConfig("monotone", args.gen, args.d, args.seed, args.trials, {"tol": args.tol}, args.csv)
    payload["config"] = asdict(cfg)
    _emit(payload, args.reproducible)
    found = not rep.clean
    return EXIT_OK if found == args.expect_violations else EXIT_VIOLATIONS


def _load_states(path: str) -> list:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read states from {path}: {exc}") from None
    if isinstance(data, dict) and "states" in data:
        data = data["states"]
    if not isinstance(data, list) or not data:
        raise InputError("states file must hold a non-empty JSON array")
    return data


def cmd_capacity(args) -> int:
    f = _generator(args.gen)
    if args.ball:
        res = cap.capacity_closed_form(f, args.d or 2)
        payload = res.to_json("center")
        del payload["weights"]
    else:
        raw = _load_states(args.states)
        d = args.d
        if d is None:
            d = _dimension([json.dumps(x) if not isinstance(x, str) else x for x in raw], None)
        states = [parse_state(x, d) for x in raw]
        res = cap.capacity_finite(f, states, tol=args.tol, max_iter=args.max_iter)
        payload = res.to_json()
    cfg = RunConfig("capacity", args.gen, args.d, tolerances={"tol": args.tol}, output=args.states)
    payload["config"] = asdict(cfg)
    _emit(payload, args.reproducible)
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, args.seed)
    width = max(len(c.name) for c in checks)
    out = sys.stdout
    out.write(f"{'suite':<13} {'check':<{width}}  {'result':<6} {'value':>12} {'tol':>8}\n")
    for c in checks:
        flag = "PASS" if c.passed else "FAIL"
        line = f"{c.suite:<13} {c.name:<{width}}  {flag:<6} {c.value:>12.3e} {c.tolerance:>8.0e}"
        if not c.passed and c.case is not None:
            line += f"  replay: seed={args.seed} case={c.case}"
        out.write(line + "\n")
    failed = sum(not c.passed for c in checks)
    out.write(f"{len(checks) - failed}/{len(checks)} passed\n")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


# ---------------------------------------------------------------------------


def _default_seed() -> int:
    raw = os.environ.get("SPINFACTOR_SEED")
    if raw is None:
        return 0
    try:
        seed = int(raw)
    except ValueError:
        raise InputError(f"SPINFACTOR_SEED must be an unsigned integer, got {raw!r}") from None
    if seed < 0:
        raise InputError("SPINFACTOR_SEED must be non-negative")
    return seed


def _seed(text: str) -> int:
    seed = int(text)
    if seed < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return seed


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinfactor", description="Divergences, monotonicity and capacity on spin factors.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--reproducible", action="store_true", help="omit the timestamp field")
    sub = p.add_subparsers(dest="command", required=True)
    gen_help = "generator: shannon, quadratic, tsallis:ALPHA, e_lambda:LAMBDA, or a JSON spec"

    s = sub.add_parser("div", parents=[common], help="Bregman and local divergence", epilog=STATE_HELP)
    s.add_argument("--gen", required=True, help=gen_help)
    s.add_argument("--rho", required=True)
    s.add_argument("--sigma", required=True)
    s.add_argument("--d", type=int, default=None, help="dimension (inferred from the states if omitted)")
    s.set_defaults(func=cmd_div)

    s = sub.add_parser("critical-alpha", parents=[common], help="critical Tsallis order",
                       epilog="curve CSV columns: alpha, g")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--emit-curve", metavar="PATH", help="write (alpha, g(alpha)) on [3, 8], 500 rows")
    s.set_defaults(func=cmd_critical_alpha)

    s = sub.add_parser("monotone", parents=[common], help="Monte-Carlo monotonicity test", epilog=CSV_HELP)
    s.add_argument("--gen", required=True, help=gen_help)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--seed", type=_seed, default=None, help="default: $SPINFACTOR_SEED or 0")
    s.add_argument("--tol", type=float, default=mono.EXCESS_TOL)
    s.add_argument("--dilations-only", action="store_true")
    s.add_argument("--expect-violations", action="store_true", help="exit 0 iff violations are found")
    s.add_argument("--csv", metavar="PATH", help="write every witness as a CSV row")
    s.add_argument("--max-witnesses", type=int, default=10, help="witnesses listed in the JSON")
    s.set_defaults(func=cmd_monotone)

    s = sub.add_parser("capacity", parents=[common], help="minimax regret", epilog=STATE_HELP)
    s.add_argument("--gen", required=True, help=gen_help)
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--ball", action="store_true", help="closed form over the whole state ball")
    src.add_argument("--states", metavar="FILE", help="JSON array of states for the finite solver")
    s.add_argument("--d", type=int, default=None)
    s.add_argument("--tol", type=float, default=cap.TOL)
    s.add_argument("--max-iter", type=int, default=cap.MAX_ITER)
    s.set_defaults(func=cmd_capacity)

    s = sub.add_parser("verify", parents=[common], help="run property suites")
    s.add_argument("suite", nargs="?", default="all", choices=list(SUITES) + ["all"])
    s.add_argument("--seed", type=_seed, default=None, help="default: $SPINFACTOR_SEED or 0")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        return args.func(args)
    except (InputError, DomainError, NotAStateError, ValueError) as exc:
        print(f"spinfactor: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
