"""Command-line interface: ``antinorm {eval,relate,witness,check}``.

Exit codes: 0 success, 1 a checked claim failed, 2 bad usage or input.
Errors go to stderr as one JSON object with ``code`` and ``message``.
"""
import argparse
import json
import os
import sys
from pathlib import Path

from .errors import AntinormError, WitnessNotFound
from .functions import parse_function
from .gauges import antinorm_eval, norm_eval, psd_scale, spec_from_json
from .io import read_matrix, read_scale, write_matrix
from .majorization import RELATIONS, relation_check
from .orbit import agm_witness, dominance_unitary, mixed_witness, orbit_witness, triangle_witness
from .spectral import NAMED_SCALES, SpectralScale
from .suite import CASES, SUITES, SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    code = "usage"


def _fail(code, message, stream):
    stream.write(json.dumps({"code": code, "message": message}) + "\n")


def _load_input(source):
    """A matrix file, a scale file, or a named analytic scale."""
    if _is_scale_source(source):
        return read_scale(source)
    return read_matrix(source)


def _is_scale_source(source):
    if source in NAMED_SCALES:
        return True
    try:
        obj = json.loads(Path(source).read_text())
    except (OSError, json.JSONDecodeError):
        return False
    return isinstance(obj, dict) and "steps" in obj


def _spec(text):
    try:
        return spec_from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise UsageError(f"spec is not valid JSON: {exc.msg} at position {exc.pos}") from None


def cmd_eval(args, out):
    x = _load_input(args.input)
    if args.norm is not None:
        value = norm_eval(_spec(args.norm), x)
    else:
        value = antinorm_eval(_spec(args.antinorm), x)
    out.write(f"{value:.15g}\n")
    return EXIT_OK


def _as_scale(x):
    if isinstance(x, SpectralScale):
        return x
    scale = psd_scale(x)
    if not isinstance(scale, SpectralScale):
        raise UsageError("relations need step scales or matrices")
    return scale


def cmd_relate(args, out):
    a, b = (_as_scale(_load_input(p)) for p in (args.a, args.b))
    report = relation_check(a, b, args.relation, tol=args.tol)
    out.write(json.dumps(report.to_json(), sort_keys=True) + "\n")
    return EXIT_OK if report.holds else EXIT_FAIL


def _function(text, role):
    if text is None:
        raise UsageError(f"--{role} is required for this operation")
    return parse_function(text)


def cmd_witness(args, out):
    a, b = read_matrix(args.a), read_matrix(args.b)
    op = args.op
    if op == "agm":
        result = agm_witness(a, b)
    elif op == "triangle":
        result = triangle_witness(a, b)
    elif op == "dominance":
        result = dominance_unitary(a, b)
    elif op == "orbit":
        f = _function(args.f or args.g, "f")
        result = orbit_witness(a, b, f, args.mode, eps=args.eps, seed=args.seed)
    else:
        g = _function(args.g or args.f, "g")
        result = mixed_witness(a, b, g, eps=args.eps, seed=args.seed)
    if args.out:
        target = Path(args.out)
        target.mkdir(parents=True, exist_ok=True)
        for k, u in enumerate(result.unitaries, start=1):
            write_matrix(target / f"unitary_{k}.json", u)
    out.write(json.dumps(result.to_json(), sort_keys=True) + "\n")
    return EXIT_OK


def _dims(text):
    try:
        dims = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must be comma-separated integers, got {text!r}") from None
    if not dims:
        raise argparse.ArgumentTypeError("dims must not be empty")
    return dims


def _default_seed():
    raw = os.environ.get("ANTINORM_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"ANTINORM_SEED must be an integer, got {raw!r}") from None


def cmd_check(args, out):
    names = list(args.case or []) + ([args.suite] if args.suite else [])
    unknown = [n for n in names if n not in CASES and n not in SUITES]
    if unknown:
        raise UsageError(f"unknown case or suite: {', '.join(unknown)}")
    if args.scale_b is not None and args.scale_b not in NAMED_SCALES:
        raise UsageError(f"unknown named scale {args.scale_b!r}; known: {sorted(NAMED_SCALES)}")
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        cfg = SuiteConfig(trials=args.trials, dims=args.dims, tolerance=args.tol, seed=seed,
                          cases=tuple(names or ["all"]), scale_b=args.scale_b, jobs=args.jobs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = run_suite(cfg)
    text = result.jsonl() if args.format == "json" else result.summary_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    return EXIT_OK if result.passed else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(prog="antinorm", description="Symmetric norms and anti-norms of matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a norm or anti-norm on a matrix or scale")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--norm", help="gauge spec as JSON")
    which.add_argument("--antinorm", help="anti-norm spec as JSON")
    p.add_argument("input", help="matrix JSON/CSV, scale JSON, or a named scale")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("relate", help="check an order relation between two scales")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--relation", choices=RELATIONS, required=True)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(handler=cmd_relate)

    p = sub.add_parser("witness", help="construct and certify unitary witnesses")
    p.add_argument("--op", choices=("agm", "triangle", "dominance", "orbit", "mixed"), required=True)
    p.add_argument("--mode", choices=("convex_super", "concave_sub"), default="convex_super")
    p.add_argument("--g", help="scalar function expression in t")
    p.add_argument("--f", help="scalar function expression in t")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="directory for the unitaries (matrix JSON)")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(handler=cmd_witness)

    p = sub.add_parser("check", help="run seeded inequality suites")
    p.add_argument("--suite", help=f"one of {sorted(SUITES)}")
    p.add_argument("--case", action="append", help="case id (repeatable)")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=None, help="defaults to $ANTINORM_SEED, else 0")
    p.add_argument("--dims", type=_dims, default=(2, 3, 4, 5, 6))
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--scale-b", dest="scale_b", help="named analytic scale for the equivalence case")
    p.set_defaults(handler=cmd_check)
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.handler(args, out)
    except WitnessNotFound as exc:
        _fail(exc.code, str(exc), err)
        return EXIT_FAIL
    except (AntinormError, UsageError) as exc:
        _fail(exc.code, str(exc), err)
        return EXIT_USAGE
    except (ValueError, TypeError, OSError) as exc:
        _fail("invalid_input", str(exc), err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
