#!/usr/bin/env python3
"""
motivic-infogeo command line
Batch front end over MotivicWorkbench: one subcommand per capability,
results written as CSV or a JSON document with full parameter context.

Exit codes: 0 success, 2 invalid input, 3 enumeration budget exceeded,
4 numerical failure.
"""

import argparse
import csv
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, TextIO

from .config import LOG_LEVEL
from .errors import MotivicError, ValidationError
from .workbench import RECORD_FIELDS, MotivicWorkbench, safe_call

logger = logging.getLogger(__name__)

SUBCOMMANDS = (
    "zeta",
    "zeta-chi",
    "entropy",
    "lfun",
    "kl",
    "red",
    "fisher",
    "motivic-fisher",
    "cone",
    "channel",
    "clifford",
    "quad",
    "cat-check",
)

RECORD_HELP = (
    "Every subcommand writes records with the columns "
    + ", ".join(RECORD_FIELDS)
    + ". parameters is the canonical JSON of the inputs; tail_bound holds the "
    "truncation tail estimate (or the Monte-Carlo standard error) when one applies."
)


def setup_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


# ============================================================================
# INPUT DOCUMENTS
# ============================================================================


def read_document(path: Optional[str], flag: str) -> Optional[Any]:
    """JSON document at path, or None when no path was given"""
    if path is None:
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise ValidationError(f"{flag}: cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise ValidationError(f"{flag}: {path} is not valid JSON (line {e.lineno}: {e.msg})")


def _quadratic_argument(value: str, flag: str) -> Any:
    """Named algebra (poly:2, ext:3, ...) or a path to a relations document"""
    if value.endswith(".json"):
        return read_document(value, flag)
    return value


def _require(value: Any, flag: str) -> Any:
    if value is None:
        raise ValidationError(f"{flag} is required for this subcommand")
    return value


# ============================================================================
# DISPATCH
# ============================================================================


def _zeta(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    return wb.zeta(args.builtin, read_document(args.spec, "--spec"), args.trunc, args.p, args.e)


def _zeta_chi(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    return wb.zeta_chi(args.builtin, read_document(args.spec, "--spec"), args.j, args.trunc, args.p, args.e)


def _entropy(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    return wb.entropy(args.builtin, read_document(args.spec, "--spec"), args.s, args.trunc, args.p, args.e)


def _lfun(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    return wb.lfun(
        args.builtin,
        read_document(args.spec, "--spec"),
        args.s,
        args.prime_bound,
        args.trunc,
        read_document(args.hodge, "--hodge"),
    )


def _kl(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    doc = read_document(_require(args.spec, "--spec"), "--spec")
    return wb.kl(doc, args.h, args.j, args.eps, args.t, args.trunc)


def _red(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    return wb.red(args.n, args.m)


def _fisher(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    return wb.fisher(args.family, args.gamma)


def _motivic_fisher(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    doc = read_document(_require(args.spec, "--spec"), "--spec")
    return wb.motivic_fisher(doc, args.j, args.j2, args.t, args.trunc)


def _cone(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    return wb.cone(args.kind, args.n, args.point, args.samples, args.seed, args.numeric)


def _channel(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    doc = read_document(_require(args.spec, "--spec"), "--spec")
    return wb.channel(doc, read_document(args.state, "--state"))


def _clifford(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    return wb.clifford(args.p, args.q)


def _quad(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    return wb.quad(_quadratic_argument(args.a, "--a"), _quadratic_argument(args.b, "--b"))


def _cat_check(wb: MotivicWorkbench, args) -> Dict[str, Any]:
    return wb.cat_check(args.source, args.target, args.d, args.trials, args.seed)


HANDLERS: Dict[str, Callable[[MotivicWorkbench, argparse.Namespace], Dict[str, Any]]] = {
    "zeta": _zeta,
    "zeta-chi": _zeta_chi,
    "entropy": _entropy,
    "lfun": _lfun,
    "kl": _kl,
    "red": _red,
    "fisher": _fisher,
    "motivic-fisher": _motivic_fisher,
    "cone": _cone,
    "channel": _channel,
    "clifford": _clifford,
    "quad": _quad,
    "cat-check": _cat_check,
}


# ============================================================================
# OUTPUT
# ============================================================================


def write_csv(records: List[Dict[str, Any]], stream: TextIO) -> None:
    writer = csv.DictWriter(stream, fieldnames=list(RECORD_FIELDS), lineterminator="\n")
    writer.writeheader()
    for row in records:
        writer.writerow(row)


def write_document(result: Dict[str, Any], stream: TextIO) -> None:
    stream.write(json.dumps(result, sort_keys=True, indent=2))
    stream.write("\n")


def emit(result: Dict[str, Any], fmt: str, output: Optional[str]) -> None:
    """Write a successful result to output (stdout when None)"""

    def _write(stream: TextIO) -> None:
        if fmt == "csv":
            write_csv(result["records"], stream)
        else:
            write_document(result, stream)

    if output is None:
        _write(sys.stdout)
        return
    try:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            _write(fh)
    except OSError as e:
        raise ValidationError(f"--output: cannot write {output}: {e.strerror}")


# ============================================================================
# ARGUMENT PARSER
# ============================================================================


def _variety_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--builtin", help="builtin variety: spec, A<n> or P<n>")
    sub.add_argument("--spec", help="path to a variety document (JSON)")
    sub.add_argument("--p", type=int, help="characteristic for --builtin")
    sub.add_argument("--e", type=int, help="extension degree for --builtin")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json", "doc"), default="csv", help="output format")
    common.add_argument("--output", help="output path (default stdout)")
    common.add_argument("--log-level", help="logging level (default MOTIVIC_LOG_LEVEL or INFO)")
    common.add_argument("--budget", type=int, help="enumeration budget (default MOTIVIC_ENUM_BUDGET)")

    parser = argparse.ArgumentParser(
        prog="motivic-infogeo",
        description="Zeta functions, entropies and information geometry over finite fields, cones and channels",
        epilog=RECORD_HELP,
    )
    subs = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    subs.required = True

    sub = subs.add_parser("zeta", parents=[common], help="Hasse-Weil zeta coefficients", epilog=RECORD_HELP)
    _variety_flags(sub)
    sub.add_argument("--trunc", type=int, help="truncation N")

    sub = subs.add_parser("zeta-chi", parents=[common], help="character-twisted zeta coefficients", epilog=RECORD_HELP)
    _variety_flags(sub)
    sub.add_argument("--j", type=int, default=1, help="character frequency")
    sub.add_argument("--trunc", type=int, help="truncation N")

    sub = subs.add_parser("entropy", parents=[common], help="Shannon entropy of the zeta distribution", epilog=RECORD_HELP)
    _variety_flags(sub)
    sub.add_argument("--s", type=float, default=2.0, help="real parameter, t = q^-s")
    sub.add_argument("--trunc", type=int, help="truncation N (default: from the tail estimate)")

    sub = subs.add_parser("lfun", parents=[common], help="L-function and its entropy over Z", epilog=RECORD_HELP)
    sub.add_argument("--builtin", help="builtin family: spec, A<n> or P<n>")
    sub.add_argument("--spec", help="path to a variety document without p")
    sub.add_argument("--s", type=float, default=2.0)
    sub.add_argument("--prime-bound", type=int, default=100, help="use primes <= this bound")
    sub.add_argument("--trunc", type=int, help="local truncation N")
    sub.add_argument("--hodge", help="path to a Hodge-number document for the archimedean term")

    sub = subs.add_parser("kl", parents=[common], help="zeta-based KL divergence", epilog=RECORD_HELP)
    sub.add_argument("--spec", help="path to a variety document with a potential")
    sub.add_argument("--h", help="perturbation polynomial (default: the document's 'perturbation')")
    sub.add_argument("--j", type=int, default=1, help="character frequency")
    sub.add_argument("--eps", type=int, default=1, help="perturbation size in F_p")
    sub.add_argument("--t", type=float, default=0.1)
    sub.add_argument("--trunc", type=int)

    sub = subs.add_parser("red", parents=[common], help="count Hermite normal forms of determinant m", epilog=RECORD_HELP)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--m", type=int, required=True)

    sub = subs.add_parser("fisher", parents=[common], help="Fisher-Rao and Amari-Chentsov tensors", epilog=RECORD_HELP)
    sub.add_argument("--family", default="bernoulli", help="bernoulli, logistic, categorical-<k>, exponential-tilt")
    sub.add_argument("--gamma", type=float, nargs="+", default=[0.3], help="parameter point")

    sub = subs.add_parser("motivic-fisher", parents=[common], help="motivic Fisher metric and cubic tensor", epilog=RECORD_HELP)
    sub.add_argument("--spec", help="path to an affine variety document with a potential")
    sub.add_argument("--j", type=int, default=1)
    sub.add_argument("--j2", type=int, default=1)
    sub.add_argument("--t", type=float, default=0.1)
    sub.add_argument("--trunc", type=int)

    sub = subs.add_parser("cone", parents=[common], help="Hessian geometry of a convex cone", epilog=RECORD_HELP)
    sub.add_argument("--kind", default="orthant", choices=("orthant", "lorentz", "psd"))
    sub.add_argument("--n", type=int, default=2, help="dimension (matrix size for psd)")
    sub.add_argument("--point", type=float, nargs="+", help="interior point (default: seeded random)")
    sub.add_argument("--samples", type=int, default=20000, help="Monte-Carlo samples")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--numeric", action="store_true", help="finite differences even where closed forms exist")

    sub = subs.add_parser("channel", parents=[common], help="CP/TP checks of a Choi matrix", epilog=RECORD_HELP)
    sub.add_argument("--spec", help="path to a channel document")
    sub.add_argument("--state", help="path to a state document (rows of numbers or [re, im] pairs)")

    sub = subs.add_parser("clifford", parents=[common], help="Clifford algebra relations", epilog=RECORD_HELP)
    sub.add_argument("--p", type=int, default=1)
    sub.add_argument("--q", type=int, default=1)

    sub = subs.add_parser("quad", parents=[common], help="black/white products and quadratic duality", epilog=RECORD_HELP)
    sub.add_argument("--a", default="poly:2", help="free:<d>, poly:<d>, ext:<d>, unit or a .json path")
    sub.add_argument("--b", default="ext:2")

    sub = subs.add_parser("cat-check", parents=[common], help="Hom-set convexity and unitor checks", epilog=RECORD_HELP)
    sub.add_argument("--source", type=float, nargs="+", default=[0.25, 0.25, 0.5])
    sub.add_argument("--target", type=float, nargs="+", default=[0.2, 0.3, 0.5])
    sub.add_argument("--d", type=int, default=2, help="quantum dimension")
    sub.add_argument("--trials", type=int, default=50)
    sub.add_argument("--seed", type=int)

    return parser


# ============================================================================
# MAIN EXECUTION
# ============================================================================


def run(args: argparse.Namespace) -> int:
    """Execute one parsed invocation; returns the exit status"""
    try:
        wb = MotivicWorkbench(seed=getattr(args, "seed", None), budget=args.budget)
    except MotivicError as e:
        logger.error(f"Invalid configuration: {e}")
        return e.exit_code
    logger.info(f"Running {args.subcommand} with {wb!r}")
    result = safe_call(HANDLERS[args.subcommand], wb, args)
    if not result.get("success"):
        sys.stderr.write(json.dumps({k: v for k, v in result.items() if k != "exit_code"}, sort_keys=True) + "\n")
        return int(result.get("exit_code", MotivicError.exit_code))
    try:
        emit(result, args.format, args.output)
    except ValidationError as e:
        logger.error(str(e))
        return e.exit_code
    logger.info(f"{args.subcommand}: wrote {len(result['records'])} records")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
