"""Command-line front end.

    python cli.py eval --copula cstar --dim 4 --point 1,4/5,3/5,3/5
    python cli.py search --copula cstar --dim 2 --perm reverse --step 1/30
    python cli.py verify --copula w --dim 3 --boxes 10000 --seed 42

Results are printed as `key: value` lines on stdout (the surface command
writes CSV); diagnostics go to stderr. Exit codes: 0 ok/pass, 1 check
failed, 2 parse error, 3 dimension mismatch, 4 bad grid step,
5 unsupported dimension.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, TextIO

from dotenv import load_dotenv

import axioms
import bounds
import copula
import perm as perms
import search
import shuffle
from errors import DimensionMismatchError, ExitCode, NonexError, PreconditionError, UnsupportedDimensionError, exit_code_for
from parallel import default_seed
from rationals import format_decimal, format_exact, format_rational, format_vector, parse_vector, to_rational

BUILTINS = ("mdim", "w", "independence", "cstar", "manifold", "nelsen")


def _fmt(value: Any) -> str:
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)) and value and isinstance(value[0], Fraction):
        return format_vector(value)
    return str(value)


def _emit(out: TextIO, pairs: Dict[str, Any]) -> None:
    for key, value in pairs.items():
        out.write(f"{key}: {_fmt(value)}\n")


def _witness_text(witness: Optional[Dict[str, Any]]) -> str:
    if not witness:
        return ""
    return " ".join(f"{key}={_fmt(value)}" for key, value in witness.items())


def _point_dim(args) -> Optional[int]:
    point = getattr(args, "point", None)
    return len(parse_vector(point)) if point else None


def resolve_copula(args) -> copula.CopulaTerm:
    """Turn the copula selection flags into a validated term."""
    if args.file:
        structure = shuffle.load_structure(args.file)
        if args.base:
            structure = structure.with_base(shuffle.BaseCopula(args.base))
        if args.dim is not None and args.dim != structure.dim:
            raise DimensionMismatchError(
                f"--dim {args.dim} does not match the file's dimension {structure.dim}")
        term: copula.CopulaTerm = shuffle.Shuffle(structure, name=args.file)
    else:
        dim = args.dim if args.dim is not None else _point_dim(args)
        if dim is None:
            dim = getattr(args, "default_dim", None)
        if dim is None:
            raise PreconditionError("--dim is required")
        base = shuffle.BaseCopula(args.base) if args.base else None
        if args.copula == "mdim":
            term = copula.frechet_upper(dim)
        elif args.copula == "w":
            term = copula.frechet_lower(dim)
        elif args.copula == "independence":
            term = copula.independence(dim)
        elif args.copula == "nelsen":
            if dim != 2:
                raise UnsupportedDimensionError("the nelsen copula is bivariate")
            term = copula.nelsen_extremal()
        elif args.copula == "cstar":
            if base is None:
                term = copula.c_star_closed_form(dim)
            else:
                term = shuffle.Shuffle(shuffle.build_c_star_structure(dim, base), name="C*")
        else:
            if dim % 2:
                raise UnsupportedDimensionError(f"the manifold family needs an even dimension, got {dim}")
            if args.delta:
                delta = shuffle.DeltaVector.of(dim, parse_vector(args.delta))
            else:
                delta = search.sample_manifold(dim, 1, _seed(args))[0].delta
            structure = shuffle.build_manifold_structure(dim, delta, base or shuffle.BaseCopula.MIN)
            term = shuffle.Shuffle(structure, name=f"Manifold{delta}")
    if args.wrap_perm:
        term = copula.PermutedView(term, perms.Perm.parse(args.wrap_perm, term.dim))
    return term


def _seed(args) -> int:
    return args.seed if getattr(args, "seed", None) is not None else default_seed()


def cmd_eval(args, out: TextIO) -> int:
    C = resolve_copula(args)
    value = copula.evaluate(C, copula.UnitPoint.parse(args.point))
    _emit(out, {"copula": C.label, "value": value, "decimal": format_decimal(value)})
    return ExitCode.OK


def cmd_diff(args, out: TextIO) -> int:
    C = resolve_copula(args)
    point = copula.UnitPoint.parse(args.point)
    pi = perms.Perm.parse(args.perm, C.dim)
    value = copula.evaluate(C, point)
    moved = copula.evaluate(C, perms.apply(pi, point))
    _emit(out, {"copula": C.label, "point": point, "perm": pi, "value": value,
                "permuted_value": moved, "difference": abs(value - moved)})
    return ExitCode.OK


def _search_lines(report: search.SearchReport) -> Dict[str, Any]:
    return {
        "copula": report.term,
        "best_point": report.best_point,
        "best_perm": report.best_perm,
        "best_value": report.best_value,
        "grid_step": report.grid_step,
        "certified_upper": report.certified_upper,
        "gap": report.gap,
        "evaluations": report.evaluations,
        "exact": str(report.exact).lower(),
    }


def cmd_search(args, out: TextIO) -> int:
    C = resolve_copula(args)
    pi = perms.Perm.parse(args.perm, C.dim)
    report = search.max_difference(C, pi, to_rational(args.step), exact=not args.float,
                                   workers=args.threads)
    _emit(out, _search_lines(report))
    return ExitCode.OK


def cmd_mu(args, out: TextIO) -> int:
    C = resolve_copula(args)
    value, report = search.mu(C, to_rational(args.step), args.budget, seed=_seed(args),
                              workers=args.threads)
    lines = {"mu": value, "exhaustive": str(report.exhaustive).lower(),
             "perms_checked": report.perms_checked}
    lines.update(_search_lines(report))
    _emit(out, lines)
    return ExitCode.OK


def cmd_verify(args, out: TextIO) -> int:
    C = resolve_copula(args)
    seed = _seed(args)
    report = axioms.verify(C, samples=args.samples, boxes=args.boxes, seed=seed, workers=args.threads)
    lines: Dict[str, Any] = {"copula": report.term, "seed": seed,
                             "expected_copula": str(report.expected_copula).lower()}
    for check in report.checks():
        text = f"{check.status.value} ({check.checked} checked)"
        if not check.passed:
            text += " " + _witness_text(check.witness)
        lines[check.name] = text
    lines["points_checked"] = report.points_checked
    lines["boxes_checked"] = report.boxes_checked
    lines["result"] = "pass" if report.passed else "fail"
    _emit(out, lines)
    return ExitCode.OK if report.passed else ExitCode.CHECK_FAILED


def cmd_manifold(args, out: TextIO) -> int:
    for item in search.sample_manifold(args.dim, args.samples, _seed(args)):
        line = f"point: {item.point}"
        if item.delta is not None and args.dim > 2:
            line += f" delta: {item.delta}"
        out.write(line + "\n")
    return ExitCode.OK


def cmd_bound(args, out: TextIO) -> int:
    point = copula.UnitPoint.parse(args.point)
    pi = perms.Perm.parse(args.perm, point.dim) if args.perm else None
    report = bounds.pointwise_bound(point, pi)
    lines: Dict[str, Any] = {"point": point}
    if pi is not None:
        lines["perm"] = pi
    lines.update(report.entries())
    lines["combined"] = report.combined
    _emit(out, lines)
    return ExitCode.OK


def surface_rows(C: copula.CopulaTerm, pi: perms.Perm, step: Fraction) -> List[List[str]]:
    """Rows u1,u2,C(u),C(u_pi),diff over the grid, lexicographic in (u1, u2)."""
    if C.dim != 2:
        raise UnsupportedDimensionError(f"surface export is bivariate only, got d={C.dim}")
    m = axioms.grid_count(step)
    rows = []
    for i in range(m + 1):
        for j in range(m + 1):
            u = (Fraction(i, m), Fraction(j, m))
            value = C.value(u)
            moved = C.value(perms.apply(pi, u))
            rows.append([format_exact(x) for x in (u[0], u[1], value, moved, abs(value - moved))])
    return rows


def cmd_surface(args, out: TextIO) -> int:
    C = resolve_copula(args)
    if C.dim != 2:
        raise UnsupportedDimensionError(f"surface export is bivariate only, got d={C.dim}")
    pi = perms.Perm.parse(args.perm, 2)
    rows = surface_rows(C, pi, to_rational(args.step))
    header = ["u1", "u2", "C(u)", "C(u_pi)", "diff"]
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        _emit(out, {"rows": len(rows), "out": args.out})
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return ExitCode.OK


def cmd_validate(args, out: TextIO) -> int:
    structure = shuffle.load_structure(args.file)
    report = shuffle.validate(structure)
    lines: Dict[str, Any] = {"dim": structure.dim, "cells": len(structure.cells),
                             "total_mass": structure.total_mass}
    for result in report.results:
        text = "pass" if result.passed else "fail " + _witness_text(result.witness)
        lines[result.condition.value] = text
    lines["result"] = "pass" if report.passed else "fail"
    _emit(out, lines)
    return ExitCode.OK if report.passed else ExitCode.CHECK_FAILED


def _copula_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--copula", choices=BUILTINS, default="cstar")
    parser.add_argument("--dim", type=int)
    parser.add_argument("--file", help="shuffle-spec JSON file (overrides --copula)")
    parser.add_argument("--wrap-perm", help="evaluate u -> C(u_pi) instead of C")
    parser.add_argument("--delta", help="offsets of the manifold family, e.g. 1/20,3/20")
    parser.add_argument("--base", choices=[b.value for b in shuffle.BaseCopula],
                        help="base copula of shuffle-built terms")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonex", description="Exact non-exchangeability toolkit for copulas")
    parser.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate C at a point")
    _copula_options(p)
    p.add_argument("--point", required=True)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("diff", help="evaluate C(u), C(u_pi) and their difference")
    _copula_options(p)
    p.add_argument("--point", required=True)
    p.add_argument("--perm", default="reverse")
    p.set_defaults(handler=cmd_diff)

    p = sub.add_parser("search", help="certified grid maximum of |C(u) - C(u_pi)|")
    _copula_options(p)
    p.add_argument("--perm", default="reverse")
    p.add_argument("--step", required=True)
    p.add_argument("--threads", type=int)
    p.add_argument("--float", action="store_true", help="uncertified floating-point exploration")
    p.set_defaults(handler=cmd_search)

    p = sub.add_parser("mu", help="non-exchangeability measure over all permutations")
    _copula_options(p)
    p.add_argument("--step", required=True)
    p.add_argument("--budget", type=int, default=search.DEFAULT_PERM_BUDGET)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.set_defaults(handler=cmd_mu)

    p = sub.add_parser("verify", help="check the copula axioms on random samples")
    _copula_options(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--boxes", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("manifold", help="sample maximal points")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=cmd_manifold)

    p = sub.add_parser("bound", help="pointwise bounds on |C(u) - C(u_pi)|")
    p.add_argument("--point", required=True)
    p.add_argument("--perm")
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser("surface", help="bivariate difference table as CSV")
    _copula_options(p)
    p.add_argument("--perm", default="reverse")
    p.add_argument("--step", required=True)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_surface, default_dim=2)

    p = sub.add_parser("validate", help="check a shuffle-spec file")
    p.add_argument("--file", required=True)
    p.set_defaults(handler=cmd_validate)
    return parser


def main(argv: Optional[List[str]] = None, out: Optional[TextIO] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    logging.basicConfig(format="[%(name)s] %(message)s")
    logging.getLogger().setLevel(logging.WARNING if args.quiet else logging.INFO)
    out = out or sys.stdout
    try:
        return int(args.handler(args, out))
    except NonexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(exit_code_for(exc))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(ExitCode.PARSE)


if __name__ == "__main__":
    sys.exit(main())
