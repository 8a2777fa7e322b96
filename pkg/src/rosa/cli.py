"""Command line interface.

Exit codes: 0 success, 2 invalid input, 3 budget exceeded, 4 nothing found.
The tile budget defaults to 2,000,000 and can be set with ROSA_BUDGET or --budget.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .billiard import find_planar_candidate
from .circulant import eigenvalues
from .edgeword import (
    Edgeword,
    abelianize,
    check_k1_counting,
    derived_counting_conditions,
    format_edgeword,
    is_almost_balanced,
    parse_edgeword,
    random_palindrome,
    subrosa_edgeword,
)
from .errors import RosaError, ValidationError
from .kenyon import metatile_polygon, tile_polygon
from .lattice import check_n, tile_class, validate_patch
from .multigrid import dual_tiling, regularity_check, spec_from_args
from .planarity import planarity_report
from .render import render_svg
from .substitution import TILE_BUDGET, apply, build_substitution, check_primitivity, iterate_from_star, representatives

log = logging.getLogger("rosa")


def _budget(args) -> int:
    if args.budget is not None:
        return args.budget
    env = os.environ.get("ROSA_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ValidationError(f"ROSA_BUDGET must be an integer, got {env!r}") from exc
    return TILE_BUDGET


def _range(text: str) -> list[int]:
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError as exc:
        raise ValidationError(f"range must look like 3..11, got {text!r}") from exc
    return [n for n in range(lo, hi + 1) if n % 2 == 1 and n >= 3]


def _edgeword(args) -> Edgeword:
    n = check_n(args.n)
    if getattr(args, "subrosa", False):
        return subrosa_edgeword(n)
    if not args.edgeword:
        raise ValidationError("give --edgeword or --subrosa")
    return parse_edgeword(args.edgeword, n)


def _moduli_line(n: int, abel) -> str:
    return " ".join(f"{m:.2f}" for m in eigenvalues(n, abel).moduli)


def _write_outputs(args, patch) -> None:
    if getattr(args, "out", None):
        io.save_patch(args.out, patch)
    if getattr(args, "svg", None):
        Path(args.svg).write_text(render_svg(patch), encoding="utf-8")


def cmd_eigenvalues(args) -> int:
    if args.range:
        if not args.subrosa:
            raise ValidationError("--range needs --subrosa")
        for n in _range(args.range):
            print(f"{n}: {_moduli_line(n, abelianize(subrosa_edgeword(n)))}")
        return 0
    u = _edgeword(args)
    print(_moduli_line(u.n, abelianize(u)))
    return 0


def cmd_subrosa(args) -> int:
    ns = _range(args.range) if args.range else [check_n(args.n)]
    for n in ns:
        word = format_edgeword(subrosa_edgeword(n))
        print(f"{n}: {word}" if args.range else word)
    return 0


def _candidate_summary(cand) -> dict:
    return {
        "j": cand.j,
        "edgeword": format_edgeword(cand.edgeword),
        "moduli": [float(m) for m in cand.eigen.moduli],
        "planar": cand.eigen.planar(),
        "corner_condition": cand.counting.ok,
        "almost_balanced": cand.balance.ok,
    }


def cmd_candidate(args) -> int:
    cand = find_planar_candidate(args.n, args.max_j)
    summary = _candidate_summary(cand)
    print(f"j={cand.j} edgeword={summary['edgeword']}")
    print("moduli " + " ".join(f"{m:.3f}" for m in summary["moduli"]))
    if args.out:
        io.write_json(args.out, summary)
    return 0


def cmd_planar_rosa(args) -> int:
    budget = _budget(args)
    cand = find_planar_candidate(args.n, args.max_j)
    rule = build_substitution(cand.edgeword)
    patch = iterate_from_star(rule, args.iters, budget)
    report = planarity_report(rule, max(args.iters, 1), budget)
    print(f"j={cand.j} edgeword={format_edgeword(cand.edgeword)} tiles={len(patch)} verdict={report.verdict}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        io.save_rule(out / "rule.json", rule)
        io.save_patch(out / "patch.json", patch)
        io.write_json(out / "report.json", {"candidate": _candidate_summary(cand), "planarity": report.to_json()})
        (out / "patch.svg").write_text(render_svg(patch), encoding="utf-8")
    return 0


def cmd_build(args) -> int:
    u = _edgeword(args)
    if not args.force:
        counting = check_k1_counting(u)
        if not counting.ok:
            where = counting.first
            detail = f" at position {where.position} (letters {where.j1}, {where.j2})" if where else ""
            raise ValidationError(f"edgeword fails the tileability conditions{detail}")
    rule = build_substitution(u, _budget(args))
    prim = check_primitivity(rule)
    sizes = {f"{j},{k}": len(rule.metatile(j, k)) for j, k in representatives(u.n)}
    print(f"built n={u.n} edgeword={format_edgeword(u)} metatile sizes {sizes} primitivity order {prim.order}")
    if args.out:
        io.save_rule(args.out, rule)
    return 0


def _rule(args):
    if args.rule:
        return io.load_rule(args.rule)
    return build_substitution(_edgeword(args), _budget(args))


def cmd_apply(args) -> int:
    rule = io.load_rule(args.rule)
    patch = apply(rule, io.load_patch(args.patch), _budget(args))
    print(f"{len(patch)} tiles")
    _write_outputs(args, patch)
    return 0


def cmd_iterate(args) -> int:
    rule = _rule(args)
    patch = iterate_from_star(rule, args.iters, _budget(args))
    print(f"{len(patch)} tiles " + " ".join(f"{j},{k}:{c}" for (j, k), c in sorted(patch.type_counts().items())))
    _write_outputs(args, patch)
    return 0


def cmd_planarity(args) -> int:
    rule = _rule(args)
    report = planarity_report(rule, args.iters, _budget(args))
    for s in report.subspaces:
        print(f"{s.name} |lambda|={s.modulus:.3f} diameters " + " ".join(f"{d:.4f}" for d in s.diameters))
    print(f"verdict {report.verdict}" + (" (partial)" if report.partial else ""))
    target = args.report or args.out
    if target:
        io.write_json(target, report.to_json())
    return 0


def cmd_tileability(args) -> int:
    budget = _budget(args)
    if args.polygon:
        b = io.load_polygon(args.polygon)
        outcome = tile_polygon(b, budget=budget)
        if outcome.tileable:
            print(f"tileable with {len(outcome.patch)} tiles ({outcome.method})")
        else:
            shown = "; ".join(f"{c} edges {a},{b}" for c, a, b in outcome.report.violations[:3])
            print("not tileable: " + shown)
        if outcome.tileable:
            _write_outputs(args, outcome.patch)
        return 0
    if args.random is not None:
        rng = np.random.default_rng(args.seed)
        u = random_palindrome(check_n(args.n), args.random, rng)
        log.info("seed %s gave edgeword %s", args.seed, format_edgeword(u))
    else:
        u = _edgeword(args)
    print(f"edgeword {format_edgeword(u)}")
    print(f"corner condition {'ok' if check_k1_counting(u).ok else 'fails'}")
    print(f"2-almost-balanced {'ok' if is_almost_balanced(u, 2).ok else 'fails'}")
    types = [tuple(int(x) for x in args.type.split(","))] if args.type else representatives(u.n)
    for j, k in types:
        conds = derived_counting_conditions(u, tile_class(j, k, u.n))
        outcome = tile_polygon(metatile_polygon(u, j, k), budget=budget)
        status = f"tiled with {len(outcome.patch)} tiles ({outcome.method})" if outcome.tileable else "not tileable"
        print(f"metatile {j},{k}: counting {'ok' if conds.ok else 'fails'}, {status}")
        if outcome.tileable and len(types) == 1:
            _write_outputs(args, outcome.patch)
    return 0


def cmd_multigrid(args) -> int:
    spec = spec_from_args(args.n, args.offset, args.radius)
    rep = regularity_check(spec, exact=not args.float)
    if not rep.ok:
        z, grids = rep.triple_points[0]
        print(f"singular: {len(rep.triple_points)} multiple points, first at {z:.6f} on grids {grids}")
        return 2
    patch = dual_tiling(spec, check=False)
    check = validate_patch(patch)
    print(f"regular ({rep.backend}), {rep.crossings} crossings, dual patch {'valid' if check.ok else 'invalid'}")
    _write_outputs(args, patch)
    return 0


def cmd_render(args) -> int:
    patch = io.load_patch(args.patch)
    target = args.svg or args.out
    if not target:
        sys.stdout.write(render_svg(patch))
    else:
        Path(target).write_text(render_svg(patch), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None, help="tile / search budget (default ROSA_BUDGET or 2e6)")
    common.add_argument("--seed", type=int, default=None, help="seed for randomised inputs; logged")
    common.add_argument("-v", "--verbose", action="store_true")

    def word_args(p, required_n=True):
        p.add_argument("--n", type=int, required=required_n)
        p.add_argument("--edgeword")
        p.add_argument("--subrosa", action="store_true", help="use the Sub Rosa edgeword")

    parser = argparse.ArgumentParser(prog="rosa", description="Rhombus substitution tilings with 2n-fold symmetry")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigenvalues", parents=[common], help="eigenvalue moduli of an edgeword")
    word_args(p, required_n=False)
    p.add_argument("--range", help="odd n range such as 3..11 (with --subrosa)")
    p.set_defaults(func=cmd_eigenvalues)

    p = sub.add_parser("subrosa", parents=[common], help="print Sub Rosa edgewords")
    p.add_argument("--n", type=int)
    p.add_argument("--range")
    p.set_defaults(func=cmd_subrosa)

    p = sub.add_parser("candidate", parents=[common], help="search billiard-prefix candidates")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-j", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_candidate)

    p = sub.add_parser("planar-rosa", parents=[common], help="search, build, iterate and report in one go")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-j", type=int, default=200)
    p.add_argument("--iters", type=int, default=1)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_planar_rosa)

    p = sub.add_parser("build", parents=[common], help="build a substitution rule")
    word_args(p)
    p.add_argument("--force", action="store_true", help="skip the counting pre-check")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("apply", parents=[common], help="apply a rule to a patch")
    p.add_argument("--rule", required=True)
    p.add_argument("--patch", required=True)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("iterate", parents=[common], help="iterate a rule from the star")
    word_args(p, required_n=False)
    p.add_argument("--rule")
    p.add_argument("--iters", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("planarity", parents=[common], help="diameters on the invariant subspaces")
    word_args(p, required_n=False)
    p.add_argument("--rule")
    p.add_argument("--iters", type=int, default=2)
    p.add_argument("--report")
    p.add_argument("--out")
    p.set_defaults(func=cmd_planarity)

    p = sub.add_parser("tileability", parents=[common], help="check and tile polygons or metatiles")
    word_args(p, required_n=False)
    p.add_argument("--polygon", help="polygon JSON {n, edges, start}")
    p.add_argument("--type", help="single metatile type j,k")
    p.add_argument("--random", type=int, metavar="HALF", help="random palindrome with this half length")
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_tileability)

    p = sub.add_parser("multigrid", parents=[common], help="regularity and dual tiling of a multigrid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--offset", default="1/2", help="p/q for every grid, or a comma list")
    p.add_argument("--radius", type=float, default=6.0)
    p.add_argument("--float", action="store_true", help="use the floating point regularity test")
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_multigrid)

    p = sub.add_parser("render", parents=[common], help="render a patch JSON as SVG")
    p.add_argument("patch")
    p.add_argument("--svg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "n", None) is None and args.command in ("eigenvalues", "iterate", "planarity", "tileability"):
        if not getattr(args, "range", None) and not getattr(args, "rule", None) and not getattr(args, "polygon", None):
            parser.error("--n is required")
    try:
        return args.func(args)
    except RosaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
