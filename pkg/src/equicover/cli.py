"""Command-line front end.

Exit codes: 0 cover found or verification passed, 1 infeasible or failed,
2 error (bad input, I/O, solver breakdown), 3 unknown.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import io, massgen, render
from .errors import EquicoverError
from .mass import load_mass, save_mass
from .nonspiral import GeneralCover, construct_83, verify_83
from .spiral import Status, classify_regime, construct, heuristic_search
from .verify import verify_spiral

EXIT_OK, EXIT_FAIL, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2, 3

log = logging.getLogger("equicover")


def _budget(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        out = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"budget must look like 50x64, got {text!r}")
    if min(out) < 1:
        raise argparse.ArgumentTypeError("budget sizes must be positive")
    return out


def _emit(data, out: Path | None = None) -> None:
    text = io.dump_json(data)
    if out is not None:
        out.write_text(text + "\n")
    print(text)


def cmd_gen(args) -> int:
    mass = massgen.generate(args.kind, seed=args.seed, epsilon=args.epsilon, k=args.k)
    if args.out is None:
        print(io.dump_json(mass.to_dict()))
    else:
        save_mass(mass, args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    regime = classify_regime(args.p, args.q)
    print(regime.value)
    return EXIT_OK


def cmd_construct(args) -> int:
    mass = load_mass(args.mass)
    if args.nonspiral:
        if (args.p, args.q) != (3, 8):
            log.error("--nonspiral is only available for p=3, q=8")
            return EXIT_ERROR
        cover = construct_83(mass, args.hline_angle, tol=args.tol)
        report = verify_83(mass, cover, args.tol)
        if args.out:
            io.save_cover(cover, args.out)
        _emit({"status": "cover", "kind": "general", "report": report.to_dict()}, args.report)
        return EXIT_OK if report.ok else EXIT_FAIL

    result = construct(mass, args.p, args.q, budget=args.budget, tol=args.tol)
    doc = {"status": result.status.value, "regime": result.regime.value, "reason": result.reason}
    if result.search is not None:
        doc["search"] = result.search.to_dict()
    if result.report is not None:
        doc["report"] = result.report.to_dict()
    if result.cover is not None:
        doc["orbit"] = result.cover.orbit_tag.value
        if args.out:
            io.save_cover(result.cover, args.out)
    _emit(doc, args.report)
    return {Status.COVER: EXIT_OK, Status.INFEASIBLE: EXIT_FAIL, Status.UNKNOWN: EXIT_UNKNOWN}[result.status]


def cmd_verify(args) -> int:
    mass = load_mass(args.mass)
    cover = io.load_cover(args.cover)
    if isinstance(cover, GeneralCover):
        report = verify_83(mass, cover, args.tol, args.samples, args.seed)
    else:
        report = verify_spiral(mass, cover, args.tol)
    _emit(report.to_dict())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_render(args) -> int:
    mass = load_mass(args.mass)
    cover = io.load_cover(args.cover) if args.cover else None
    render.save_svg(mass, args.out, cover)
    return EXIT_OK


def cmd_search(args) -> int:
    mass = load_mass(args.mass)
    rep = heuristic_search(mass, args.p, args.q, args.budget, args.tol)
    doc = rep.to_dict()
    doc["regime"] = classify_regime(args.p, args.q).value
    if rep.cover is not None and args.out:
        io.save_cover(rep.cover, args.out)
    _emit(doc)
    return EXIT_OK if rep.cover is not None else EXIT_UNKNOWN


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="equicover", description="Convex equicoverings of planar masses.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a test mass")
    g.add_argument("kind", choices=["square", "random", "tight"])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--epsilon", type=float, default=0.01)
    g.add_argument("--k", type=int, default=5)
    g.add_argument("--out", type=Path)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("classify", help="print the regime of p/q")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--q", type=int, required=True)
    c.set_defaults(func=cmd_classify)

    k = sub.add_parser("construct", help="build and verify a cover")
    k.add_argument("mass", type=Path)
    k.add_argument("--p", type=int, required=True)
    k.add_argument("--q", type=int, required=True)
    k.add_argument("--budget", type=_budget, default=(50, 64), help="apexes x initial angles, e.g. 50x64")
    k.add_argument("--hline-angle", type=float, default=0.0)
    k.add_argument("--tol", type=float, default=1e-8)
    k.add_argument("--nonspiral", action="store_true", help="two-apex (8,3) cover")
    k.add_argument("--out", type=Path, help="cover JSON")
    k.add_argument("--report", type=Path, help="also write the report JSON here")
    k.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="check a cover against a mass")
    v.add_argument("mass", type=Path)
    v.add_argument("cover", type=Path)
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-8)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("render", help="draw a mass and optional cover as SVG")
    r.add_argument("mass", type=Path)
    r.add_argument("cover", type=Path, nargs="?")
    r.add_argument("--out", type=Path, required=True)
    r.set_defaults(func=cmd_render)

    s = sub.add_parser("search", help="grid search for a convex spiral")
    s.add_argument("mass", type=Path)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--budget", type=_budget, default=(50, 64))
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--out", type=Path)
    s.set_defaults(func=cmd_search)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if hasattr(args, "hline_angle") and not math.isfinite(args.hline_angle):
        log.error("--hline-angle must be finite")
        return EXIT_ERROR
    try:
        return args.func(args)
    except (EquicoverError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
