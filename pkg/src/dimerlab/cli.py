"""Command-line front end: ``dimerlab <subcommand> <quiver file> [options]``."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

from .config import RunConfig
from .contraction import UNKNOWN, ContractionError, check_assumption_B, contract, is_cancellative
from .impression import ImpressionError, build_impression, center, cycle_algebra, full_corners
from .matchings import InvalidQuiverError, perfect_matchings
from .monomial import format_monomial, load_aliases
from .nccr import (
    SCHEMA_VERSION,
    NotApplicable,
    certify,
    heights_report,
    origin_ideal,
    tiled_presentation,
)
from .quiver import QuiverParseError, format_quiver, load_quiver, validate

EXIT_OK, EXIT_OTHER, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dimerlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "validate": "check the dimer quiver invariants",
        "matchings": "list perfect matchings with their simple flags",
        "contract": "contract arrows into indegree-1 vertices",
        "cancellative": "bounded cancellativity search",
        "impression": "arrow images in B and sigma",
        "algebra": "cycle algebra S and center R",
        "decompose": "origin ideal, minimal primes and heights",
        "certify": "full pipeline and verdict",
        "present": "tiled matrix presentation",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("quiver", help="quiver text file")
        p.add_argument("--json", action="store_true", help="print the JSON report")
        p.add_argument("--out", help="also write the JSON report to this path")
        p.add_argument("--trunc", type=int, help="truncation degree (default 12, or $DIMERLAB_TRUNC)")
        p.add_argument("--cycle-bound", type=int, help="path length bound (default 4*|arrows|)")
        p.add_argument("--rewrite-bound", type=int, help="rewrite steps for path equality (default 64)")
        p.add_argument("--path-bound", type=int, help="path length for the cancellativity search (default 2*|arrows|)")
        p.add_argument("--alias", help="alias table mapping variable indices to labels")
    return parser


def _fmt(aliases) -> Callable:
    return lambda m: format_monomial(m, aliases)


def _validate(q, cfg, fmt):
    report = validate(q)
    lines = ["ok"] if report.ok else [f"violation: {v}" for v in report.violations]
    return report.to_dict(), lines, EXIT_OK if report.ok else EXIT_INPUT


def _matchings(q, cfg, fmt):
    ms = perfect_matchings(q)
    lines = [f"{list(m.sorted_arrows)} perfect={m.is_perfect} simple={m.is_simple}" for m in ms]
    lines.append(f"{len(ms)} perfect, {sum(m.is_simple for m in ms)} simple")
    return {"matchings": [m.to_dict() for m in ms]}, lines, EXIT_OK


def _contract(q, cfg, fmt):
    c = contract(q)
    data = c.to_dict()
    data["target"] = format_quiver(c.target)
    data["assumption_B"] = check_assumption_B(q)
    lines = [format_quiver(c.target).rstrip(),
             "# vertex map: " + " ".join(f"{k}->{v}" for k, v in sorted(c.vertex_map.items())),
             "# contracted arrows: " + " ".join(map(str, sorted(c.contracted)))]
    return data, lines, EXIT_OK


def _cancellative(q, cfg, fmt):
    v = is_cancellative(q, cfg.path_bound, cfg.rewrite_bound)
    lines = [f"verdict: {v.kind}"] + [f"reason: {r}" for r in v.reasons]
    if v.witness:
        w = v.witness
        lines.append(f"witness ({w.side}, arrows right to left): p={list(w.p.arrows)} "
                     f"q={list(w.q.arrows)} r={list(w.r.arrows)}")
    return v.to_dict(), lines, EXIT_INCONCLUSIVE if v.kind == UNKNOWN else EXIT_OK


def _impression(q, cfg, fmt):
    imp = build_impression(contract(q))
    lines = [f"x{i} = matching {list(m.sorted_arrows)}" for i, m in enumerate(imp.variables)]
    lines += [f"arrow {a}: {fmt(m)}" for a, m in sorted(imp.arrow_images.items())]
    lines.append(f"sigma: {fmt(imp.sigma)}")
    return imp.to_dict(fmt), lines, EXIT_OK


def _algebra(q, cfg, fmt):
    imp = build_impression(contract(q))
    s = cycle_algebra(imp, cfg.cycle_bound, cfg.truncation)
    r = center(imp, cfg.cycle_bound, cfg.truncation)
    data = {"S_generators": [fmt(g) for g in s.generators], "S_saturated": s.is_saturated(),
            "full_corners": {str(v): ok for v, ok in sorted(full_corners(imp, cfg.cycle_bound, cfg.truncation).items())},
            "center": r.to_dict(fmt)}
    lines = ["S = k[" + ", ".join(data["S_generators"]) + "]"]
    if r.is_full:
        lines.append("R = S")
    else:
        lines.append("R = k + (" + ", ".join(data["center"]["M_generators"]) + ")S")
    code = EXIT_INCONCLUSIVE if r.length_binding else EXIT_OK
    return data, lines, code


def _decompose(q, cfg, fmt):
    imp = build_impression(contract(q))
    try:
        oi = origin_ideal(imp, cfg.truncation, cfg.cycle_bound)
    except NotApplicable as exc:
        return {"applicable": False, "reason": str(exc)}, [f"not applicable: {exc}"], EXIT_OTHER
    h = heights_report(imp, oi)
    data = {"applicable": True, "origin_ideal": oi.to_dict(fmt), "heights": h.to_dict(fmt)}
    lines = ["m0 = (" + ", ".join(fmt(g) for g in oi.m0.generators) + ")S"]
    for d, p in oi.primes:
        lines.append(f"q_{d} = (" + ", ".join(fmt(g) for g in p.generators.generators)
                     + f")S  height {h.prime_heights[d]}")
    lines.append(f"intersection of primes = m0: {oi.decomposition_verified}")
    lines.append(f"ht_S(m0) = {h.ht_S_m0}, ght(m0) = {h.ght_m0}, ht_R(m0) = {h.ht_R_m0} (theoretical)")
    return data, lines, EXIT_OK


def _present(q, cfg, fmt):
    imp = build_impression(contract(q))
    rows = tiled_presentation(imp, cfg.truncation, cfg.cycle_bound)
    data = {"entries": [[e.to_dict(fmt) for e in row] for row in rows]}
    lines = []
    for row in rows:
        cells = []
        for e in row:
            gens = ", ".join(fmt(g) for g in e.generators)
            if e.shape == "S" or (e.shape == "module" and gens == "1"):
                cells.append("S")
            else:
                cells.append(f"k+({gens})S" if e.shape == "k+M" else f"({gens})S")
        lines.append(" | ".join(cells))
    return data, lines, EXIT_OK


def _certify(q, cfg, fmt, aliases=None):
    report = certify(q, cfg)
    data = report.to_dict(aliases)
    lines = [f"verdict: {report.verdict}", f"reason: {report.reason}"]
    lines += [f"check {k}: {v}" for k, v in sorted(report.checks.items())]
    return data, lines, report.exit_code


COMMANDS = {
    "validate": _validate, "matchings": _matchings, "contract": _contract,
    "cancellative": _cancellative, "impression": _impression, "algebra": _algebra,
    "decompose": _decompose, "certify": _certify, "present": _present,
}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_env(truncation=args.trunc, cycle_bound=args.cycle_bound,
                                 rewrite_bound=args.rewrite_bound, path_bound=args.path_bound,
                                 alias_path=args.alias, output_path=args.out)
        aliases = load_aliases(args.alias) if args.alias else None
        q = load_quiver(args.quiver)
    except (QuiverParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cfg = cfg.resolved(q)
    fmt = _fmt(aliases)
    try:
        if args.command == "certify":
            data, lines, code = _certify(q, cfg, fmt, aliases)
        else:
            data, lines, code = COMMANDS[args.command](q, cfg, fmt)
    except InvalidQuiverError as exc:
        data = {"error": "invalid quiver", "violations": exc.report.to_dict()["violations"]}
        lines = [f"violation: {v}" for v in exc.report.violations]
        code = EXIT_INPUT
    except (ContractionError, ImpressionError) as exc:
        data, lines, code = {"error": str(exc)}, [f"error: {exc}"], EXIT_OTHER
    report = {"schema_version": SCHEMA_VERSION, "command": args.command, "input": args.quiver,
              "bounds": cfg.bounds(), "result": data, "exit_code": code}
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text, file=stdout)
    else:
        print("\n".join(lines), file=stdout)
    return code


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
