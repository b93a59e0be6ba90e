"""Command-line entry point.

Every command writes one JSON report to standard output (sorted keys) and a
one-line summary to standard error.  Exit codes: 0 success, 1 unreadable or
malformed input, 2 invalid graph or failed check, 3 Unknown / Inconclusive.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Sequence

from . import align, boundary, ideals, pathrep, periodicity, simplicity, skeleton
from .errors import InvalidGraph, KGraphError, SpecFormatError
from .io import ee_to_json, load_cocycle, load_ee, load_graph, path_from_json, path_to_json, trivial_cocycle

log = logging.getLogger("kgtwist")

EXIT_OK, EXIT_INPUT, EXIT_INVALID, EXIT_UNKNOWN = 0, 1, 2, 3
CHECK_TOL = 1e-9


def ck_threads() -> int:
    """Thread cap from KGRAPH_CK_THREADS; the current code paths are serial."""
    try:
        return max(1, int(os.environ.get("KGRAPH_CK_THREADS", "1")))
    except ValueError:
        return 1


def _degree(text: str | None, k: int, default: int) -> tuple[int, ...]:
    if text is None:
        return (default,) * k
    parts = [int(x) for x in text.split(",")]
    if len(parts) == 1:
        parts *= k
    if len(parts) != k or min(parts) < 0:
        raise SpecFormatError(f"degree {text!r} does not fit rank {k}")
    return tuple(parts)


def _parse_path(g, text: str):
    return path_from_json(g, text if text in g.vertices else text.split("."))


def _vector(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


class Outcome:
    def __init__(self, report: dict, code: int = EXIT_OK, summary: str = ""):
        self.report, self.code, self.summary = report, code, summary


# -- commands ---------------------------------------------------------------

def cmd_validate(a, g) -> Outcome:
    rep = skeleton.validate(g)
    bad = [k for k, c in rep.checks.items() if not c.passed]
    summary = "valid" if rep.ok else "invalid: " + ", ".join(bad)
    return Outcome(rep.to_dict(), EXIT_OK if rep.ok else EXIT_INVALID, summary)


def cmd_mce(a, g) -> Outcome:
    g.require_valid()
    mu, nu = _parse_path(g, a.mu), _parse_path(g, a.nu)
    ext = align.mce(g, mu, nu)
    return Outcome({"mu": path_to_json(mu), "nu": path_to_json(nu),
                    "mce": [path_to_json(p) for p in skeleton.sort_paths(ext)]},
                   summary=f"{len(ext)} minimal common extensions")


def _family(a, g):
    return load_ee(a.ee, g) if a.ee else ideals.ck_generators(g)


def cmd_satiate(a, g) -> Outcome:
    g.require_valid()
    D = (a.depth,) * g.rank
    sat = boundary.satiate(g, _family(a, g), D)
    return Outcome({"sets": ee_to_json(sat.sorted_sets()), "minimal": ee_to_json(sat.minimal_sets()),
                    "size": len(sat), "bounds": {"D": list(D)}},
                   summary=f"{len(sat)} sets in the satiation at D={a.depth}")


def cmd_ideals(a, g) -> Outcome:
    g.require_valid()
    D = (a.depth,) * g.rank
    lat = ideals.list_gauge_invariant_ideals(g, _family(a, g), D)
    return Outcome(lat.to_json(), summary=f"{len(lat.pairs)} ideals ({lat.exactness})")


def cmd_per(a, g) -> Outcome:
    g.require_valid()
    sim = periodicity.SimRelation(g, a.depth)
    pdata = periodicity.per_group(g, a.depth, sim)
    ap = periodicity.is_aperiodic(g, a.depth, sim)
    cof = periodicity.is_cofinal(g).cofinal if g.has_no_sources() else None
    report = {"per_basis": pdata.per.to_json(),
              "aperiodic": {"Aperiodic": "yes", "Periodic": "no"}.get(ap.status, "unknown"),
              "cofinal": cof, "h_per": sorted(pdata.h_per), "depth": a.depth}
    code = EXIT_UNKNOWN if pdata.unresolved else EXIT_OK
    return Outcome(report, code, f"Per basis {pdata.per.to_json()}")


def cmd_simple(a, g) -> Outcome:
    c = load_cocycle(a.cocycle, g) if a.cocycle else trivial_cocycle(g)
    v = simplicity.decide(g, c, a.depth)
    report = v.to_json()
    report["revalidated"] = v.revalidate(g, c)
    code = EXIT_UNKNOWN if v.verdict == "Unknown" else EXIT_OK
    if not report["revalidated"]:
        code = EXIT_INVALID
    return Outcome(report, code, f"{v.verdict} ({v.grounds})")


def cmd_rep_check(a, g) -> Outcome:
    c = load_cocycle(a.cocycle, g) if a.cocycle else trivial_cocycle(g)
    N = _degree(a.cutoff, g.rank, 3)
    margin = _degree(a.margin, g.rank, 1)
    rep = pathrep.TruncatedRep(c, N)
    tck = pathrep.check_tck(rep, margin)
    report = tck.to_json()
    report["bounds"] = {"N": list(N), "margin": list(margin), "seed": a.seed}
    report["ok"] = tck.max_deviation <= CHECK_TOL
    return Outcome(report, EXIT_OK if report["ok"] else EXIT_INVALID,
                   f"max TCK deviation {tck.max_deviation:.3g}")


def cmd_vm_check(a, g) -> Outcome:
    c = load_cocycle(a.cocycle, g) if a.cocycle else trivial_cocycle(g)
    N = _degree(a.cutoff, g.rank, 6)
    margin = _degree(a.margin, g.rank, 2)
    rep = pathrep.TruncatedRep(c, N)
    pdata = periodicity.per_group(g, a.depth)
    lam = _parse_path(g, a.lam) if a.lam else None
    r = simplicity.check_vm_commutation(rep, pdata, lam, _vector(a.m), _vector(a.m2), margin)
    report = r.to_json()
    report["bounds"]["D"] = a.depth
    report["ok"] = max(r.deviation, r.unitarity, r.adjoint) <= CHECK_TOL
    return Outcome(report, EXIT_OK if report["ok"] else EXIT_INVALID,
                   f"deviation {r.deviation:.3g}, phase error {r.phase_error:.3g}")


def cmd_delta(a, g) -> Outcome:
    g.require_valid()
    F = [_parse_path(g, w) for w in a.F]
    D = (a.depth,) * g.rank
    c = load_cocycle(a.cocycle, g) if a.cocycle else None
    fam = load_ee(a.ee, g) if a.ee else []
    v = boundary.delta_vanishes(g, F, fam, D, a.vertex, c)
    code = EXIT_UNKNOWN if v.status == "Inconclusive" else EXIT_OK
    return Outcome(v.to_json(), code, v.status)


COMMANDS = {
    "validate": cmd_validate, "mce": cmd_mce, "satiate": cmd_satiate, "ideals": cmd_ideals,
    "per": cmd_per, "simple": cmd_simple, "rep-check": cmd_rep_check,
    "vm-check": cmd_vm_check, "delta": cmd_delta,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", required=True, help="graph file (JSON)")
    common.add_argument("--cocycle", help="cocycle file (JSON); zero cocycle if omitted")
    common.add_argument("--ee", help="family of exhaustive sets (JSON); Cuntz-Krieger family if omitted")
    common.add_argument("--depth", type=int, default=4, help="search depth D per colour")
    common.add_argument("--cutoff", help="truncation N, e.g. 6,6")
    common.add_argument("--margin", help="compatible-subspace margin, e.g. 2,2")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["json"], default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="kgtwist", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common])
    m = sub.add_parser("mce", parents=[common])
    m.add_argument("mu", help="path as dot-separated edge ids, or a vertex id")
    m.add_argument("nu")
    sub.add_parser("satiate", parents=[common])
    sub.add_parser("ideals", parents=[common])
    sub.add_parser("per", parents=[common])
    sub.add_parser("simple", parents=[common])
    sub.add_parser("rep-check", parents=[common])
    vm = sub.add_parser("vm-check", parents=[common])
    vm.add_argument("--m", required=True, help="element of Per; write --m=1,-1 for negative entries")
    vm.add_argument("--m2", required=True, help="second element of Per")
    vm.add_argument("--lambda", dest="lam", help="path lambda (default: lowest vertex of H_Per)")
    d = sub.add_parser("delta", parents=[common])
    d.add_argument("F", nargs="*", help="paths of the set F")
    d.add_argument("--vertex", help="range vertex (needed when F is empty)")
    return p


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True, default=str) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    log.info("KGRAPH_CK_THREADS=%d", ck_threads())
    try:
        g = load_graph(args.graph)
        out = COMMANDS[args.command](args, g)
    except InvalidGraph as exc:
        report = exc.report.to_dict() if exc.report is not None else {}
        report["error"] = str(exc)
        _emit(report)
        print(f"invalid graph: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SpecFormatError as exc:
        _emit({"error": str(exc)})
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KGraphError as exc:
        _emit({"error": str(exc), "kind": type(exc).__name__})
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(out.report)
    print(f"{args.command}: {out.summary}", file=sys.stderr)
    return out.code


if __name__ == "__main__":
    sys.exit(main())
