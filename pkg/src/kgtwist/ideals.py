"""Hereditary and saturated vertex sets, quotient graphs, and the listing of
gauge-invariant ideals as admissible pairs (H, B)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .align import is_exhaustive
from .boundary import PathSet, Satiation, satiate
from .errors import NotHereditary, NotSaturated
from .skeleton import Edge, KGraph, Path, Square, sort_paths, unit


def is_hereditary(g: KGraph, H: Iterable[str]) -> bool:
    H = set(H)
    return all(e.source in H for e in g.edges.values() if e.range in H)


def hereditary_closure(g: KGraph, X: Iterable[str]) -> frozenset[str]:
    """Smallest hereditary set containing X (close under taking sources)."""
    out = set(X)
    stack = list(out)
    while stack:
        v = stack.pop()
        for c in range(1, g.rank + 1):
            for e in g.in_edges(v, c):
                if e.source not in out:
                    out.add(e.source)
                    stack.append(e.source)
    return frozenset(out)


def _family(Ee) -> list[PathSet]:
    if isinstance(Ee, Satiation):
        return list(Ee.family)
    return [frozenset(E) for E in Ee]


def is_saturated(g: KGraph, H: Iterable[str], Ee) -> bool:
    H = set(H)
    for E in _family(Ee):
        r = next(iter(E)).range
        if r not in H and all(p.source in H for p in E):
            return False
    return True


def saturate(g: KGraph, H: Iterable[str], Ee) -> frozenset[str]:
    """Alternate hereditary closure and saturation against the family until stable."""
    fam = _family(Ee)
    out = set(hereditary_closure(g, H))
    changed = True
    while changed:
        changed = False
        for E in fam:
            r = next(iter(E)).range
            if r not in out and all(p.source in out for p in E):
                out.add(r)
                changed = True
        if changed:
            out = set(hereditary_closure(g, out))
    return frozenset(out)


def quotient_graph(g: KGraph, H: Iterable[str]) -> KGraph:
    """The k-graph Lambda minus Lambda H: vertices outside H and edges with source outside H."""
    H = frozenset(H)
    if not is_hereditary(g, H):
        raise NotHereditary(f"{sorted(H)} is not hereditary")
    verts = [v for v in g.vertices if v not in H]
    edges = [e for e in g.edge_list if e.source not in H]
    keep = {e.id for e in edges}
    squares = [s for s in g.squares if {s.gi, s.fj, s.fj2, s.gi2} <= keep]
    return KGraph(g.rank, verts, edges, squares)


def ee_h(g: KGraph, Ee, H: Iterable[str]) -> list[PathSet]:
    """{E minus EH : E in the family, r(E) not in H}, as sets of paths in the quotient."""
    H = frozenset(H)
    if not is_saturated(g, H, Ee):
        raise NotSaturated(f"{sorted(H)} is not saturated for the family")
    out = set()
    for E in _family(Ee):
        if next(iter(E)).range in H:
            continue
        rest = frozenset(p for p in E if p.source not in H)
        if rest:
            out.add(rest)
    return sorted(out, key=lambda F: (len(F), [p.sort_key() for p in sort_paths(F)]))


def ck_generators(g: KGraph) -> list[PathSet]:
    """The sets v Lambda^{e_i} (one per vertex and colour, when nonempty)."""
    out = []
    for v in g.vertices:
        for i in range(g.rank):
            E = frozenset(g.enumerate_paths(v, unit(g.rank, i)))
            if E:
                out.append(E)
    return out


def is_ck_family(g: KGraph, Ee) -> bool:
    return g.has_no_sources() and set(_family(Ee)) == set(ck_generators(g))


# ---------------------------------------------------------------------------

@dataclass
class IdealPair:
    H: frozenset[str]
    B: Satiation | None
    forced: bool
    generators: list[PathSet] = field(default_factory=list)

    def generator_json(self) -> list[dict]:
        return [{"vertex": next(iter(E)).range, "paths": [list(p.word) for p in sort_paths(E)]}
                for E in self.generators]


def pair_leq(g: KGraph, p1: IdealPair, p2: IdealPair) -> bool:
    """(H1, B1) <= (H2, B2): H1 in H2 and every E in B1 with r(E) outside H2
    trims to a member of B2."""
    if not p1.H <= p2.H:
        return False
    if p1.forced and p2.forced:
        return True
    fam2 = p2.B.family if p2.B is not None else frozenset()
    for E in (p1.B.family if p1.B is not None else ()):
        if next(iter(E)).range in p2.H:
            continue
        rest = frozenset(p for p in E if p.source not in p2.H)
        if rest not in fam2:
            return False
    return True


@dataclass
class IdealLattice:
    pairs: list[IdealPair]
    hasse: list[tuple[int, int]]
    exactness: str
    bounds: dict

    def to_json(self) -> dict:
        return {
            "ideals": [{"H": sorted(p.H), "B_generators": p.generator_json(),
                        "exactness": self.exactness} for p in self.pairs],
            "hasse": [list(e) for e in self.hasse],
            "exactness": self.exactness,
            "bounds": self.bounds,
        }


def _saturated_hereditary_sets(g: KGraph, fam) -> list[frozenset[str]]:
    start = saturate(g, (), fam)
    seen = {start}
    todo = [start]
    while todo:
        H = todo.pop()
        for v in g.vertices:
            if v not in H:
                H2 = saturate(g, H | {v}, fam)
                if H2 not in seen:
                    seen.add(H2)
                    todo.append(H2)
    return sorted(seen, key=lambda H: (len(H), sorted(H)))


def _exhaustive_subsets(q: KGraph, D) -> list[PathSet]:
    out = []
    for v in q.vertices:
        U = [p for p in q.paths_upto(D, v) if not p.is_vertex]
        for r in range(1, len(U) + 1):
            for combo in itertools.combinations(U, r):
                if is_exhaustive(q, combo):
                    out.append(frozenset(combo))
    return out


def list_gauge_invariant_ideals(g: KGraph, Ee, D: Sequence[int], max_b: int = 256) -> IdealLattice:
    """All admissible pairs (H, B) for the family ``Ee``, with their order.

    For the Cuntz-Krieger family of a graph without sources the second
    component is forced and the listing is exact.  Otherwise every family is
    the bounded satiation at degree D and the listing is marked "bounded".
    """
    g.require_valid()
    D = tuple(D)
    if is_ck_family(g, Ee):
        pairs = []
        for H in _saturated_hereditary_sets(g, list(_family(Ee))):
            q = quotient_graph(g, H)
            pairs.append(IdealPair(H, None, True, ck_generators(q)))
        exactness = "exact"
    else:
        sat = satiate(g, _family(Ee), D)
        pairs = []
        truncated = False
        for H in _saturated_hereditary_sets(g, sat):
            q = quotient_graph(g, H)
            base_sets = ee_h(g, sat, H)
            base = satiate(q, base_sets, D)
            principal = []
            for F in _exhaustive_subsets(q, D):
                P = satiate(q, list(base.family) + [F], D)
                if P.family not in {x.family for x in principal} and P.family != base.family:
                    principal.append(P)
            found = {base.family: base}
            todo = [base]
            while todo and len(found) < max_b:
                B = todo.pop()
                for P in principal:
                    J = satiate(q, list(B.family | P.family), D) if not P.family <= B.family else B
                    if J.family not in found:
                        found[J.family] = J
                        todo.append(J)
            truncated = truncated or bool(todo)
            for fam in sorted(found, key=lambda f: (len(f), sorted(_fam_key(f)))):
                B = found[fam]
                pairs.append(IdealPair(H, B, False, B.minimal_sets()))
        exactness = "bounded"
    order = [[pair_leq(g, a, b) for b in pairs] for a in pairs]
    n = len(pairs)
    hasse = []
    for i in range(n):
        for j in range(n):
            if i == j or not order[i][j] or order[j][i]:
                continue
            if not any(order[i][m] and order[m][j] and m not in (i, j)
                       and not order[m][i] and not order[j][m] for m in range(n)):
                hasse.append((i, j))
    return IdealLattice(pairs, hasse, exactness, {"D": list(D)})


def _fam_key(fam):
    return [(len(F), [p.sort_key() for p in sort_paths(F)]) for F in fam]
