"""Common extensions, extension sets, exhaustiveness and closure of path sets."""
from __future__ import annotations

from typing import Iterable

from .errors import ContainsVertex, NotMember, RangeMismatch
from .skeleton import KGraph, Path, join, leq, sort_paths, sub


def common_range(paths: Iterable[Path], vertex: str | None = None) -> str | None:
    """The shared range of ``paths`` (``vertex`` for an empty set)."""
    ranges = {p.range for p in paths}
    if vertex is not None:
        ranges.add(vertex)
    if len(ranges) > 1:
        raise RangeMismatch(f"paths do not share a range: {sorted(ranges)}")
    return next(iter(ranges)) if ranges else None


def mce(graph: KGraph, mu: Path, nu: Path) -> list[Path]:
    """Minimal common extensions of ``mu`` and ``nu``."""
    cache = graph.cache("mce")
    key = (mu, nu)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if mu.range != nu.range:
        out: list[Path] = []
    else:
        top = join(mu.degree, nu.degree)
        out = []
        for a in graph.enumerate_paths(mu.source, sub(top, mu.degree)):
            lam = graph.compose(mu, a)
            if graph.is_prefix(nu, lam):
                out.append(lam)
        out = sort_paths(out)
    cache[key] = out
    return out


def mce_pairs(graph: KGraph, mu: Path, nu: Path) -> list[tuple[Path, Path]]:
    """Pairs (alpha, beta) with mu alpha = nu beta in MCE(mu, nu)."""
    out = []
    for lam in mce(graph, mu, nu):
        out.append((graph.factorize(lam, mu.degree)[1], graph.factorize(lam, nu.degree)[1]))
    return out


def ext(graph: KGraph, lam: Path, E: Iterable[Path]) -> frozenset[Path]:
    """Ext(lam; E): tails alpha with lam alpha a common extension of lam and some mu in E."""
    out = set()
    for mu in E:
        for x in mce(graph, lam, mu):
            out.add(graph.factorize(x, lam.degree)[1])
    return frozenset(out)


def exhaustive_witness(graph: KGraph, E: Iterable[Path], vertex: str | None = None) -> Path | None:
    """A path at r(E) with no common extension against E, or None.

    Only paths of degree <= the join of d(E) are tried; this is a complete
    test when the graph has no sources.
    """
    E = list(E)
    v = common_range(E, vertex)
    if v is None:
        raise ValueError("empty set needs a vertex")
    if not E:
        return graph.vertex(v)
    top = E[0].degree
    for mu in E[1:]:
        top = join(top, mu.degree)
    for lam in graph.paths_upto(top, v):
        if not any(mce(graph, lam, mu) for mu in E):
            return lam
    return None


def is_exhaustive(graph: KGraph, E: Iterable[Path], vertex: str | None = None) -> bool:
    E = list(E)
    if not E:
        return False
    return exhaustive_witness(graph, E, vertex) is None


def pi_closure(graph: KGraph, E: Iterable[Path]) -> frozenset[Path]:
    """Smallest superset of E closed under the aligned-extension rule.

    For mu, nu in F with equal degrees and sigma, tau in F with equal degrees,
    every nu alpha = sigma beta in MCE(nu, sigma) puts mu alpha and tau beta in F.
    """
    F = set(E)
    common_range(F)
    frontier = True
    while frontier:
        frontier = False
        cur = sort_paths(F)
        by_key: dict = {}
        for p in cur:
            by_key.setdefault((p.degree, p.source), []).append(p)
        new = set()
        for nu in cur:
            for sigma in cur:
                for alpha, beta in mce_pairs(graph, nu, sigma):
                    for mu in by_key[(nu.degree, nu.source)]:
                        new.add(graph.compose(mu, alpha))
                    for tau in by_key[(sigma.degree, sigma.source)]:
                        new.add(graph.compose(tau, beta))
        if not new <= F:
            F |= new
            frontier = True
    return frozenset(F)


def t_set(graph: KGraph, E: Iterable[Path], mu: Path) -> frozenset[Path]:
    """Nontrivial tails mu' at s(mu) with mu mu' in E."""
    E = set(E)
    if mu not in E:
        raise NotMember(f"{mu} is not in the set")
    out = set()
    for lam in E:
        if lam == mu or not leq(mu.degree, lam.degree) or lam.degree == mu.degree:
            continue
        if lam.range != mu.range:
            continue
        head, tail = graph.factorize(lam, mu.degree)
        if head == mu:
            out.add(tail)
    return frozenset(out)


def check_no_vertex(E: Iterable[Path]) -> None:
    for p in E:
        if p.is_vertex:
            raise ContainsVertex(f"set contains the vertex {p.range}")
