"""Filters, bounded satiation of families of exhaustive sets, and the
vanishing test for gap projections Delta^F.

Everything that ranges over infinitely many paths is cut off at a degree
bound ``D`` (a tuple); results record the bound they were computed with.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .align import common_range, exhaustive_witness, ext, is_exhaustive
from .errors import ContainsVertex, NotExhaustive, OutOfUniverse, RangeMismatch
from .skeleton import KGraph, Path, add, join, leq, ones, scale, sort_paths, sub, zero

PathSet = frozenset  # frozenset[Path]


# ---------------------------------------------------------------------------
# filters

@dataclass(frozen=True)
class BoundedFilter:
    """Initial segments of ``prefix`` (principal) or of prefix cycle^n for all n.

    A periodic filter with d(cycle) >= (1,...,1) is an ultrafilter when the
    graph has no sources.
    """
    prefix: Path
    cycle: Path | None = None

    def __post_init__(self):
        if self.cycle is not None:
            if self.cycle.range != self.cycle.source or self.cycle.range != self.prefix.source:
                raise RangeMismatch("cycle must be a loop at the source of the prefix")
            if not any(self.cycle.degree):
                object.__setattr__(self, "cycle", None)

    @property
    def range(self) -> str:
        return self.prefix.range

    @property
    def kind(self) -> str:
        return "principal" if self.cycle is None else "periodic"

    @property
    def is_ultrafilter(self) -> bool:
        return self.cycle is not None and min(self.cycle.degree) >= 1

    def _power(self, g: KGraph, j: int) -> Path:
        cache = g.cache("cycle_power")
        key = (self.cycle, j)
        hit = cache.get(key)
        if hit is None:
            hit = g.vertex(self.cycle.range) if j == 0 else g.compose(self._power(g, j - 1), self.cycle)
            cache[key] = hit
        return hit

    def head(self, g: KGraph, n: Sequence[int]) -> Path | None:
        """The member of degree n, if any."""
        n = tuple(n)
        if self.cycle is None:
            if not leq(n, self.prefix.degree):
                return None
            return g.factorize(self.prefix, n)[0]
        K = self.cycle.degree
        d = self.prefix.degree
        j = 0
        for a, b, kk in zip(n, d, K):
            if a > b:
                if kk == 0:
                    return None
                j = max(j, -(-(a - b) // kk))
        long = g.compose(self.prefix, self._power(g, j))
        return g.factorize(long, n)[0]

    def contains(self, g: KGraph, eta: Path) -> bool:
        if eta.range != self.range:
            return False
        return self.head(g, eta.degree) == eta

    def members(self, g: KGraph, bound: Sequence[int]) -> list[Path]:
        out = []
        for n in _box(bound):
            h = self.head(g, n)
            if h is not None:
                out.append(h)
        return sort_paths(out)

    def shift(self, g: KGraph, mu: Path) -> "BoundedFilter":
        """The filter generated by mu S (requires s(mu) = r(S))."""
        if mu.source != self.range:
            raise RangeMismatch(f"s({mu}) = {mu.source} but the filter starts at {self.range}")
        return BoundedFilter(g.compose(mu, self.prefix), self.cycle)

    def vertices(self, g: KGraph) -> frozenset[str]:
        """Sources of all members (exact, by exploring shifts of the path)."""
        if self.cycle is None:
            return frozenset(g.vertex_at(self.prefix, n) for n in _box(self.prefix.degree))
        K = self.cycle.degree
        k = g.rank
        start = (self.prefix, self.cycle)
        seen = {start}
        todo = [start]
        while todo:
            mu, rho = todo.pop()
            for i in range(k):
                e = tuple(int(j == i) for j in range(k))
                if mu.degree[i] >= 1:
                    nxt = (g.segment(mu, e, mu.degree), rho)
                elif K[i] >= 1:
                    rr = g.compose(rho, rho)
                    nxt = (g.segment(g.compose(mu, rho), e, add(e, mu.degree)),
                           g.segment(rr, e, add(e, K)))
                else:
                    continue
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return frozenset(m.range for m, _ in seen)

    def same_as(self, g: KGraph, other: "BoundedFilter") -> bool:
        """Exact equality of the generated filters."""
        if self.range != other.range or self.kind != other.kind:
            return False
        if self.cycle is None:
            return self.prefix == other.prefix
        supp1 = tuple(int(a > 0) for a in self.cycle.degree)
        supp2 = tuple(int(a > 0) for a in other.cycle.degree)
        if supp1 != supp2:
            return False
        c = join(self.prefix.degree, other.prefix.degree)
        n = add(add(c, self.cycle.degree), other.cycle.degree)
        return self.head(g, n) == other.head(g, n)

    def agrees_with(self, g: KGraph, other: "BoundedFilter", bound: Sequence[int]) -> bool:
        return self.members(g, bound) == other.members(g, bound)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "range": self.range, "prefix": list(self.prefix.word)}
        if self.cycle is not None:
            out["cycle"] = list(self.cycle.word)
            out["cycle_vertex"] = self.cycle.range
        return out


def principal_filter(g: KGraph, lam: Path) -> BoundedFilter:
    return BoundedFilter(lam)


def periodic_filter(g: KGraph, mu: Path, kappa: Path) -> BoundedFilter:
    return BoundedFilter(mu, kappa)


def shift_filter(g: KGraph, mu: Path, S: BoundedFilter) -> BoundedFilter:
    return S.shift(g, mu)


def _box(bound: Sequence[int]):
    import itertools
    return itertools.product(*(range(b + 1) for b in bound))


def cycles(g: KGraph, bound: Sequence[int], ultra: bool = True, at: str | None = None) -> list[Path]:
    """Loops of degree <= bound (with every coordinate >= 1 when ``ultra``)."""
    out = []
    for p in g.paths_upto(bound, at):
        if p.range != p.source or not any(p.degree):
            continue
        if ultra and min(p.degree) < 1:
            continue
        out.append(p)
    out.sort(key=lambda p: (sum(p.degree), p.degree, p.word, p.range))
    return out


def periodic_ultrafilters(g: KGraph, v: str, bound: Sequence[int]) -> list[BoundedFilter]:
    """Distinct ultrafilters p cycle^infty at v with d(p), d(cycle) <= bound."""
    cache = g.cache("ultrafilters")
    key = (v, tuple(bound))
    if key in cache:
        return cache[key]
    found: list[BoundedFilter] = []
    buckets: dict = {}
    probe = scale(3, bound)
    for kappa in cycles(g, bound):
        for p in g.paths_upto(bound, v):
            if p.source != kappa.range:
                continue
            S = BoundedFilter(p, kappa)
            sig = S.head(g, probe)
            bucket = buckets.setdefault(sig, [])
            if any(S.same_as(g, T) for T in bucket):
                continue
            bucket.append(S)
            found.append(S)
    cache[key] = found
    return found


# ---------------------------------------------------------------------------
# satiation

class Satiation:
    """A family of finite exhaustive sets, closed under the four satiation
    rules restricted to paths of degree <= D."""

    def __init__(self, graph: KGraph, D: Sequence[int], family: Iterable[PathSet], generators=()):
        self.graph = graph
        self.D = tuple(D)
        self.family: frozenset[PathSet] = frozenset(family)
        self.generators = tuple(generators)
        self._at: dict[str, list[PathSet]] = {}
        for F in self.family:
            self._at.setdefault(next(iter(F)).range, []).append(F)
        for v in self._at:
            self._at[v].sort(key=_set_key)

    def at(self, v: str) -> list[PathSet]:
        return self._at.get(v, [])

    def __contains__(self, F) -> bool:
        return frozenset(F) in self.family

    def __len__(self) -> int:
        return len(self.family)

    def __eq__(self, other) -> bool:
        return isinstance(other, Satiation) and self.family == other.family and self.D == other.D

    __hash__ = None

    def minimal_sets(self) -> list[PathSet]:
        fams = sorted(self.family, key=_set_key)
        return [F for F in fams if not any(G < F for G in fams)]

    def sorted_sets(self) -> list[PathSet]:
        return sorted(self.family, key=_set_key)


def _set_key(F):
    return (len(F), [p.sort_key() for p in sort_paths(F)])


def _check_family(g: KGraph, Ee: Iterable[Iterable[Path]], D) -> list[PathSet]:
    out = []
    for E in Ee:
        E = frozenset(E)
        if not E:
            raise NotExhaustive("empty set in family")
        common_range(E)
        for p in E:
            if p.is_vertex:
                raise ContainsVertex(f"set contains the vertex {p.range}")
            if not leq(p.degree, D):
                raise OutOfUniverse(f"{p} exceeds degree bound {D}")
        w = exhaustive_witness(g, E)
        if w is not None:
            raise NotExhaustive(f"set {sorted(map(str, E))} misses {w}")
        out.append(E)
    return out


def satiate(graph: KGraph, Ee: Iterable[Iterable[Path]], D: Sequence[int]) -> Satiation:
    """Bounded closure of ``Ee`` under the satiation rules.

    (S1) add a nontrivial path at r(F); (S2) replace F by Ext(lam; F) for
    lam outside F Lambda; (S3) drop a member that extends another member;
    (S4) replace lam in F by lam G for G in the family at s(lam).
    Sets are subsets of v Lambda^{<=D} minus v.
    """
    g = graph.require_valid()
    D = tuple(D)
    gens = _check_family(g, Ee, D)
    key = (frozenset(gens), D)
    cache = g.cache("satiation")
    if key in cache:
        return cache[key]

    universe = {v: [p for p in g.paths_upto(D, v) if not p.is_vertex] for v in g.vertices}
    within = {v: g.paths_upto(D, v) for v in g.vertices}
    fam: set[PathSet] = set()
    at: dict[str, list[PathSet]] = {v: [] for v in g.vertices}
    queue: deque[PathSet] = deque()

    def push(F: PathSet):
        if F and F not in fam:
            fam.add(F)
            at[next(iter(F)).range].append(F)
            queue.append(F)

    def s4(F: PathSet, lam: Path, G: PathSet):
        new = set(F)
        new.discard(lam)
        for mu in G:
            x = g.compose(lam, mu)
            if not leq(x.degree, D):
                return
            new.add(x)
        push(frozenset(new))

    for E in gens:
        push(E)
    while queue:
        F = queue.popleft()
        v = next(iter(F)).range
        # S1
        for lam in universe[v]:
            if lam not in F:
                push(F | {lam})
        # S2
        for lam in within[v]:
            if any(g.is_prefix(mu, lam) for mu in F):
                continue
            G = ext(g, lam, F)
            if G:
                push(frozenset(G))
        # S3
        for lam in F:
            for x in F:
                if x != lam and g.is_prefix(lam, x):
                    push(F - {x})
        # S4 with F outside and inside
        for lam in F:
            for G in list(at[lam.source]):
                s4(F, lam, G)
        for H in list(fam):
            for lam in H:
                if lam.source == v:
                    s4(H, lam, F)
    out = Satiation(g, D, fam, gens)
    cache[key] = out
    return out


class Membership(enum.Enum):
    YES = "Yes"
    NO = "No"


def is_in_satiation(graph: KGraph, F: Iterable[Path], Ee, D: Sequence[int]) -> Membership:
    F = frozenset(F)
    D = tuple(D)
    for p in F:
        if p.is_vertex:
            raise ContainsVertex(f"set contains the vertex {p.range}")
        if not leq(p.degree, D):
            raise OutOfUniverse(f"{p} exceeds degree bound {D}")
    sat = Ee if isinstance(Ee, Satiation) else satiate(graph, Ee, D)
    return Membership.YES if F in sat else Membership.NO


def is_compatible(graph: KGraph, S: BoundedFilter, sat: Satiation, D: Sequence[int] | None = None) -> bool:
    """For every member lam with d(lam) <= D and every E in the family at
    s(lam), some lam mu (mu in E) is a member."""
    D = sat.D if D is None else tuple(D)
    for lam in S.members(graph, D):
        for E in sat.at(lam.source):
            if not any(S.contains(graph, graph.compose(lam, mu)) for mu in E):
                return False
    return True


@dataclass
class DeltaVerdict:
    status: str  # "Zero" | "Nonzero" | "Inconclusive"
    reason: str
    certificate: BoundedFilter | None = None
    norms: tuple[float, float] | None = None
    bounds: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": self.status, "reason": self.reason,
                "certificate": self.certificate.to_json() if self.certificate else None,
                "certificate_norms": list(self.norms) if self.norms else None,
                "bounds": self.bounds}


def delta_vanishes(graph: KGraph, F: Iterable[Path], Ee, D: Sequence[int],
                   vertex: str | None = None, cocycle=None) -> DeltaVerdict:
    """Decide Delta^F = 0 in the algebra defined by the family ``Ee``.

    Zero when F contains r(F) or lies in the bounded satiation; Nonzero when
    a compatible filter at r(F) avoiding F Lambda is found, checked in the
    truncated representation (Delta^F fixes each h_lam for lam in the filter).
    """
    g = graph.require_valid()
    D = tuple(D)
    F = frozenset(F)
    v = common_range(F, vertex)
    if v is None:
        raise RangeMismatch("empty set needs a vertex")
    bounds = {"D": list(D)}
    if g.vertex(v) in F:
        return DeltaVerdict("Zero", "contains_vertex", bounds=bounds)
    sat = Ee if isinstance(Ee, Satiation) else satiate(g, Ee, D)
    in_universe = all(leq(p.degree, D) for p in F)
    if in_universe and F in sat:
        return DeltaVerdict("Zero", "in_satiation", bounds=bounds)

    box = tuple([max(D)] * g.rank) if D else ()
    candidates = []
    for kappa in cycles(g, box, ultra=False):
        for p in g.paths_upto(box, v):
            if p.source == kappa.range:
                candidates.append(BoundedFilter(p, kappa))
    candidates.sort(key=lambda S: (sum(S.prefix.degree) + sum(S.cycle.degree),
                                   sum(S.prefix.degree), S.cycle.sort_key(), S.prefix.sort_key()))
    candidates += [BoundedFilter(lam) for lam in g.paths_upto(box, v)]
    for S in candidates:
        if any(S.contains(g, mu) for mu in F):
            continue
        if not is_compatible(g, S, sat, D):
            continue
        norms = _certify(g, F, v, S, cocycle)
        return DeltaVerdict("Nonzero", "compatible_filter", S, norms, bounds)
    return DeltaVerdict("Inconclusive", "no_certificate_within_bound", bounds=bounds)


def _certify(g: KGraph, F: PathSet, v: str, S: BoundedFilter, cocycle=None) -> tuple[float, float]:
    from .pathrep import TruncatedRep, represent
    from .spanalg import delta
    from .twist import CategoricalCocycle, TwoCocycleZk

    if cocycle is None:
        cocycle = CategoricalCocycle(g, TwoCocycleZk(tuple((0,) * g.rank for _ in range(g.rank))))
    top = zero(g.rank)
    for mu in F:
        top = join(top, mu.degree)
    reach = S.prefix.degree if S.cycle is None else add(S.prefix.degree, scale(2, S.cycle.degree))
    N = add(top, reach)
    rep = TruncatedRep(cocycle, N)
    A = represent(delta(cocycle, F, v), rep)
    norms = []
    for lam in S.members(g, sub(N, top)):
        h = np.zeros(rep.dim, dtype=complex)
        h[rep.index[lam]] = 1.0
        norms.append(float(np.linalg.norm(A @ h)))
    return (min(norms), max(norms))
