"""The relation mu ~ nu (mu x = nu x for every boundary path x), the
periodicity group, the vertex set where periodicity is uniform, cofinality,
and generalised cycles with an entrance.

``sim_check`` decides ~ exactly.  After stripping the common prefix of degree
d(mu tau) ^ d(nu tau), the pair (mu tau, nu tau) becomes a pair of paths of
the fixed degrees (d(mu) - d(nu))^+ and (d(mu) - d(nu))^-.  There are finitely
many such pairs, so a breadth-first search over single-edge extensions either
finds tau with MCE(mu tau, nu tau) empty or closes up.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .align import mce
from .boundary import BoundedFilter, periodic_ultrafilters
from .errors import SourceMismatch, UnsupportedGraphClass, VertexNotInHPer
from .skeleton import KGraph, Path, add, leq, meet, ones, scale, sort_paths, sub
from .twist import ZkSubgroup


class SimVerdict(enum.Enum):
    SIM = "Sim"
    NOT_SIM = "NotSim"
    PROBABLE_SIM = "ProbableSim"


@dataclass
class SimResult:
    verdict: SimVerdict
    witness: Path | None = None
    states: int = 0
    ultrafilters_checked: int = 0

    @property
    def related(self) -> bool:
        return self.verdict is not SimVerdict.NOT_SIM


def normalize_pair(g: KGraph, mu: Path, nu: Path) -> tuple[Path, Path] | None:
    """Strip the common prefix of degree d(mu) ^ d(nu); None when the prefixes differ."""
    if mu.range != nu.range:
        return None
    m = meet(mu.degree, nu.degree)
    h1, t1 = g.factorize(mu, m)
    h2, t2 = g.factorize(nu, m)
    if h1 != h2:
        return None
    return (t1, t2)


def _dead(g: KGraph, state) -> bool:
    return state is None or not mce(g, *state)


def ultrafilter_disagreement(g: KGraph, mu: Path, nu: Path, D: int) -> BoundedFilter | None:
    """An eventually periodic ultrafilter S at s(mu) (cycle and prefix degree
    <= D per colour) with mu S != nu S, or None."""
    bound = tuple([D] * g.rank)
    for S in periodic_ultrafilters(g, mu.source, bound):
        if not S.shift(g, mu).same_as(g, S.shift(g, nu)):
            return S
    return None


def _tau_from_filter(g: KGraph, mu: Path, nu: Path, S: BoundedFilter) -> Path:
    """A member tau of S with MCE(mu tau, nu tau) empty (exists when mu S != nu S)."""
    K = S.cycle.degree
    j = 1
    while True:
        tau = S.head(g, add(S.prefix.degree, scale(j, K)))
        if not mce(g, g.compose(mu, tau), g.compose(nu, tau)):
            return tau
        j += 1


def sim_check(g: KGraph, mu: Path, nu: Path, D: int = 4, max_states: int = 200_000,
              cross_validate: bool = True) -> SimResult:
    """Decide mu ~ nu.

    NotSim comes with tau such that MCE(mu tau, nu tau) is empty.  Sim means
    the pair-state search closed; when ``cross_validate`` is set the answer is
    also compared with the ultrafilter oracle at depth D.  ProbableSim is
    returned only if the state budget runs out with the oracle agreeing.
    """
    if mu.source != nu.source:
        raise SourceMismatch(f"s({mu}) != s({nu})")
    if mu == nu:
        return SimResult(SimVerdict.SIM)
    v = g.vertex(mu.source)
    start = normalize_pair(g, mu, nu)
    if _dead(g, start):
        return SimResult(SimVerdict.NOT_SIM, v, 1)
    seen = {start}
    queue = deque([(start, v)])
    closed = True
    while queue:
        (a, b), tau = queue.popleft()
        for c in range(1, g.rank + 1):
            for e in g.in_edges(a.source, c):
                ep = g.edge(e.id)
                nxt = normalize_pair(g, g.compose(a, ep), g.compose(b, ep))
                tau2 = g.compose(tau, ep)
                if _dead(g, nxt):
                    return SimResult(SimVerdict.NOT_SIM, tau2, len(seen))
                if nxt not in seen:
                    if len(seen) >= max_states:
                        closed = False
                        queue.clear()
                        break
                    seen.add(nxt)
                    queue.append((nxt, tau2))
            if not closed:
                break
    n_uf = 0
    if cross_validate or not closed:
        S = ultrafilter_disagreement(g, mu, nu, D)
        n_uf = len(periodic_ultrafilters(g, mu.source, tuple([D] * g.rank)))
        if S is not None:
            if closed:
                raise AssertionError(f"pair search and ultrafilter oracle disagree on {mu}, {nu}")
            return SimResult(SimVerdict.NOT_SIM, _tau_from_filter(g, mu, nu, S), len(seen), n_uf)
    verdict = SimVerdict.SIM if closed else SimVerdict.PROBABLE_SIM
    return SimResult(verdict, None, len(seen), n_uf)


class SimRelation:
    """Memoised ~ on a graph, keyed on normalised pairs."""

    def __init__(self, g: KGraph, D: int = 4, cross_validate: bool = True):
        self.graph = g
        self.D = D
        self.cross_validate = cross_validate
        self._memo: dict = {}

    def check(self, mu: Path, nu: Path) -> SimResult:
        if mu == nu:
            return SimResult(SimVerdict.SIM)
        key = normalize_pair(self.graph, mu, nu)
        if key is not None:
            hit = self._memo.get(key)
            if hit is not None:
                return hit
        res = sim_check(self.graph, mu, nu, self.D, cross_validate=self.cross_validate)
        if key is not None:
            self._memo[key] = res
        return res

    def related(self, mu: Path, nu: Path) -> bool:
        if mu.source != nu.source:
            return False
        return self.check(mu, nu).related


def pq(m: Sequence[int], context: Sequence[int] | None = None) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split m = p - q with p, q >= 0; p = context when m <= context."""
    m = tuple(m)
    if context is not None and leq(m, context):
        return tuple(context), sub(context, m)
    return tuple(max(a, 0) for a in m), tuple(max(-a, 0) for a in m)


@dataclass
class PeriodicityData:
    graph: KGraph
    depth: int
    per: ZkSubgroup
    sim: SimRelation
    h_per: frozenset[str]
    sim_pairs: list[tuple[Path, Path]] = field(default_factory=list)
    unresolved: list[tuple[Path, Path]] = field(default_factory=list)

    def theta(self, lam: Path, n: Sequence[int]) -> Path:
        """The unique mu in r(lam) Lambda^n with mu ~ lam."""
        g = self.graph
        if lam.range not in self.h_per:
            raise VertexNotInHPer(f"{lam.range} is not in H_Per")
        for mu in g.enumerate_paths(lam.range, tuple(n)):
            if mu.source == lam.source and self.sim.related(lam, mu):
                return mu
        raise ValueError(f"no path of degree {tuple(n)} related to {lam}")

    def theta_table(self, m: Sequence[int], n: Sequence[int], at: str | None = None) -> dict[Path, Path]:
        """theta_{m,n} on H_Per Lambda^m (or on ``at`` Lambda^m); checked to be a bijection."""
        g = self.graph
        verts = sorted(self.h_per) if at is None else [at]
        table = {}
        for v in verts:
            for lam in g.enumerate_paths(v, tuple(m)):
                table[lam] = self.theta(lam, n)
        if len(set(table.values())) != len(table):
            raise ValueError("theta is not injective")
        return table


def per_group(g: KGraph, D: int = 4, sim: SimRelation | None = None) -> PeriodicityData:
    """Per generated by d(mu) - d(nu) over related pairs with degrees <= D per colour."""
    g.require_valid()
    sim = sim or SimRelation(g, D)
    bound = tuple([D] * g.rank)
    paths = g.paths_upto(bound)
    by_source: dict[str, list[Path]] = {}
    for p in paths:
        by_source.setdefault(p.source, []).append(p)
    gens = []
    pairs, unresolved = [], []
    for group in by_source.values():
        for i, mu in enumerate(group):
            for nu in group[i + 1:]:
                if mu.range != nu.range:
                    continue
                res = sim.check(mu, nu)
                if res.verdict is SimVerdict.SIM:
                    pairs.append((mu, nu))
                    gens.append(sub(mu.degree, nu.degree))
                elif res.verdict is SimVerdict.PROBABLE_SIM:
                    unresolved.append((mu, nu))
    per = ZkSubgroup(g.rank, gens)
    data = PeriodicityData(g, D, per, sim, frozenset(), pairs, unresolved)
    data.h_per = _h_per(g, data)
    return data


def _h_per(g: KGraph, data: PeriodicityData) -> frozenset[str]:
    out = set()
    for v in g.vertices:
        ok = True
        for gen in data.per.basis:
            p, q = pq(gen)
            for m, n in ((p, q), (q, p)):
                for lam in g.enumerate_paths(v, m):
                    if not any(mu.source == lam.source and data.sim.related(lam, mu)
                               for mu in g.enumerate_paths(v, n)):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            out.add(v)
    return frozenset(out)


@dataclass
class AperiodicityResult:
    status: str  # "Aperiodic" | "Periodic" | "Unknown"
    witness: tuple[Path, Path] | None
    depth: int
    not_sim: list[tuple[Path, Path, Path]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"status": self.status, "depth": self.depth,
                "witness": [list(p.word) if p.word else p.range for p in self.witness] if self.witness else None,
                "pairs_refuted": len(self.not_sim)}


def is_aperiodic(g: KGraph, D: int = 4, sim: SimRelation | None = None) -> AperiodicityResult:
    """Aperiodic when every distinct pair with a common source and degrees
    <= D per colour is refuted by an explicit tau."""
    g.require_valid()
    sim = sim or SimRelation(g, D)
    paths = g.paths_upto(tuple([D] * g.rank))
    by_source: dict[str, list[Path]] = {}
    for p in paths:
        by_source.setdefault(p.source, []).append(p)
    refuted = []
    unknown = None
    for group in by_source.values():
        for i, mu in enumerate(group):
            for nu in group[i + 1:]:
                res = sim.check(mu, nu)
                if res.verdict is SimVerdict.SIM:
                    return AperiodicityResult("Periodic", (mu, nu), D, refuted)
                if res.verdict is SimVerdict.PROBABLE_SIM:
                    unknown = unknown or (mu, nu)
                else:
                    refuted.append((mu, nu, res.witness))
    if unknown:
        return AperiodicityResult("Unknown", unknown, D, refuted)
    return AperiodicityResult("Aperiodic", None, D, refuted)


@dataclass
class CofinalityResult:
    status: str  # "Cofinal" | "NotCofinal"
    vertex: str | None = None
    witness: BoundedFilter | None = None

    @property
    def cofinal(self) -> bool:
        return self.status == "Cofinal"

    def to_json(self) -> dict:
        return {"status": self.status, "vertex": self.vertex,
                "witness": self.witness.to_json() if self.witness else None}


def _cube_steps(g: KGraph, w: str) -> list[Path]:
    return g.enumerate_paths(w, ones(g.rank))


def is_cofinal(g: KGraph) -> CofinalityResult:
    """Cofinality for graphs without sources.

    For each v, let R_v be the vertices w with v Lambda w nonempty.  The
    graph fails to be cofinal at v exactly when some infinite path avoids
    R_v; such paths are found as a greatest fixed point over (1,...,1)-cubes.
    """
    g.require_valid()
    if not g.has_no_sources():
        raise UnsupportedGraphClass("cofinality test needs a graph without sources")
    for v in g.vertices:
        R = g.reachable_sources(v)
        Z = set(g.vertices) - R
        changed = True
        while changed:
            changed = False
            for w in sorted(Z):
                if not any(lam.source in Z and all(g.vertex_at(lam, n) not in R for n in _corners(lam))
                           for lam in _cube_steps(g, w)):
                    Z.discard(w)
                    changed = True
        if Z:
            return CofinalityResult("NotCofinal", v, _avoiding_path(g, Z))
    return CofinalityResult("Cofinal")


def _corners(lam: Path):
    import itertools
    return itertools.product(*(range(a + 1) for a in lam.degree))


def _avoiding_path(g: KGraph, Z: set[str]) -> BoundedFilter:
    w = min(Z)
    steps: list[Path] = []
    visited = {w: 0}
    while True:
        lam = next(l for l in _cube_steps(g, w) if l.source in Z)
        steps.append(lam)
        w = lam.source
        if w in visited:
            i = visited[w]
            break
        visited[w] = len(steps)
    head = g.vertex(steps[0].range)
    for s in steps[:i]:
        head = g.compose(head, s)
    cyc = steps[i]
    for s in steps[i + 1:]:
        cyc = g.compose(cyc, s)
    return BoundedFilter(head, cyc)


def verify_not_cofinal(g: KGraph, v: str, S: BoundedFilter) -> bool:
    """The witness path never meets a vertex that v can see."""
    R = g.reachable_sources(v)
    return S.is_ultrafilter and not (S.vertices(g) & R)


@dataclass
class GeneralizedCycle:
    mu: Path
    nu: Path
    entrance: Path
    depth: int

    def to_json(self) -> dict:
        f = lambda p: list(p.word) if p.word else p.range
        return {"mu": f(self.mu), "nu": f(self.nu), "entrance": f(self.entrance), "depth": self.depth}


def find_generalized_cycle_with_entrance(g: KGraph, D: int = 2) -> GeneralizedCycle | None:
    """A pair (mu, nu) with MCE(mu tau, nu) nonempty for every tau of degree
    <= D per colour, together with tau' such that MCE(mu, nu tau') is empty."""
    g.require_valid()
    bound = tuple([D] * g.rank)
    paths = g.paths_upto(bound)
    pairs = [(mu, nu) for mu in paths for nu in paths
             if mu != nu and mu.range == nu.range and mu.source == nu.source]
    pairs.sort(key=lambda t: (sum(t[0].degree) + sum(t[1].degree), t[0].sort_key(), t[1].sort_key()))
    for mu, nu in pairs:
        taus = g.paths_upto(bound, mu.source)
        if not all(mce(g, g.compose(mu, tau), nu) for tau in taus):
            continue
        for tau in taus:
            if not mce(g, mu, g.compose(nu, tau)):
                return GeneralizedCycle(mu, nu, tau, D)
    return None
