"""Finite k-graphs presented by a coloured 1-skeleton and commuting squares.

A morphism (path) is stored by its normal form: the edge word whose colours
are non-decreasing.  Any composable edge word is brought to that form by
swapping adjacent edges of different colours through the square table.

Degrees are plain tuples of non-negative ints; colours are numbered from 1 in
inputs and reports, and index ``color - 1`` into a degree tuple.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DegreeOutOfRange, InvalidGraph, NotComposable

Degree = tuple[int, ...]


# ---------------------------------------------------------------------------
# degree arithmetic in N^k

def zero(k: int) -> Degree:
    return (0,) * k


def ones(k: int) -> Degree:
    return (1,) * k


def unit(k: int, i: int) -> Degree:
    """Degree of a single edge of colour ``i + 1``."""
    return tuple(int(j == i) for j in range(k))


def leq(m: Sequence[int], n: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(m, n))


def join(m: Sequence[int], n: Sequence[int]) -> Degree:
    return tuple(max(a, b) for a, b in zip(m, n))


def meet(m: Sequence[int], n: Sequence[int]) -> Degree:
    return tuple(min(a, b) for a, b in zip(m, n))


def add(m: Sequence[int], n: Sequence[int]) -> Degree:
    return tuple(a + b for a, b in zip(m, n))


def sub(m: Sequence[int], n: Sequence[int]) -> Degree:
    return tuple(a - b for a, b in zip(m, n))


def scale(c: int, m: Sequence[int]) -> Degree:
    return tuple(c * a for a in m)


def degrees_upto(bound: Sequence[int]) -> list[Degree]:
    """All n <= bound, ordered by total length then lexicographically."""
    out = [tuple(d) for d in itertools.product(*(range(b + 1) for b in bound))]
    out.sort(key=lambda d: (sum(d), d))
    return out


def as_degree(n, k: int) -> Degree:
    if isinstance(n, int):
        if k != 1:
            raise DegreeOutOfRange(f"integer degree {n} given for rank {k}")
        return (n,)
    n = tuple(int(a) for a in n)
    if len(n) != k:
        raise DegreeOutOfRange(f"degree {n} does not have {k} entries")
    return n


# ---------------------------------------------------------------------------
# data types

@dataclass(frozen=True)
class Edge:
    id: str
    color: int
    range: str
    source: str


@dataclass(frozen=True)
class Square:
    """The relation ``gi fj = fj2 gi2`` with colour(gi) < colour(fj)."""
    gi: str
    fj: str
    fj2: str
    gi2: str


@dataclass(frozen=True)
class Path:
    range: str
    word: tuple[str, ...]
    source: str
    degree: Degree

    @property
    def is_vertex(self) -> bool:
        return not self.word

    def sort_key(self):
        return (self.degree, self.word, self.range)

    def __str__(self) -> str:
        return ".".join(self.word) if self.word else self.range

    def __repr__(self) -> str:
        return f"Path({self})"


def sort_paths(paths: Iterable[Path]) -> list[Path]:
    return sorted(paths, key=Path.sort_key)


@dataclass
class CheckResult:
    passed: bool
    witness: object = None


@dataclass
class ValidationReport:
    checks: dict[str, CheckResult] = field(default_factory=dict)
    no_sources: bool = True
    no_sources_witness: object = None
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failures(self) -> dict[str, object]:
        return {k: c.witness for k, c in self.checks.items() if not c.passed}

    def to_dict(self) -> dict:
        return {
            "valid": self.ok,
            "checks": {k: {"passed": c.passed, "witness": c.witness}
                       for k, c in self.checks.items()},
            "no_sources": self.no_sources,
            "no_sources_witness": self.no_sources_witness,
            "stats": self.stats,
        }


# ---------------------------------------------------------------------------

class KGraph:
    """A finite k-graph given by its skeleton and square table.

    The constructor does not validate; call :func:`validate` for a report or
    :meth:`require_valid` to raise on a broken presentation.
    """

    def __init__(self, rank: int, vertices: Iterable[str], edges: Iterable[Edge],
                 squares: Iterable[Square] = ()):
        self.rank = int(rank)
        self.vertices: tuple[str, ...] = tuple(vertices)
        self.edge_list: tuple[Edge, ...] = tuple(edges)
        self.edges: dict[str, Edge] = {}
        for e in self.edge_list:
            self.edges.setdefault(e.id, e)
        self.squares: tuple[Square, ...] = tuple(squares)
        self._fwd: dict[tuple[str, str], tuple[str, str]] = {}
        self._bwd: dict[tuple[str, str], tuple[str, str]] = {}
        for sq in self.squares:
            self._fwd.setdefault((sq.gi, sq.fj), (sq.fj2, sq.gi2))
            self._bwd.setdefault((sq.fj2, sq.gi2), (sq.gi, sq.fj))
        self._in: dict[tuple[str, int], list[Edge]] = defaultdict(list)
        for e in sorted(self.edges.values(), key=lambda e: e.id):
            self._in[(e.range, e.color)].append(e)
        self._compose_cache: dict = {}
        self._factor_cache: dict = {}
        self._enum_cache: dict = {}
        self._report: ValidationReport | None = None
        self._caches: dict[str, dict] = {}

    def cache(self, name: str) -> dict:
        """Per-graph memo table used by the algorithms in other modules."""
        return self._caches.setdefault(name, {})

    # -- identity ---------------------------------------------------------
    def content_key(self):
        return (self.rank, self.vertices,
                tuple(sorted((e.id, e.color, e.range, e.source) for e in self.edges.values())),
                tuple(sorted((s.gi, s.fj, s.fj2, s.gi2) for s in self.squares)))

    def same_as(self, other: "KGraph") -> bool:
        return self is other or self.content_key() == other.content_key()

    def __repr__(self) -> str:
        return (f"KGraph(rank={self.rank}, vertices={len(self.vertices)}, "
                f"edges={len(self.edges)}, squares={len(self.squares)})")

    # -- validation -------------------------------------------------------
    def report(self) -> ValidationReport:
        if self._report is None:
            self._report = validate(self)
        return self._report

    def require_valid(self) -> "KGraph":
        rep = self.report()
        if not rep.ok:
            raise InvalidGraph(f"invalid k-graph: {rep.failures()}", rep)
        return self

    def has_no_sources(self) -> bool:
        return self.report().no_sources

    # -- basic paths ------------------------------------------------------
    def color(self, edge_id: str) -> int:
        return self.edges[edge_id].color

    def vertex(self, v: str) -> Path:
        if v not in self.vertices:
            raise KeyError(f"unknown vertex {v!r}")
        return Path(v, (), v, zero(self.rank))

    def edge(self, e: str) -> Path:
        ed = self.edges[e]
        return Path(ed.range, (e,), ed.source, unit(self.rank, ed.color - 1))

    def in_edges(self, v: str, color: int) -> list[Edge]:
        """Edges of the given colour whose range is ``v``."""
        return self._in.get((v, color), [])

    def path(self, word: Sequence[str], vertex: str | None = None) -> Path:
        """Path of a composable edge word (any order); empty word needs ``vertex``."""
        word = tuple(word)
        if not word:
            if vertex is None:
                raise NotComposable("empty word needs a vertex")
            return self.vertex(vertex)
        for e in word:
            if e not in self.edges:
                raise KeyError(f"unknown edge {e!r}")
        for x, y in zip(word, word[1:]):
            if self.edges[x].source != self.edges[y].range:
                raise NotComposable(f"edges {x} and {y} are not composable")
        deg = [0] * self.rank
        for e in word:
            deg[self.edges[e].color - 1] += 1
        return Path(self.edges[word[0]].range, self.normal_form(word),
                    self.edges[word[-1]].source, tuple(deg))

    # -- rewriting --------------------------------------------------------
    def _swap(self, x: str, y: str) -> tuple[str, str]:
        cx, cy = self.edges[x].color, self.edges[y].color
        table = self._fwd if cx < cy else self._bwd
        try:
            return table[(x, y)]
        except KeyError:
            raise InvalidGraph(f"no square rewrites {x}{y}") from None

    def reorder(self, word: Sequence[str], ranks: Sequence[int],
                pick: Callable[[list[int]], int] | None = None) -> tuple[str, ...]:
        """Sort ``word`` by ``ranks`` using adjacent square swaps.

        ``pick`` chooses which adjacent inversion to resolve next; the default
        is a plain bubble sort.  Equal ranks are never swapped.
        """
        w, r = list(word), list(ranks)
        n = len(w)
        if pick is None:
            for i in range(n):
                swapped = False
                for j in range(n - 1 - i):
                    if r[j] > r[j + 1]:
                        w[j], w[j + 1] = self._swap(w[j], w[j + 1])
                        r[j], r[j + 1] = r[j + 1], r[j]
                        swapped = True
                if not swapped:
                    break
            return tuple(w)
        while True:
            inv = [j for j in range(n - 1) if r[j] > r[j + 1]]
            if not inv:
                return tuple(w)
            j = pick(inv)
            w[j], w[j + 1] = self._swap(w[j], w[j + 1])
            r[j], r[j + 1] = r[j + 1], r[j]

    def normal_form(self, word: Sequence[str], pick=None) -> tuple[str, ...]:
        cols = [self.edges[e].color for e in word]
        order = sorted(range(len(word)), key=lambda i: (cols[i], i))
        ranks = [0] * len(word)
        for pos, i in enumerate(order):
            ranks[i] = pos
        return self.reorder(word, ranks, pick)

    # -- composition and factorisation ------------------------------------
    def compose(self, mu: Path, nu: Path) -> Path:
        key = (mu, nu)
        hit = self._compose_cache.get(key)
        if hit is not None:
            return hit
        if mu.source != nu.range:
            raise NotComposable(f"s({mu}) = {mu.source} but r({nu}) = {nu.range}")
        if not mu.word:
            out = nu
        elif not nu.word:
            out = mu
        else:
            out = Path(mu.range, self.normal_form(mu.word + nu.word), nu.source,
                       add(mu.degree, nu.degree))
        self._compose_cache[key] = out
        return out

    def factorize(self, p: Path, m: Sequence[int]) -> tuple[Path, Path]:
        """Split ``p`` as (first, rest) with d(first) = m."""
        m = tuple(m)
        key = (p, m)
        hit = self._factor_cache.get(key)
        if hit is not None:
            return hit
        if len(m) != self.rank or not leq(zero(self.rank), m) or not leq(m, p.degree):
            raise DegreeOutOfRange(f"cannot factor {p} (degree {p.degree}) at {m}")
        rest = sub(p.degree, m)
        total_m = sum(m)
        seen = [0] * self.rank
        ranks = []
        for e in p.word:
            c = self.edges[e].color - 1
            t = seen[c]
            seen[c] += 1
            if t < m[c]:
                ranks.append(sum(m[:c]) + t)
            else:
                ranks.append(total_m + sum(rest[:c]) + t - m[c])
        w = self.reorder(p.word, ranks)
        head, tail = w[:total_m], w[total_m:]
        mid = self.edges[head[-1]].source if head else p.range
        out = (Path(p.range, head, mid, m), Path(mid, tail, p.source, rest))
        self._factor_cache[key] = out
        return out

    def segment(self, p: Path, m: Sequence[int], n: Sequence[int]) -> Path:
        """The piece of ``p`` between degrees m <= n."""
        first, _ = self.factorize(p, n)
        return self.factorize(first, m)[1]

    def vertex_at(self, p: Path, n: Sequence[int]) -> str:
        return self.factorize(p, n)[0].source

    def is_prefix(self, mu: Path, p: Path) -> bool:
        """True when p = mu q for some q."""
        if mu.range != p.range or not leq(mu.degree, p.degree):
            return False
        return self.factorize(p, mu.degree)[0] == mu

    # -- enumeration ------------------------------------------------------
    def enumerate_paths(self, v: str, n: Sequence[int]) -> list[Path]:
        """All paths in v Lambda^n, sorted by word."""
        n = tuple(n)
        key = (v, n)
        hit = self._enum_cache.get(key)
        if hit is not None:
            return hit
        if v not in self.vertices:
            raise KeyError(f"unknown vertex {v!r}")
        colors = [c + 1 for c in range(self.rank) for _ in range(n[c])]
        out: list[Path] = []

        def walk(at: str, i: int, acc: list[str]):
            if i == len(colors):
                out.append(Path(v, tuple(acc), at, n))
                return
            for e in self.in_edges(at, colors[i]):
                acc.append(e.id)
                walk(e.source, i + 1, acc)
                acc.pop()

        walk(v, 0, [])
        out.sort(key=lambda p: p.word)
        self._enum_cache[key] = out
        return out

    def paths_upto(self, bound: Sequence[int], v: str | None = None) -> list[Path]:
        """All paths of degree <= bound (from ``v`` if given), in basis order."""
        verts = self.vertices if v is None else (v,)
        out = [p for n in degrees_upto(bound) for w in verts
               for p in self.enumerate_paths(w, n)]
        return sort_paths(out)

    def paths_between(self, v: str, w: str, bound: Sequence[int]) -> list[Path]:
        return [p for p in self.paths_upto(bound, v) if p.source == w]

    def reachable_sources(self, v: str) -> set[str]:
        """Vertices w with v Lambda w nonempty (v included)."""
        seen, stack = {v}, [v]
        while stack:
            x = stack.pop()
            for c in range(1, self.rank + 1):
                for e in self.in_edges(x, c):
                    if e.source not in seen:
                        seen.add(e.source)
                        stack.append(e.source)
        return seen


# ---------------------------------------------------------------------------
# validation

def _composable_pairs(g: KGraph, c1: int, c2: int) -> Iterator[tuple[str, str]]:
    for x in sorted(g.edges.values(), key=lambda e: e.id):
        if x.color != c1:
            continue
        for y in g.in_edges(x.source, c2):
            yield x.id, y.id


def validate(graph: KGraph) -> ValidationReport:
    """Check the presentation; each failed check carries a witness."""
    g = graph
    rep = ValidationReport()
    k = g.rank

    bad = None
    if len(set(g.vertices)) != len(g.vertices):
        bad = {"duplicate_vertex": sorted(v for v in set(g.vertices) if g.vertices.count(v) > 1)[0]}
    ids = [e.id for e in g.edge_list]
    if bad is None and len(set(ids)) != len(ids):
        bad = {"duplicate_edge": sorted(i for i in set(ids) if ids.count(i) > 1)[0]}
    if bad is None:
        for e in g.edge_list:
            if not (isinstance(e.color, int) and 1 <= e.color <= k):
                bad = {"edge": e.id, "bad_color": e.color}
                break
            if e.range not in g.vertices or e.source not in g.vertices:
                bad = {"edge": e.id, "unknown_endpoint": [e.range, e.source]}
                break
    if bad is None:
        for sq in g.squares:
            names = (sq.gi, sq.fj, sq.fj2, sq.gi2)
            missing = [x for x in names if x not in g.edges]
            if missing:
                bad = {"square": list(names), "unknown_edge": missing[0]}
                break
            gi, fj, fj2, gi2 = (g.edges[x] for x in names)
            if not (gi.color == gi2.color < fj.color == fj2.color):
                bad = {"square": list(names), "reason": "colours"}
                break
            if not (gi.source == fj.range and fj2.source == gi2.range
                    and gi.range == fj2.range and fj.source == gi2.source):
                bad = {"square": list(names), "reason": "endpoints"}
                break
    rep.checks["references"] = CheckResult(bad is None, bad)

    if bad is None:
        first = defaultdict(int)
        second = defaultdict(int)
        for sq in g.squares:
            first[(sq.gi, sq.fj)] += 1
            second[(sq.fj2, sq.gi2)] += 1
        wit = None
        for c1, c2 in itertools.combinations(range(1, k + 1), 2):
            for pair in _composable_pairs(g, c1, c2):
                if first.get(pair, 0) != 1:
                    wit = {"pair": list(pair), "times_as_first": first.get(pair, 0)}
                    break
            if wit:
                break
            for pair in _composable_pairs(g, c2, c1):
                if second.get(pair, 0) != 1:
                    wit = {"pair": list(pair), "times_as_second": second.get(pair, 0)}
                    break
            if wit:
                break
        rep.checks["square_bijection"] = CheckResult(wit is None, wit)

        if wit is None and k >= 3:
            cube_wit = None
            for c3, c2, c1 in itertools.permutations(range(1, k + 1), 3):
                if not c3 > c2 > c1:
                    continue
                for x, y in _composable_pairs(g, c3, c2):
                    for z in g.in_edges(g.edges[y].source, c1):
                        word = (x, y, z.id)
                        left = g.normal_form(word, pick=lambda inv: inv[0])
                        right = g.normal_form(word, pick=lambda inv: inv[-1])
                        if left != right:
                            cube_wit = {"word": list(word), "orders": [list(left), list(right)]}
                            break
                    if cube_wit:
                        break
                if cube_wit:
                    break
            rep.checks["cube"] = CheckResult(cube_wit is None, cube_wit)

    for v in g.vertices:
        for c in range(1, k + 1):
            if not g.in_edges(v, c):
                rep.no_sources = False
                rep.no_sources_witness = {"vertex": v, "color": c}
                break
        if not rep.no_sources:
            break

    idx = {v: i for i, v in enumerate(g.vertices)}
    es = [e for e in g.edges.values() if e.range in idx and e.source in idx]
    nv = len(g.vertices)
    if nv:
        adj = coo_matrix((np.ones(len(es)), ([idx[e.source] for e in es], [idx[e.range] for e in es])),
                         shape=(nv, nv))
        n_scc = int(connected_components(adj, directed=True, connection="strong")[0])
        n_wcc = int(connected_components(adj, directed=True, connection="weak")[0])
    else:
        n_scc = n_wcc = 0
    rep.stats = {
        "rank": k,
        "vertices": nv,
        "edges_per_color": [sum(1 for e in g.edges.values() if e.color == c) for c in range(1, k + 1)],
        "squares": len(g.squares),
        "strong_components": n_scc,
        "weak_components": n_wcc,
    }
    return rep


# module-level aliases mirroring the method names
def compose(graph: KGraph, mu: Path, nu: Path) -> Path:
    return graph.compose(mu, nu)


def factorize(graph: KGraph, p: Path, m: Sequence[int]) -> tuple[Path, Path]:
    return graph.factorize(p, m)


def enumerate_paths(graph: KGraph, v: str, n: Sequence[int]) -> list[Path]:
    return graph.enumerate_paths(v, n)


def vertex_at(graph: KGraph, p: Path, n: Sequence[int]) -> str:
    return graph.vertex_at(p, n)
