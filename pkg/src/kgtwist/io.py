"""JSON loading and dumping for graphs, cocycles and families of path sets."""
from __future__ import annotations

import json
import os
from typing import Any

from .errors import KGraphError, SpecFormatError
from .skeleton import Edge, KGraph, Path, Square, sort_paths
from .twist import CategoricalCocycle, TwoCocycleZk, parse_angle


def _read(source) -> Any:
    if isinstance(source, (dict, list)):
        return source
    try:
        with open(os.fspath(source), encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecFormatError(f"{source}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _field(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise SpecFormatError(f"{where}: expected an object")
    if key not in obj:
        raise SpecFormatError(f"{where}: missing field {key!r}")
    return obj[key]


def graph_from_json(data: dict) -> KGraph:
    rank = _field(data, "rank", "graph")
    if not isinstance(rank, int) or rank < 1:
        raise SpecFormatError("graph.rank: expected a positive integer")
    vertices = _field(data, "vertices", "graph")
    if not isinstance(vertices, list):
        raise SpecFormatError("graph.vertices: expected a list")
    edges = []
    for i, e in enumerate(_field(data, "edges", "graph")):
        where = f"graph.edges[{i}]"
        color = _field(e, "color", where)
        if not isinstance(color, int):
            raise SpecFormatError(f"{where}.color: expected an integer")
        edges.append(Edge(str(_field(e, "id", where)), color,
                          str(_field(e, "range", where)), str(_field(e, "source", where))))
    squares = []
    for i, s in enumerate(data.get("squares", [])):
        where = f"graph.squares[{i}]"
        squares.append(Square(*(str(_field(s, k, where)) for k in ("gi", "fj", "fj2", "gi2"))))
    return KGraph(rank, [str(v) for v in vertices], edges, squares)


def graph_to_json(g: KGraph) -> dict:
    return {
        "rank": g.rank,
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "color": e.color, "range": e.range, "source": e.source} for e in g.edge_list],
        "squares": [{"gi": s.gi, "fj": s.fj, "fj2": s.fj2, "gi2": s.gi2} for s in g.squares],
    }


def load_graph(source) -> KGraph:
    return graph_from_json(_read(source))


def save_graph(g: KGraph, target) -> None:
    with open(target, "w", encoding="utf-8") as fh:
        json.dump(graph_to_json(g), fh, indent=2)
        fh.write("\n")


def cocycle_from_json(data: dict, graph: KGraph) -> CategoricalCocycle:
    kind = data.get("type", "bicharacter") if isinstance(data, dict) else None
    if kind != "bicharacter":
        raise SpecFormatError(f"cocycle.type: unsupported {kind!r}")
    theta = _field(data, "theta", "cocycle")
    try:
        base = TwoCocycleZk(tuple(tuple(row) for row in theta))
    except (TypeError, ValueError, ZeroDivisionError, KGraphError) as exc:
        raise SpecFormatError(f"cocycle.theta: {exc}") from exc
    if base.k != graph.rank:
        raise SpecFormatError(f"cocycle.theta: {base.k}x{base.k} matrix for a rank-{graph.rank} graph")
    weights = data.get("edge_weights") or {}
    try:
        return CategoricalCocycle(graph, base, {e: parse_angle(a) for e, a in weights.items()})
    except (TypeError, ValueError) as exc:
        raise SpecFormatError(f"cocycle.edge_weights: {exc}") from exc


def load_cocycle(source, graph: KGraph) -> CategoricalCocycle:
    return cocycle_from_json(_read(source), graph)


def trivial_cocycle(graph: KGraph) -> CategoricalCocycle:
    k = graph.rank
    return CategoricalCocycle(graph, TwoCocycleZk(tuple((0,) * k for _ in range(k))))


def path_from_json(graph: KGraph, word, vertex: str | None = None) -> Path:
    """A path from an edge-id list (any order of a valid word) or a vertex id."""
    if isinstance(word, str):
        if word in graph.vertices:
            return graph.vertex(word)
        word = word.split(".")
    if not word:
        if vertex is None:
            raise SpecFormatError("empty path needs a vertex")
        return graph.vertex(vertex)
    try:
        return graph.path([str(e) for e in word])
    except KeyError as exc:
        raise SpecFormatError(f"path {list(word)}: {exc.args[0]}") from None


def path_to_json(p: Path):
    return list(p.word) if p.word else p.range


def ee_from_json(data: list, graph: KGraph) -> list[frozenset[Path]]:
    if not isinstance(data, list):
        raise SpecFormatError("family: expected a list")
    out = []
    for i, item in enumerate(data):
        where = f"family[{i}]"
        v = str(_field(item, "vertex", where))
        try:
            paths = frozenset(path_from_json(graph, w, v) for w in _field(item, "paths", where))
        except KGraphError as exc:
            if isinstance(exc, SpecFormatError):
                raise
            raise SpecFormatError(f"{where}: {exc}") from exc
        if any(p.range != v for p in paths):
            raise SpecFormatError(f"{where}: path with range other than {v!r}")
        out.append(paths)
    return out


def ee_to_json(family) -> list[dict]:
    return [{"vertex": next(iter(E)).range, "paths": [path_to_json(p) for p in sort_paths(E)]}
            for E in family]


def load_ee(source, graph: KGraph) -> list[frozenset[Path]]:
    return ee_from_json(_read(source), graph)
