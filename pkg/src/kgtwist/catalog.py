"""Small named k-graphs used in the demos and tests."""
from __future__ import annotations

import itertools
import random
import string

from .skeleton import Edge, KGraph, Square


def single_vertex_torus(k: int = 2) -> KGraph:
    """One vertex, one loop per colour, all squares trivial.

    For k = 2 the loops are ``a`` (colour 1) and ``b`` (colour 2); twisted
    algebras over this graph are the rotation algebras.
    """
    names = list(string.ascii_lowercase[:k]) if k <= 26 else [f"x{i}" for i in range(1, k + 1)]
    edges = [Edge(n, i + 1, "v", "v") for i, n in enumerate(names)]
    squares = [Square(names[i], names[j], names[j], names[i])
               for i in range(k) for j in range(i + 1, k)]
    return KGraph(k, ["v"], edges, squares)


def two_loops() -> KGraph:
    """The 1-graph with one vertex ``v`` and loops ``e``, ``f`` (Cuntz algebra O_2)."""
    return KGraph(1, ["v"], [Edge("e", 1, "v", "v"), Edge("f", 1, "v", "v")])


def cycle_graph(n: int = 3) -> KGraph:
    """Directed n-cycle: edge ``e{i}`` has range ``v{i}`` and source ``v{i+1}``."""
    verts = [f"v{i}" for i in range(n)]
    edges = [Edge(f"e{i}", 1, f"v{i}", f"v{(i + 1) % n}") for i in range(n)]
    return KGraph(1, verts, edges)


def disjoint_loops() -> KGraph:
    """Two vertices ``u``, ``w`` each carrying one loop; no edges between them."""
    return KGraph(1, ["u", "w"], [Edge("eu", 1, "u", "u"), Edge("ew", 1, "w", "w")])


def two_vertex_torus() -> KGraph:
    """2-graph on ``x``, ``y`` where every edge swaps the two vertices."""
    edges = [Edge("a1", 1, "x", "y"), Edge("a2", 1, "y", "x"),
             Edge("b1", 2, "x", "y"), Edge("b2", 2, "y", "x")]
    squares = [Square("a1", "b2", "b1", "a2"), Square("a2", "b1", "b2", "a1")]
    return KGraph(2, ["x", "y"], edges, squares)


def loop_with_tail() -> KGraph:
    """``v`` receives one edge ``t`` from ``w``; ``w`` carries a loop ``l``."""
    return KGraph(1, ["v", "w"], [Edge("t", 1, "v", "w"), Edge("l", 1, "w", "w")])


def flip_graph(n_blue: int, n_red: int, seed: int = 0) -> KGraph:
    """Single-vertex 2-graph with a random square bijection.

    Blue loops ``b0..``, red loops ``r0..``; every bijection between
    blue-red and red-blue pairs gives a valid 2-graph.
    """
    rng = random.Random(seed)
    blue = [f"b{i}" for i in range(n_blue)]
    red = [f"r{i}" for i in range(n_red)]
    edges = [Edge(x, 1, "v", "v") for x in blue] + [Edge(y, 2, "v", "v") for y in red]
    targets = list(itertools.product(red, blue))
    rng.shuffle(targets)
    squares = [Square(x, y, y2, x2) for (x, y), (y2, x2) in zip(itertools.product(blue, red), targets)]
    return KGraph(2, ["v"], edges, squares)


def product_graph(g1: KGraph, g2: KGraph) -> KGraph:
    """Cartesian product of two 1-graphs as a 2-graph with commuting squares."""
    verts = [f"{u}|{w}" for u in g1.vertices for w in g2.vertices]
    edges = [Edge(f"{e.id}|{w}", 1, f"{e.range}|{w}", f"{e.source}|{w}")
             for e in g1.edge_list for w in g2.vertices]
    edges += [Edge(f"{u}|{f.id}", 2, f"{u}|{f.range}", f"{u}|{f.source}")
              for u in g1.vertices for f in g2.edge_list]
    squares = [Square(f"{e.id}|{f.range}", f"{e.source}|{f.id}", f"{e.range}|{f.id}", f"{e.id}|{f.source}")
               for e in g1.edge_list for f in g2.edge_list]
    return KGraph(2, verts, edges, squares)


def by_name(name: str) -> KGraph:
    table = {
        "torus": single_vertex_torus,
        "torus3": lambda: single_vertex_torus(3),
        "two_loops": two_loops,
        "cycle3": cycle_graph,
        "disjoint_loops": disjoint_loops,
        "two_vertex_torus": two_vertex_torus,
        "loop_with_tail": loop_with_tail,
    }
    return table[name]()
