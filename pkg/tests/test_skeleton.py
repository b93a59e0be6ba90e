from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from kgtwist import catalog
from kgtwist.errors import DegreeOutOfRange, InvalidGraph, NotComposable
from kgtwist.skeleton import Edge, KGraph, Square, degrees_upto, validate

from oracles import word_classes


GRAPHS = {
    "torus": catalog.single_vertex_torus(),
    "torus3": catalog.single_vertex_torus(3),
    "two_loops": catalog.two_loops(),
    "cycle3": catalog.cycle_graph(),
    "two_vertex_torus": catalog.two_vertex_torus(),
    "flip22": catalog.flip_graph(2, 2, seed=3),
    "flip23": catalog.flip_graph(2, 3, seed=11),
    "product": catalog.product_graph(catalog.two_loops(), catalog.cycle_graph(2)),
}


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_catalog_graphs_validate(name):
    assert validate(GRAPHS[name]).ok


@pytest.mark.parametrize("name", ["two_vertex_torus", "flip22", "flip23", "product"])
def test_paths_match_word_classes(name):
    g = GRAPHS[name]
    for v in g.vertices:
        for n in degrees_upto((2, 2)):
            classes = word_classes(g, v, n)
            paths = g.enumerate_paths(v, n)
            assert len(classes) == len(paths)
            for cls in classes:
                forms = {g.normal_form(w) for w in cls}
                assert len(forms) == 1
                assert forms.pop() in {p.word for p in paths}


def test_missing_square_is_reported():
    g = catalog.two_vertex_torus()
    broken = KGraph(2, g.vertices, g.edge_list, g.squares[:1])
    rep = validate(broken)
    assert not rep.ok
    w = rep.checks["square_bijection"].witness
    assert w["times_as_first"] == 0
    with pytest.raises(InvalidGraph):
        broken.require_valid()


def test_duplicate_square_is_reported():
    g = catalog.flip_graph(2, 2, seed=0)
    sq = list(g.squares)
    sq[1] = Square(sq[1].gi, sq[1].fj, sq[0].fj2, sq[0].gi2)
    assert not validate(KGraph(2, g.vertices, g.edge_list, sq)).checks["square_bijection"].passed


def test_bad_references():
    g = KGraph(1, ["v"], [Edge("e", 1, "v", "nowhere"), Edge("e", 2, "v", "v")])
    rep = validate(g)
    assert not rep.checks["references"].passed


def _three_colour_flip(seed: int) -> KGraph:
    rng = random.Random(seed)
    names = {1: ["a0", "a1"], 2: ["b0", "b1"], 3: ["c0", "c1"]}
    edges = [Edge(x, c, "v", "v") for c, xs in names.items() for x in xs]
    squares = []
    for c1, c2 in [(1, 2), (1, 3), (2, 3)]:
        targets = list(itertools.product(names[c2], names[c1]))
        rng.shuffle(targets)
        for (x, y), (y2, x2) in zip(itertools.product(names[c1], names[c2]), targets):
            squares.append(Square(x, y, y2, x2))
    return KGraph(3, ["v"], edges, squares)


def test_cube_condition_detects_failure():
    results = [validate(_three_colour_flip(s)) for s in range(40)]
    failing = [r for r in results if not r.ok]
    assert failing, "expected some random 3-colour square tables to violate the cube condition"
    assert all(set(r.failures()) == {"cube"} for r in failing)
    assert any(r.ok for r in results) or validate(catalog.single_vertex_torus(3)).ok


def test_no_sources_flag():
    g = KGraph(1, ["u", "w"], [Edge("e", 1, "u", "w")])
    rep = validate(g)
    assert rep.ok and not rep.no_sources
    assert rep.no_sources_witness["vertex"] == "w"
    assert validate(catalog.loop_with_tail()).no_sources


def test_path_errors(g1):
    g3 = catalog.cycle_graph()
    with pytest.raises(NotComposable):
        g3.path(["e0", "e2"])
    with pytest.raises(DegreeOutOfRange):
        g1.factorize(g1.path(["a"]), (0, 1))


def test_path_accepts_any_valid_order():
    g = GRAPHS["flip22"]
    p = g.path(["b0", "r1"])
    q = g.path(list(p.word))
    assert p == q and p.degree == (1, 1)


def random_interleaving(g: KGraph, word, rng: random.Random) -> list[int]:
    """Target ranks for a random colour order that keeps each colour's edges in sequence."""
    cols = [g.color(e) for e in word]
    target = cols[:]
    rng.shuffle(target)
    slots = {c: [i for i, t in enumerate(target) if t == c] for c in set(cols)}
    seen = {c: 0 for c in slots}
    ranks = []
    for c in cols:
        ranks.append(slots[c][seen[c]])
        seen[c] += 1
    return ranks


@st.composite
def graph_and_path(draw, bound=(2, 2)):
    name = draw(st.sampled_from(["torus", "two_vertex_torus", "flip22", "flip23", "product"]))
    g = GRAPHS[name]
    paths = g.paths_upto(bound)
    return g, draw(st.sampled_from(paths))


@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_factorize_compose_round_trip(data):
    g, p = data.draw(graph_and_path())
    m = tuple(data.draw(st.integers(0, a)) for a in p.degree)
    head, tail = g.factorize(p, m)
    assert head.degree == m
    assert g.compose(head, tail) == p
    assert g.factorize(g.compose(head, tail), m) == (head, tail)


@settings(max_examples=200, deadline=None)
@given(data=st.data(), seed=st.integers(0, 10**6))
def test_rewrite_order_confluence(data, seed):
    g, p = data.draw(graph_and_path((3, 3)))
    rng = random.Random(seed)
    scrambled = g.reorder(p.word, random_interleaving(g, p.word, rng))
    assert g.path(scrambled, p.range) == p
    assert g.normal_form(scrambled, pick=rng.choice) == p.word


def test_segment_pieces_recompose(g1):
    g = GRAPHS["flip23"]
    for p in g.enumerate_paths("v", (2, 2)):
        a = g.segment(p, (0, 0), (1, 0))
        b = g.segment(p, (1, 0), (2, 1))
        c = g.segment(p, (2, 1), (2, 2))
        assert g.compose(g.compose(a, b), c) == p


def test_reachable_sources():
    g = catalog.loop_with_tail()
    assert g.reachable_sources("v") == {"v", "w"}
    assert g.reachable_sources("w") == {"w"}


def test_stats_components():
    rep = validate(catalog.disjoint_loops())
    assert rep.stats["weak_components"] == 2
    assert rep.stats["strong_components"] == 2
