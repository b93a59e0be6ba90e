from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from kgtwist import catalog
from kgtwist.align import mce
from kgtwist.boundary import periodic_ultrafilters
from kgtwist.errors import SourceMismatch, UnsupportedGraphClass, VertexNotInHPer
from kgtwist.periodicity import (SimVerdict, find_generalized_cycle_with_entrance, is_aperiodic,
                                 is_cofinal, per_group, pq, sim_check, ultrafilter_disagreement,
                                 verify_not_cofinal)
from kgtwist.skeleton import Edge, KGraph, sub
from kgtwist.twist import ZkSubgroup

GRAPHS = {
    "torus": catalog.single_vertex_torus(),
    "two_loops": catalog.two_loops(),
    "cycle3": catalog.cycle_graph(),
    "disjoint_loops": catalog.disjoint_loops(),
    "two_vertex_torus": catalog.two_vertex_torus(),
    "loop_with_tail": catalog.loop_with_tail(),
    "flip": catalog.flip_graph(2, 2, seed=3),
    "product": catalog.product_graph(catalog.two_loops(), catalog.cycle_graph(2)),
}


def oracle_per(g, D, cycle_bound):
    """Per from pairs whose shifted ultrafilters all agree (cycle degree <= cycle_bound)."""
    gens = []
    paths = g.paths_upto((D,) * g.rank)
    for mu, nu in itertools.combinations(paths, 2):
        if mu.source != nu.source or mu.range != nu.range:
            continue
        if ultrafilter_disagreement(g, mu, nu, cycle_bound) is None:
            gens.append(sub(mu.degree, nu.degree))
    return ZkSubgroup(g.rank, gens)


@pytest.mark.parametrize("name,expected", [
    ("torus", [(1, 0), (0, 1)]),
    ("two_loops", []),
    ("cycle3", [(3,)]),
    ("disjoint_loops", [(1,)]),
    ("two_vertex_torus", [(1, 1), (2, 0)]),
    ("flip", []),
    ("product", [(0, 2)]),
])
def test_per_group_matches_oracle(name, expected):
    g = GRAPHS[name]
    D = 4 if g.rank == 1 else 2
    pdata = per_group(g, D)
    assert not pdata.unresolved
    assert pdata.per == ZkSubgroup(g.rank, expected)
    assert pdata.per == oracle_per(g, D, 3 if g.rank == 1 else 2)


@st.composite
def pair(draw):
    g = GRAPHS[draw(st.sampled_from(["torus", "two_loops", "cycle3", "two_vertex_torus", "flip", "product"]))]
    paths = g.paths_upto((2,) * g.rank if g.rank == 1 else (1, 1))
    mu = draw(st.sampled_from(paths))
    nu = draw(st.sampled_from([p for p in paths if p.source == mu.source]))
    return g, mu, nu


@settings(max_examples=150, deadline=None)
@given(pair())
def test_sim_check_agrees_with_oracle_and_witnesses(gmn):
    g, mu, nu = gmn
    res = sim_check(g, mu, nu, D=3, cross_validate=False)
    assert res.verdict in (SimVerdict.SIM, SimVerdict.NOT_SIM)
    oracle = ultrafilter_disagreement(g, mu, nu, 3) is None
    assert res.related == oracle
    if res.verdict is SimVerdict.NOT_SIM:
        tau = res.witness
        assert tau.range == mu.source
        assert not mce(g, g.compose(mu, tau), g.compose(nu, tau))


def test_sim_examples(g1, g2, g3):
    a, b = g1.path(["a"]), g1.path(["b"])
    assert sim_check(g1, a, b).verdict is SimVerdict.SIM
    e, f = g2.path(["e"]), g2.path(["f"])
    assert sim_check(g2, e, f).verdict is SimVerdict.NOT_SIM
    assert sim_check(g3, g3.vertex("v0"), g3.path(["e0", "e1", "e2"])).related
    with pytest.raises(SourceMismatch):
        sim_check(g3, g3.path(["e0"]), g3.vertex("v0"))


def test_pq():
    assert pq((1, -1)) == ((1, 0), (0, 1))
    assert pq((2, 0)) == ((2, 0), (0, 0))
    assert pq((1, -1), context=(2, 1)) == ((2, 1), (1, 2))


def test_theta_table(g1):
    pdata = per_group(g1, 3)
    a, b = g1.path(["a"]), g1.path(["b"])
    assert pdata.theta_table((1, 0), (0, 1)) == {a: b}
    tw = GRAPHS["two_vertex_torus"]
    pd2 = per_group(tw, 3)
    table = pd2.theta_table((2, 0), (1, 1))
    assert len(table) == 2 and len(set(table.values())) == 2
    for lam, mu in table.items():
        assert sim_check(tw, lam, mu).related


def test_h_per_and_missing_vertex():
    g = GRAPHS["loop_with_tail"]
    pdata = per_group(g, 4)
    assert pdata.per == ZkSubgroup(1, [(1,)])
    assert pdata.h_per == {"w"}
    with pytest.raises(VertexNotInHPer):
        pdata.theta(g.path(["t"]), (0,))


def test_aperiodicity():
    res = is_aperiodic(GRAPHS["two_loops"], 3)
    assert res.status == "Aperiodic"
    g = GRAPHS["two_loops"]
    for mu, nu, tau in res.not_sim:
        assert not mce(g, g.compose(mu, tau), g.compose(nu, tau))
    assert is_aperiodic(GRAPHS["torus"], 2).status == "Periodic"
    assert is_aperiodic(GRAPHS["flip"], 2).status == "Aperiodic"


def oracle_cofinal(g, bound=3):
    for v in g.vertices:
        R = g.reachable_sources(v)
        for w in g.vertices:
            for S in periodic_ultrafilters(g, w, (bound,) * g.rank):
                if not (S.vertices(g) & R):
                    return False
    return True


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_cofinality_matches_oracle(name):
    g = GRAPHS[name]
    res = is_cofinal(g)
    assert res.cofinal == oracle_cofinal(g, 3 if g.rank == 1 else 2)
    if not res.cofinal:
        assert verify_not_cofinal(g, res.vertex, res.witness)


def test_disjoint_loops_not_cofinal(g4):
    res = is_cofinal(g4)
    assert res.status == "NotCofinal" and res.vertex == "u"
    assert res.witness.vertices(g4) == {"w"}


def test_cofinality_needs_no_sources():
    g = KGraph(1, ["u", "w"], [Edge("e", 1, "u", "w")])
    with pytest.raises(UnsupportedGraphClass):
        is_cofinal(g)


def test_generalized_cycle(g2, g1):
    gc = find_generalized_cycle_with_entrance(g2, 1)
    assert gc is not None
    for tau in g2.paths_upto((1,), gc.mu.source):
        assert mce(g2, g2.compose(gc.mu, tau), gc.nu)
    assert not mce(g2, gc.mu, g2.compose(gc.nu, gc.entrance))
    assert find_generalized_cycle_with_entrance(g1, 1) is None
