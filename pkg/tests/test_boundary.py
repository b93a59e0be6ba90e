from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from kgtwist import catalog
from kgtwist.align import ext, is_exhaustive
from kgtwist.boundary import (BoundedFilter, Membership, cycles, delta_vanishes, is_compatible,
                              is_in_satiation, periodic_ultrafilters, satiate)
from kgtwist.errors import ContainsVertex, NotExhaustive, OutOfUniverse, RangeMismatch
from kgtwist.skeleton import leq, scale

from oracles import extends

GRAPHS = {
    "torus": catalog.single_vertex_torus(),
    "two_loops": catalog.two_loops(),
    "cycle3": catalog.cycle_graph(),
    "two_vertex_torus": catalog.two_vertex_torus(),
    "flip": catalog.flip_graph(2, 2, seed=3),
}


def filter_members_brute(g, S, bound):
    """Members of degree <= bound, as prefixes of prefix cycle^J for large J."""
    long = S.prefix
    if S.cycle is not None:
        while not leq(bound, long.degree):
            long = g.compose(long, S.cycle)
    return {lam for lam in g.paths_upto(bound, S.range) if leq(lam.degree, long.degree) and extends(g, lam, long)}


@st.composite
def periodic(draw, names=("torus", "two_loops", "cycle3", "two_vertex_torus", "flip")):
    g = GRAPHS[draw(st.sampled_from(list(names)))]
    k = g.rank
    kappa = draw(st.sampled_from(cycles(g, (3,) * k)))
    pre = [p for p in g.paths_upto((1,) * k) if p.source == kappa.range]
    return g, BoundedFilter(draw(st.sampled_from(pre)), kappa)


@settings(max_examples=40, deadline=None)
@given(periodic(names=("torus", "two_loops", "cycle3", "two_vertex_torus")))
def test_filter_members_match_brute_force(gs):
    g, S = gs
    bound = (2,) * g.rank
    assert set(S.members(g, bound)) == filter_members_brute(g, S, bound)


@settings(max_examples=40, deadline=None)
@given(periodic())
def test_shift_and_vertices(gs):
    g, S = gs
    k = g.rank
    for mu in g.paths_upto((1,) * k):
        if mu.source != S.range:
            continue
        T = S.shift(g, mu)
        for lam in S.members(g, (2,) * k):
            assert T.contains(g, g.compose(mu, lam))
    brute = {lam.source for lam in S.members(g, (6,) * k)}
    assert S.vertices(g) == brute


@settings(max_examples=60, deadline=None)
@given(periodic(), periodic())
def test_same_as_agrees_with_long_prefixes(a, b):
    (g, S), (h, T) = a, b
    if g is not h or S.range != T.range:
        return
    deep = S.agrees_with(g, T, (8,) * g.rank)
    assert S.same_as(g, T) == deep


def test_shift_range_mismatch():
    g = GRAPHS["cycle3"]
    S = BoundedFilter(g.vertex("v0"), g.path(["e0", "e1", "e2"]))
    with pytest.raises(RangeMismatch):
        S.shift(g, g.path(["e0"]))


def test_degenerate_cycle_becomes_principal(g1):
    S = BoundedFilter(g1.path(["a"]), g1.vertex("v"))
    assert S.kind == "principal"


def test_periodic_ultrafilters_are_distinct():
    g = GRAPHS["two_loops"]
    found = periodic_ultrafilters(g, "v", (3,))
    for S, T in itertools.combinations(found, 2):
        assert not S.same_as(g, T)
    # cycles of length <= 3 over {e, f}: e, f, ef, fe, and 6 primitive words of length 3 up to rotation
    heads = {S.head(g, (12,)) for S in found}
    assert len(heads) == len(found)


# -- satiation --------------------------------------------------------------

def _check_rules(g, sat):
    """Verify closure of the family under the rules directly (bounded to D)."""
    D = sat.D
    fam = sat.family
    for F in fam:
        v = next(iter(F)).range
        assert is_exhaustive(g, F)
        for lam in g.paths_upto(D, v):
            if not lam.is_vertex and lam not in F:
                assert F | {lam} in fam
            if not any(g.is_prefix(mu, lam) for mu in F):
                G = ext(g, lam, F)
                if G:
                    assert frozenset(G) in fam
        for lam, x in itertools.permutations(F, 2):
            if g.is_prefix(lam, x):
                assert F - {x} in fam


def test_two_loops_satiation(g2):
    e, f = g2.path(["e"]), g2.path(["f"])
    ee, ef = g2.path(["e", "e"]), g2.path(["e", "f"])
    sat = satiate(g2, [{e, f}], (2,))
    assert frozenset({e, f}) in sat
    assert frozenset({ee, ef, f}) in sat
    assert frozenset({e, ef, f}) in sat
    assert frozenset({e}) not in sat
    assert len(sat) == 25
    assert satiate(g2, sat.family, (2,)) == sat
    _check_rules(g2, sat)
    minimal = sat.minimal_sets()
    assert frozenset({e, f}) in minimal
    assert frozenset({e, g2.path(["f", "e"]), g2.path(["f", "f"])}) in minimal
    for F in minimal:
        assert not any(G < F for G in sat.family)


def test_torus_satiation_includes_extensions(g1):
    sat = satiate(g1, [{g1.path(["a"])}], (1, 1))
    assert frozenset({g1.path(["a"]), g1.path(["b"])}) in sat
    assert frozenset({g1.path(["b"])}) not in sat
    _check_rules(g1, sat)


def test_membership(g2):
    e, f = g2.path(["e"]), g2.path(["f"])
    assert is_in_satiation(g2, {e, f, g2.path(["e", "e"])}, [{e, f}], (2,)) is Membership.YES
    assert is_in_satiation(g2, {e}, [{e, f}], (2,)) is Membership.NO
    with pytest.raises(ContainsVertex):
        is_in_satiation(g2, {g2.vertex("v")}, [], (2,))
    with pytest.raises(OutOfUniverse):
        is_in_satiation(g2, {g2.path(["e", "e", "e"])}, [], (2,))


def test_family_errors(g2):
    e = g2.path(["e"])
    with pytest.raises(NotExhaustive):
        satiate(g2, [{e}], (2,))
    with pytest.raises(ContainsVertex):
        satiate(g2, [{g2.vertex("v")}], (2,))
    with pytest.raises(OutOfUniverse):
        satiate(g2, [{g2.path(["e", "e", "e"]), g2.path(["f"])}], (2,))


def test_compatibility(g2):
    e, f = g2.path(["e"]), g2.path(["f"])
    sat = satiate(g2, [{e, f}], (2,))
    S = BoundedFilter(g2.vertex("v"), f)
    assert is_compatible(g2, S, sat)
    # a principal filter stops and so cannot meet the sets beyond its end
    assert not is_compatible(g2, BoundedFilter(e), sat)
    assert is_compatible(g2, BoundedFilter(e), satiate(g2, [], (2,)))


def test_delta_nonzero_with_certificate(g2):
    e, f = g2.path(["e"]), g2.path(["f"])
    v = delta_vanishes(g2, [e], [], (2,))
    assert v.status == "Nonzero"
    assert v.certificate.is_ultrafilter
    assert not v.certificate.contains(g2, e)
    lo, hi = v.norms
    assert abs(lo - 1) <= 1e-12 and abs(hi - 1) <= 1e-12


def test_delta_zero_cases(g2):
    e, f = g2.path(["e"]), g2.path(["f"])
    assert delta_vanishes(g2, [e, f], [{e, f}], (2,)).status == "Zero"
    assert delta_vanishes(g2, [g2.vertex("v")], [], (2,)).reason == "contains_vertex"
    # once {e, f} is in the family every filter must pass through e or f
    assert delta_vanishes(g2, [e, g2.path(["f", "e"]), g2.path(["f", "f"])], [{e, f}], (2,)).status == "Zero"


def test_delta_on_torus_family(g1):
    a, b = g1.path(["a"]), g1.path(["b"])
    assert delta_vanishes(g1, [a], [{a}], (1, 1)).status == "Zero"
    assert delta_vanishes(g1, [a, b], [{a}], (1, 1)).status == "Zero"
    # making t_a unitary says nothing about t_b: the filter a^infty avoids b
    res = delta_vanishes(g1, [b], [{a}], (1, 1))
    assert res.status == "Nonzero"
    assert res.certificate.cycle == a and not res.certificate.is_ultrafilter
    assert res.norms == (1.0, 1.0)
    assert delta_vanishes(g1, [a], [], (1, 1)).status == "Nonzero"
