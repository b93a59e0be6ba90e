"""Acceptance criteria 1-13.  Each test records a pass/fail line that is
printed in the terminal summary; criterion 13 is reported only."""
from __future__ import annotations

import itertools
import random
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from kgtwist import catalog
from kgtwist.align import mce
from kgtwist.boundary import delta_vanishes, satiate
from kgtwist.cyclo import Cyclotomic
from kgtwist.ideals import ck_generators, list_gauge_invariant_ideals
from kgtwist.pathrep import (CompatibleSubspace, TruncatedRep, check_tck, compressed_norm, represent,
                             restrict_to_filter_target)
from kgtwist.periodicity import SimRelation, is_cofinal, per_group, verify_not_cofinal
from kgtwist.simplicity import check_vm_commutation, decide
from kgtwist.skeleton import KGraph, validate
from kgtwist.spanalg import SpanElement, ThetaBlock, proj, tilde_expectation
from kgtwist.twist import (CategoricalCocycle, NondegeneracyStatus, TwoCocycleZk, ZkSubgroup,
                           is_nondegenerate_on, phase)

from conftest import ACCEPTANCE, GOLDEN
from oracles import word_classes
from test_ideals import brute_saturated_hereditary
from test_periodicity import oracle_per

G1, G2, G3, G4 = (catalog.single_vertex_torus(), catalog.two_loops(), catalog.cycle_graph(),
                  catalog.disjoint_loops())
ANGLES = [Fraction(0), Fraction(1, 3), GOLDEN]


@contextmanager
def criterion(n: int, label: str):
    notes: dict = {}
    try:
        yield notes
    except BaseException:
        ACCEPTANCE[n] = ("FAIL", label)
        raise
    detail = ", ".join(f"{k}={v}" for k, v in notes.items())
    ACCEPTANCE[n] = ("PASS", f"{label} [{detail}]" if detail else label)


def twist(g: KGraph, angle) -> CategoricalCocycle:
    """The angle sits in theta[0][1] for rank 2 and in theta[0][0] for rank 1."""
    k = g.rank
    t = [[Fraction(0)] * k for _ in range(k)]
    t[0][min(1, k - 1)] = angle
    return CategoricalCocycle(g, TwoCocycleZk(tuple(map(tuple, t))))


def test_1_presentation_validity():
    with criterion(1, "presentation validity") as notes:
        for g in (G1, G2, G3, G4, catalog.single_vertex_torus(3)):
            assert validate(g).ok
        g = catalog.two_vertex_torus()
        mutated = KGraph(2, g.vertices, g.edge_list, [g.squares[0], g.squares[0]])
        rep = validate(mutated)
        assert not rep.ok
        witness = rep.checks["square_bijection"].witness
        assert witness is not None
        notes["witness"] = witness


def test_2_normal_form_round_trip():
    with criterion(2, "normal form / factorization round trip") as notes:
        checked = 0
        for g, bound in ((G1, (2, 2)), (G2, (4,)), (G3, (4,))):
            for p in g.paths_upto(bound):
                for m in itertools.product(*(range(a + 1) for a in p.degree)):
                    head, tail = g.factorize(p, m)
                    assert g.compose(head, tail) == p
                    checked += 1
        rng = random.Random(0)
        extra = [catalog.two_vertex_torus(), catalog.flip_graph(2, 3, seed=11)]
        for trial in range(1000):
            g = [G1, G2, G3, *extra][trial % 5]
            bound = (2,) * g.rank if g.rank == 2 else (4,)
            p = rng.choice(g.paths_upto(bound))
            words = [w for cls in word_classes(g, p.range, p.degree) if p.word in cls for w in cls] or [()]
            w = rng.choice(words)
            assert (g.normal_form(w, pick=rng.choice) if w else ()) == p.word
        notes["factorizations"] = checked
        notes["rewrite_trials"] = 1000


def _random_span(c, rng, n_terms=3):
    g = c.graph
    paths = g.paths_upto((1,) * g.rank)
    terms = {}
    for _ in range(n_terms):
        mu = paths[rng.integers(len(paths))]
        same = [p for p in paths if p.source == mu.source]
        nu = same[rng.integers(len(same))]
        terms[(mu, nu)] = complex(rng.standard_normal(), rng.standard_normal())
    return SpanElement(c, terms)


def test_3_toeplitz_product_law():
    with criterion(3, "represent(multiply) equals matrix product") as notes:
        worst = 0.0
        rng = np.random.default_rng(0)
        for g, N, margin in ((G1, (4, 4), (2, 2)), (G2, (4,), (2,)), (G3, (6,), (2,))):
            for angle in ANGLES:
                c = twist(g, angle)
                rep = TruncatedRep(c, N)
                sub = CompatibleSubspace(rep, margin)
                for _ in range(200):
                    x, y = _random_span(c, rng), _random_span(c, rng)
                    d = sub.deviation(represent(x * y, rep), represent(x, rep) @ represent(y, rep))
                    worst = max(worst, d)
        assert worst <= 1e-10
        notes["max_deviation"] = f"{worst:.2e}"


def test_4_tck_suite():
    with criterion(4, "TCK relations on compatible subspaces") as notes:
        worst = 0.0
        for g, N, margin in ((G1, (3, 3), (2, 2)), (G2, (4,), (2,)), (G3, (6,), (3,))):
            for angle in ANGLES:
                r = check_tck(TruncatedRep(twist(g, angle), N), margin)
                worst = max(worst, r.max_deviation)
        assert worst <= 1e-12
        notes["max_deviation"] = f"{worst:.2e}"


def test_5_matrix_units():
    with criterion(5, "matrix units of {a, b, ab}") as notes:
        a, b, ab = G1.path(["a"]), G1.path(["b"]), G1.path(["a", "b"])
        E = [a, b, ab]
        exact = ThetaBlock(twist(G1, Fraction(1, 3)), E)
        assert exact.check() == {"adjoint": 0.0, "product": 0.0, "expansion": 0.0}
        c = exact.cocycle
        assert proj(c, a) == exact.unit(a, a) + exact.unit(ab, ab)
        num = ThetaBlock(twist(G1, GOLDEN), E)
        dev = max(num.check(tol=1e-10).values())
        rep = TruncatedRep(num.cocycle, (4, 4))
        sub = CompatibleSubspace(rep, (2, 2))
        mats = {k: represent(u, rep) for k, u in num.units.items()}
        for (k1, A), (k2, B) in itertools.product(mats.items(), repeat=2):
            target = mats.get((k1[0], k2[1])) if k1[1] == k2[0] else rep.zero()
            dev = max(dev, sub.deviation(A @ B, target if target is not None else rep.zero()))
        assert dev <= 1e-10
        notes["numeric_deviation"] = f"{dev:.2e}"


def test_6_satiation_and_delta():
    with criterion(6, "bounded satiation and Delta certificate") as notes:
        e, f = G2.path(["e"]), G2.path(["f"])
        sat = satiate(G2, [{e, f}], (2,))
        ee, ef = G2.path(["e", "e"]), G2.path(["e", "f"])
        assert frozenset({e, f}) in sat
        assert frozenset({ee, ef, f}) in sat
        assert frozenset({e, ef, f}) in sat  # S3 drops ee from {e, ee, ef, f}
        assert satiate(G2, sat.family, (2,)) == sat
        v = delta_vanishes(G2, [e], [], (2,))
        assert v.status == "Nonzero" and v.certificate.is_ultrafilter
        lo, hi = v.norms
        assert abs(lo - 1) <= 1e-12 and abs(hi - 1) <= 1e-12
        notes["sets"] = len(sat)
        notes["certificate"] = v.certificate.to_json()["cycle"]


def test_7_ideal_lattice():
    with criterion(7, "gauge-invariant ideals") as notes:
        lat4 = list_gauge_invariant_ideals(G4, ck_generators(G4), (2,))
        assert len(lat4.pairs) == 4
        assert lat4.hasse == [(0, 1), (0, 2), (1, 3), (2, 3)]
        assert sorted(p.H for p in lat4.pairs) == sorted(brute_saturated_hereditary(G4))
        lat2 = list_gauge_invariant_ideals(G2, ck_generators(G2), (2,))
        assert len(lat2.pairs) == 2
        assert sorted(p.H for p in lat2.pairs) == sorted(brute_saturated_hereditary(G2))
        notes["G4"] = len(lat4.pairs)
        notes["G2"] = len(lat2.pairs)


def test_8_periodicity():
    with criterion(8, "periodicity group") as notes:
        expected = {"G1": (G1, [(1, 0), (0, 1)]), "G2": (G2, []), "G3": (G3, [(3,)])}
        for name, (g, basis) in expected.items():
            per = per_group(g, 4).per
            assert per == ZkSubgroup(g.rank, basis)
            assert per == oracle_per(g, 4 if g.rank == 1 else 2, 3)
            notes[name] = per.to_json()


def test_9_cofinality():
    with criterion(9, "cofinality") as notes:
        res = is_cofinal(G4)
        assert res.status == "NotCofinal"
        assert verify_not_cofinal(G4, res.vertex, res.witness)
        rep = restrict_to_filter_target(TruncatedRep(twist(G4, 0), (3,)), res.witness)
        assert rep.vertex_T(res.vertex).nnz == 0
        for g in (G1, G2, G3):
            assert is_cofinal(g).cofinal
        notes["G4_vertex"] = res.vertex


def test_10_nondegeneracy():
    with criterion(10, "nondegeneracy on Z^2") as notes:
        full = ZkSubgroup(2, [(1, 0), (0, 1)])
        for p, q in ((1, 2), (1, 3), (2, 5), (3, 8)):
            cc = twist(G1, Fraction(p, q)).base.cc_star()
            res = is_nondegenerate_on(cc, full)
            assert res.status is NondegeneracyStatus.DEGENERATE
            assert res.witness == (q, 0)
            for n in ((1, 0), (0, 1)):
                assert phase(cc.angle(res.witness, n)) == Cyclotomic.rational(1)
        res = is_nondegenerate_on(twist(G1, GOLDEN).base.cc_star(), full)
        assert res.status is NondegeneracyStatus.NONDEGENERATE
        assert res.min_singular_value > 1e-6
        notes["golden_sigma_min"] = f"{res.min_singular_value:.4f}"


def test_11_simplicity_verdicts():
    with criterion(11, "simplicity verdicts") as notes:
        cases = [
            (G2, Fraction(0), "Simple", "AperiodicCofinal"),
            (G2, Fraction(1, 3), "Simple", "AperiodicCofinal"),
            (G1, GOLDEN, "Simple", "NondegenerateCofinal"),
            (G1, Fraction(1, 2), "NotSimple", "NCTorusSpecialCase"),
            (G4, Fraction(0), "NotSimple", "NotCofinal"),
            (catalog.two_vertex_torus(), Fraction(1, 2), "Unknown", "InsufficientCriteria"),
        ]
        for g, angle, verdict, grounds in cases:
            c = twist(g, angle)
            v = decide(g, c.base, 4)
            assert (v.verdict, v.grounds) == (verdict, grounds)
            assert v.revalidate(g, c)
        notes["cases"] = len(cases)


def test_12_vm_commutation():
    with criterion(12, "V_m commutation phases") as notes:
        c = twist(G1, Fraction(1, 3))
        rep = TruncatedRep(c, (6, 6))
        pdata = per_group(G1, 4)
        r = check_vm_commutation(rep, pdata, None, (1, -1), (-1, 1), (2, 2))
        assert r.deviation <= 1e-9
        assert abs(r.measured_phase - complex(phase(c.base.cc_star().angle((1, -1), (-1, 1))))) <= 1e-10
        r2 = check_vm_commutation(rep, pdata, None, (1, 0), (0, 1), (2, 2))
        assert r2.deviation <= 1e-9 and r2.phase_error <= 1e-10
        assert abs(r2.measured_phase - np.exp(-2j * np.pi / 3)) <= 1e-10 or \
            abs(r2.measured_phase - np.exp(2j * np.pi / 3)) <= 1e-10
        notes["phase(m,-m)"] = f"{r.measured_phase.real:+.3f}{r.measured_phase.imag:+.3f}i"
        notes["phase(e1,e2)"] = f"{r2.measured_phase.real:+.3f}{r2.measured_phase.imag:+.3f}i"


def test_13_norm_diagnostic():
    c = twist(G1, GOLDEN)
    rep = TruncatedRep(c, (5, 5))
    sim = SimRelation(G1, 3)
    rng = np.random.default_rng(13)
    ok = 0
    for _ in range(100):
        x = _random_span(c, rng, 4)
        if compressed_norm(x, rep) >= compressed_norm(tilde_expectation(x, sim), rep) - 1e-6:
            ok += 1
    ACCEPTANCE[13] = ("REPORT", f"norm inequality held on {ok}/100 samples (target >= 99, not gating)")
    print(f"criterion 13: {ok}/100")
