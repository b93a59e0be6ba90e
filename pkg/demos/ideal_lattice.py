"""
Gauge-invariant ideals of two disjoint loops joined by an edge
==============================================================

The 1-graph with loops at u and w and an edge from w to u has exactly
two nontrivial hereditary saturated sets, so four gauge-invariant ideals.
"""
from pathlib import Path

from kgtwist import catalog
from kgtwist.boundary import satiate
from kgtwist.ideals import ck_generators, list_gauge_invariant_ideals
from kgtwist.io import load_ee, load_graph
from kgtwist.periodicity import is_cofinal

DATA = Path(__file__).parent / "data"
g4 = catalog.disjoint_loops()

lat = list_gauge_invariant_ideals(g4, ck_generators(g4), (2,))
for i, pair in enumerate(lat.pairs):
    print(i, sorted(pair.H))
print("Hasse edges:", lat.hasse, lat.exactness)

# not cofinal: the filter below never reaches u
res = is_cofinal(g4)
print(res.status, res.vertex, res.witness.to_json())

# a non-CK family on two loops at one vertex: {e} alone is not exhaustive
# but {e, f} is, and satiation adds everything it forces up to degree 2
g2 = load_graph(DATA / "g2.json")
fam = load_ee(DATA / "ee_g2.json", g2)
sat = satiate(g2, fam, (2,))
print(len(sat), "sets;", "minimal:", [sorted(p.word for p in E) for E in sat.minimal_sets()])

lat2 = list_gauge_invariant_ideals(g2, fam, (2,))
print(len(lat2.pairs), "pairs for the family", lat2.exactness)
