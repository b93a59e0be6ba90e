"""
The rotation algebra as a twisted 2-graph
=========================================

One vertex, one blue loop a and one red loop b with ab = ba.  Twisting
by an angle theta gives the rotation algebra, and its simplicity depends on
whether theta is rational.
"""
from fractions import Fraction
from pathlib import Path

import numpy as np

from kgtwist import catalog
from kgtwist.io import load_cocycle
from kgtwist.pathrep import TruncatedRep, check_tck
from kgtwist.periodicity import per_group
from kgtwist.simplicity import check_vm_commutation, decide
from kgtwist.skeleton import validate

DATA = Path(__file__).parent / "data"
g = catalog.single_vertex_torus()
print(validate(g).ok)

# every path factors uniquely; the word b.a normalises to a.b
ab = g.path(["b", "a"])
print(ab.word, ab.degree)
print(g.factorize(ab, (1, 0)))

# the periodicity group is all of Z^2, since there is only one infinite path
pdata = per_group(g, 4)
print("Per basis:", pdata.per.to_json())

# truncated path-space representation with theta = 1/3
third = load_cocycle(DATA / "third.json", g)
rep = TruncatedRep(third, (4, 4))
print("worst TCK deviation:", check_tck(rep, (2, 2)).max_deviation)

# the unitaries V_m for m = e1, e2 commute up to the commutator phase
r = check_vm_commutation(TruncatedRep(third, (6, 6)), pdata, None, (1, 0), (0, 1), (2, 2))
print("measured phase:", np.round(r.measured_phase, 12), "expected:", np.round(r.expected_phase, 12))

# rational angles are degenerate on Z^2, irrational ones are not
for name in ("half", "third", "golden"):
    c = load_cocycle(DATA / f"{name}.json", g)
    v = decide(g, c, 4)
    print(f"{name:>7}: {v.verdict} ({v.grounds})")
