"""
Simplicity across the catalogue
===============================

Run the decision procedure on each bundled graph with a few twists and
re-check the certificates it returns.
"""
from pathlib import Path

from kgtwist.io import load_cocycle, load_graph
from kgtwist.simplicity import decide

DATA = Path(__file__).parent / "data"
graphs = ["g1", "g2", "g3", "g4", "torus2v", "tail"]

for name in graphs:
    g = load_graph(DATA / f"{name}.json")
    twists = ["zero1"] if g.rank == 1 else ["zero", "third", "half", "golden"]
    for tw in twists:
        c = load_cocycle(DATA / f"{tw}.json", g)
        v = decide(g, c, 4)
        ok = v.revalidate(g, c)
        print(f"{name:>8} {tw:>7}: {v.verdict:<9} {v.grounds:<22} revalidated={ok}")
