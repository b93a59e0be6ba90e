"""Simplicity verdicts for twisted Cuntz-Krieger algebras, with certificates
that can be re-checked, and the unitaries V_m built from the periodicity
bijections.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .align import mce
from .errors import CutoffTooSmall, UnsupportedGraphClass, VertexNotInHPer
from .pathrep import CompatibleSubspace, TruncatedRep, restrict_to_filter_target
from .periodicity import (PeriodicityData, SimRelation, is_aperiodic, is_cofinal,
                          per_group, pq, verify_not_cofinal)
from .skeleton import KGraph, Path, add, leq, sub
from .twist import (CategoricalCocycle, NondegeneracyStatus, TwoCocycleZk,
                    is_nondegenerate_on, is_zero_angle, phase)

GROUNDS = ("AperiodicCofinal", "NondegenerateCofinal", "NotCofinal",
           "NCTorusSpecialCase", "InsufficientCriteria")


def _digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _word(p: Path):
    return list(p.word) if p.word else p.range


@dataclass
class SimplicityVerdict:
    verdict: str  # "Simple" | "NotSimple" | "Unknown"
    grounds: str
    certificates: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    # live objects backing the certificates
    _cofinality: object = None
    _aperiodicity: object = None
    _per: object = None
    _nondeg: object = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "grounds": self.grounds,
                "certificates": self.certificates,
                "digests": {k: _digest(v) for k, v in sorted(self.certificates.items())},
                "bounds": self.bounds}

    def revalidate(self, graph: KGraph, cocycle) -> bool:
        """Re-check every certificate independently of how it was found."""
        base = cocycle.base if isinstance(cocycle, CategoricalCocycle) else cocycle
        cof = self._cofinality
        if cof is not None:
            if cof.cofinal:
                if not is_cofinal(graph).cofinal:
                    return False
            else:
                if not verify_not_cofinal(graph, cof.vertex, cof.witness):
                    return False
                if not _filter_kills_vertex(graph, base, cof.vertex, cof.witness):
                    return False
        ap = self._aperiodicity
        if self.grounds == "AperiodicCofinal":
            for mu, nu, tau in ap.not_sim:
                if mu.source != nu.source or tau.range != mu.source:
                    return False
                if mce(graph, graph.compose(mu, tau), graph.compose(nu, tau)):
                    return False
        if self.grounds in ("NondegenerateCofinal", "NCTorusSpecialCase") or self._nondeg is not None:
            res = self._nondeg
            if res is None:
                return False
            again = is_nondegenerate_on(base.cc_star(), self._per.per)
            if again.status is not res.status:
                return False
            if res.status is NondegeneracyStatus.DEGENERATE:
                w = res.witness
                if w not in self._per.per or not any(w):
                    return False
                cc = base.cc_star().snapped()
                if not all(is_zero_angle(cc.angle(w, g), 1e-9) for g in self._per.per.basis):
                    return False
        return True


def _filter_kills_vertex(g: KGraph, base: TwoCocycleZk, v: str, S) -> bool:
    """On the subrepresentation carried by the witness filter, T_v is exactly 0."""
    N = tuple(max(1, a) for a in add(S.prefix.degree, S.cycle.degree))
    rep = restrict_to_filter_target(TruncatedRep(CategoricalCocycle(g, base), N), S)
    return rep.vertex_T(v).nnz == 0


def _base(c) -> TwoCocycleZk:
    return c.base if isinstance(c, CategoricalCocycle) else c


def is_nc_torus(g: KGraph) -> bool:
    """One vertex and exactly one edge of each colour."""
    if len(g.vertices) != 1:
        return False
    return sorted(e.color for e in g.edge_list) == list(range(1, g.rank + 1))


def decide(graph: KGraph, c, D: int = 4) -> SimplicityVerdict:
    """Apply the known sufficient conditions in order.

    NotSimple is reported only for non-cofinal graphs and for the
    noncommutative torus with degenerate commutator; everything else that
    escapes the sufficient conditions is Unknown.
    """
    graph.require_valid()
    if not graph.has_no_sources():
        raise UnsupportedGraphClass("simplicity needs a graph without sources")
    base = _base(c)
    if base.k != graph.rank:
        raise ValueError(f"cocycle on Z^{base.k} for a {graph.rank}-graph")
    bounds = {"D": D}
    cof = is_cofinal(graph)
    certs = {"cofinality": cof.to_json()}
    if not cof.cofinal:
        return SimplicityVerdict("NotSimple", "NotCofinal", certs, bounds, cof)

    sim = SimRelation(graph, D)
    ap = is_aperiodic(graph, D, sim)
    certs["aperiodicity"] = ap.to_json()
    if ap.status == "Aperiodic":
        certs["aperiodicity"]["refutations"] = [[_word(m), _word(n), _word(t)] for m, n, t in ap.not_sim]
        return SimplicityVerdict("Simple", "AperiodicCofinal", certs, bounds, cof, ap)

    pdata = per_group(graph, D, sim)
    nd = is_nondegenerate_on(base.cc_star(), pdata.per)
    certs["per_basis"] = pdata.per.to_json()
    certs["nondegeneracy"] = nd.to_json()
    if nd.status is NondegeneracyStatus.NONDEGENERATE and not pdata.unresolved:
        return SimplicityVerdict("Simple", "NondegenerateCofinal", certs, bounds, cof, ap, pdata, nd)
    if is_nc_torus(graph) and nd.status is not NondegeneracyStatus.INCONCLUSIVE:
        verdict = "Simple" if nd.nondegenerate else "NotSimple"
        return SimplicityVerdict(verdict, "NCTorusSpecialCase", certs, bounds, cof, ap, pdata, nd)
    return SimplicityVerdict("Unknown", "InsufficientCriteria", certs, bounds, cof, ap, pdata, nd)


# ---------------------------------------------------------------------------
# V_m

def default_lambda(g: KGraph, pdata: PeriodicityData) -> Path:
    if not pdata.h_per:
        raise VertexNotInHPer("H_Per is empty")
    return g.vertex(min(pdata.h_per))


def build_vm(rep: TruncatedRep, pdata: PeriodicityData, lam: Path | None, m: Sequence[int]) -> sp.csr_matrix:
    """V_m = sum over mu in r(lam) Lambda^{p(m)} of q_lam T_mu T*_{theta(mu)}.

    Returned on the whole truncated space; relations hold on a compatible
    subspace whose lower bound is at least p(m) and q(m).
    """
    g = rep.graph
    lam = lam if lam is not None else default_lambda(g, pdata)
    if lam.range not in pdata.h_per:
        raise VertexNotInHPer(f"{lam.range} is not in H_Per")
    m = tuple(m)
    if m not in pdata.per:
        raise ValueError(f"{m} is not in Per")
    p, q = pq(m)
    room = sub(rep.N, lam.degree)
    if not (leq(p, room) and leq(q, room)):
        raise CutoffTooSmall(f"p={p}, q={q} do not fit under N - d(lam) = {room}")
    table = pdata.theta_table(p, q, at=lam.range)
    out = rep.zero()
    for mu, th in sorted(table.items(), key=lambda kv: kv[0].sort_key()):
        out = out + rep.T(mu) @ rep.T_star(th)
    return (rep.q(lam) @ out).tocsr()


@dataclass
class VmReport:
    m: tuple[int, ...]
    m2: tuple[int, ...]
    deviation: float
    measured_phase: complex
    expected_phase: complex
    phase_error: float
    unitarity: float
    adjoint: float
    margin: tuple[int, ...]
    N: tuple[int, ...]

    def to_json(self) -> dict:
        c = lambda z: [round(z.real, 15), round(z.imag, 15)]
        return {"m": list(self.m), "m_prime": list(self.m2), "deviation": self.deviation,
                "measured_phase": c(self.measured_phase), "expected_phase": c(self.expected_phase),
                "phase_error": self.phase_error, "unitarity": self.unitarity,
                "adjoint": self.adjoint, "bounds": {"N": list(self.N), "margin": list(self.margin)}}


def _maxabs(A) -> float:
    A = sp.csr_matrix(A)
    return float(np.abs(A.data).max()) if A.nnz else 0.0


def check_vm_unitarity(rep: TruncatedRep, pdata: PeriodicityData, lam: Path | None,
                       m: Sequence[int], margin: Sequence[int]) -> tuple[float, float]:
    """(max of |V*V - q_lam|, |VV* - q_lam|; |V_{-m} - V_m^*|) on the compatible subspace."""
    lam = lam if lam is not None else default_lambda(rep.graph, pdata)
    S = CompatibleSubspace(rep, margin, lower=margin)
    V = build_vm(rep, pdata, lam, m)
    Vm = build_vm(rep, pdata, lam, tuple(-a for a in m))
    Vh = V.conj().T.tocsr()
    Q = rep.q(lam)
    uni = max(S.deviation(Vh @ V, Q), S.deviation(V @ Vh, Q))
    return uni, S.deviation(Vm, Vh)


def check_vm_commutation(rep: TruncatedRep, pdata: PeriodicityData, lam: Path | None,
                         m: Sequence[int], m2: Sequence[int], margin: Sequence[int]) -> VmReport:
    """Compare V_m V_m' with cc*(m, m') V_m' V_m on the compatible subspace.

    The measured phase is the least-squares ratio <B, A> / <B, B>.
    """
    g = rep.graph
    lam = lam if lam is not None else default_lambda(g, pdata)
    m, m2 = tuple(m), tuple(m2)
    S = CompatibleSubspace(rep, margin, lower=margin)
    V1 = build_vm(rep, pdata, lam, m)
    V2 = build_vm(rep, pdata, lam, m2)
    A = S.columns(V1 @ V2)
    B = S.columns(V2 @ V1)
    expected = complex(phase(rep.cocycle.base.cc_star().angle(m, m2)))
    dev = _maxabs(A - expected * B)
    bb = float(np.real(B.multiply(B.conj()).sum()))
    measured = complex(B.conj().multiply(A).sum()) / bb if bb else complex("nan")
    uni, adj = check_vm_unitarity(rep, pdata, lam, m, margin)
    uni2, adj2 = check_vm_unitarity(rep, pdata, lam, m2, margin)
    return VmReport(m, m2, dev, measured, expected, abs(measured - expected),
                    max(uni, uni2), max(adj, adj2), S.margin, rep.N)
