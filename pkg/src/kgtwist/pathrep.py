"""Truncated path-space representation on span{h_nu : d(nu) <= N}.

T_mu h_nu = c(mu, nu) h_{mu nu} when s(mu) = r(nu) and d(mu nu) <= N, else 0.
Relations are only expected to hold after compressing to a subspace of
paths far enough from the cutoff; see :class:`CompatibleSubspace`.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.io
import scipy.sparse as sp

from .align import mce
from .errors import MarginTooLarge
from .skeleton import Path, add, leq, sub
from .spanalg import SpanElement
from .twist import CategoricalCocycle, phase


class TruncatedRep:
    """Operators T_lam on paths of degree <= N.

    ``sources`` restricts the basis to paths whose source lies in the given
    vertex set; such subspaces are invariant under every T_lam and T_lam^*.
    """

    def __init__(self, cocycle: CategoricalCocycle, N: Sequence[int], sources: Iterable[str] | None = None):
        g = cocycle.graph
        g.require_valid()
        self.cocycle = cocycle
        self.graph = g
        self.N = tuple(int(a) for a in N)
        if len(self.N) != g.rank:
            raise ValueError(f"cutoff {self.N} does not match rank {g.rank}")
        self.sources = None if sources is None else frozenset(sources)
        basis = g.paths_upto(self.N)
        if self.sources is not None:
            basis = [p for p in basis if p.source in self.sources]
        self.basis: list[Path] = basis
        self.index = {p: i for i, p in enumerate(basis)}
        self._by_range: dict[str, list[Path]] = {}
        for p in basis:
            self._by_range.setdefault(p.range, []).append(p)
        self._T: dict[Path, sp.csr_matrix] = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def T(self, lam: Path) -> sp.csr_matrix:
        hit = self._T.get(lam)
        if hit is not None:
            return hit
        g, c = self.graph, self.cocycle
        rows, cols, vals = [], [], []
        for nu in self._by_range.get(lam.source, []):
            if not leq(add(lam.degree, nu.degree), self.N):
                continue
            ln = g.compose(lam, nu)
            rows.append(self.index[ln])
            cols.append(self.index[nu])
            vals.append(complex(phase(c.value(lam, nu))))
        n = self.dim
        m = sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(n, n))
        self._T[lam] = m
        return m

    def T_star(self, lam: Path) -> sp.csr_matrix:
        return self.T(lam).conj().T.tocsr()

    def q(self, lam: Path) -> sp.csr_matrix:
        return (self.T(lam) @ self.T_star(lam)).tocsr()

    def vertex_T(self, v: str) -> sp.csr_matrix:
        return self.T(self.graph.vertex(v))

    def identity(self) -> sp.csr_matrix:
        return sp.identity(self.dim, dtype=complex, format="csr")

    def zero(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.dim, self.dim), dtype=complex)


def represent(x: SpanElement, rep: TruncatedRep) -> sp.csr_matrix:
    out = rep.zero()
    for (mu, nu), a in x.items():
        out = out + complex(a) * (rep.T(mu) @ rep.T_star(nu))
    return out.tocsr()


class CompatibleSubspace:
    """span{h_nu : lower <= d(nu) <= N - margin}.

    With ``lower = 0`` (the default) products whose creation degree is at
    most ``margin`` act here exactly as in the untruncated representation.
    A positive ``lower`` also lets finite Cuntz-Krieger sums
    sum_{lam in v Lambda^n} q_lam act as T_v for n <= lower.
    """

    def __init__(self, rep: TruncatedRep, margin: Sequence[int], lower: Sequence[int] | None = None):
        margin = tuple(int(a) for a in margin)
        if len(margin) != len(rep.N) or not leq(margin, rep.N) or min(margin, default=0) < 0:
            raise MarginTooLarge(f"margin {margin} does not fit under cutoff {rep.N}")
        lower = tuple(lower) if lower is not None else (0,) * len(margin)
        self.rep = rep
        self.margin = margin
        self.lower = lower
        top = sub(rep.N, margin)
        self.indices = np.array([i for i, p in enumerate(rep.basis)
                                 if leq(p.degree, top) and leq(lower, p.degree)], dtype=int)

    @property
    def dim(self) -> int:
        return len(self.indices)

    def columns(self, A) -> sp.csr_matrix:
        """A restricted to inputs from the subspace."""
        return sp.csr_matrix(A)[:, self.indices]

    def compress(self, A) -> sp.csr_matrix:
        """P A P as a dim x dim matrix."""
        return sp.csr_matrix(A)[self.indices][:, self.indices]

    def deviation(self, A, B) -> float:
        d = self.columns(A) - self.columns(B)
        return float(np.abs(d.data).max()) if d.nnz else 0.0


@dataclass
class TckReport:
    margin: tuple[int, ...]
    tck1: float
    tck2: float
    tck3: float
    tck4: float
    checked: dict

    @property
    def max_deviation(self) -> float:
        return max(self.tck1, self.tck2, self.tck3, self.tck4)

    def to_json(self) -> dict:
        return {"margin": list(self.margin), "TCK1": self.tck1, "TCK2": self.tck2,
                "TCK3": self.tck3, "TCK4": self.tck4, "max_deviation": self.max_deviation,
                "checked": self.checked}


def check_tck(rep: TruncatedRep, margin: Sequence[int]) -> TckReport:
    """Maximum entrywise deviation of each twisted Toeplitz relation on the
    compatible subspace of the given margin."""
    sub_ = CompatibleSubspace(rep, margin)
    g, c = rep.graph, rep.cocycle
    small = g.paths_upto(sub_.margin)

    d1 = 0.0
    for v in g.vertices:
        Tv = rep.vertex_T(v)
        d1 = max(d1, sub_.deviation(Tv @ Tv, Tv), sub_.deviation(Tv.conj().T, Tv))
        for w in g.vertices:
            if w != v:
                d1 = max(d1, sub_.deviation(Tv @ rep.vertex_T(w), rep.zero()))

    d2 = 0.0
    n2 = 0
    for mu in small:
        for nu in small:
            if mu.source != nu.range or not leq(add(mu.degree, nu.degree), sub_.margin):
                continue
            n2 += 1
            rhs = complex(phase(c.value(mu, nu))) * rep.T(g.compose(mu, nu))
            d2 = max(d2, sub_.deviation(rep.T(mu) @ rep.T(nu), rhs))

    d3 = 0.0
    for lam in small:
        d3 = max(d3, sub_.deviation(rep.T_star(lam) @ rep.T(lam), rep.vertex_T(lam.source)))

    d4 = 0.0
    n4 = 0
    for mu in small:
        for nu in small:
            top = tuple(max(a, b) for a, b in zip(mu.degree, nu.degree))
            if mu.range != nu.range or not leq(top, sub_.margin):
                continue
            n4 += 1
            rhs = rep.zero()
            for lam in mce(g, mu, nu):
                rhs = rhs + rep.q(lam)
            d4 = max(d4, sub_.deviation(rep.q(mu) @ rep.q(nu), rhs))
    return TckReport(sub_.margin, d1, d2, d3, d4,
                     {"paths": len(small), "tck2_pairs": n2, "tck4_pairs": n4})


@dataclass
class NormEstimate:
    value: float
    iterations: int
    converged: bool


DENSE_NORM_LIMIT = 2048


def power_norm(A, seed: int = 0, tol: float = 1e-9, max_iter: int = 10_000) -> NormEstimate:
    """Spectral norm by power iteration on A^H A with a seeded start vector."""
    A = sp.csr_matrix(A)
    n = A.shape[1]
    if n == 0 or A.nnz == 0:
        return NormEstimate(0.0, 0, True)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    AH = A.conj().T.tocsr()
    prev = 0.0
    for it in range(1, max_iter + 1):
        w = AH @ (A @ v)
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return NormEstimate(0.0, it, True)
        v = w / lam
        if abs(lam - prev) <= tol * max(lam, 1.0):
            return NormEstimate(float(np.sqrt(lam)), it, True)
        prev = lam
    warnings.warn(f"power iteration did not converge in {max_iter} steps")
    return NormEstimate(float(np.sqrt(prev)), max_iter, False)


def compressed_norm(x: SpanElement, rep: TruncatedRep, margin: Sequence[int] | None = None,
                    seed: int = 0) -> float:
    """Norm of P represent(x) P; the default margin is the largest degree in x.

    Small compressions use the dense 2-norm; power iteration can stall when
    the top singular values nearly coincide.
    """
    if margin is None:
        k = len(rep.N)
        margin = (0,) * k
        for mu, nu in x.terms:
            margin = tuple(max(a, b, c) for a, b, c in zip(margin, mu.degree, nu.degree))
    sub_ = CompatibleSubspace(rep, margin)
    A = sub_.compress(represent(x, rep))
    if max(A.shape) <= DENSE_NORM_LIMIT:
        return float(np.linalg.norm(A.toarray(), 2)) if A.nnz else 0.0
    return power_norm(A, seed=seed).value


def restrict_to_filter_target(rep: TruncatedRep, S) -> TruncatedRep:
    """Subrepresentation on paths whose source is a source of some member of S."""
    return TruncatedRep(rep.cocycle, rep.N, S.vertices(rep.graph))


def dump_matrix(A, target) -> None:
    """Write a sparse complex matrix in MatrixMarket coordinate format, rows sorted."""
    coo = sp.coo_matrix(A)
    order = np.lexsort((coo.col, coo.row))
    coo = sp.coo_matrix((coo.data[order], (coo.row[order], coo.col[order])), shape=coo.shape)
    scipy.io.mmwrite(target, coo.astype(complex), field="complex", precision=17)


def load_matrix(source) -> sp.csr_matrix:
    return sp.csr_matrix(scipy.io.mmread(source))
