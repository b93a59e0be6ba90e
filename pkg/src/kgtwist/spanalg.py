"""Finite linear combinations of spanning elements t_mu t_nu^* and their
twisted product.

Coefficients are exact cyclotomic numbers when the cocycle has rational
angles, otherwise complex floats.
"""
from __future__ import annotations

from typing import Iterable, Mapping

from .align import common_range, ext, mce_pairs, pi_closure, t_set
from .cyclo import Cyclotomic
from .errors import GraphMismatch, NotPiClosed, RangeMismatch
from .skeleton import Path, sort_paths
from .twist import CategoricalCocycle, phase, wrap

Key = tuple[Path, Path]


def _is_zero(a) -> bool:
    return a.is_zero() if isinstance(a, Cyclotomic) else a == 0


class SpanElement:
    """sum of coeff * t_mu t_nu^*, keyed by (mu, nu) with s(mu) = s(nu)."""

    def __init__(self, cocycle: CategoricalCocycle, terms: Mapping[Key, object] | None = None):
        self.cocycle = cocycle
        self.terms: dict[Key, object] = {}
        for key, a in (terms or {}).items():
            a = self._coerce(a)
            if not _is_zero(a):
                self.terms[key] = a

    # -- construction -----------------------------------------------------
    def _coerce(self, a):
        if self.cocycle.exact:
            c = Cyclotomic.coerce(a)
            if c is not None:
                return c
        return complex(a)

    @classmethod
    def symbol(cls, c: CategoricalCocycle, mu: Path, nu: Path, coeff=1) -> "SpanElement":
        if mu.source != nu.source:
            return cls(c)
        return cls(c, {(mu, nu): coeff})

    def _new(self, terms) -> "SpanElement":
        return SpanElement(self.cocycle, terms)

    @property
    def graph(self):
        return self.cocycle.graph

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "SpanElement"):
        if other.cocycle is not self.cocycle and not other.graph.same_as(self.graph):
            raise GraphMismatch("elements over different graphs")

    def __add__(self, other: "SpanElement") -> "SpanElement":
        self._check(other)
        out = dict(self.terms)
        for k, a in other.terms.items():
            out[k] = out[k] + a if k in out else a
        return self._new(out)

    def __neg__(self) -> "SpanElement":
        return self._new({k: -a for k, a in self.terms.items()})

    def __sub__(self, other: "SpanElement") -> "SpanElement":
        return self + (-other)

    def scaled(self, s) -> "SpanElement":
        s = self._coerce(s)
        return self._new({k: a * s for k, a in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, SpanElement):
            return multiply(self, other)
        return self.scaled(other)

    def __rmul__(self, other):
        return self.scaled(other)

    def adjoint(self) -> "SpanElement":
        return self._new({(nu, mu): a.conjugate() for (mu, nu), a in self.terms.items()})

    # -- comparison -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpanElement):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def max_abs_diff(self, other: "SpanElement") -> float:
        d = self - other
        return max((abs(complex(a)) for a in d.terms.values()), default=0.0)

    def allclose(self, other: "SpanElement", tol: float = 1e-10) -> bool:
        return self.max_abs_diff(other) <= tol

    def __len__(self) -> int:
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key()))

    def __repr__(self) -> str:
        if not self.terms:
            return "SpanElement(0)"
        parts = [f"({a})*t[{mu}]t*[{nu}]" for (mu, nu), a in self.items()[:6]]
        more = "" if len(self.terms) <= 6 else f" + ... ({len(self.terms)} terms)"
        return "SpanElement(" + " + ".join(parts) + more + ")"


def zero(c: CategoricalCocycle) -> SpanElement:
    return SpanElement(c)


def t(c: CategoricalCocycle, mu: Path) -> SpanElement:
    return SpanElement.symbol(c, mu, c.graph.vertex(mu.source))


def t_star(c: CategoricalCocycle, nu: Path) -> SpanElement:
    return SpanElement.symbol(c, c.graph.vertex(nu.source), nu)


def proj(c: CategoricalCocycle, lam: Path) -> SpanElement:
    """q_lam = t_lam t_lam^*."""
    return SpanElement.symbol(c, lam, lam)


def vertex_proj(c: CategoricalCocycle, v: str) -> SpanElement:
    return proj(c, c.graph.vertex(v))


def multiply(x: SpanElement, y: SpanElement, c: CategoricalCocycle | None = None) -> SpanElement:
    """Twisted product, expanded over minimal common extensions."""
    x._check(y)
    c = c or x.cocycle
    g = c.graph
    acc: dict[Key, object] = {}
    for (mu, nu), a in x.terms.items():
        for (eta, zeta), b in y.terms.items():
            if nu.range != eta.range:
                continue
            ab = a * b
            for alpha, beta in mce_pairs(g, nu, eta):
                ang = wrap(c.value(mu, alpha) - c.value(nu, alpha)
                           + c.value(eta, beta) - c.value(zeta, beta))
                key = (g.compose(mu, alpha), g.compose(zeta, beta))
                term = ab * phase(ang) if ang != 0 else ab
                acc[key] = acc[key] + term if key in acc else term
    return SpanElement(c, acc)


def delta(c: CategoricalCocycle, E: Iterable[Path], vertex: str | None = None) -> SpanElement:
    """Product over lam in E of (t_v - q_lam); t_v for empty E."""
    E = sort_paths(E)
    v = common_range(E, vertex)
    if v is None:
        raise RangeMismatch("empty set needs a vertex")
    tv = vertex_proj(c, v)
    out = tv
    for lam in E:
        out = out * (tv - proj(c, lam))
    return out


def delta_commutation_check(c: CategoricalCocycle, E: Iterable[Path], mu: Path,
                            vertex: str | None = None) -> tuple[bool, SpanElement, SpanElement]:
    """Compare Delta^E t_mu with t_mu Delta^{Ext(mu; E)}."""
    E = list(E)
    v = common_range(E, vertex)
    if v != mu.range:
        raise RangeMismatch(f"r(mu) = {mu.range} but the set lives at {v}")
    lhs = delta(c, E, v) * t(c, mu)
    rhs = t(c, mu) * delta(c, ext(c.graph, mu, E), mu.source)
    same = lhs == rhs if c.exact else lhs.allclose(rhs)
    return same, lhs, rhs


class ThetaBlock:
    """Matrix units Theta_{mu,nu} = t_mu Delta^{T(E;mu)} t_nu^* of a closed set E."""

    def __init__(self, c: CategoricalCocycle, E: Iterable[Path]):
        E = frozenset(E)
        self.cocycle = c
        g = c.graph
        if pi_closure(g, E) != E:
            raise NotPiClosed("set is not closed under the aligned-extension rule")
        self.E = E
        self.paths = sort_paths(E)
        self._inner = {mu: delta(c, t_set(g, E, mu), mu.source) for mu in self.paths}
        self.units: dict[Key, SpanElement] = {}
        for mu in self.paths:
            for nu in self.paths:
                if mu.degree == nu.degree and mu.source == nu.source:
                    self.units[(mu, nu)] = t(c, mu) * self._inner[mu] * t_star(c, nu)

    def unit(self, mu: Path, nu: Path) -> SpanElement:
        return self.units.get((mu, nu), SpanElement(self.cocycle))

    def expand(self, mu: Path, nu: Path) -> SpanElement:
        """sum over mu alpha in E of c(mu,alpha) conj c(nu,alpha) Theta_{mu alpha, nu alpha}."""
        c, g = self.cocycle, self.cocycle.graph
        out = SpanElement(c)
        if mu.source != nu.source:
            return out
        for lam in self.paths:
            if lam.range != mu.range or not g.is_prefix(mu, lam):
                continue
            alpha = g.factorize(lam, mu.degree)[1]
            na = g.compose(nu, alpha)
            ang = wrap(c.value(mu, alpha) - c.value(nu, alpha))
            out = out + self.unit(lam, na).scaled(phase(ang))
        return out

    def check(self, tol: float | None = None) -> dict:
        """Maximum violation of the matrix-unit identities and of the expansion.

        With ``tol=None`` and an exact cocycle the comparison is exact and the
        returned deviations are 0 or 1.
        """
        c = self.cocycle
        exact = c.exact and tol is None

        def dev(x: SpanElement, y: SpanElement) -> float:
            if exact:
                return 0.0 if x == y else 1.0
            return x.max_abs_diff(y)

        out = {"adjoint": 0.0, "product": 0.0, "expansion": 0.0}
        keys = sorted(self.units, key=lambda k: (k[0].sort_key(), k[1].sort_key()))
        for k in keys:
            u = self.units[k]
            out["adjoint"] = max(out["adjoint"], dev(u.adjoint(), self.unit(k[1], k[0])))
        for k1 in keys:
            for k2 in keys:
                lhs = self.units[k1] * self.units[k2]
                rhs = self.unit(k1[0], k2[1]) if k1[1] == k2[0] else SpanElement(c)
                out["product"] = max(out["product"], dev(lhs, rhs))
        for mu in self.paths:
            for nu in self.paths:
                if mu.degree == nu.degree and mu.source == nu.source:
                    out["expansion"] = max(out["expansion"],
                                           dev(SpanElement.symbol(c, mu, nu), self.expand(mu, nu)))
        return out


def theta_block(E: Iterable[Path], c: CategoricalCocycle) -> ThetaBlock:
    return ThetaBlock(c, E)


def expectation(x: SpanElement, mode: str = "gauge") -> SpanElement:
    """Keep terms with d(mu) = d(nu) ("gauge") or mu = nu ("diagonal")."""
    if mode == "gauge":
        keep = {k: a for k, a in x.terms.items() if k[0].degree == k[1].degree}
    elif mode == "diagonal":
        keep = {k: a for k, a in x.terms.items() if k[0] == k[1]}
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return SpanElement(x.cocycle, keep)


def tilde_expectation(x: SpanElement, sim) -> SpanElement:
    """Keep terms whose pair (mu, nu) is related by ``sim.related``."""
    return SpanElement(x.cocycle, {k: a for k, a in x.terms.items() if sim.related(*k)})
