"""Bicharacter 2-cocycles on Z^k, their pullbacks to k-graphs, and the
nondegeneracy test for the commutator bicharacter c c* on a subgroup.

Angles are kept modulo 1: exact ``Fraction`` values or plain floats.  A phase
is ``exp(2 pi i angle)``; exact angles give :class:`~kgtwist.cyclo.Cyclotomic`
phases, floats give ``complex``.
"""
from __future__ import annotations

import cmath
import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd, lcm
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_decomp

from .cyclo import Cyclotomic
from .errors import DimensionMismatch, NotSkewSymmetric, SpecFormatError
from .skeleton import KGraph, Path

Angle = Union[Fraction, float]

SNAP_DENOMINATOR = 10 ** 6
SNAP_TOL = 1e-14
DEGENERATE_TOL = 1e-9
INCONCLUSIVE_TOL = 1e-6


def parse_angle(x) -> Angle:
    """Read an angle from a string ``"p/q"``, an integer, a decimal or a number."""
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        s = x.strip()
        try:
            if "/" in s or s.lstrip("+-").isdigit():
                return Fraction(s)
            return float(s)
        except (ValueError, ZeroDivisionError):
            raise SpecFormatError(f"cannot read angle {x!r}") from None
    raise SpecFormatError(f"cannot read angle {x!r}")


def wrap(a: Angle) -> Angle:
    """Reduce into [0, 1)."""
    if isinstance(a, Fraction):
        return a - floor(a)
    r = a % 1.0
    return 0.0 if r == 1.0 else r


def centered(a: Angle) -> Angle:
    """Reduce into (-1/2, 1/2]."""
    r = wrap(a)
    return r - 1 if r > Fraction(1, 2) else r


def is_zero_angle(a: Angle, tol: float = 1e-12) -> bool:
    if isinstance(a, Fraction):
        return wrap(a) == 0
    return abs(float(centered(a))) <= tol


def phase(a: Angle):
    if isinstance(a, Fraction):
        return Cyclotomic.root(a)
    return cmath.exp(2j * cmath.pi * a)


def angle_to_str(a: Angle) -> str:
    return str(a) if isinstance(a, Fraction) else repr(float(a))


def snap(a: Angle) -> Angle:
    """Replace a float that is a small-denominator rational (to rounding error) by that rational."""
    if isinstance(a, Fraction):
        return a
    f = Fraction(a).limit_denominator(SNAP_DENOMINATOR)
    return f if abs(float(f) - a) <= SNAP_TOL else a


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoCocycleZk:
    """c(m, n) = exp(2 pi i sum_ij theta[i][j] m_i n_j)."""
    theta: tuple[tuple[Angle, ...], ...]

    def __post_init__(self):
        t = tuple(tuple(parse_angle(x) for x in row) for row in self.theta)
        k = len(t)
        if any(len(row) != k for row in t):
            raise DimensionMismatch("theta must be a square matrix")
        object.__setattr__(self, "theta", t)

    @classmethod
    def from_upper(cls, k: int, entries: Mapping[tuple[int, int], Angle]) -> "TwoCocycleZk":
        """Build from a sparse map {(i, j): angle} with 0-based indices."""
        t = [[Fraction(0)] * k for _ in range(k)]
        for (i, j), a in entries.items():
            t[i][j] = parse_angle(a)
        return cls(tuple(map(tuple, t)))

    @property
    def k(self) -> int:
        return len(self.theta)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for row in self.theta for x in row)

    def angle(self, m: Sequence[int], n: Sequence[int]) -> Angle:
        if len(m) != self.k or len(n) != self.k:
            raise DimensionMismatch(f"degrees must have {self.k} entries")
        s = 0 if self.exact else 0.0
        for i, mi in enumerate(m):
            if mi:
                row = self.theta[i]
                for j, nj in enumerate(n):
                    if nj:
                        s += row[j] * (mi * nj)
        return wrap(Fraction(s) if self.exact else float(s))

    def phase(self, m, n):
        return phase(self.angle(m, n))

    def cc_star(self) -> "TwoCocycleZk":
        k = self.k
        return TwoCocycleZk(tuple(tuple(wrap(self.theta[i][j] - self.theta[j][i]) for j in range(k))
                                  for i in range(k)))

    def is_skew(self, tol: float = 1e-12) -> bool:
        return all(is_zero_angle(self.theta[i][j] + self.theta[j][i], tol)
                   for i in range(self.k) for j in range(self.k))

    def snapped(self) -> "TwoCocycleZk":
        return TwoCocycleZk(tuple(tuple(snap(x) for x in row) for row in self.theta))

    def to_json(self) -> list:
        return [[angle_to_str(x) for x in row] for row in self.theta]


def cc_star(c: TwoCocycleZk) -> TwoCocycleZk:
    return c.cc_star()


# ---------------------------------------------------------------------------

class ZkSubgroup:
    """A subgroup of Z^k kept as a canonical (Hermite) basis.

    Two generating sets describe the same subgroup exactly when their
    ``basis`` tuples agree.
    """

    def __init__(self, k: int, generators: Iterable[Sequence[int]] = ()):
        self.k = k
        gens = [tuple(int(a) for a in g) for g in generators]
        for g in gens:
            if len(g) != k:
                raise DimensionMismatch(f"generator {g} is not in Z^{k}")
        gens = [g for g in gens if any(g)]
        if not gens:
            self.basis: tuple[tuple[int, ...], ...] = ()
            return
        H = hermite_normal_form(Matrix(gens).T)
        cols = [tuple(int(x) for x in H[:, j]) for j in range(H.shape[1])]
        self.basis = tuple(c for c in cols if any(c))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, x: Sequence[int]) -> bool:
        x = tuple(int(a) for a in x)
        if not any(x):
            return True
        return ZkSubgroup(self.k, self.basis + (x,)).basis == self.basis

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def __eq__(self, other) -> bool:
        return isinstance(other, ZkSubgroup) and self.k == other.k and self.basis == other.basis

    def __hash__(self):
        return hash((self.k, self.basis))

    def __repr__(self) -> str:
        return f"ZkSubgroup(k={self.k}, basis={[list(b) for b in self.basis]})"

    def to_json(self) -> list:
        return [list(b) for b in self.basis]

    def index_in_full(self) -> int | None:
        """[Z^k : P] when finite, else None."""
        if self.rank < self.k:
            return None
        return abs(int(Matrix(self.basis).det()))


class NondegeneracyStatus(enum.Enum):
    NONDEGENERATE = "Nondegenerate"
    DEGENERATE = "Degenerate"
    INCONCLUSIVE = "NumericallyInconclusive"


@dataclass
class NondegeneracyResult:
    status: NondegeneracyStatus
    witness: tuple[int, ...] | None = None
    min_singular_value: float | None = None
    detail: dict = field(default_factory=dict)

    @property
    def nondegenerate(self) -> bool:
        return self.status is NondegeneracyStatus.NONDEGENERATE

    def to_json(self) -> dict:
        return {"status": self.status.value,
                "witness": list(self.witness) if self.witness is not None else None,
                "min_singular_value": self.min_singular_value,
                **self.detail}


def _pairing_matrix(cc: TwoCocycleZk, basis) -> list[list[Angle]]:
    """A[j][i] = angle of cc(g_i, g_j)."""
    return [[cc.angle(gi, gj) for gi in basis] for gj in basis]


def _combine(x: Sequence[int], basis) -> tuple[int, ...]:
    k = len(basis[0])
    return tuple(sum(int(xi) * g[t] for xi, g in zip(x, basis)) for t in range(k))


def _exact_kernel(cc: TwoCocycleZk, basis) -> list[tuple[int, ...]]:
    """Basis (in coordinates w.r.t. ``basis``) of {x : sum_i x_i A[j][i] in Z for all j}."""
    A = _pairing_matrix(cc, basis)
    q = 1
    for row in A:
        for a in row:
            q = lcm(q, a.denominator)
    B = Matrix([[int(a * q) for a in row] for row in A])
    D, S, T = smith_normal_decomp(B, domain=ZZ)
    l = len(basis)
    cols = []
    for i in range(l):
        d = int(D[i, i]) if i < min(D.shape) else 0
        step = q // gcd(d, q)
        cols.append([int(T[r, i]) * step for r in range(l)])
    H = hermite_normal_form(Matrix(cols).T)
    return [tuple(int(v) for v in H[:, j]) for j in range(H.shape[1])]


def is_nondegenerate_on(cc: TwoCocycleZk, P: ZkSubgroup) -> NondegeneracyResult:
    """Decide whether cc restricts to a nondegenerate bicharacter on P.

    ``cc`` must be skew-symmetric (typically ``c.cc_star()``).  Exact angles
    are decided with a Smith-normal-form kernel computation; a degenerate
    answer carries an explicit m in P with cc(m, n) = 1 for every n in P.
    Float angles that agree with a small-denominator rational to rounding
    error are treated as that rational; otherwise the smallest singular value
    of the real pairing matrix is compared against fixed thresholds.
    """
    if cc.k != P.k:
        raise DimensionMismatch(f"cocycle on Z^{cc.k} but subgroup of Z^{P.k}")
    if not cc.is_skew():
        raise NotSkewSymmetric("expected a skew-symmetric bicharacter")
    if P.rank == 0:
        return NondegeneracyResult(NondegeneracyStatus.NONDEGENERATE, detail={"reason": "trivial subgroup"})
    basis = list(P.basis)
    snapped = cc.snapped()
    if snapped.exact:
        kernel = [_combine(x, basis) for x in _exact_kernel(snapped, basis)]
        kernel = [m for m in kernel if any(m)]
        witness = _short_vector(kernel)
        assert all(is_zero_angle(snapped.angle(witness, g)) for g in basis)
        det = {"method": "exact", "kernel_basis": [list(m) for m in kernel]}
        if not cc.exact:
            det["snapped_theta"] = snapped.to_json()
        return NondegeneracyResult(NondegeneracyStatus.DEGENERATE, witness, None, det)

    A = np.array([[float(centered(a)) for a in row] for row in _pairing_matrix(cc, basis)])
    smin = float(np.linalg.svd(A, compute_uv=False).min())
    det = {"method": "singular_values"}
    if smin > INCONCLUSIVE_TOL:
        return NondegeneracyResult(NondegeneracyStatus.NONDEGENERATE, None, smin, det)
    if smin < DEGENERATE_TOL:
        w = _float_witness(cc, basis, A)
        if w is not None:
            return NondegeneracyResult(NondegeneracyStatus.DEGENERATE, w, smin, det)
    return NondegeneracyResult(NondegeneracyStatus.INCONCLUSIVE, None, smin, det)


def _short_vector(vectors: list[tuple[int, ...]]) -> tuple[int, ...]:
    """Shortest (L1, then lexicographic) nonzero combination with coefficients in {-1, 0, 1}."""
    best = None
    for coef in itertools.product((-1, 0, 1), repeat=len(vectors)):
        m = tuple(sum(c * v[t] for c, v in zip(coef, vectors)) for t in range(len(vectors[0])))
        if not any(m):
            continue
        key = (sum(abs(a) for a in m), tuple(-a for a in m))
        if best is None or key < best[0]:
            best = (key, m)
    return best[1]


def _float_witness(cc, basis, A, max_mult: int = 1000):
    _, _, vt = np.linalg.svd(A)
    v = vt[-1]
    v = v / np.abs(v).max()
    for mult in range(1, max_mult + 1):
        x = np.rint(v * mult).astype(int)
        if not x.any():
            continue
        m = _combine(x, basis)
        if any(m) and all(is_zero_angle(cc.angle(m, g), DEGENERATE_TOL) for g in basis):
            return m
    return None


# ---------------------------------------------------------------------------

class CategoricalCocycle:
    """Pullback of a bicharacter along the degree map, twisted by the
    coboundary of per-edge weights.

    value(mu, nu) = angle(d(mu), d(nu)) + b(mu) + b(nu) - b(mu nu), where b
    sums the edge weights along the normal-form word.
    """

    def __init__(self, graph: KGraph, base: TwoCocycleZk, edge_weights: Mapping[str, Angle] | None = None):
        if base.k != graph.rank:
            raise DimensionMismatch(f"cocycle on Z^{base.k} for a {graph.rank}-graph")
        self.graph = graph
        self.base = base
        self.edge_weights = {e: parse_angle(a) for e, a in (edge_weights or {}).items()}
        for e in self.edge_weights:
            if e not in graph.edges:
                raise SpecFormatError(f"edge weight for unknown edge {e!r}")
        self._cache: dict = {}

    @property
    def exact(self) -> bool:
        return self.base.exact and all(isinstance(a, Fraction) for a in self.edge_weights.values())

    def weight(self, lam: Path) -> Angle:
        s = Fraction(0) if self.exact else 0.0
        for e in lam.word:
            s += self.edge_weights.get(e, 0)
        return s

    def value(self, mu: Path, nu: Path) -> Angle:
        key = (mu, nu)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        a = self.base.angle(mu.degree, nu.degree)
        if self.edge_weights:
            a = a + self.weight(mu) + self.weight(nu) - self.weight(self.graph.compose(mu, nu))
        a = wrap(a)
        self._cache[key] = a
        return a

    def phase(self, mu: Path, nu: Path):
        return phase(self.value(mu, nu))

    def to_json(self) -> dict:
        return {"type": "bicharacter", "theta": self.base.to_json(),
                "edge_weights": {e: angle_to_str(a) for e, a in sorted(self.edge_weights.items())}}


def eval_categorical(c: CategoricalCocycle, mu: Path, nu: Path):
    return c.phase(mu, nu)


@dataclass
class CocycleCheck:
    ok: bool
    witness: dict | None = None
    triples_checked: int = 0


def validate_cocycle_identity(c, graph: KGraph, degree_bound: Sequence[int]) -> CocycleCheck:
    """Check the cocycle identity and normalisation on all composable triples
    with each factor of degree <= ``degree_bound``.

    ``c`` only needs a ``value(mu, nu)`` method returning an angle.
    """
    paths = graph.paths_upto(degree_bound)
    by_range: dict[str, list[Path]] = {}
    for p in paths:
        by_range.setdefault(p.range, []).append(p)
    for lam in paths:
        for v in (graph.vertex(lam.range),):
            if not is_zero_angle(c.value(v, lam)):
                return CocycleCheck(False, {"normalisation": [str(v), str(lam)]})
        if not is_zero_angle(c.value(lam, graph.vertex(lam.source))):
            return CocycleCheck(False, {"normalisation": [str(lam), lam.source]})
    n = 0
    for lam in paths:
        for mu in by_range.get(lam.source, []):
            lm = graph.compose(lam, mu)
            for nu in by_range.get(mu.source, []):
                n += 1
                lhs = c.value(lam, mu) + c.value(lm, nu)
                rhs = c.value(mu, nu) + c.value(lam, graph.compose(mu, nu))
                if not is_zero_angle(lhs - rhs):
                    return CocycleCheck(False, {"triple": [str(lam), str(mu), str(nu)]}, n)
    return CocycleCheck(True, None, n)
