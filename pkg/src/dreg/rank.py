"""Holonomic rank, characteristic ideals, singular loci and Pfaffian systems."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from . import buchberger as bb
from .arith import (CommutativeIdeal, MonomialOrder, MultiPoly, RationalFunction,
                    groebner_commutative, saturate_and_eliminate, squarefree_factors)
from .errors import NotFiniteRank, UsageError
from .weyl import (DIdeal, WeylElement, _degrevlex_key, to_rational_operator_terms,
                   weyl_gb_dicts)


class _RationalWeylAlgebra:
    """Adapter for :mod:`buchberger`: monomials are ∂-exponents, coefficients
    are rational functions written to the left."""

    commutative = False

    def __init__(self, n: int):
        self.n = n
        self.key = _degrevlex_key

    def left_mul(self, g: tuple, f: dict) -> dict:
        n = self.n
        out: dict = {}
        zero = (0,) * n
        boxes = list(itertools.product(*(range(e + 1) for e in g)))
        binoms = {k: _multi_comb(g, k) for k in boxes}
        for beta, a in f.items():
            derivs = {zero: a}
            for k in boxes:
                if k != zero:
                    i = max(j for j in range(n) if k[j])
                    prev = k[:i] + (k[i] - 1,) + k[i + 1:]
                    d = derivs[prev]
                    derivs[k] = d.diff(i) if d else d
                d = derivs[k]
                if not d:
                    continue
                mono = tuple(b + e - kk for b, e, kk in zip(beta, g, k))
                term = d * binoms[k] if binoms[k] != 1 else d
                v = out.get(mono)
                v = term if v is None else v + term
                if v:
                    out[mono] = v
                else:
                    out.pop(mono, None)
        return out


def _multi_comb(g, k) -> int:
    out = 1
    for a, b in zip(g, k):
        out *= comb(a, b)
    return out


class RationalOperator:
    """Element ``sum a_beta(x) d^beta`` of the rational Weyl algebra."""

    __slots__ = ("nvars", "_t")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self._t = {tuple(b): c for b, c in (terms or {}).items() if c}

    @classmethod
    def from_weyl(cls, P: WeylElement) -> "RationalOperator":
        return cls(P.nvars, to_rational_operator_terms(P))

    @property
    def terms(self) -> dict:
        return dict(self._t)

    def __bool__(self) -> bool:
        return bool(self._t)

    def __add__(self, other: "RationalOperator") -> "RationalOperator":
        t = dict(self._t)
        for m, c in other._t.items():
            v = t[m] + c if m in t else c
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return RationalOperator(self.nvars, t)

    def __neg__(self):
        return RationalOperator(self.nvars, {m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RationalOperator):
            alg = _RationalWeylAlgebra(self.nvars)
            out = RationalOperator(self.nvars)
            for m, c in self._t.items():
                prod = alg.left_mul(m, other._t)
                out = out + RationalOperator(self.nvars, {k: c * v for k, v in prod.items()})
            return out
        return RationalOperator(self.nvars, {m: c * other for m, c in self._t.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalOperator) and self._t == other._t

    def leading_monomial(self) -> tuple:
        return max(self._t, key=_degrevlex_key)

    def to_str(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for b in sorted(self._t, key=_degrevlex_key, reverse=True):
            mono = "*".join(f"dx{i + 1}" if e == 1 else f"dx{i + 1}^{e}" for i, e in enumerate(b) if e)
            coeff = self._t[b].to_str()
            if not mono:
                parts.append(f"({coeff})")
            elif coeff == "1":
                parts.append(mono)
            else:
                parts.append(f"({coeff})*{mono}")
        return " + ".join(parts)

    __str__ = to_str

    def __repr__(self) -> str:
        return f"RationalOperator({self.nvars}, {self.to_str()!r})"


INFINITE = "INFINITE"


@dataclass(frozen=True)
class RankResult:
    value: int | str

    @property
    def is_finite(self) -> bool:
        return self.value != INFINITE

    def __int__(self) -> int:
        if not self.is_finite:
            raise NotFiniteRank("not of finite rank over ℂ(x)")
        return int(self.value)

    def __eq__(self, other) -> bool:
        if isinstance(other, RankResult):
            return self.value == other.value
        return self.value == other


def rational_weyl_gb(I: DIdeal, budget: bb.Budget | None = None) -> list[RationalOperator]:
    """Reduced Gröbner basis of ``R_n * I`` (monic, degrevlex on ∂)."""
    n = I.nvars

    def compute():
        gens = [to_rational_operator_terms(g) for g in I.generators]
        alg = _RationalWeylAlgebra(n)
        gb = bb.groebner(gens, alg, budget=budget or bb.Budget())
        return tuple(RationalOperator(n, g) for g in gb)

    return list(I.cached(("R",), compute))


def standard_monomials(n: int, leading: Sequence[tuple]) -> list[tuple] | None:
    """∂-monomials outside the monomial ideal, ascending; ``None`` if infinite."""
    bounds = []
    for i in range(n):
        pure = [m[i] for m in leading if all(m[j] == 0 for j in range(n) if j != i)]
        if not pure:
            return None
        bounds.append(min(pure))
    out = [m for m in itertools.product(*(range(b) for b in bounds))
           if not any(bb.mono_divides(lm, m) for lm in leading)]
    return sorted(out, key=_degrevlex_key)


def holonomic_rank(I: DIdeal, budget: bb.Budget | None = None) -> RankResult:
    gb = rational_weyl_gb(I, budget)
    lms = [g.leading_monomial() for g in gb]
    std = standard_monomials(I.nvars, lms)
    return RankResult(INFINITE if std is None else len(std))


def characteristic_ideal(I: DIdeal, budget: bb.Budget | None = None) -> CommutativeIdeal:
    """Principal symbols of a ``(0, e)``-Gröbner basis, in ``Q[x, xi]``."""
    n = I.nvars

    def compute():
        gb = weyl_gb_dicts(n, [g._t for g in I.generators], (0,) * n, (1,) * n, False, budget)
        symbols = []
        for g in gb:
            top = max(sum(m[n:]) for m in g)
            symbols.append(MultiPoly(2 * n, {m: c for m, c in g.items() if sum(m[n:]) == top}))
        return CommutativeIdeal(2 * n, symbols)

    return I.cached(("Ch",), compute)


@dataclass
class SingularLocus:
    """Codimension-one components plus the deeper strata to be avoided.

    Each entry of ``deeper`` is a list of polynomials cutting out a closed
    set of codimension at least two; generic points must not be common
    zeros of any of those lists.
    """

    codim1: list[MultiPoly]
    may_have_deeper: bool
    deeper: list[list[MultiPoly]] = field(default_factory=list)
    ideal: CommutativeIdeal | None = None

    def __iter__(self):
        # unpacks as (codim1, flag)
        return iter((self.codim1, self.may_have_deeper))


_STRATA_SEED = 20240917


def singular_locus(I: DIdeal, budget: bb.Budget | None = None) -> SingularLocus:
    """Codimension-one part of ``pi(Ch \\ zero section)``.

    The hypersurface part is the gcd of the eliminated ideal.  Deeper strata
    come from two places: the cofactor ideal left after dividing out that
    gcd, and the components of ``Ch`` that are neither the zero section nor
    a conormal of a codimension-one component.
    """
    n = I.nvars

    def compute():
        ch = characteristic_ideal(I, budget)
        xis = range(n, 2 * n)
        elim = saturate_and_eliminate(ch, xis, xis, budget)
        gens = [g.truncate(n) for g in elim.generators]
        ideal = CommutativeIdeal(n, gens)
        if not gens:
            return SingularLocus([], True, [], ideal)
        if any(g.is_constant() for g in gens):
            return SingularLocus([], False, [], ideal)
        f = gens[0]
        for g in gens[1:]:
            f = f.gcd(g)
        codim1 = [] if f.is_constant() else [h for h, _ in squarefree_factors(f)]
        deeper = []
        rest = [g.exquo(f) for g in gens]
        if not any(r.is_constant() for r in rest):
            deeper.append([r.primitive() for r in rest])
        extra = _non_conormal_projection(ch, codim1, budget)
        if extra:
            deeper.append(extra)
        return SingularLocus(codim1, bool(deeper), deeper, ideal)

    return I.cached(("Sing",), compute)


def _non_conormal_projection(ch: CommutativeIdeal, codim1: Sequence[MultiPoly],
                             budget: bb.Budget | None) -> list[MultiPoly]:
    """Generators of the projection of the components of ``Ch`` other than
    the zero section and the conormals of ``codim1``; ``[]`` if none.

    Each discarded component lies in the zero set of one polynomial: a
    generic linear form in ``xi`` for the zero section and a generic
    combination of the minors ``xi_i df/dx_j - xi_j df/dx_i`` for the
    conormal of ``V(f)`` (``f`` itself when ``n = 1``).  Saturating by
    their product and eliminating ``xi`` leaves the rest.  Components lying over the singular points of a
    hypersurface are discarded too; generic points avoid those separately.
    """
    n2 = ch.nvars
    n = n2 // 2
    rng = random.Random(_STRATA_SEED)
    xi = [MultiPoly.variable(n2, n + i) for i in range(n)]
    S = MultiPoly.zero(n2)
    for v in xi:
        S = S + rng.randint(1, 97) * v
    for f in codim1:
        F = f.embed(n2, list(range(n)))
        grad = [F.diff(i) for i in range(n)]
        q = MultiPoly.zero(n2)
        for i in range(n):
            for j in range(i + 1, n):
                q = q + rng.randint(1, 97) * (xi[i] * grad[j] - xi[j] * grad[i])
        # in one variable the conormal of a point is its whole fibre
        S = S * (q if n > 1 else F)
    t = MultiPoly.variable(n2 + 1, n2)
    gens = [g.extend(1) for g in ch.generators] + [1 - t * S.extend(1)]
    drop = set(range(n, n2)) | {n2}
    gb = groebner_commutative(gens, MonomialOrder.elimination(n2 + 1, drop), budget)
    out = [_drop_xi(g, n) for g in gb
           if not any(g.degree(v) > 0 for v in drop)]
    if not out or any(g.is_constant() for g in out):
        return []
    return [g.primitive() for g in out]


def _drop_xi(g: MultiPoly, n: int) -> MultiPoly:
    return MultiPoly(n, {m[:n]: c for m, c in g.terms.items()})


@dataclass
class PfaffianSystem:
    """``d_i F = A_i F`` for ``F = (d^s f)_{s in basis}``."""

    nvars: int
    basis: list[tuple]
    matrices: list[list[list[RationalFunction]]]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def integrability_defects(self) -> list[tuple[int, int]]:
        """Pairs ``(i, j)`` violating ``d_i A_j - d_j A_i = A_i A_j - A_j A_i``."""
        bad = []
        r = self.rank
        A = self.matrices
        for i in range(self.nvars):
            for j in range(i + 1, self.nvars):
                lhs = mat_sub(mat_diff(A[j], i), mat_diff(A[i], j))
                rhs = mat_sub(mat_mul(A[i], A[j]), mat_mul(A[j], A[i]))
                if any(lhs[a][b] != rhs[a][b] for a in range(r) for b in range(r)):
                    bad.append((i, j))
        return bad

    def is_integrable(self) -> bool:
        return not self.integrability_defects()


def mat_mul(A, B):
    r = len(A)
    m = len(B[0]) if B else 0
    zero = A[0][0] * 0 if A and A[0] else 0
    out = []
    for i in range(r):
        row = []
        for j in range(m):
            acc = zero
            for k in range(len(B)):
                if A[i][k] and B[k][j]:
                    acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_diff(A, i):
    return [[a.diff(i) for a in row] for row in A]


def pfaffian_system(I: DIdeal, budget: bb.Budget | None = None) -> PfaffianSystem:
    n = I.nvars
    gb = rational_weyl_gb(I, budget)
    std = standard_monomials(n, [g.leading_monomial() for g in gb])
    if std is None:
        raise NotFiniteRank("not of finite rank over ℂ(x)")
    index = {s: k for k, s in enumerate(std)}
    alg = _RationalWeylAlgebra(n)
    polys = [g._t for g in gb]
    zero = RationalFunction.constant(n, 0)
    mats = []
    for i in range(n):
        A = []
        for s in std:
            t = tuple(e + (1 if j == i else 0) for j, e in enumerate(s))
            nf = bb.reduce({t: RationalFunction.constant(n, 1)}, polys, alg)
            row = [zero] * len(std)
            for m, c in nf.items():
                if m not in index:
                    raise UsageError("normal form left the standard monomials")
                row[index[m]] = c
            A.append(row)
        mats.append(A)
    return PfaffianSystem(n, std, mats)


def reduce_rational(P: RationalOperator, gb: Sequence[RationalOperator]) -> RationalOperator:
    alg = _RationalWeylAlgebra(P.nvars)
    return RationalOperator(P.nvars, bb.reduce(P._t, [g._t for g in gb], alg))
