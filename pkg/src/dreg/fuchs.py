"""One-variable regularity tests used to cross-check the main pipeline.

``fuchs_order_test`` is the classical pole-order condition on a scalar
operator; ``gr_rank_1d`` is the rank comparison for the all-ones initial
form.  ``line_regularity_oracle`` restricts the Pfaffian system of an ideal
to a line, turns it into a scalar operator with a cyclic vector and applies
the order test at the base point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .arith import MultiPoly, RationalFunction, to_rational
from .errors import CyclicVectorNotFound, LineInPolarLocus, NotFiniteRank, UsageError
from .rank import PfaffianSystem, holonomic_rank, pfaffian_system
from .weyl import DIdeal, WeylElement, initial_ideal

T = MultiPoly.variable(1, 0)


def _rf(c) -> RationalFunction:
    if isinstance(c, RationalFunction):
        if c.nvars != 1:
            raise UsageError("coefficients must be functions of one variable")
        return c
    if isinstance(c, MultiPoly):
        if c.nvars != 1:
            raise UsageError("coefficients must be functions of one variable")
        return RationalFunction.from_poly(c)
    return RationalFunction.constant(1, c)


class ScalarODEOperator:
    """``sum_i a_i(x) d^i`` with rational-function coefficients, ``a_r != 0``."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Sequence):
        coeffs = [_rf(c) for c in coefficients]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        if not coeffs:
            raise UsageError("zero operator")
        self.coefficients = tuple(coeffs)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def from_weyl(cls, P: WeylElement) -> "ScalarODEOperator":
        if P.nvars != 1:
            raise UsageError("expected an element of D_1")
        r = P.d_degree()
        coeffs = [dict() for _ in range(r + 1)]
        for (a, b), c in P.terms.items():
            coeffs[b[0]][a] = c
        return cls([MultiPoly(1, t) for t in coeffs])

    def cleared(self) -> "ScalarODEOperator":
        """Polynomial coefficients without common factor, up to a unit."""
        den = MultiPoly.one(1)
        for a in self.coefficients:
            d = a.den
            den = den * d.exquo(den.gcd(d))
        polys = [(a * RationalFunction.from_poly(den)).num for a in self.coefficients]
        g = MultiPoly.zero(1)
        for p in polys:
            if p:
                g = p if g.is_zero() else g.gcd(p)
        return ScalarODEOperator([p.exquo(g) for p in polys])

    def monic(self) -> "ScalarODEOperator":
        lead = self.coefficients[-1]
        return ScalarODEOperator([a / lead for a in self.coefficients])

    def to_weyl(self) -> WeylElement:
        """The cleared operator as an element of D_1."""
        terms = {}
        for i, a in enumerate(self.cleared().coefficients):
            for m, c in a.num.terms.items():
                terms[(m, (i,))] = c
        return WeylElement(1, terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, ScalarODEOperator) and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def to_str(self) -> str:
        parts = []
        for i in range(self.order, -1, -1):
            a = self.coefficients[i]
            if not a:
                continue
            d = "" if i == 0 else ("dt" if i == 1 else f"dt^{i}")
            coeff = a.to_str(["t"])
            if not d:
                parts.append(f"({coeff})")
            elif coeff == "1":
                parts.append(d)
            else:
                parts.append(f"({coeff})*{d}")
        return " + ".join(parts)

    __str__ = to_str

    def __repr__(self) -> str:
        return f"ScalarODEOperator({self.to_str()!r})"


def _poly_order_at(f: MultiPoly, p) -> int:
    shifted = f.compose([T + p])
    return min(m[0] for m in shifted.terms)


def order_at(a: RationalFunction, p) -> int | None:
    """Order of zero (positive) or pole (negative) of ``a`` at ``x = p``;
    ``None`` for the zero function."""
    if not a:
        return None
    p = to_rational(p)
    return _poly_order_at(a.num, p) - _poly_order_at(a.den, p)


def fuchs_order_test(P: ScalarODEOperator, p=0) -> bool:
    """``ord_p(a_i / a_r) >= -(r - i)`` for every nonzero ``a_i``."""
    r = P.order
    lead = P.coefficients[-1]
    for i, a in enumerate(P.coefficients):
        if a:
            if order_at(a / lead, p) < -(r - i):
                return False
    return True


def gr_rank_1d(P: WeylElement | ScalarODEOperator) -> tuple[int, bool]:
    """``(gr-rank, regular)`` for ``D_1 / D_1 P`` at the origin."""
    if isinstance(P, ScalarODEOperator):
        P = P.to_weyl()
    if P.nvars != 1 or not P:
        raise UsageError("expected a nonzero element of D_1")
    I = DIdeal(1, [P])
    gr = int(holonomic_rank(initial_ideal(I, (1,))))
    return gr, gr == int(holonomic_rank(I))


# --------------------------------------------------------------------------
# restriction to a line


@dataclass
class LineRestriction:
    """``d/dt F = A(t) F`` along ``x = p + t v``."""

    base_point: tuple
    direction: tuple
    matrix: list[list[RationalFunction]]

    @property
    def rank(self) -> int:
        return len(self.matrix)


def _restrict(a: RationalFunction, images: Sequence[MultiPoly]) -> RationalFunction:
    den = a.den.compose(images)
    if den.is_zero():
        raise LineInPolarLocus("a connection denominator vanishes on the whole line")
    return RationalFunction(a.num.compose(images), den)


def restrict_to_line(system: PfaffianSystem, p: Sequence, v: Sequence) -> LineRestriction:
    n = system.nvars
    p = tuple(to_rational(c) for c in p)
    v = tuple(to_rational(c) for c in v)
    if len(p) != n or len(v) != n:
        raise UsageError(f"point and direction need {n} coordinates")
    if not any(v):
        raise UsageError("direction must be nonzero")
    images = [T * vi + pi for pi, vi in zip(p, v)]
    r = system.rank
    A = [[RationalFunction.constant(1, 0) for _ in range(r)] for _ in range(r)]
    for i in range(n):
        if not v[i]:
            continue
        for a in range(r):
            for b in range(r):
                entry = system.matrices[i][a][b]
                if entry:
                    A[a][b] = A[a][b] + _restrict(entry, images) * v[i]
    return LineRestriction(p, v, A)


# --------------------------------------------------------------------------
# cyclic vectors


def _solve_left(rows: list[list[RationalFunction]], target: list[RationalFunction]):
    """``lam`` with ``sum_k lam_k rows[k] = target``, or ``None`` when the
    rows are dependent."""
    r = len(rows)
    # columns of the augmented system M^T lam = target
    aug = [[rows[k][j] for k in range(r)] + [target[j]] for j in range(len(target))]
    row = 0
    for col in range(r):
        pivot = next((i for i in range(row, len(aug)) if aug[i][col]), None)
        if pivot is None:
            return None
        aug[row], aug[pivot] = aug[pivot], aug[row]
        inv = aug[row][col].inverse()
        aug[row] = [e * inv for e in aug[row]]
        for i in range(len(aug)):
            if i != row and aug[i][col]:
                f = aug[i][col]
                aug[i] = [e - f * g for e, g in zip(aug[i], aug[row])]
        row += 1
    return [aug[k][r] for k in range(r)]


def _iterate(c0: list[RationalFunction], A) -> list[list[RationalFunction]]:
    r = len(A)
    out = [c0]
    for _ in range(r):
        c = out[-1]
        nxt = []
        for j in range(r):
            acc = c[j].diff(0)
            for k in range(r):
                if c[k] and A[k][j]:
                    acc = acc + c[k] * A[k][j]
            nxt.append(acc)
        out.append(nxt)
    return out


def cyclic_vector_scalarize(L: LineRestriction, seed: int = 0,
                            attempts: int = 32) -> ScalarODEOperator:
    """Scalar operator annihilating ``c . F`` for a cyclic row vector ``c``.

    Tries the unit vectors first, then seeded random rational combinations.
    """
    r = L.rank
    if r < 1:
        raise UsageError("empty system")
    zero = RationalFunction.constant(1, 0)
    one = RationalFunction.constant(1, 1)
    candidates = [[one if j == i else zero for j in range(r)] for i in range(r)]
    rng = random.Random(f"cyclic:{seed}")
    for _ in range(attempts):
        candidates.append([RationalFunction.constant(1, rng.randint(-9, 9)) for _ in range(r)])
    for c0 in candidates:
        if not any(c0):
            continue
        cs = _iterate(c0, L.matrix)
        lam = _solve_left(cs[:r], cs[r])
        if lam is None:
            continue
        return ScalarODEOperator([-x for x in lam] + [one])
    raise CyclicVectorNotFound(f"no cyclic vector among {len(candidates)} candidates")


# --------------------------------------------------------------------------
# the oracle


def _gradient_at(f: MultiPoly, p: Sequence) -> list:
    return [f.diff(i).evaluate(p) for i in range(f.nvars)]


def transversal(f: MultiPoly, p: Sequence, v: Sequence) -> bool:
    """``v . grad f(p) != 0``."""
    return sum(g * to_rational(c) for g, c in zip(_gradient_at(f, p), v)) != 0


def line_regularity_oracle(I: DIdeal, p: Sequence, v: Sequence | None = None, *,
                           component: MultiPoly | None = None, seed: int = 0,
                           attempts: int = 20) -> bool:
    """Regularity at ``t = 0`` of the restriction of ``I`` to ``p + t v``.

    With ``component`` given, every direction tried must be transversal to
    it at ``p``; a tangent ``v`` is an error.  Directions inside the polar
    locus are replaced by seeded random ones.
    """
    n = I.nvars
    p = tuple(to_rational(c) for c in p)
    if not holonomic_rank(I).is_finite:
        raise NotFiniteRank("holonomic rank is infinite")
    system = pfaffian_system(I)
    rng = random.Random(f"line:{seed}")
    directions = [] if v is None else [tuple(to_rational(c) for c in v)]
    if v is not None and component is not None and not transversal(component, p, directions[0]):
        raise UsageError(f"direction {list(map(str, directions[0]))} is tangent to "
                         f"V({component.to_str()}) at the base point")
    while len(directions) < attempts + (v is not None):
        directions.append(tuple(mpq(rng.randint(-5, 5)) for _ in range(n)))
    last: Exception | None = None
    for d in directions:
        if not any(d):
            continue
        if component is not None and not transversal(component, p, d):
            continue
        try:
            L = restrict_to_line(system, p, d)
        except LineInPolarLocus as exc:
            last = exc
            continue
        return fuchs_order_test(cyclic_vector_scalarize(L, seed), 0)
    raise last or UsageError("no admissible direction found")
