"""Exact rational, polynomial and rational-function arithmetic.

Coefficients are ``gmpy2.mpq``.  :class:`MultiPoly` wraps a sparse sympy
``PolyElement`` (whose ground type is the same ``mpq``), so gcd and
squarefree decomposition come from sympy while Gröbner bases, orders,
saturation and root finding live here.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from gmpy2 import mpq, mpz
from sympy.ntheory import divisors
from sympy.polys.domains import QQ
from sympy.polys.orderings import grevlex
from sympy.polys.rings import PolyRing

from . import buchberger as bb
from .errors import UsageError

Rational = mpq


def to_rational(value) -> mpq:
    """Coerce ints, Fractions, mpq and strings like ``"-3/4"`` to ``mpq``."""
    if isinstance(value, type(mpq())):
        return value
    if isinstance(value, (int, type(mpz()))):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            p, q = text.split("/", 1)
            q = int(q)
            if q == 0:
                raise UsageError(f"zero denominator in {value!r}")
            return mpq(int(p), q)
        return mpq(int(text))
    raise UsageError(f"cannot interpret {value!r} as an exact rational")


def format_rational(q) -> str:
    q = to_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------------
# monomial orders


class MonomialOrder:
    """A monomial order given by an integer weight matrix.

    Monomials are compared by the vector of dot products with the rows,
    lexicographically.  The matrix must have full column rank and a
    non-negative first non-zero entry in every column so that the order is
    a well-order.
    """

    def __init__(self, name: str, matrix: Sequence[Sequence[int]]):
        self.name = name
        self.matrix = tuple(tuple(int(v) for v in row) for row in matrix)
        rows = self.matrix
        self.key = lru_cache(maxsize=None)(
            lambda m: tuple(sum(r * e for r, e in zip(row, m) if r) for row in rows))

    def __repr__(self) -> str:
        return f"MonomialOrder({self.name!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, MonomialOrder) and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    @classmethod
    def degrevlex(cls, n: int) -> "MonomialOrder":
        return _degrevlex(n)

    @classmethod
    def _make_degrevlex(cls, n: int) -> "MonomialOrder":
        rows = [[1] * n]
        for i in range(n - 1, 0, -1):
            rows.append([-1 if j == i else 0 for j in range(n)])
        return cls("degrevlex", rows)

    @classmethod
    def lex(cls, n: int) -> "MonomialOrder":
        return cls("lex", [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def elimination(cls, n: int, block: Iterable[int]) -> "MonomialOrder":
        """Eliminates the variables in ``block`` (0-based), degrevlex inside."""
        block = set(block)
        first = [1 if j in block else 0 for j in range(n)]
        return cls(f"elim{sorted(block)}", [first] + list(cls.degrevlex(n).matrix))

    @classmethod
    def weighted(cls, weights: Sequence[int], tie: "MonomialOrder") -> "MonomialOrder":
        return cls(f"weight{tuple(weights)}+{tie.name}", [list(weights)] + list(tie.matrix))


@lru_cache(maxsize=None)
def _degrevlex(n: int) -> MonomialOrder:
    return MonomialOrder._make_degrevlex(n)


def parse_order(spec, n: int) -> MonomialOrder:
    if isinstance(spec, MonomialOrder):
        return spec
    if spec == "degrevlex":
        return MonomialOrder.degrevlex(n)
    if spec == "lex":
        return MonomialOrder.lex(n)
    raise UsageError(f"unknown monomial order {spec!r}")


# --------------------------------------------------------------------------
# polynomials


@lru_cache(maxsize=None)
def poly_ring(n: int) -> PolyRing:
    names = ",".join(f"x{i + 1}" for i in range(n)) if n else ""
    if n == 0:
        return PolyRing("_z", QQ, grevlex)
    return PolyRing(names, QQ, grevlex)


def default_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]


class MultiPoly:
    """Sparse polynomial in ``nvars`` variables with rational coefficients.

    Values are immutable by convention.  Exponent vectors are tuples of
    length ``nvars``; coefficients are ``mpq``.
    """

    __slots__ = ("nvars", "_p")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        ring = poly_ring(nvars)
        if not terms:
            self._p = ring.zero
        else:
            clean = {}
            for m, c in terms.items():
                m = tuple(int(e) for e in m)
                if len(m) != nvars or min(m, default=0) < 0:
                    raise UsageError(f"bad exponent vector {m} for {nvars} variables")
                c = to_rational(c)
                if c:
                    clean[m] = c
            self._p = ring.from_dict(clean) if clean else ring.zero

    @classmethod
    def _wrap(cls, nvars: int, p) -> "MultiPoly":
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._p = p
        return obj

    def __reduce__(self):
        # sympy rings do not pickle reliably; rebuild from the term dict
        return (MultiPoly, (self.nvars, self.terms))

    @classmethod
    def constant(cls, nvars: int, c) -> "MultiPoly":
        c = to_rational(c)
        return cls(nvars, {(0,) * nvars: c} if c else None)

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPoly":
        m = [0] * nvars
        m[i] = 1
        return cls(nvars, {tuple(m): 1})

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def one(cls, nvars: int) -> "MultiPoly":
        return cls.constant(nvars, 1)

    # -- structure ---------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._p)

    def is_zero(self) -> bool:
        return not self._p

    def __bool__(self) -> bool:
        return bool(self._p)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._p)

    def constant_value(self) -> mpq:
        return self._p.get((0,) * self.nvars, mpq(0))

    def total_degree(self) -> int:
        if not self._p:
            return -1
        return max(sum(m) for m in self._p)

    def degree(self, i: int) -> int:
        if not self._p:
            return -1
        return max(m[i] for m in self._p)

    def support_vars(self) -> list[int]:
        return [i for i in range(self.nvars) if any(m[i] for m in self._p)]

    def leading_term(self, order: MonomialOrder | None = None) -> tuple[tuple, mpq]:
        key = (order or MonomialOrder.degrevlex(self.nvars)).key
        m = max(self._p, key=key)
        return m, self._p[m]

    def sorted_terms(self, order: MonomialOrder | None = None) -> list[tuple[tuple, mpq]]:
        key = (order or MonomialOrder.degrevlex(self.nvars)).key
        return sorted(self._p.items(), key=lambda t: key(t[0]), reverse=True)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise UsageError("polynomials live in rings of different dimension")
            return other
        return MultiPoly.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        return MultiPoly._wrap(self.nvars, self._p + other._p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return MultiPoly._wrap(self.nvars, self._p - other._p)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return MultiPoly._wrap(self.nvars, -self._p)

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            other = self._coerce(other)
            return MultiPoly._wrap(self.nvars, self._p * other._p)
        c = to_rational(other)
        return MultiPoly._wrap(self.nvars, self._p * c if c else self._p.ring.zero)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise UsageError("negative polynomial power")
        return MultiPoly._wrap(self.nvars, self._p ** k)

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._p == other._p
        if isinstance(other, (int, mpq, Fraction)):
            return self._p == self._p.ring(to_rational(other))
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._p.items())))

    def exquo(self, other: "MultiPoly") -> "MultiPoly":
        """Exact division; raises if ``other`` does not divide ``self``."""
        other = self._coerce(other)
        q, r = self._p.div(other._p)
        if r:
            raise UsageError("inexact polynomial division")
        return MultiPoly._wrap(self.nvars, q)

    def divides(self, other: "MultiPoly") -> bool:
        other = self._coerce(other)
        return not other._p.rem(self._p)

    def gcd(self, other: "MultiPoly") -> "MultiPoly":
        other = self._coerce(other)
        return MultiPoly._wrap(self.nvars, self._p.gcd(other._p))

    def diff(self, i: int) -> "MultiPoly":
        p = self._p
        return MultiPoly._wrap(self.nvars, p.diff(p.ring.gens[i]))

    def primitive(self) -> "MultiPoly":
        """Scale to coprime integer coefficients with positive leading coefficient."""
        if not self._p:
            return self
        den = 1
        num = 0
        from math import gcd, lcm
        for c in self._p.values():
            den = lcm(den, int(c.denominator))
        for c in self._p.values():
            num = gcd(num, int(c.numerator * (den // c.denominator)))
        scale = mpq(den, num)
        _, lc = self.leading_term()
        if lc < 0:
            scale = -scale
        return self * scale

    def monic(self, order: MonomialOrder | None = None) -> "MultiPoly":
        _, lc = self.leading_term(order)
        return self * (1 / lc)

    # -- evaluation and substitution --------------------------------------

    def evaluate(self, point: Sequence) -> mpq:
        if len(point) != self.nvars:
            raise UsageError("point length does not match the number of variables")
        vals = [to_rational(v) for v in point]
        total = mpq(0)
        for m, c in self._p.items():
            t = c
            for v, e in zip(vals, m):
                if e:
                    t *= v ** e
            total += t
        return total

    def substitute(self, i: int, value) -> "MultiPoly":
        """Replace variable ``i`` by a rational constant, keeping ``nvars``."""
        value = to_rational(value)
        out: dict = {}
        for m, c in self._p.items():
            e = m[i]
            m2 = m[:i] + (0,) + m[i + 1:]
            out[m2] = out.get(m2, 0) + c * value ** e
        return MultiPoly(self.nvars, out)

    def compose(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute ``x_i -> images[i]`` (images may live in another ring)."""
        if len(images) != self.nvars:
            raise UsageError("wrong number of images in substitution")
        if not images:
            return self
        m = images[0].nvars
        result = MultiPoly.zero(m)
        powers: dict = {}
        for mono, c in self._p.items():
            t = MultiPoly.constant(m, c)
            for i, e in enumerate(mono):
                if e:
                    if (i, e) not in powers:
                        powers[(i, e)] = images[i] ** e
                    t = t * powers[(i, e)]
            result = result + t
        return result

    def extend(self, extra: int) -> "MultiPoly":
        """Embed into a ring with ``extra`` additional trailing variables."""
        return MultiPoly(self.nvars + extra, {m + (0,) * extra: c for m, c in self._p.items()})

    def embed(self, nvars: int, positions: Sequence[int]) -> "MultiPoly":
        """Map variable ``i`` to variable ``positions[i]`` of an ``nvars`` ring."""
        out = {}
        for m, c in self._p.items():
            m2 = [0] * nvars
            for i, e in enumerate(m):
                m2[positions[i]] += e
            out[tuple(m2)] = c
        return MultiPoly(nvars, out)

    def truncate(self, nvars: int) -> "MultiPoly":
        """Drop trailing variables, which must not occur."""
        out = {}
        for m, c in self._p.items():
            if any(m[nvars:]):
                raise UsageError("cannot drop a variable that occurs")
            out[m[:nvars]] = c
        return MultiPoly(nvars, out)

    # -- printing ----------------------------------------------------------

    def to_str(self, names: Sequence[str] | None = None) -> str:
        names = names or default_names(self.nvars)
        if not self._p:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e)
            parts.append(_signed_term(c, mono))
        return _join_terms(parts)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"MultiPoly({self.nvars}, {self.to_str()!r})"


def _signed_term(c, mono: str) -> tuple[bool, str]:
    neg = c < 0
    a = -c if neg else c
    if not mono:
        body = format_rational(a)
    elif a == 1:
        body = mono
    else:
        body = f"{format_rational(a)}*{mono}"
    return neg, body


def _join_terms(parts: list[tuple[bool, str]]) -> str:
    out = []
    for k, (neg, body) in enumerate(parts):
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


# --------------------------------------------------------------------------
# rational functions


class RationalFunction:
    """Reduced fraction ``num/den`` with ``den`` monic under degrevlex."""

    __slots__ = ("nvars", "_n", "_d")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None):
        if den is None:
            den = MultiPoly.one(num.nvars)
        if num.nvars != den.nvars:
            raise UsageError("numerator and denominator in different rings")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        self.nvars = num.nvars
        self._n, self._d = _normalize(num._p, den._p)

    @classmethod
    def _wrap(cls, nvars, n, d) -> "RationalFunction":
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._n = n
        obj._d = d
        return obj

    def __reduce__(self):
        return (RationalFunction, (self.num, self.den))

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "RationalFunction":
        return cls._wrap(p.nvars, p._p, p._p.ring.one)

    @classmethod
    def constant(cls, nvars: int, c) -> "RationalFunction":
        return cls.from_poly(MultiPoly.constant(nvars, c))

    @property
    def num(self) -> MultiPoly:
        return MultiPoly._wrap(self.nvars, self._n)

    @property
    def den(self) -> MultiPoly:
        return MultiPoly._wrap(self.nvars, self._d)

    numerator = num
    denominator = den

    def __bool__(self) -> bool:
        return bool(self._n)

    def is_polynomial(self) -> bool:
        return self._d == self._d.ring.one

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, MultiPoly):
            return RationalFunction.from_poly(other)
        c = to_rational(other)
        ring = self._n.ring
        return RationalFunction._wrap(self.nvars, ring(c), ring.one)

    def __add__(self, other):
        o = self._coerce(other)
        a, b, c, d = self._n, self._d, o._n, o._d
        if not a:
            return o
        if not c:
            return self
        if b == d:
            return RationalFunction._wrap(self.nvars, *_normalize(a + c, b))
        return RationalFunction._wrap(self.nvars, *_normalize(a * d + c * b, b * d))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._wrap(self.nvars, -self._n, self._d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (RationalFunction, MultiPoly)):
            c = to_rational(other)
            if not c:
                return RationalFunction._wrap(self.nvars, self._n.ring.zero, self._d.ring.one)
            return RationalFunction._wrap(self.nvars, self._n * c, self._d)
        o = self._coerce(other)
        a, b, c, d = self._n, self._d, o._n, o._d
        if not a or not c:
            return RationalFunction._wrap(self.nvars, a.ring.zero, a.ring.one)
        one = a.ring.one
        if b == one and d == one:
            return RationalFunction._wrap(self.nvars, a * c, one)
        g1 = a.gcd(d) if d != one else one
        g2 = c.gcd(b) if b != one else one
        if g1 != one:
            a, d = a.exquo(g1), d.exquo(g1)
        if g2 != one:
            c, b = c.exquo(g2), b.exquo(g2)
        n, dd = a * c, b * d
        lc = dd.LC
        if lc != 1:
            n, dd = n * (1 / lc), dd * (1 / lc)
        return RationalFunction._wrap(self.nvars, n, dd)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self._n:
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction._wrap(self.nvars, *_normalize(self._d, self._n))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalFunction):
            return self._n == other._n and self._d == other._d
        if isinstance(other, (MultiPoly, int, mpq, Fraction)):
            o = self._coerce(other)
            return self._n == o._n and self._d == o._d
        return NotImplemented

    def __hash__(self) -> int:
        return hash((frozenset(self._n.items()), frozenset(self._d.items())))

    def diff(self, i: int) -> "RationalFunction":
        x = self._n.ring.gens[i]
        n, d = self._n, self._d
        dn = n.diff(x)
        if d == d.ring.one:
            return RationalFunction._wrap(self.nvars, dn, d)
        dd = d.diff(x)
        return RationalFunction._wrap(self.nvars, *_normalize(dn * d - n * dd, d * d))

    def evaluate(self, point: Sequence) -> mpq:
        den = self.den.evaluate(point)
        if den == 0:
            raise ZeroDivisionError("rational function evaluated at a pole")
        return self.num.evaluate(point) / den

    def compose(self, images: Sequence) -> "RationalFunction":
        """Substitute ``x_i -> images[i]`` for rational-function images."""
        return _compose_poly(self.num, images) / _compose_poly(self.den, images)

    def to_str(self, names: Sequence[str] | None = None) -> str:
        num = self.num.to_str(names)
        if self.is_polynomial():
            return num
        den = self.den.to_str(names)
        if len(self._n) > 1:
            num = f"({num})"
        if len(self._d) > 1 or any(sum(m) > 1 for m in self._d):
            den = f"({den})"
        return f"{num}/{den}"

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"RationalFunction({self.to_str()!r})"


def _normalize(n, d):
    ring = n.ring
    if not n:
        return ring.zero, ring.one
    if d != ring.one:
        g = n.gcd(d)
        if g != ring.one:
            n, d = n.exquo(g), d.exquo(g)
    lc = d.LC
    if lc != 1:
        inv = 1 / lc
        n, d = n * inv, d * inv
    return n, d


def _compose_poly(p: MultiPoly, images: Sequence[RationalFunction]) -> RationalFunction:
    if not images:
        raise UsageError("empty substitution")
    m = images[0].nvars
    total = RationalFunction.constant(m, 0)
    powers: dict = {}
    for mono, c in p.terms.items():
        t = RationalFunction.constant(m, c)
        for i, e in enumerate(mono):
            if e:
                if (i, e) not in powers:
                    acc = RationalFunction.constant(m, 1)
                    for _ in range(e):
                        acc = acc * images[i]
                    powers[(i, e)] = acc
                t = t * powers[(i, e)]
        total = total + t
    return total


# --------------------------------------------------------------------------
# commutative Gröbner machinery


class _CommutativeAlgebra:
    commutative = True

    def __init__(self, order: MonomialOrder):
        self.order = order
        self.key = order.key

    @staticmethod
    def left_mul(m: tuple, f: dict) -> dict:
        return {tuple(a + b for a, b in zip(m, e)): c for e, c in f.items()}


class CommutativeIdeal:
    """Ideal of ``Q[x_1..x_n]`` given by generators."""

    def __init__(self, nvars: int, generators: Iterable[MultiPoly]):
        self.nvars = nvars
        gens = []
        for g in generators:
            if g.nvars != nvars:
                raise UsageError("generator lives in a ring of different dimension")
            if g:
                gens.append(g)
        self.generators = tuple(gens)
        self._gb: dict = {}

    def groebner(self, order=None) -> list[MultiPoly]:
        order = parse_order(order or "degrevlex", self.nvars)
        if order not in self._gb:
            self._gb[order] = groebner_commutative(self.generators, order)
        return self._gb[order]

    def is_unit(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb[0].is_constant()

    def contains(self, f: MultiPoly) -> bool:
        return normal_form(f, self.groebner(), "degrevlex").is_zero()

    def __repr__(self) -> str:
        return f"CommutativeIdeal({self.nvars}, [{', '.join(map(str, self.generators))}])"


def groebner_commutative(generators: Iterable[MultiPoly], order="degrevlex",
                         budget: bb.Budget | None = None) -> list[MultiPoly]:
    """Reduced Gröbner basis; the empty list for the zero ideal."""
    generators = [g for g in generators if g]
    if not generators:
        return []
    n = generators[0].nvars
    if any(g.nvars != n for g in generators):
        raise UsageError("generators live in rings of different dimension")
    order = parse_order(order, n)
    basis = bb.groebner([dict(g._p) for g in generators], _CommutativeAlgebra(order),
                        budget=budget or bb.Budget())
    return [MultiPoly(n, g) for g in basis]


def normal_form(f: MultiPoly, basis: Sequence[MultiPoly], order="degrevlex") -> MultiPoly:
    order = parse_order(order, f.nvars)
    r = bb.reduce(dict(f._p), [dict(g._p) for g in basis], _CommutativeAlgebra(order))
    return MultiPoly(f.nvars, r)


def is_groebner_commutative(basis: Sequence[MultiPoly], order="degrevlex") -> bool:
    if not basis:
        return True
    order = parse_order(order, basis[0].nvars)
    return bb.is_groebner([dict(g._p) for g in basis], _CommutativeAlgebra(order))


def eliminate(ideal: CommutativeIdeal, variables: Iterable[int],
              budget: bb.Budget | None = None) -> CommutativeIdeal:
    variables = set(variables)
    n = ideal.nvars
    if not variables:
        return CommutativeIdeal(n, ideal.groebner())
    gb = groebner_commutative(ideal.generators, MonomialOrder.elimination(n, variables), budget)
    keep = [g for g in gb if not any(g.degree(v) > 0 for v in variables)]
    return CommutativeIdeal(n, keep)


def intersect(ideals: Sequence[CommutativeIdeal], budget: bb.Budget | None = None) -> CommutativeIdeal:
    """Intersection via ``(t*I + (1-t)*J) ∩ Q[x]``."""
    if not ideals:
        raise UsageError("intersection of no ideals")
    acc = ideals[0]
    n = acc.nvars
    for other in ideals[1:]:
        if acc.is_unit():
            acc = other
            continue
        if other.is_unit():
            continue
        t = MultiPoly.variable(n + 1, n)
        gens = [t * g.extend(1) for g in acc.generators]
        gens += [(1 - t) * g.extend(1) for g in other.generators]
        gb = groebner_commutative(gens, MonomialOrder.elimination(n + 1, [n]), budget)
        acc = CommutativeIdeal(n, [g.truncate(n) for g in gb if g.degree(n) <= 0])
    return acc


def saturate_and_eliminate(ideal: CommutativeIdeal, saturate_by: Iterable[int],
                           eliminate_vars: Iterable[int],
                           budget: bb.Budget | None = None) -> CommutativeIdeal:
    """``(I : <x_s : s in saturate_by>^inf) ∩ Q[x_j : j not in eliminate_vars]``.

    Saturation by the ideal of several variables is the intersection of the
    saturations by each variable; each one is computed with a Rabinowitsch
    variable that is eliminated together with ``eliminate_vars``.
    """
    saturate_by = sorted(set(saturate_by))
    eliminate_vars = set(eliminate_vars)
    n = ideal.nvars
    if not saturate_by:
        return eliminate(ideal, eliminate_vars, budget)
    parts = []
    for s in saturate_by:
        t = MultiPoly.variable(n + 1, n)
        xs = MultiPoly.variable(n + 1, s)
        gens = [g.extend(1) for g in ideal.generators] + [1 - t * xs]
        order = MonomialOrder.elimination(n + 1, eliminate_vars | {n})
        gb = groebner_commutative(gens, order, budget)
        keep = [g.truncate(n) for g in gb
                if g.degree(n) <= 0 and not any(g.degree(v) > 0 for v in eliminate_vars)]
        parts.append(CommutativeIdeal(n, keep))
    result = intersect(parts, budget)
    return CommutativeIdeal(n, result.groebner())


# --------------------------------------------------------------------------
# factor splitting and roots


def _split_contents(f: MultiPoly) -> list[MultiPoly]:
    """Split a squarefree polynomial by monomial factors and by its contents
    with respect to each variable.  No irreducibility claim is made."""
    n = f.nvars
    out = []
    for i in range(n):
        if f.degree(i) > 0 and all(m[i] > 0 for m in f.terms):
            out.append(MultiPoly.variable(n, i))
            f = f.exquo(MultiPoly.variable(n, i))
    pending = [f]
    while pending:
        g = pending.pop()
        if g.is_constant():
            continue
        split = False
        for i in g.support_vars():
            if len(g.support_vars()) < 2:
                break
            coeffs: dict = {}
            for m, c in g.terms.items():
                key = m[i]
                coeffs.setdefault(key, {})[m[:i] + (0,) + m[i + 1:]] = c
            content = None
            for terms in coeffs.values():
                p = MultiPoly(n, terms)
                content = p if content is None else content.gcd(p)
                if content.is_constant():
                    break
            if content is not None and not content.is_constant():
                pending.append(content)
                pending.append(g.exquo(content))
                split = True
                break
        if not split:
            out.append(g)
    return out


def squarefree_factors(f: MultiPoly) -> list[tuple[MultiPoly, int]]:
    """Pairwise coprime squarefree factors with multiplicities.

    The product of ``factor**mult`` equals ``f`` up to a rational unit.
    Factors are primitive with positive leading coefficient and are listed
    by decreasing multiplicity, then by decreasing leading monomial.
    """
    if f.is_zero():
        raise UsageError("zero polynomial")
    _, groups = f._p.sqf_list()
    result: dict = {}
    for g, k in groups:
        for h in _split_contents(MultiPoly._wrap(f.nvars, g)):
            if h.is_constant():
                continue
            h = h.primitive()
            result[h] = result.get(h, 0) + k
    key = MonomialOrder.degrevlex(f.nvars).key
    items = list(result.items())
    items.sort(key=lambda t: (-t[1], [tuple(-v for v in key(m)) for m, _ in t[0].sorted_terms()],
                              [str(c) for _, c in t[0].sorted_terms()]))
    return items


def rational_roots(f: MultiPoly) -> list[mpq]:
    """Distinct rational roots of a univariate polynomial, ascending.

    The polynomial may live in a ring with several variables as long as at
    most one of them occurs.
    """
    if f.is_zero():
        raise UsageError("zero polynomial")
    vars_ = f.support_vars()
    if len(vars_) > 1:
        raise UsageError("rational_roots needs a univariate polynomial")
    if not vars_:
        return []
    v = vars_[0]
    coeffs = {m[v]: c for m, c in f.terms.items()}
    from math import lcm
    den = 1
    for c in coeffs.values():
        den = lcm(den, int(c.denominator))
    deg = max(coeffs)
    ints = [int(coeffs.get(k, 0) * den) for k in range(deg + 1)]
    roots = set()
    low = next(k for k, c in enumerate(ints) if c)
    if low > 0:
        roots.add(mpq(0))
    ints = ints[low:]
    if len(ints) > 1:
        a0, an = abs(ints[0]), abs(ints[-1])
        for p in divisors(a0):
            for q in divisors(an):
                for cand in (mpq(p, q), mpq(-p, q)):
                    if cand in roots:
                        continue
                    acc = mpq(0)
                    for c in reversed(ints):
                        acc = acc * cand + c
                    if acc == 0:
                        roots.add(cand)
    return sorted(roots)


def product(polys: Iterable[MultiPoly], nvars: int) -> MultiPoly:
    out = MultiPoly.one(nvars)
    for p in polys:
        out = out * p
    return out
