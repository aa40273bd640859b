"""The Weyl algebra D_n: normally ordered operators, weights, Gröbner bases.

An operator ``sum c * x^a * d^b`` is stored as a dict keyed by the flat
exponent tuple ``a + b`` of length ``2n``.  Gröbner bases for weights
``(-w, w)`` are computed in the homogenized Weyl algebra, where
``d_i x_i = x_i d_i + h^2`` and ``h`` is central, and then dehomogenized.
"""

from __future__ import annotations

import itertools
import threading
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

from gmpy2 import mpq

from . import buchberger as bb
from .arith import (MultiPoly, RationalFunction, _join_terms, _signed_term,
                    to_rational)
from .errors import UsageError


@lru_cache(maxsize=None)
def _commutator_terms(b: int, a: int) -> tuple[tuple[int, int], ...]:
    """Pairs ``(k, binom(b,k) * a(a-1)...(a-k+1))`` for ``d^b x^a``.

    ``a`` may be negative (Laurent monomials), then every ``k <= b`` occurs.
    """
    top = b if a < 0 else min(a, b)
    out = []
    ff = 1
    for k in range(top + 1):
        if k:
            ff *= a - k + 1
        out.append((k, comb(b, k) * ff))
    return tuple(out)


def _mul_terms(n: int, m1: tuple, m2: tuple, homogenized: bool):
    """Expand ``mono(m1) * mono(m2)`` into ``[(mono, int_coeff)]``."""
    a1, b1 = m1[:n], m1[n:2 * n]
    a2, b2 = m2[:n], m2[n:2 * n]
    inter = [i for i in range(n) if b1[i] and a2[i]]
    base_a = [x + y for x, y in zip(a1, a2)]
    base_b = [x + y for x, y in zip(b1, b2)]
    base_c = (m1[2 * n] + m2[2 * n]) if homogenized else 0
    if not inter:
        mono = tuple(base_a) + tuple(base_b) + ((base_c,) if homogenized else ())
        return [(mono, 1)]
    out = []
    choices = [_commutator_terms(b1[i], a2[i]) for i in inter]
    for combo in itertools.product(*choices):
        a = list(base_a)
        b = list(base_b)
        coeff = 1
        total = 0
        for i, (k, c) in zip(inter, combo):
            a[i] -= k
            b[i] -= k
            coeff *= c
            total += k
        if not coeff:
            continue
        mono = tuple(a) + tuple(b)
        if homogenized:
            mono += (base_c + 2 * total,)
        out.append((mono, coeff))
    return out


def _mul_dicts(n: int, f: dict, g: dict, homogenized: bool = False) -> dict:
    out: dict = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            c = c1 * c2
            for mono, k in _mul_terms(n, m1, m2, homogenized):
                v = out.get(mono, 0) + c * k
                if v:
                    out[mono] = v
                else:
                    out.pop(mono, None)
    return out


def _degrevlex_key(m: Sequence[int]) -> tuple:
    return (sum(m),) + tuple(-e for e in reversed(m))


class _WeylAlgebra:
    """Adapter for :mod:`buchberger`; monomials are flat ``a + b (+ c)`` tuples."""

    commutative = False

    def __init__(self, n: int, key, homogenized: bool):
        self.n = n
        self.homogenized = homogenized
        self.key = lru_cache(maxsize=None)(key)

    def left_mul(self, m: tuple, f: dict) -> dict:
        n = self.n
        h = self.homogenized
        out: dict = {}
        for m2, c in f.items():
            for mono, k in _mul_terms(n, m, m2, h):
                v = out.get(mono, 0) + c * k
                if v:
                    out[mono] = v
                else:
                    out.pop(mono, None)
        return out


def weight_order_key(n: int, u: Sequence[int], v: Sequence[int], homogenized: bool):
    """Key for the ``(u, v)``-weight order refined by degrevlex on ``(x, d)``.

    Homogenized monomials are first compared by total degree in ``(x, d, h)``.
    """
    uv = tuple(u) + tuple(v)

    if homogenized:
        def key(m):
            ab = m[:2 * n]
            return (sum(m), sum(w * e for w, e in zip(uv, ab))) + _degrevlex_key(ab)
    else:
        def key(m):
            return (sum(w * e for w, e in zip(uv, m)),) + _degrevlex_key(m)
    return key


class WeylElement:
    """Normally ordered element ``sum c_ab x^a d^b`` of the Weyl algebra D_n."""

    __slots__ = ("nvars", "_t")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        clean: dict = {}
        for key, c in (terms or {}).items():
            if len(key) == 2 and not isinstance(key[0], int):
                flat = tuple(key[0]) + tuple(key[1])
            else:
                flat = tuple(key)
            if len(flat) != 2 * nvars or min(flat, default=0) < 0:
                raise UsageError(f"bad exponent pair {key} for D_{nvars}")
            c = to_rational(c)
            if c:
                clean[flat] = clean.get(flat, 0) + c
                if not clean[flat]:
                    del clean[flat]
        self._t = clean

    @classmethod
    def _wrap(cls, nvars: int, t: dict) -> "WeylElement":
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._t = t
        return obj

    @classmethod
    def x(cls, n: int, i: int) -> "WeylElement":
        m = [0] * (2 * n)
        m[i] = 1
        return cls._wrap(n, {tuple(m): mpq(1)})

    @classmethod
    def d(cls, n: int, i: int) -> "WeylElement":
        m = [0] * (2 * n)
        m[n + i] = 1
        return cls._wrap(n, {tuple(m): mpq(1)})

    @classmethod
    def constant(cls, n: int, c) -> "WeylElement":
        c = to_rational(c)
        return cls._wrap(n, {(0,) * (2 * n): c} if c else {})

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "WeylElement":
        n = p.nvars
        return cls._wrap(n, {m + (0,) * n: c for m, c in p.terms.items()})

    @property
    def terms(self) -> dict:
        """``{(alpha, beta): coefficient}``."""
        n = self.nvars
        return {(m[:n], m[n:]): c for m, c in self._t.items()}

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def _check(self, other: "WeylElement") -> None:
        if other.nvars != self.nvars:
            raise UsageError(f"cannot combine elements of D_{self.nvars} and D_{other.nvars}")

    def _coerce(self, other) -> "WeylElement":
        if isinstance(other, WeylElement):
            self._check(other)
            return other
        if isinstance(other, MultiPoly):
            return WeylElement.from_poly(other)
        return WeylElement.constant(self.nvars, other)

    def __add__(self, other):
        o = self._coerce(other)
        t = dict(self._t)
        for m, c in o._t.items():
            v = t.get(m, 0) + c
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return WeylElement._wrap(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement._wrap(self.nvars, {m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (WeylElement, MultiPoly)):
            return weyl_multiply(self, self._coerce(other))
        c = to_rational(other)
        return WeylElement._wrap(self.nvars, {m: v * c for m, v in self._t.items()} if c else {})

    def __rmul__(self, other):
        if isinstance(other, MultiPoly):
            return weyl_multiply(WeylElement.from_poly(other), self)
        return self * other

    def __pow__(self, k: int):
        out = WeylElement.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, WeylElement):
            return self.nvars == other.nvars and self._t == other._t
        if isinstance(other, (int, mpq)):
            return self._t == WeylElement.constant(self.nvars, other)._t
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._t.items())))

    def d_degree(self) -> int:
        n = self.nvars
        return max((sum(m[n:]) for m in self._t), default=-1)

    def leading_coefficient_poly(self) -> MultiPoly:
        """Polynomial coefficient of the highest ∂-monomial (degrevlex on ∂)."""
        n = self.nvars
        top = max((m[n:] for m in self._t), key=_degrevlex_key)
        return MultiPoly(n, {m[:n]: c for m, c in self._t.items() if m[n:] == top})

    def scale_monic(self, order_key=None) -> "WeylElement":
        key = order_key or _degrevlex_key
        lc = self._t[max(self._t, key=key)]
        return self * (1 / lc)

    def primitive(self) -> "WeylElement":
        """Coprime integer coefficients, positive leading coefficient (degrevlex)."""
        if not self._t:
            return self
        from math import gcd, lcm
        den = 1
        for c in self._t.values():
            den = lcm(den, int(c.denominator))
        num = 0
        for c in self._t.values():
            num = gcd(num, int(c.numerator * (den // c.denominator)))
        scale = mpq(den, num)
        if self._t[max(self._t, key=_degrevlex_key)] < 0:
            scale = -scale
        return self * scale

    def apply(self, f: MultiPoly) -> MultiPoly:
        """Action on polynomials: ``x_i`` multiplies, ``d_i`` differentiates."""
        n = self.nvars
        if f.nvars != n:
            raise UsageError("polynomial and operator live in different dimensions")
        out = MultiPoly.zero(n)
        for m, c in self._t.items():
            g = f
            for i in range(n):
                for _ in range(m[n + i]):
                    g = g.diff(i)
                    if g.is_zero():
                        break
            if g.is_zero():
                continue
            mono = MultiPoly(n, {m[:n]: c})
            out = out + mono * g
        return out

    def sorted_terms(self) -> list:
        return sorted(self._t.items(), key=lambda t: _degrevlex_key(t[0]), reverse=True)

    def to_str(self) -> str:
        n = self.nvars
        if not self._t:
            return "0"
        names = [f"x{i + 1}" for i in range(n)] + [f"dx{i + 1}" for i in range(n)]
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(nm if e == 1 else f"{nm}^{e}" for nm, e in zip(names, m) if e)
            parts.append(_signed_term(c, mono))
        return _join_terms(parts)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"WeylElement({self.nvars}, {self.to_str()!r})"


def weyl_multiply(P: WeylElement, Q: WeylElement) -> WeylElement:
    if P.nvars != Q.nvars:
        raise UsageError(f"cannot multiply elements of D_{P.nvars} and D_{Q.nvars}")
    return WeylElement._wrap(P.nvars, _mul_dicts(P.nvars, P._t, Q._t))


# --------------------------------------------------------------------------
# weights


class WeightVector:
    """Weight ``w`` inducing ``(-w, w)`` on ``(x, d)``."""

    __slots__ = ("w",)

    def __init__(self, w: Iterable):
        self.w = tuple(to_rational(v) for v in w)

    @classmethod
    def ones(cls, n: int) -> "WeightVector":
        return cls([1] * n)

    @classmethod
    def zero(cls, n: int) -> "WeightVector":
        return cls([0] * n)

    def __len__(self) -> int:
        return len(self.w)

    def integer_scaled(self) -> tuple[int, ...]:
        from math import lcm
        den = 1
        for v in self.w:
            den = lcm(den, int(v.denominator))
        return tuple(int(v * den) for v in self.w)

    def __eq__(self, other) -> bool:
        return isinstance(other, WeightVector) and self.w == other.w

    def __hash__(self) -> int:
        return hash(self.w)

    def __repr__(self) -> str:
        return f"WeightVector({[str(v) for v in self.w]})"


def _as_weight(w, n: int) -> WeightVector:
    if not isinstance(w, WeightVector):
        w = WeightVector(w)
    if len(w) != n:
        raise UsageError(f"weight of length {len(w)} for D_{n}")
    return w


def term_weight(m: tuple, w: Sequence, n: int):
    return sum(wi * (m[n + i] - m[i]) for i, wi in enumerate(w))


def weight_data(P: WeylElement, w) -> tuple[mpq, WeylElement]:
    """``(ord_(-w,w)(P), in_(-w,w)(P))``."""
    if P.is_zero():
        raise UsageError("zero operator has no order")
    n = P.nvars
    w = _as_weight(w, n)
    weights = {m: term_weight(m, w.w, n) for m in P._t}
    top = max(weights.values())
    return mpq(top), WeylElement._wrap(n, {m: c for m, c in P._t.items() if weights[m] == top})


# --------------------------------------------------------------------------
# ideals and Gröbner bases


class DIdeal:
    """Left ideal of D_n with a memo of Gröbner bases per monomial order.

    The memo is filled under a lock so that concurrent callers never see a
    partially computed basis; equal keys always produce equal entries.
    """

    def __init__(self, nvars: int, generators: Iterable[WeylElement]):
        if nvars < 1:
            raise UsageError("need at least one variable")
        gens = []
        for g in generators:
            if not isinstance(g, WeylElement):
                raise UsageError("generators must be WeylElements")
            if g.nvars != nvars:
                raise UsageError(f"generator in D_{g.nvars} for an ideal of D_{nvars}")
            if g:
                gens.append(g)
        self.nvars = nvars
        self.generators = tuple(gens)
        self._cache: dict = {}
        self._lock = threading.Lock()

    def cached(self, key, compute):
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = compute()
        with self._lock:
            return self._cache.setdefault(key, value)

    def __reduce__(self):
        # the memo and its lock stay behind
        return (DIdeal, (self.nvars, self.generators))

    def __repr__(self) -> str:
        return f"DIdeal({self.nvars}, [{', '.join(g.to_str() for g in self.generators)}])"

    def __eq__(self, other) -> bool:
        return (isinstance(other, DIdeal) and self.nvars == other.nvars
                and self.generators == other.generators)

    def __hash__(self) -> int:
        return hash((self.nvars, self.generators))


def _homogenize(n: int, t: dict) -> dict:
    d = max(sum(m) for m in t)
    return {m + (d - sum(m),): c for m, c in t.items()}


def _dehomogenize(n: int, t: dict) -> dict:
    out: dict = {}
    for m, c in t.items():
        k = m[:2 * n]
        v = out.get(k, 0) + c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def weyl_gb_dicts(n: int, gens: Sequence[dict], u: Sequence[int], v: Sequence[int],
                  homogenize: bool, budget: bb.Budget | None = None) -> list[dict]:
    """Gröbner basis for the ``(u, v)``-weight refined by degrevlex.

    With ``homogenize`` the computation runs in the homogenized Weyl algebra
    and is dehomogenized afterwards (duplicates removed, not tail-reduced).  Without it
    ``(u, v)`` must make the refined order a term order (``u + v >= 0`` and
    ``u, v >= 0``) and the result is the reduced basis.
    """
    budget = budget or bb.Budget()
    if homogenize:
        alg = _WeylAlgebra(n, weight_order_key(n, u, v, True), True)
        hg = bb.groebner([_homogenize(n, g) for g in gens], alg, budget=budget)
        key = weight_order_key(n, u, v, False)
        out = [_dehomogenize(n, g) for g in hg]
        # no minimalization: with negative x-weights two elements can share a
        # leading monomial while only one of them is a unit, and dropping
        # either would stop the list from generating I
        uniq = {}
        for g in out:
            if g:
                g = bb.make_monic(g, key)
                uniq[tuple(sorted(g.items()))] = g
        out = list(uniq.values())
        return sorted(out, key=lambda g: (key(bb.leading_monomial(g, key)), sorted(g.items())))
    alg = _WeylAlgebra(n, weight_order_key(n, u, v, False), False)
    return bb.groebner(list(gens), alg, budget=budget)


def weyl_buchberger(I: DIdeal, w, tiebreak: str = "degrevlex",
                    budget: bb.Budget | None = None) -> list[WeylElement]:
    """Gröbner basis of ``I`` for ``(-w, w)`` refined by degrevlex.

    The initial forms of the returned elements generate ``in_(-w,w)(I)``.
    """
    if tiebreak != "degrevlex":
        raise UsageError("only the degrevlex tiebreak is supported")
    n = I.nvars
    w = _as_weight(w, n)
    wi = w.integer_scaled()
    u = tuple(-x for x in wi)

    def compute():
        gb = weyl_gb_dicts(n, [g._t for g in I.generators], u, wi, True, budget)
        return tuple(WeylElement._wrap(n, g) for g in gb)

    return list(I.cached(("V", wi), compute))


def _reduced_in_d(n: int, elems: Sequence[dict], budget=None) -> list[dict]:
    """Reduced degrevlex Gröbner basis in D_n of elements that already form one."""
    alg = _WeylAlgebra(n, _degrevlex_key, False)
    out = bb.minimalize([bb.make_monic(g, alg.key) for g in elems], alg.key)
    out = bb.interreduce(out, alg)
    out.sort(key=lambda g: alg.key(bb.leading_monomial(g, alg.key)))
    return out


def initial_ideal(I: DIdeal, w, budget: bb.Budget | None = None) -> DIdeal:
    """``in_(-w,w)(I)`` presented by its reduced degrevlex Gröbner basis."""
    n = I.nvars
    w = _as_weight(w, n)
    gb = weyl_buchberger(I, w, budget=budget)
    inits = [weight_data(g, w)[1]._t for g in gb]
    red = _reduced_in_d(n, inits)
    return DIdeal(n, [WeylElement._wrap(n, g).primitive() for g in red])


def reduce_weyl(P: WeylElement, basis: Sequence[WeylElement]) -> WeylElement:
    """Degrevlex normal form of ``P`` modulo ``basis`` in D_n."""
    n = P.nvars
    alg = _WeylAlgebra(n, _degrevlex_key, False)
    return WeylElement._wrap(n, bb.reduce(P._t, [g._t for g in basis], alg))


def degrevlex_groebner(I: DIdeal, budget: bb.Budget | None = None) -> list[WeylElement]:
    """Reduced Gröbner basis for degrevlex on ``(x, d)`` (no homogenization)."""
    n = I.nvars

    def compute():
        alg = _WeylAlgebra(n, _degrevlex_key, False)
        gb = bb.groebner([g._t for g in I.generators], alg, budget=budget or bb.Budget())
        return tuple(WeylElement._wrap(n, g) for g in gb)

    return list(I.cached(("degrevlex",), compute))


def ideal_contains(I: DIdeal, P: WeylElement) -> bool:
    return reduce_weyl(P, degrevlex_groebner(I)).is_zero()


def weyl_algebra(n: int, u=None, v=None, homogenized: bool = False) -> _WeylAlgebra:
    """Buchberger adapter for D_n (or its homogenization) under a weight order."""
    u = u or (0,) * n
    v = v or (0,) * n
    return _WeylAlgebra(n, weight_order_key(n, u, v, homogenized), homogenized)


# --------------------------------------------------------------------------
# coordinate changes


def apply_affine_substitution(P: WeylElement, p: Sequence) -> WeylElement:
    """Image of ``P`` under ``x_i -> x_i + p_i``, ``d_i -> d_i``."""
    n = P.nvars
    if len(p) != n:
        raise UsageError(f"point of length {len(p)} for D_{n}")
    p = [to_rational(v) for v in p]
    out: dict = {}
    for m, c in P._t.items():
        a, b = m[:n], m[n:]
        ranges = [range(e + 1) for e in a]
        for ks in itertools.product(*ranges):
            coeff = c
            for i, k in enumerate(ks):
                if k < a[i]:
                    coeff *= comb(a[i], k) * p[i] ** (a[i] - k)
            if not coeff:
                continue
            mono = tuple(ks) + b
            v = out.get(mono, 0) + coeff
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
    return WeylElement._wrap(n, out)


def translate_ideal(I: DIdeal, p: Sequence) -> DIdeal:
    return DIdeal(I.nvars, [apply_affine_substitution(g, p) for g in I.generators])


def chart_pullback(I: DIdeal, k: int) -> DIdeal:
    """Transport ``I`` to the ``k``-th standard chart of P^n (1-based ``k``).

    Chart coordinates ``y`` satisfy ``x_k = 1/y_k`` and ``x_j = y_j/y_k``; the
    hyperplane at infinity is ``y_k = 0``.  Each generator is rewritten with
    the chain rule and multiplied on the left by the smallest power of
    ``y_k`` that clears its denominators.
    """
    n = I.nvars
    if not 1 <= k <= n:
        raise UsageError(f"chart index {k} out of range 1..{n}")
    return DIdeal(n, [chart_map(g, k) for g in I.generators])


def _laurent(n: int, a: Sequence[int], b: Sequence[int], c=1) -> dict:
    return {tuple(a) + tuple(b): mpq(c)}


def chart_map(P: WeylElement, k: int) -> WeylElement:
    n = P.nvars
    kk = k - 1
    zero = [0] * n

    def y(i, e=1):
        a = list(zero)
        a[i] = e
        return a

    x_img = []
    for j in range(n):
        a = list(zero)
        a[kk] = -1
        if j != kk:
            a[j] += 1
        x_img.append(_laurent(n, a, zero))
    d_img = []
    for j in range(n):
        if j != kk:
            d_img.append(_laurent(n, y(kk), [1 if i == j else 0 for i in range(n)]))
        else:
            t: dict = {}
            for i in range(n):
                a = list(zero)
                a[kk] += 1
                a[i] += 1
                t[tuple(a) + tuple(1 if q == i else 0 for q in range(n))] = mpq(-1)
            d_img.append(t)

    total: dict = {}
    cache: dict = {}
    for m, c in P._t.items():
        term = {(0,) * (2 * n): c}
        for j in range(n):
            for key, img, e in (("x", x_img[j], m[j]), ("d", d_img[j], m[n + j])):
                if not e:
                    continue
                ck = (key, j, e)
                if ck not in cache:
                    acc = {(0,) * (2 * n): mpq(1)}
                    for _ in range(e):
                        acc = _mul_dicts(n, acc, img)
                    cache[ck] = acc
                term = _mul_dicts(n, term, cache[ck])
        for mono, v in term.items():
            s = total.get(mono, 0) + v
            if s:
                total[mono] = s
            else:
                total.pop(mono, None)
    if not total:
        return WeylElement(n)
    low = min(mono[kk] for mono in total)
    shift = -low if low < 0 else 0
    if shift:
        total = _mul_dicts(n, _laurent(n, y(kk, shift), zero), total)
    return WeylElement._wrap(n, total)


def to_rational_operator_terms(P: WeylElement) -> dict:
    """``{beta: RationalFunction}`` with polynomial coefficients."""
    n = P.nvars
    groups: dict = {}
    for m, c in P._t.items():
        groups.setdefault(m[n:], {})[m[:n]] = c
    return {b: RationalFunction.from_poly(MultiPoly(n, t)) for b, t in groups.items()}
