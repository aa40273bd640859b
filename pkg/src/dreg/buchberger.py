"""Buchberger's algorithm over a pluggable monomial algebra.

Polynomials are plain dicts ``{monomial: coefficient}`` with no zero entries,
where a monomial is a tuple of non-negative exponents.  An *algebra* object
supplies the order and the left multiplication by a monomial; everything
else (S-pairs, reduction, Gebauer-Möller pruning) is generic.  The same core
serves commutative polynomials, the Weyl algebra, its homogenization and the
rational Weyl algebra.

Required algebra attributes:

``commutative``
    enables Buchberger's product criterion (invalid for the Weyl algebra).
``key(m)``
    a sort key; larger keys are larger monomials.
``left_mul(m, f)``
    the product ``mono(m) * f``.  Its leading monomial must be ``m + lm(f)``
    with leading coefficient ``lc(f)``.
"""

from __future__ import annotations

import heapq
import os
import time
from typing import Callable, Iterable

from .errors import ResourceError

Poly = dict


def mono_divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a: tuple, b: tuple) -> tuple:
    return tuple(x if x >= y else y for x, y in zip(a, b))


def mono_sub(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def mono_coprime(a: tuple, b: tuple) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


class Budget:
    """Wall-clock and pair-count limits for one Gröbner computation.

    ``ms=None`` falls back to the ``DREG_BUDGET_MS`` environment variable;
    no limit at all when neither is set.
    """

    def __init__(self, ms: float | None = None, max_pairs: int | None = None):
        if ms is None:
            env = os.environ.get("DREG_BUDGET_MS")
            ms = float(env) if env else None
        self.ms = ms
        self.max_pairs = max_pairs
        self._start = time.monotonic()
        self._deadline = None if ms is None else self._start + ms / 1000.0

    def restart(self) -> "Budget":
        return Budget(self.ms, self.max_pairs)

    def check(self, stats: dict) -> None:
        if self._deadline is not None and time.monotonic() > self._deadline:
            stats = dict(stats, elapsed_ms=round(1000 * (time.monotonic() - self._start)))
            raise ResourceError(f"Gröbner budget of {self.ms:g} ms exceeded", stats)
        if self.max_pairs is not None and stats.get("pairs", 0) > self.max_pairs:
            raise ResourceError(f"Gröbner pair budget of {self.max_pairs} exceeded", stats)


def leading_monomial(f: Poly, key: Callable) -> tuple:
    return max(f, key=key)


def _axpy(p: Poly, c, q: Poly) -> None:
    """In place ``p -= c * q``."""
    for m, v in q.items():
        w = p.get(m)
        if w is None:
            p[m] = -c * v
        else:
            w = w - c * v
            if w:
                p[m] = w
            else:
                del p[m]


def make_monic(f: Poly, key: Callable) -> Poly:
    lc = f[leading_monomial(f, key)]
    if lc == 1:
        return f
    inv = 1 / lc
    return {m: c * inv for m, c in f.items()}


class _Reducer:
    def __init__(self, algebra, basis: list[Poly], lms: list[tuple]):
        self.algebra = algebra
        self.basis = basis
        self.lms = lms

    def find(self, m: tuple) -> int | None:
        for i, lm in enumerate(self.lms):
            if mono_divides(lm, m):
                return i
        return None

    def reduce(self, f: Poly, full: bool = True, budget: Budget | None = None,
               stats: dict | None = None) -> Poly:
        """Normal form of ``f`` modulo monic basis elements."""
        key = self.algebra.key
        left_mul = self.algebra.left_mul
        p = dict(f)
        r: Poly = {}
        steps = 0
        while p:
            m = max(p, key=key)
            i = self.find(m)
            if i is None:
                if not full:
                    r.update(p)
                    break
                r[m] = p.pop(m)
                continue
            c = p[m]
            g = self.basis[i]
            shift = mono_sub(m, self.lms[i])
            q = left_mul(shift, g) if any(shift) else g
            _axpy(p, c, q)
            p.pop(m, None)
            steps += 1
            if budget is not None and steps % 64 == 0:
                budget.check(stats or {})
        return r


def reduce(f: Poly, basis: list[Poly], algebra, full: bool = True) -> Poly:
    """Normal form of ``f`` modulo ``basis`` (elements need not be monic)."""
    key = algebra.key
    monic = [make_monic(g, key) for g in basis if g]
    lms = [leading_monomial(g, key) for g in monic]
    return _Reducer(algebra, monic, lms).reduce(f, full=full)


def s_polynomial(f: Poly, g: Poly, algebra) -> Poly:
    key = algebra.key
    f = make_monic(f, key)
    g = make_monic(g, key)
    a = leading_monomial(f, key)
    b = leading_monomial(g, key)
    lcm = mono_lcm(a, b)
    sa, sb = mono_sub(lcm, a), mono_sub(lcm, b)
    p = dict(algebra.left_mul(sa, f)) if any(sa) else dict(f)
    _axpy(p, 1, algebra.left_mul(sb, g) if any(sb) else g)
    return p


def groebner(gens: Iterable[Poly], algebra, budget: Budget | None = None,
             reduced: bool = True) -> list[Poly]:
    """Gröbner basis of the left ideal generated by ``gens``.

    Normal selection strategy (smallest lcm first, ties by index) and
    Gebauer-Möller pruning.  The product criterion is used only when
    ``algebra.commutative`` is true.  Returns monic polynomials sorted by
    increasing leading monomial; with ``reduced`` the basis is the unique
    reduced one.
    """
    key = algebra.key
    commutative = algebra.commutative
    basis: list[Poly] = []
    lms: list[tuple] = []
    active: list[int] = []
    live: dict[tuple[int, int], tuple] = {}
    heap: list = []
    stats = {"pairs": 0, "basis": 0, "zero_reductions": 0}

    def add(h: Poly) -> None:
        h = make_monic(h, key)
        k = len(basis)
        basis.append(h)
        lm_h = leading_monomial(h, key)
        lms.append(lm_h)

        # Gebauer-Möller update
        cand = [(g, mono_lcm(lms[g], lm_h)) for g in active]
        kept = []
        for idx, (g, lcm) in enumerate(cand):
            if commutative and mono_coprime(lms[g], lm_h):
                kept.append((g, lcm))
                continue
            others = cand[idx + 1:] + kept
            if any(mono_divides(l2, lcm) for _, l2 in others):
                continue
            kept.append((g, lcm))
        new_pairs = [(g, lcm) for g, lcm in kept
                     if not (commutative and mono_coprime(lms[g], lm_h))]
        for pair, lcm in list(live.items()):
            g1, g2 = pair
            if not mono_divides(lm_h, lcm):
                continue
            if mono_lcm(lms[g1], lm_h) != lcm and mono_lcm(lms[g2], lm_h) != lcm:
                del live[pair]
        for g, lcm in new_pairs:
            live[(g, k)] = lcm
            heapq.heappush(heap, (key(lcm), g, k))
        active[:] = [g for g in active if not mono_divides(lm_h, lms[g])]
        active.append(k)
        stats["basis"] = len(active)

    def reducer() -> _Reducer:
        return _Reducer(algebra, [basis[i] for i in active], [lms[i] for i in active])

    for f in gens:
        if not f:
            continue
        nf = reducer().reduce(f, full=False, budget=budget, stats=stats) if active else f
        if nf:
            add(nf)
        if budget is not None:
            budget.check(stats)

    while heap:
        _, i, j = heapq.heappop(heap)
        if (i, j) not in live:
            continue
        del live[(i, j)]
        stats["pairs"] += 1
        if budget is not None:
            budget.check(stats)
        s = s_polynomial(basis[i], basis[j], algebra)
        if not s:
            stats["zero_reductions"] += 1
            continue
        nf = reducer().reduce(s, full=False, budget=budget, stats=stats)
        if nf:
            add(nf)
        else:
            stats["zero_reductions"] += 1

    result = [basis[i] for i in active]
    result = minimalize(result, key)
    if reduced:
        result = interreduce(result, algebra)
    result.sort(key=lambda g: key(leading_monomial(g, key)))
    return result


def minimalize(basis: list[Poly], key: Callable) -> list[Poly]:
    """Drop elements whose leading monomial is divisible by another's."""
    lms = [leading_monomial(g, key) for g in basis]
    out = []
    for i, (g, m) in enumerate(zip(basis, lms)):
        redundant = False
        for j, m2 in enumerate(lms):
            if j == i:
                continue
            if mono_divides(m2, m) and (m2 != m or j < i):
                redundant = True
                break
        if not redundant:
            out.append(g)
    return out


def interreduce(basis: list[Poly], algebra) -> list[Poly]:
    key = algebra.key
    basis = [make_monic(g, key) for g in basis]
    out = []
    for i, g in enumerate(basis):
        others = basis[:i] + basis[i + 1:]
        lm = leading_monomial(g, key)
        tail = dict(g)
        del tail[lm]
        red = _Reducer(algebra, others, [leading_monomial(o, key) for o in others])
        tail = red.reduce(tail, full=True) if tail else tail
        tail[lm] = g[lm]
        out.append(tail)
    return out


def is_groebner(basis: list[Poly], algebra) -> bool:
    """Every S-pair reduces to zero (no criteria used)."""
    key = algebra.key
    monic = [make_monic(g, key) for g in basis]
    red = _Reducer(algebra, monic, [leading_monomial(g, key) for g in monic])
    for i in range(len(monic)):
        for j in range(i + 1, len(monic)):
            if red.reduce(s_polynomial(monic[i], monic[j], algebra), full=False):
                return False
    return True
