"""Regularity along the singular locus: gr-ranks, irregular support, divisor.

The pipeline for one affine chart is

1. split the codimension-one part of the singular locus into squarefree
   components,
2. sample a few rational points on each component, away from the other
   components, the deeper strata and the component's own singular points,
3. compare the rank of the all-ones initial ideal at each point with the
   holonomic rank.

:func:`is_regular` repeats this in the standard charts of projective space
when asked to, and folds the per-chart records into one report.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from . import buchberger as bb
from .arith import MultiPoly, rational_roots, squarefree_factors
from .errors import NoRationalPoint, NotFiniteRank, UsageError
from .rank import holonomic_rank, singular_locus
from .weyl import DIdeal, WeightVector, chart_pullback, initial_ideal, translate_ideal

AFFINE = 0

STABLE = "STABLE"
UNSTABLE = "UNSTABLE"
UNSAMPLED = "UNSAMPLED"

REGULAR = "REGULAR"
IRREGULAR = "IRREGULAR"
INCONCLUSIVE = "INCONCLUSIVE"

MEROMORPHIC_CAVEAT = ("input assumed to be a meromorphic connection along its singular "
                      "locus; only Ch(M) is stratified")


@dataclass
class RegularityOptions:
    seed: int = 0
    height_bound: int = 5
    points_per_component: int = 3
    check_infinity: bool = False
    charts: tuple[int, ...] | None = None
    components: list[MultiPoly] | None = None
    avoid: list[MultiPoly] = field(default_factory=list)
    points: list[tuple] = field(default_factory=list)
    budget_ms: float | None = None
    jobs: int = 1
    max_rounds: int = 6
    tries_per_round: int = 24

    def budget(self) -> bb.Budget:
        return bb.Budget(self.budget_ms)


@dataclass
class ComponentRecord:
    component: MultiPoly
    chart: int
    points: list[tuple]
    gr_ranks: list[int]
    irr_mult: int | None
    status: str
    label: MultiPoly
    note: str = ""

    @property
    def chart_name(self) -> str:
        return "affine" if self.chart == AFFINE else f"chart{self.chart}"


@dataclass
class Divisor:
    """Effective divisor as ``(label, multiplicity)`` pairs, zeros omitted.

    Labels are homogeneous in ``X0..Xn`` so that components seen in several
    charts coincide; ``X0`` is the hyperplane at infinity.
    """

    entries: list[tuple[MultiPoly, int]]

    def is_zero(self) -> bool:
        return not self.entries

    def affine_entries(self) -> list[tuple[MultiPoly | None, int]]:
        """``(affine polynomial, multiplicity)``; ``None`` stands for infinity."""
        return [(dehomogenize(F), m) for F, m in self.entries]

    def as_dict(self) -> dict[str, int]:
        return {label_string(F): m for F, m in self.entries}


@dataclass
class RegularityReport:
    rank: int
    records: list[ComponentRecord]
    infinity_checked: bool
    verdict: str
    caveats: list[str]
    divisor: Divisor
    charts: list[int]


# --------------------------------------------------------------------------
# points


def _random_rational(rng: random.Random, height: int) -> mpq:
    num = rng.randint(-height, height)
    den = 1 if rng.random() < 0.5 else rng.randint(1, height)
    return mpq(num, den)


def _admissible(p: Sequence, component: MultiPoly, avoid: Sequence[MultiPoly],
                deeper: Sequence[Sequence[MultiPoly]]) -> bool:
    if component.evaluate(p) != 0:
        return False
    if any(q.evaluate(p) == 0 for q in avoid):
        return False
    for stratum in deeper:
        if all(g.evaluate(p) == 0 for g in stratum):
            return False
    # smooth point of the component
    return any(component.diff(i).evaluate(p) != 0 for i in component.support_vars())


def generic_point(component: MultiPoly, avoid: Sequence[MultiPoly] = (), seed: int | str = 0,
                  height_bound: int = 5, *, deeper: Sequence[Sequence[MultiPoly]] = (),
                  exclude: Sequence[tuple] = (), max_rounds: int = 6,
                  tries_per_round: int = 24) -> tuple:
    """A rational point on ``V(component)`` where no ``avoid`` polynomial
    vanishes, outside every ``deeper`` stratum and off ``exclude``.

    All coordinates but one are fixed at random rationals of height at most
    ``height_bound`` and the last is a rational root of the restriction.
    The height doubles after each round of ``tries_per_round`` failures.
    """
    if component.is_zero() or component.is_constant():
        raise UsageError("component must be a nonconstant polynomial")
    if any(q.is_zero() for q in avoid):
        raise UsageError("avoidance polynomials must be nonzero")
    n = component.nvars
    support = component.support_vars()
    linear = [i for i in support if component.degree(i) == 1]
    solve_for = linear or sorted(support, key=lambda i: (component.degree(i), i))
    excluded = {tuple(mpq(c) for c in p) for p in exclude}
    rng = random.Random(f"dreg:{seed}")
    height = max(1, int(height_bound))
    for _ in range(max_rounds):
        for attempt in range(tries_per_round):
            v = solve_for[attempt % len(solve_for)]
            base = [_random_rational(rng, height) for _ in range(n)]
            g = component
            for i in range(n):
                if i != v:
                    g = g.substitute(i, base[i])
            if g.is_zero():
                candidates = [base[v]]
            elif g.is_constant():
                continue
            else:
                candidates = rational_roots(g)
            for r in candidates:
                p = tuple(base[:v] + [mpq(r)] + base[v + 1:])
                if p not in excluded and _admissible(p, component, avoid, deeper):
                    return p
        height *= 2
    raise NoRationalPoint(f"no rational point found on V({component.to_str()}); "
                          "supply a point on the component")


def _finite_fiber(component: MultiPoly) -> bool:
    # in one variable the component is a finite set of points
    return component.nvars == 1


def sample_points(component: MultiPoly, avoid: Sequence[MultiPoly], count: int,
                  seed: int | str, height_bound: int, *,
                  deeper: Sequence[Sequence[MultiPoly]] = (), declared: Sequence[tuple] = (),
                  max_rounds: int = 6, tries_per_round: int = 24) -> list[tuple]:
    """Up to ``count`` distinct admissible points, declared ones first.

    On a one-dimensional ambient space the component is finite and all of
    its admissible rational points are returned, however few.
    """
    pts: list[tuple] = []
    for p in declared:
        p = tuple(mpq(c) for c in p)
        if len(p) == component.nvars and p not in pts and _admissible(p, component, avoid, deeper):
            pts.append(p)
        if len(pts) >= count:
            return pts
    if _finite_fiber(component):
        for r in rational_roots(component):
            p = (mpq(r),)
            if p not in pts and _admissible(p, component, avoid, deeper):
                pts.append(p)
        if not pts:
            raise NoRationalPoint(f"V({component.to_str()}) has no admissible rational point")
        return pts[:count]
    k = 0
    while len(pts) < count:
        try:
            p = generic_point(component, avoid, f"{seed}:{k}", height_bound, deeper=deeper,
                              exclude=pts, max_rounds=max_rounds,
                              tries_per_round=tries_per_round)
        except NoRationalPoint:
            if pts:
                break
            raise
        pts.append(p)
        k += 1
    return pts


# --------------------------------------------------------------------------
# gr-rank


def gr_rank_at_point(I: DIdeal, p: Sequence, budget: bb.Budget | None = None) -> int:
    """Rank of the all-ones initial ideal of ``I`` translated to ``p``."""
    p = tuple(mpq(c) for c in p)
    if len(p) != I.nvars:
        raise UsageError(f"point has {len(p)} coordinates, expected {I.nvars}")
    J = initial_ideal(translate_ideal(I, p), WeightVector.ones(I.nvars), budget)
    r = holonomic_rank(J, budget)
    if not r.is_finite:
        raise NotFiniteRank(f"initial ideal at {p} is not of finite rank")
    return int(r)


# --------------------------------------------------------------------------
# homogeneous labels


def homogenize_affine(f: MultiPoly) -> MultiPoly:
    """``X0^d f(X1/X0, ..., Xn/X0)`` in variables ``X0..Xn``."""
    d = f.total_degree()
    return MultiPoly(f.nvars + 1, {(d - sum(m),) + m: c for m, c in f.terms.items()})


def homogenize_chart(g: MultiPoly, k: int) -> MultiPoly:
    """Homogeneous form of a polynomial in the coordinates of chart ``k``.

    In chart ``k`` (1-based) ``y_k = X0/Xk`` and ``y_j = Xj/Xk``.
    """
    n = g.nvars
    d = g.total_degree()
    out = {}
    for m, c in g.terms.items():
        e = [0] * (n + 1)
        e[0] = m[k - 1]
        for j in range(n):
            if j != k - 1:
                e[j + 1] = m[j]
        e[k] = d - sum(m)
        out[tuple(e)] = c
    return MultiPoly(n + 1, out)


def is_infinity(F: MultiPoly) -> bool:
    """Whether the homogeneous label ``F`` is the hyperplane ``X0 = 0``."""
    return F.terms.keys() == {(1,) + (0,) * (F.nvars - 1)}


def dehomogenize(F: MultiPoly) -> MultiPoly | None:
    """``F(1, x1, ..., xn)`` made primitive, or ``None`` at infinity."""
    if is_infinity(F):
        return None
    out: dict = {}
    for m, c in F.terms.items():
        out[m[1:]] = out.get(m[1:], 0) + c
    return MultiPoly(F.nvars - 1, out).primitive()


def label_string(F: MultiPoly) -> str:
    """Printed name of a homogeneous label: ``x0`` or the affine polynomial."""
    f = dehomogenize(F)
    return "x0" if f is None else f.to_str()


def _poly_key(f: MultiPoly) -> tuple:
    return (f.total_degree(), f.to_str())


# --------------------------------------------------------------------------
# per-chart pipeline


@dataclass
class _Task:
    ideal: DIdeal
    chart: int
    component: MultiPoly
    avoid: list[MultiPoly]
    deeper: list[list[MultiPoly]]
    declared: list[tuple]
    rank: int
    seed: int
    height_bound: int
    count: int
    budget_ms: float | None
    max_rounds: int
    tries_per_round: int


def _run_task(task: _Task) -> ComponentRecord:
    f = task.component
    label = homogenize_affine(f) if task.chart == AFFINE else homogenize_chart(f, task.chart)
    label = label.primitive()
    seed = f"{task.seed}:{task.chart}:{f.to_str()}"
    try:
        pts = sample_points(f, task.avoid, task.count, seed, task.height_bound,
                            deeper=task.deeper, declared=task.declared,
                            max_rounds=task.max_rounds, tries_per_round=task.tries_per_round)
    except NoRationalPoint as exc:
        return ComponentRecord(f, task.chart, [], [], None, UNSAMPLED, label, str(exc))
    budget = bb.Budget(task.budget_ms)
    ranks = [gr_rank_at_point(task.ideal, p, budget.restart()) for p in pts]
    if len(set(ranks)) == 1:
        return ComponentRecord(f, task.chart, pts, ranks, task.rank - ranks[0], STABLE, label)
    return ComponentRecord(f, task.chart, pts, ranks, None, UNSTABLE, label,
                           "gr-ranks disagree across sampled points")


def _run_tasks(tasks: list[_Task], jobs: int) -> list[ComponentRecord]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_task, tasks))
    return [_run_task(t) for t in tasks]


def _chart_tasks(I: DIdeal, chart: int, components: Sequence[MultiPoly] | None,
                 options: RegularityOptions) -> tuple[list[_Task], int, bool]:
    budget = options.budget()
    r = holonomic_rank(I, budget)
    if not r.is_finite:
        raise NotFiniteRank("holonomic rank is infinite; regularity is undefined")
    sing = singular_locus(I, budget.restart())
    if components is None:
        comps = list(sing.codim1)
    else:
        comps = []
        for c in components:
            for h, _ in squarefree_factors(c):
                if not h.is_constant() and h not in comps:
                    comps.append(h)
    comps.sort(key=_poly_key)
    avoid_all = [a for a in options.avoid if not a.is_constant()]
    declared = list(options.points) if chart == AFFINE else []
    tasks = []
    for f in comps:
        others = [g for g in comps if g != f]
        others += [g for g in sing.codim1 if g != f and g not in others]
        tasks.append(_Task(I, chart, f, others + avoid_all, list(sing.deeper), declared,
                           int(r), options.seed, options.height_bound,
                           options.points_per_component, options.budget_ms,
                           options.max_rounds, options.tries_per_round))
    return tasks, int(r), sing.may_have_deeper


def irregular_support(I: DIdeal, components: Sequence[MultiPoly] | None = None,
                      options: RegularityOptions | None = None) -> list[ComponentRecord]:
    """Records for every codimension-one component in the affine chart.

    The support of the irregularity is the set of records with positive
    ``irr_mult``.
    """
    options = options or RegularityOptions()
    tasks, _, _ = _chart_tasks(I, AFFINE, components, options)
    return _run_tasks(tasks, options.jobs)


def _transport_avoid(options: RegularityOptions, k: int) -> list[MultiPoly]:
    out = []
    for a in options.avoid:
        H = homogenize_affine(a)
        # X0 -> y_k, Xk -> 1, Xj -> y_j
        g = {}
        for m, c in H.terms.items():
            e = list(m[1:])
            e[k - 1] = m[0]
            g[tuple(e)] = g.get(tuple(e), 0) + c
        p = MultiPoly(a.nvars, g)
        if not p.is_constant():
            out.append(p)
    return out


def _all_records(I: DIdeal, options: RegularityOptions):
    n = I.nvars
    charts = [AFFINE]
    if options.check_infinity:
        charts += list(options.charts) if options.charts else list(range(1, n + 1))
    for k in charts[1:]:
        if not 1 <= k <= n:
            raise UsageError(f"chart index {k} out of range 1..{n}")
    tasks, rank, deeper = _chart_tasks(I, AFFINE, options.components, options)
    for k in charts[1:]:
        J = chart_pullback(I, k)
        sub = RegularityOptions(**{**options.__dict__, "avoid": _transport_avoid(options, k),
                                   "points": []})
        t, rk, dp = _chart_tasks(J, k, None, sub)
        if rk != rank:
            raise UsageError(f"rank {rk} in chart {k} differs from affine rank {rank}")
        tasks += t
        deeper = deeper or dp
    records = _run_tasks(tasks, options.jobs)
    return rank, records, charts, deeper


def _divisor(records: Sequence[ComponentRecord]) -> tuple[Divisor, list[str]]:
    chosen: dict[MultiPoly, ComponentRecord] = {}
    caveats = []
    for rec in records:
        if rec.status != STABLE:
            continue
        prev = chosen.get(rec.label)
        if prev is None:
            chosen[rec.label] = rec
        elif prev.irr_mult != rec.irr_mult:
            caveats.append(f"chart coherence violated for {label_string(rec.label)}: "
                           f"{prev.chart_name} gives {prev.irr_mult}, "
                           f"{rec.chart_name} gives {rec.irr_mult}")
    entries = [(lab, rec.irr_mult) for lab, rec in chosen.items() if rec.irr_mult > 0]
    entries.sort(key=lambda e: (is_infinity(e[0]), _poly_key(e[0])))
    return Divisor(entries), caveats


def irregularity_divisor(I: DIdeal, options: RegularityOptions | None = None) -> Divisor:
    """Sum of ``irr_mult * component`` over the requested charts."""
    options = options or RegularityOptions()
    _, records, _, _ = _all_records(I, options)
    return _divisor(records)[0]


def _verdict(records: Sequence[ComponentRecord], infinity_checked: bool) -> str:
    if any(r.status == STABLE and r.irr_mult > 0 for r in records):
        return IRREGULAR
    if infinity_checked and all(r.status == STABLE and r.irr_mult == 0 for r in records):
        return REGULAR
    return INCONCLUSIVE


def is_regular(I: DIdeal, options: RegularityOptions | None = None) -> RegularityReport:
    options = options or RegularityOptions()
    rank, records, charts, deeper = _all_records(I, options)
    divisor, caveats = _divisor(records)
    caveats = [MEROMORPHIC_CAVEAT] + caveats
    if deeper:
        caveats.append("singular locus has strata of codimension >= 2; sampled points avoid them")
    for rec in records:
        where = f"{label_string(rec.label)} ({rec.chart_name})"
        f = rec.component
        if f.total_degree() > 1 and len(f.support_vars()) > 1:
            caveats.append(f"{where}: squarefree, irreducibility unverified")
        if rec.status == UNSTABLE:
            caveats.append(f"{where}: gr-ranks disagree across sampled points")
        elif rec.status == UNSAMPLED:
            caveats.append(f"{where}: no rational point found; supply a point")
        elif len(rec.points) < options.points_per_component:
            caveats.append(f"{where}: only {len(rec.points)} admissible point(s) sampled")
    if not options.check_infinity:
        caveats.append("hyperplane at infinity not checked")
    elif len(charts) - 1 < I.nvars:
        caveats.append("only some charts at infinity checked: "
                       + ",".join(str(k) for k in charts[1:]))
    verdict = _verdict(records, options.check_infinity)
    return RegularityReport(rank, records, options.check_infinity, verdict, caveats,
                            divisor, charts)
