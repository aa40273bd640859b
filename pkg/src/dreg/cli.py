"""Command-line interface.

``dreg <command> FILE [options]`` where command is one of rank, init, sing,
support, irrdiv, regular, oracle.  Exit codes: 0 success or REGULAR,
1 IRREGULAR, 2 INCONCLUSIVE, 3 usage error, 4 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time

from gmpy2 import mpq

from . import __version__
from . import buchberger as bb
from .errors import (CyclicVectorNotFound, DregError, LineInPolarLocus, NotFiniteRank,
                     ResourceError, UsageError)
from .fuchs import line_regularity_oracle
from .parser import ProblemFile, parse_ideal
from .rank import holonomic_rank, singular_locus
from .regularity import (AFFINE, INCONCLUSIVE, IRREGULAR, REGULAR, STABLE, RegularityOptions,
                         irregular_support, is_regular, label_string, sample_points)
from .report import dumps, point_json, record_json, regularity_json, singular_json
from .weyl import WeightVector, chart_pullback, initial_ideal, translate_ideal

EXIT_OK = 0
EXIT_IRREGULAR = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3
EXIT_RESOURCE = 4

VERDICT_EXIT = {REGULAR: EXIT_OK, IRREGULAR: EXIT_IRREGULAR, INCONCLUSIVE: EXIT_INCONCLUSIVE}

COMMANDS = ("rank", "init", "sing", "support", "irrdiv", "regular", "oracle")


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _vector(text: str) -> tuple:
    try:
        return tuple(mpq(part.strip()) for part in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad vector {text!r}: {exc}") from None


def _charts(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"bad chart list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgumentParser(prog="dreg", description="Regularity of holonomic D-modules.")
    ap.add_argument("--version", action="version", version=f"dreg {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("file", help="problem file (.dreg), or - for standard input")
    ap.add_argument("--out", help="write the report here instead of standard output")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--check-infinity", action="store_true",
                    help="also examine the standard charts of projective space")
    ap.add_argument("--charts", type=_charts, help="comma-separated chart indices")
    ap.add_argument("--cross-check", action="store_true",
                    help="append line-restriction oracle verdicts (regular)")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--point", type=_vector)
    ap.add_argument("--weight", type=_vector)
    ap.add_argument("--direction", type=_vector, help="line direction for oracle")
    ap.add_argument("--points-per-component", type=int)
    ap.add_argument("--height-bound", type=int)
    ap.add_argument("--budget-ms", type=int, help="wall-clock cap per Gröbner computation")
    ap.add_argument("--timing", action="store_true",
                    help="include elapsed time (makes the report non-reproducible)")
    return ap


def _read_problem(path: str) -> ProblemFile:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_ideal(text)


def _options(args, pf: ProblemFile) -> RegularityOptions:
    def pick(cli, file, default):
        return cli if cli is not None else file if file is not None else default

    opts = RegularityOptions(
        seed=pick(args.seed, pf.seed, 0),
        height_bound=pick(args.height_bound, pf.height_bound, 5),
        points_per_component=pick(args.points_per_component, pf.points_per_component, 3),
        check_infinity=args.check_infinity,
        charts=pick(args.charts, pf.charts, None),
        components=pf.components,
        avoid=list(pf.avoid),
        points=list(pf.points) + ([args.point] if args.point else []),
        budget_ms=pick(args.budget_ms, pf.budget_ms, None),
        jobs=max(1, args.jobs),
    )
    if opts.height_bound < 1 or opts.points_per_component < 1:
        raise UsageError("height bound and points per component must be positive")
    for p in opts.points:
        if len(p) != pf.nvars:
            raise UsageError(f"point needs {pf.nvars} coordinates")
    return opts


def _check_len(v, n: int, what: str) -> None:
    if v is not None and len(v) != n:
        raise UsageError(f"{what} needs {n} coordinates, got {len(v)}")


# --------------------------------------------------------------------------
# commands


def cmd_rank(pf, args, opts):
    return {"rank": holonomic_rank(pf.ideal, opts.budget()).value}, EXIT_OK


def cmd_init(pf, args, opts):
    n = pf.nvars
    _check_len(args.point, n, "point")
    _check_len(args.weight, n, "weight")
    p = args.point or (0,) * n
    w = args.weight or (pf.weights[0] if pf.weights else (1,) * n)
    J = initial_ideal(translate_ideal(pf.ideal, p), WeightVector(w), opts.budget())
    doc = {
        "point": point_json(p),
        "weight": point_json(w),
        "generators": [g.to_str() for g in J.generators],
        "rank": holonomic_rank(J, opts.budget()).value,
    }
    return doc, EXIT_OK


def cmd_sing(pf, args, opts):
    return singular_json(singular_locus(pf.ideal, opts.budget())), EXIT_OK


def cmd_support(pf, args, opts):
    records = irregular_support(pf.ideal, pf.components, opts)
    doc = {
        "rank": holonomic_rank(pf.ideal).value,
        "records": [record_json(r) for r in records],
        "support": [label_string(r.label) for r in records
                    if r.status == STABLE and r.irr_mult > 0],
    }
    return doc, EXIT_OK


def cmd_irrdiv(pf, args, opts):
    report = is_regular(pf.ideal, opts)
    doc = {
        "divisor": [{"poly": label_string(F), "mult": m} for F, m in report.divisor.entries],
        "infinityChecked": report.infinity_checked,
        "complete": all(r.status == STABLE for r in report.records),
    }
    return doc, EXIT_OK


def _cross_check(pf, report, opts) -> list[dict]:
    out = []
    ideals = {AFFINE: pf.ideal}
    for rec in report.records:
        if rec.status != STABLE:
            continue
        if rec.chart not in ideals:
            ideals[rec.chart] = chart_pullback(pf.ideal, rec.chart)
        entry = {"chart": rec.chart_name, "component": rec.component.to_str(),
                 "point": point_json(rec.points[0])}
        try:
            ok = line_regularity_oracle(ideals[rec.chart], rec.points[0],
                                        component=rec.component, seed=opts.seed)
            entry["oracleRegular"] = ok
            entry["agrees"] = ok == (rec.irr_mult == 0)
        except (CyclicVectorNotFound, LineInPolarLocus, UsageError) as exc:
            entry["oracleRegular"] = None
            entry["agrees"] = None
            entry["note"] = str(exc)
        out.append(entry)
    return out


def cmd_regular(pf, args, opts):
    report = is_regular(pf.ideal, opts)
    doc = regularity_json(report)
    doc["seed"] = opts.seed
    if args.cross_check:
        checks = _cross_check(pf, report, opts)
        doc["crossCheck"] = checks
        if any(c["agrees"] is False for c in checks):
            doc["caveats"].append("line oracle disagrees with the gr-rank verdict")
    return doc, VERDICT_EXIT[report.verdict]


def cmd_oracle(pf, args, opts):
    I = pf.ideal
    n = pf.nvars
    _check_len(args.point, n, "point")
    _check_len(args.direction, n, "direction")
    if not holonomic_rank(I, opts.budget()).is_finite:
        raise NotFiniteRank("holonomic rank is infinite")
    sing = singular_locus(I, opts.budget())
    comps = list(pf.components or sing.codim1)
    results = []
    if args.point is not None:
        on = [f for f in comps if f.evaluate(args.point) == 0]
        ok = line_regularity_oracle(I, args.point, args.direction,
                                    component=on[0] if on else None, seed=opts.seed)
        results.append({"component": on[0].to_str() if on else None,
                        "point": point_json(args.point), "regular": ok})
    else:
        for f in comps:
            others = [g for g in comps + sing.codim1 if g != f]
            pts = sample_points(f, others + opts.avoid, 1, f"{opts.seed}:{AFFINE}:{f.to_str()}",
                                opts.height_bound, deeper=sing.deeper, declared=opts.points)
            ok = line_regularity_oracle(I, pts[0], component=f, seed=opts.seed)
            results.append({"component": f.to_str(), "point": point_json(pts[0]), "regular": ok})
    doc = {"oracle": results, "seed": opts.seed}
    return doc, EXIT_OK if all(r["regular"] for r in results) else EXIT_IRREGULAR


HANDLERS = {
    "rank": cmd_rank, "init": cmd_init, "sing": cmd_sing, "support": cmd_support,
    "irrdiv": cmd_irrdiv, "regular": cmd_regular, "oracle": cmd_oracle,
}


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_command(argv) -> int:
    start = time.monotonic()
    out = None
    try:
        args = build_parser().parse_args(list(argv))
        out = args.out
        pf = _read_problem(args.file)
        opts = _options(args, pf)
        doc, code = HANDLERS[args.command](pf, args, opts)
        doc["command"] = args.command
        doc["budget"] = {"budgetMs": opts.budget_ms if opts.budget_ms is not None
                         else bb.Budget().ms}
        if args.timing:
            doc["timing"] = {"elapsedMs": round(1000 * (time.monotonic() - start))}
        _write(dumps(doc), out)
        return code
    except ResourceError as exc:
        print(f"dreg: {exc}", file=sys.stderr)
        _write(dumps({"error": str(exc), "diagnostics": exc.diagnostics}), out)
        return EXIT_RESOURCE
    except (UsageError, NotFiniteRank) as exc:
        print(f"dreg: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CyclicVectorNotFound, LineInPolarLocus) as exc:
        print(f"dreg: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except DregError as exc:
        print(f"dreg: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
