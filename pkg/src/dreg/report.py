"""Canonical JSON documents for command results.

Every document is a single object with sorted keys, two-space indentation
and a trailing newline.  Rationals are strings ``"p"`` or ``"p/q"`` and
polynomials are printed with their terms in degrevlex-descending order, so
equal results always serialize to equal bytes.
"""

from __future__ import annotations

import json
from typing import Sequence

from .arith import MultiPoly, format_rational
from .rank import RankResult, SingularLocus
from .regularity import ComponentRecord, Divisor, RegularityReport, label_string

SCHEMA = "dreg-report/1"


def point_json(p: Sequence) -> list[str]:
    return [format_rational(c) for c in p]


def record_json(rec: ComponentRecord) -> dict:
    out = {
        "component": rec.component.to_str(),
        "label": label_string(rec.label),
        "points": [point_json(p) for p in rec.points],
        "grRanks": list(rec.gr_ranks),
        "irrMult": rec.irr_mult,
        "status": rec.status,
    }
    if rec.note:
        out["note"] = rec.note
    return out


def divisor_json(d: Divisor) -> list[dict]:
    return [{"poly": label_string(F), "mult": m} for F, m in d.entries]


def regularity_json(report: RegularityReport) -> dict:
    charts: dict[str, list] = {}
    for k in report.charts:
        charts["affine" if k == 0 else f"chart{k}"] = []
    for rec in report.records:
        charts[rec.chart_name].append(record_json(rec))
    return {
        "rank": report.rank,
        "verdict": report.verdict,
        "infinityChecked": report.infinity_checked,
        "charts": charts,
        "divisor": divisor_json(report.divisor),
        "caveats": list(report.caveats),
    }


def rank_json(r: RankResult) -> dict:
    return {"rank": r.value}


def singular_json(s: SingularLocus) -> dict:
    return {
        "codim1": [f.to_str() for f in s.codim1],
        "mayHaveDeeper": s.may_have_deeper,
        "deeperStrata": [[g.to_str() for g in stratum] for stratum in s.deeper],
    }


def polys_json(polys: Sequence[MultiPoly]) -> list[str]:
    return [p.to_str() for p in polys]


def dumps(doc: dict) -> str:
    """Serialize with the schema tag added; deterministic bytes."""
    body = dict(doc)
    body.setdefault("schema", SCHEMA)
    return json.dumps(body, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit_report(result, command: str | None = None, **extra) -> str:
    """Document text for a report, divisor or rank."""
    if isinstance(result, RegularityReport):
        doc = regularity_json(result)
    elif isinstance(result, Divisor):
        doc = {"divisor": divisor_json(result)}
    elif isinstance(result, RankResult):
        doc = rank_json(result)
    elif isinstance(result, SingularLocus):
        doc = singular_json(result)
    elif isinstance(result, dict):
        doc = dict(result)
    else:
        raise TypeError(f"cannot emit {type(result).__name__}")
    if command is not None:
        doc["command"] = command
    doc.update(extra)
    return dumps(doc)
