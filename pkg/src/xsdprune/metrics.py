"""Schema-size metrics: component and relation cardinalities plus totals."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, fields

from .model import Kind, Relation, SchemaSet


@dataclass(frozen=True)
class SchemaMetrics:
    cardT: int = 0
    cardE: int = 0
    cardA: int = 0
    cardMG: int = 0
    cardAG: int = 0
    cardIsOfType: int = 0
    cardReference: int = 0
    cardContains: int = 0
    cardIsDerivedFrom: int = 0
    cardIsInSubstitutionGroup: int = 0

    @property
    def totalC(self) -> int:
        return self.cardT + self.cardE + self.cardA + self.cardMG + self.cardAG

    @property
    def totalR(self) -> int:
        return (self.cardIsOfType + self.cardReference + self.cardContains
                + self.cardIsDerivedFrom + self.cardIsInSubstitutionGroup)

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, f.name) for f in fields(self)) + (self.totalC, self.totalR)

    def as_dict(self) -> dict[str, int]:
        d = asdict(self)
        d["totalC"] = self.totalC
        d["totalR"] = self.totalR
        return d


# Row order and labels follow the published comparison table.
ROWS = [
    ("cardT", "|T|"),
    ("cardE", "|E|"),
    ("cardA", "|A|"),
    ("cardMG", "|MG|"),
    ("cardAG", "|AG|"),
    ("cardIsOfType", "|isTypeOf|"),
    ("cardReference", "|reference|"),
    ("cardContains", "|contains|"),
    ("cardIsDerivedFrom", "|isDerivedFrom|"),
    ("cardIsInSubstitutionGroup", "|isInSubstitutionGroup|"),
    ("totalC", "Total_C"),
    ("totalR", "Total_R"),
]


def compute_metrics(s: SchemaSet, include_builtins: bool = True) -> SchemaMetrics:
    types = s.types if include_builtins else {t for t in s.types if not t.is_builtin}
    return SchemaMetrics(
        cardT=len(types),
        cardE=len(s.elements),
        cardA=len(s.attributes),
        cardMG=len(s.model_groups),
        cardAG=len(s.attribute_groups),
        cardIsOfType=len(s.relation(Relation.IS_OF_TYPE)),
        cardReference=len(s.relation(Relation.REFERENCE)),
        cardContains=len(s.relation(Relation.CONTAINS)),
        cardIsDerivedFrom=len(s.relation(Relation.IS_DERIVED_FROM)),
        cardIsInSubstitutionGroup=len(s.relation(Relation.IS_IN_SUBSTITUTION_GROUP)),
    )


def scope_breakdown(s: SchemaSet) -> dict[str, dict[str, int]]:
    """Global/inner split per component kind (inner scope exists for E and A only)."""
    out = {}
    for kind in Kind:
        comps = s.components(kind)
        inner = sum(1 for c in comps if not c.is_global)
        out[kind.value] = {"global": len(comps) - inner, "inner": inner}
    return out


@dataclass(frozen=True)
class ComparisonRow:
    metric: str
    label: str
    full: int
    reduced: int

    @property
    def reduction(self) -> float | None:
        if self.full == 0:
            return None
        return 1.0 - self.reduced / self.full

    @property
    def reduction_text(self) -> str:
        r = self.reduction
        return "n/a" if r is None else f"{r * 100:.1f}%"


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]

    def row(self, metric: str) -> ComparisonRow:
        return next(r for r in self.rows if r.metric == metric)


def compare_metrics(full: SchemaMetrics, reduced: SchemaMetrics) -> ComparisonReport:
    return ComparisonReport(tuple(
        ComparisonRow(key, label, getattr(full, key), getattr(reduced, key)) for key, label in ROWS
    ))


def render_metrics(m: SchemaMetrics, fmt: str = "text", breakdown: dict | None = None) -> str:
    if fmt == "json":
        payload = {"metrics": m.as_dict()}
        if breakdown is not None:
            payload["breakdown"] = breakdown
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric", "value"])
        for key, label in ROWS:
            w.writerow([label, getattr(m, key)])
        return buf.getvalue()
    width = max(len(label) for _, label in ROWS)
    return "".join(f"{label:<{width}}  {getattr(m, key):>8}\n" for key, label in ROWS)


def render_comparison(report: ComparisonReport, fmt: str = "text") -> str:
    if fmt == "json":
        rows = [{"metric": r.metric, "label": r.label, "full": r.full, "reduced": r.reduced,
                 "reduction": None if r.reduction is None else round(r.reduction * 100, 1)}
                for r in report.rows]
        return json.dumps({"comparison": rows}, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric", "full", "simplified", "reduction"])
        for r in report.rows:
            w.writerow([r.label, r.full, r.reduced, r.reduction_text])
        return buf.getvalue()
    width = max(len(r.label) for r in report.rows)
    lines = [f"{'Metric':<{width}}  {'Full':>8}  {'Simplified':>10}  {'Reduction':>9}"]
    for r in report.rows:
        lines.append(f"{r.label:<{width}}  {r.full:>8}  {r.reduced:>10}  {r.reduction_text:>9}")
    return "\n".join(lines) + "\n"
