"""Grade distributions, classifier/human agreement and confusion matrices."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from nbqe.errors import UsageError
from nbqe.grading import GRADES, Grade


def grade_distribution(grades: Sequence[Grade]) -> dict[Grade, int]:
    dist = dict.fromkeys(GRADES, 0)
    for g in grades:
        dist[Grade(g)] += 1
    return dist


def check_distribution_sum(dist: Mapping[Grade, int], total: int) -> str | None:
    """Return a warning message when a distribution does not sum to ``total``."""
    s = sum(dist.values())
    if s != total:
        return f"grade counts sum to {s}, expected {total}"
    return None


def _check_lengths(predicted, gold):
    if len(predicted) != len(gold):
        raise UsageError(f"{len(predicted)} predictions but {len(gold)} gold grades")


def agreement(predicted: Sequence[Grade], gold: Sequence[Grade]) -> tuple[int, int, float]:
    """Return ``(matches, total, percent)``; percent is unrounded (0 for empty input)."""
    _check_lengths(predicted, gold)
    matches = sum(int(p) == int(g) for p, g in zip(predicted, gold))
    total = len(gold)
    return matches, total, agreement_percent(matches, total)


def agreement_percent(matches: int, total: int) -> float:
    return 100.0 * matches / total if total else 0.0


def format_percent(matches: int, total: int) -> str:
    """Two-decimal percentage, rounded half up from the exact ratio."""
    if not total:
        return "0.00"
    exact = Fraction(100 * matches, total)
    dec = Decimal(exact.numerator) / Decimal(exact.denominator)
    return str(dec.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def confusion_matrix(predicted: Sequence[Grade], gold: Sequence[Grade]) -> np.ndarray:
    """4x4 counts; rows are gold grades, columns predicted, both in canonical order."""
    _check_lengths(predicted, gold)
    cm = np.zeros((len(GRADES), len(GRADES)), dtype=int)
    for p, g in zip(predicted, gold):
        cm[int(g), int(p)] += 1
    return cm


@dataclass(frozen=True)
class EvaluationReport:
    engine: str
    distribution_predicted: dict[Grade, int]
    distribution_gold: dict[Grade, int]
    confusion: np.ndarray | None
    matches: int
    total: int
    agreement_percent: float
    warnings: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "engine": self.engine,
            "distribution_predicted": {g.label: n for g, n in self.distribution_predicted.items()},
            "distribution_gold": {g.label: n for g, n in self.distribution_gold.items()},
            "confusion": None if self.confusion is None else self.confusion.tolist(),
            "matches": self.matches,
            "total": self.total,
            "agreement_percent": float(format_percent(self.matches, self.total)),
            "warnings": list(self.warnings),
        }


def build_report(engine: str, predicted: Sequence[Grade], gold: Sequence[Grade]) -> EvaluationReport:
    cm = confusion_matrix(predicted, gold)
    matches, total, pct = agreement(predicted, gold)
    return EvaluationReport(
        engine=engine,
        distribution_predicted=grade_distribution(predicted),
        distribution_gold=grade_distribution(gold),
        confusion=cm,
        matches=matches,
        total=total,
        agreement_percent=pct,
    )


def report_from_counts(
    engine: str,
    distribution_predicted: Mapping[Grade, int],
    distribution_gold: Mapping[Grade, int],
    matches: int,
    total: int,
) -> EvaluationReport:
    """Assemble a report from published aggregate counts (no per-sentence data).

    The confusion matrix is unknown in this case and left as None.
    Distributions that do not sum to ``total`` are kept as given and flagged
    in ``warnings``.
    """
    if not 0 <= matches <= total:
        raise UsageError(f"matches={matches} must lie in [0, total={total}]")
    pred = {g: int(distribution_predicted.get(g, 0)) for g in GRADES}
    gold = {g: int(distribution_gold.get(g, 0)) for g in GRADES}
    warns = []
    for name, dist in (("predicted", pred), ("gold", gold)):
        msg = check_distribution_sum(dist, total)
        if msg:
            warns.append(f"{engine}: {name} {msg}")
    return EvaluationReport(engine, pred, gold, None, matches, total,
                            agreement_percent(matches, total), tuple(warns))


def reports_to_json(reports: Sequence[EvaluationReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=1, ensure_ascii=False) + "\n"


def _grid(title: str, header: Sequence[str], rows: Sequence[Sequence[str]]) -> list[str]:
    cells = [list(header)] + [list(r) for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    out = [title]
    for r in cells:
        out.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths))))
    return out


def render_tables(reports: Sequence[EvaluationReport]) -> str:
    """Plain-text grade distributions (classifier, human) and agreement table.

    Grades are listed best-first, matching the usual presentation.
    """
    engines = [r.engine for r in reports]
    order = list(reversed(GRADES))
    lines = []
    lines += _grid("NAIVE BAYES CLASSIFIER RESULTS", ["Grade", *engines],
                   [[g.name.capitalize(), *(str(r.distribution_predicted[g]) for r in reports)] for g in order])
    lines.append("")
    lines += _grid("HUMAN EVALUATION RESULTS", ["Grade", *engines],
                   [[g.name.capitalize(), *(str(r.distribution_gold[g]) for r in reports)] for g in order])
    lines.append("")
    lines += _grid("COMPARISON OF NAIVE BAYES CLASSIFIER AND HUMAN EVALUATORS RESULTS",
                   ["SNO", "MT Engine", "Same result", "Total", "percentage"],
                   [[str(i), r.engine, str(r.matches), str(r.total), format_percent(r.matches, r.total)]
                    for i, r in enumerate(reports, start=1)])
    warns = [w for r in reports for w in r.warnings]
    if warns:
        lines.append("")
        lines += [f"warning: {w}" for w in warns]
    return "\n".join(lines) + "\n"
