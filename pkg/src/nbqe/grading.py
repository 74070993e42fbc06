"""Human judgement normalization and score-to-grade bucketing."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from nbqe.errors import DataError

N_PARAMETERS = 10
MAX_PARAMETER_SCORE = 4

# Upper (inclusive) bounds of Poor, Average and Good; Excellent takes the rest.
GRADE_UPPER_BOUNDS = (0.25, 0.50, 0.75)


class Grade(enum.IntEnum):
    """Quality classes in canonical order; ties always resolve toward POOR."""

    POOR = 0
    AVERAGE = 1
    GOOD = 2
    EXCELLENT = 3

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> Grade:
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise DataError(f"unknown grade {text!r}; expected one of "
                            f"{', '.join(g.label for g in cls)}") from None


GRADES = tuple(Grade)


@dataclass(frozen=True)
class HumanAnnotation:
    """Ten 0-4 judgements for one translation: gender/number, proper nouns,
    adjectives/adverbs, lexical choice, phrase order, punctuation, tense,
    voice, semantics and fluency."""

    id: str
    parameter_scores: tuple[int, ...]

    def __post_init__(self):
        if len(self.parameter_scores) != N_PARAMETERS:
            raise DataError(f"{self.id}: expected {N_PARAMETERS} parameter scores, "
                            f"got {len(self.parameter_scores)}")
        for s in self.parameter_scores:
            if isinstance(s, bool) or not isinstance(s, int) or not 0 <= s <= MAX_PARAMETER_SCORE:
                raise DataError(f"{self.id}: parameter score {s!r} outside 0..{MAX_PARAMETER_SCORE}")


def normalize(annotation: HumanAnnotation) -> float:
    return sum(annotation.parameter_scores) / (N_PARAMETERS * MAX_PARAMETER_SCORE)


def to_grade(score: float) -> Grade:
    """Bucket a normalized score: [0, .25] poor, (.25, .5] average,
    (.5, .75] good, (.75, 1] excellent."""
    if not 0.0 <= score <= 1.0:
        raise DataError(f"score {score!r} outside [0, 1]")
    for grade, upper in zip(GRADES, GRADE_UPPER_BOUNDS):
        if score <= upper:
            return grade
    return Grade.EXCELLENT


def grade_annotation(annotation: HumanAnnotation) -> Grade:
    return to_grade(normalize(annotation))


def _data_lines(path: str | Path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if line.strip():
            yield lineno, line.split("\t")


def load_annotations(path: str | Path) -> dict[str, HumanAnnotation]:
    """Read ``id<TAB>s1 .. s10`` rows into a dict keyed by id (file order kept)."""
    out: dict[str, HumanAnnotation] = {}
    for lineno, cols in _data_lines(path):
        if len(cols) != N_PARAMETERS + 1:
            raise DataError(f"{path}:{lineno}: expected {N_PARAMETERS + 1} columns, got {len(cols)}")
        sid = cols[0].strip()
        if sid in out:
            raise DataError(f"{path}:{lineno}: duplicate id {sid!r}")
        try:
            scores = tuple(int(c) for c in cols[1:])
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-integer parameter score") from None
        try:
            out[sid] = HumanAnnotation(sid, scores)
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
    return out


def write_annotations(path: str | Path, annotations: Sequence[HumanAnnotation]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a in annotations:
            fh.write("\t".join([a.id, *map(str, a.parameter_scores)]) + "\n")


def load_gold_grades(path: str | Path) -> dict[str, Grade]:
    out: dict[str, Grade] = {}
    for lineno, cols in _data_lines(path):
        if len(cols) != 2:
            raise DataError(f"{path}:{lineno}: expected 2 columns, got {len(cols)}")
        sid = cols[0].strip()
        if sid in out:
            raise DataError(f"{path}:{lineno}: duplicate id {sid!r}")
        try:
            out[sid] = Grade.parse(cols[1])
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
    return out


def write_gold_grades(path: str | Path, grades: dict[str, Grade]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sid, g in grades.items():
            fh.write(f"{sid}\t{g.label}\n")
