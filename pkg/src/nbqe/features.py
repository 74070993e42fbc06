"""The sixteen black-box source/target features.

Slot order (1-based names ``f1``..``f16``):

 1  source token count
 2  target token count
 3  mean source token length (code points)
 4  source LM log-prob per token
 5  target LM log-prob per token
 6  mean occurrences of each target token within the target sentence
 7  mean translations per source token (translation table, prob > threshold)
 8  % low-frequency source unigrams
 9  % high-frequency source unigrams
10  % low-frequency source bigrams
11  % high-frequency source bigrams
12  % high-frequency source trigrams
13  % low-frequency source trigrams
14  % source unigrams seen in the corpus
15  source punctuation count
16  target punctuation count

Slots 12 and 13 deliberately put "high" before "low".
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from nbqe.errors import DataError
from nbqe.lm import NgramLanguageModel, sentence_avg_logprob
from nbqe.text import NgramTable, ParallelPair, is_punctuation, ngrams

N_FEATURES = 16
FEATURE_NAMES = tuple(f"f{i}" for i in range(1, N_FEATURES + 1))
DEFAULT_TRANSLATION_THRESHOLD = 0.2

LOW, HIGH = "low", "high"


@dataclass(frozen=True)
class TranslationTable:
    entries: Mapping[str, tuple[tuple[str, float], ...]] = field(default_factory=dict)

    def __post_init__(self):
        for src, cands in self.entries.items():
            for tgt, p in cands:
                if not 0.0 < p <= 1.0:
                    raise DataError(f"translation probability {p!r} for {src!r}->{tgt!r} outside (0, 1]")

    def n_translations(self, token: str, threshold: float) -> int:
        return sum(1 for _, p in self.entries.get(token, ()) if p > threshold)

    @classmethod
    def from_pairs(cls, rows: Iterable[tuple[str, str, float]]) -> TranslationTable:
        grouped: dict[str, list[tuple[str, float]]] = defaultdict(list)
        for src, tgt, p in rows:
            grouped[src].append((tgt, float(p)))
        return cls({s: tuple(sorted(c)) for s, c in sorted(grouped.items())})

    def rows(self) -> list[tuple[str, str, float]]:
        return [(s, t, p) for s, cands in self.entries.items() for t, p in cands]


def load_translation_table(path: str | Path) -> TranslationTable:
    """Read ``source<TAB>target<TAB>prob`` rows. Source words are lowercased to
    match the tokenizer; a repeated (source, target) pair is an error."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").split("\n")
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    rows = []
    seen = set()
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise DataError(f"{path}:{lineno}: expected 3 columns, got {len(cols)}")
        src, tgt = cols[0].strip().lower(), cols[1].strip()
        try:
            p = float(cols[2])
        except ValueError:
            raise DataError(f"{path}:{lineno}: bad probability {cols[2]!r}") from None
        if not 0.0 < p <= 1.0:
            raise DataError(f"{path}:{lineno}: probability {p!r} outside (0, 1]")
        if (src, tgt) in seen:
            raise DataError(f"{path}:{lineno}: duplicate entry {src!r} -> {tgt!r}")
        seen.add((src, tgt))
        rows.append((src, tgt, p))
    return TranslationTable.from_pairs(rows)


def write_translation_table(path: str | Path, table: TranslationTable) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s, t, p in table.rows():
            fh.write(f"{s}\t{t}\t{p:.6f}\n")


def frequency_band_percentage(tokens: Sequence[str], table: NgramTable, band: str) -> float:
    grams = ngrams(tokens, table.order)
    if not grams:
        return 0.0
    if band == LOW:
        hits = sum(table.is_low(g) for g in grams)
    elif band == HIGH:
        hits = sum(table.is_high(g) for g in grams)
    else:
        raise ValueError(f"band must be {LOW!r} or {HIGH!r}, got {band!r}")
    return 100.0 * hits / len(grams)


def seen_unigram_percentage(tokens: Sequence[str], table: NgramTable) -> float:
    if table.order != 1:
        raise ValueError("seen-unigram percentage needs an order-1 table")
    if not tokens:
        raise DataError("seen-unigram percentage of an empty sentence is undefined")
    return 100.0 * sum(table.count((t,)) > 0 for t in tokens) / len(tokens)


def mean_occurrence(tokens: Sequence[str]) -> float:
    counts = Counter(tokens)
    return sum(counts[t] for t in tokens) / len(tokens)


@dataclass(frozen=True)
class FeatureResources:
    """Everything feature extraction needs besides the pair itself."""

    src_lm: NgramLanguageModel
    tgt_lm: NgramLanguageModel
    src_tables: Mapping[int, NgramTable]
    ttable: TranslationTable
    threshold: float = DEFAULT_TRANSLATION_THRESHOLD


def extract_features(
    pair: ParallelPair,
    src_lm: NgramLanguageModel,
    tgt_lm: NgramLanguageModel,
    src_tables: Mapping[int, NgramTable],
    ttable: TranslationTable,
    threshold: float = DEFAULT_TRANSLATION_THRESHOLD,
) -> np.ndarray:
    src = pair.source.tokens
    tgt = pair.target.tokens
    if not src:
        raise DataError(f"{pair.id}: empty source sentence")
    if not tgt:
        raise DataError(f"{pair.id}: empty target sentence")
    uni, bi, tri = src_tables[1], src_tables[2], src_tables[3]
    fv = np.array([
        len(src),
        len(tgt),
        sum(len(t) for t in src) / len(src),
        sentence_avg_logprob(src_lm, src),
        sentence_avg_logprob(tgt_lm, tgt),
        mean_occurrence(tgt),
        sum(ttable.n_translations(t, threshold) for t in src) / len(src),
        frequency_band_percentage(src, uni, LOW),
        frequency_band_percentage(src, uni, HIGH),
        frequency_band_percentage(src, bi, LOW),
        frequency_band_percentage(src, bi, HIGH),
        frequency_band_percentage(src, tri, HIGH),
        frequency_band_percentage(src, tri, LOW),
        seen_unigram_percentage(src, uni),
        sum(is_punctuation(t) for t in src),
        sum(is_punctuation(t) for t in tgt),
    ], dtype=float)
    if not all(math.isfinite(v) for v in fv):
        raise DataError(f"{pair.id}: non-finite feature value")
    return fv


def extract_batch(pairs: Sequence[ParallelPair], res: FeatureResources) -> np.ndarray:
    """Stack feature vectors row-wise, one row per pair in input order."""
    rows = [extract_features(p, res.src_lm, res.tgt_lm, res.src_tables, res.ttable, res.threshold)
            for p in pairs]
    if not rows:
        return np.empty((0, N_FEATURES))
    return np.vstack(rows)


def write_feature_file(path: str | Path, ids: Sequence[str], matrix: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(("id",) + FEATURE_NAMES) + "\n")
        for sid, row in zip(ids, matrix):
            fh.write("\t".join([sid, *(f"{v:.6f}" for v in row)]) + "\n")


def read_feature_file(path: str | Path) -> tuple[list[str], np.ndarray]:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").split("\n") if ln.strip()]
    if not lines or lines[0].split("\t") != ["id", *FEATURE_NAMES]:
        raise DataError(f"{path}: missing or malformed feature header")
    ids, rows = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        cols = line.split("\t")
        if len(cols) != N_FEATURES + 1:
            raise DataError(f"{path}:{lineno}: expected {N_FEATURES + 1} columns, got {len(cols)}")
        ids.append(cols[0])
        rows.append([float(c) for c in cols[1:]])
    return ids, np.array(rows, dtype=float).reshape(-1, N_FEATURES)
