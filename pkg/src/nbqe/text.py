"""Tokenization, corpus loading and corpus n-gram frequency tables."""

from __future__ import annotations

import json
import logging
import string
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from nbqe.errors import DataError, UsageError

logger = logging.getLogger(__name__)

DANDA = "।"
DOUBLE_DANDA = "॥"
PUNCTUATION = frozenset(string.punctuation + DANDA + DOUBLE_DANDA)

TABLE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TokenizedSentence:
    raw: str
    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class ParallelPair:
    id: str
    source: TokenizedSentence
    target: TokenizedSentence
    engine: str | None = None


@dataclass(frozen=True)
class CorpusStats:
    """Sentence, word and unique-word counts (the shape of a corpus summary table)."""

    sentences: int
    words: int
    unique_words: int

    def as_dict(self) -> dict[str, int]:
        return {"sentences": self.sentences, "words": self.words, "unique_words": self.unique_words}


def _split_chunk(chunk: str) -> list[str]:
    start, end = 0, len(chunk)
    while start < end and chunk[start] in PUNCTUATION:
        start += 1
    while end > start and chunk[end - 1] in PUNCTUATION:
        end -= 1
    out = list(chunk[:start])
    if start < end:
        out.append(chunk[start:end].lower())
    out.extend(chunk[end:])
    return out


def tokenize(text: str) -> TokenizedSentence:
    """Split on Unicode whitespace, then peel leading/trailing punctuation.

    Every peeled punctuation character becomes its own token; the remaining
    word body is lowercased (a no-op for uncased scripts such as Devanagari).
    Punctuation inside a word (``don't``, ``3.5``) stays attached.
    """
    tokens: list[str] = []
    for chunk in text.split():
        tokens.extend(_split_chunk(chunk))
    return TokenizedSentence(raw=text, tokens=tuple(tokens))


def is_punctuation(token: str) -> bool:
    return len(token) == 1 and token in PUNCTUATION


def corpus_stats(sentences: Iterable[TokenizedSentence]) -> CorpusStats:
    n = 0
    vocab: Counter[str] = Counter()
    for sent in sentences:
        n += 1
        vocab.update(sent.tokens)
    return CorpusStats(sentences=n, words=sum(vocab.values()), unique_words=len(vocab))


def _read_lines(path: str | Path) -> list[str]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from None
    return text.split("\n")


def load_parallel_corpus(path: str | Path) -> list[ParallelPair]:
    """Read ``id<TAB>source<TAB>target[<TAB>engine]`` lines.

    Blank lines are skipped; line numbers in error messages are 1-based
    physical line numbers.
    """
    pairs: list[ParallelPair] = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(_read_lines(path), start=1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) not in (3, 4):
            raise DataError(f"{path}:{lineno}: expected 3 or 4 tab-separated columns, got {len(cols)}")
        sid = cols[0].strip()
        if not sid:
            raise DataError(f"{path}:{lineno}: empty sentence id")
        if sid in seen:
            raise DataError(f"{path}:{lineno}: duplicate id {sid!r} (first seen at line {seen[sid]})")
        seen[sid] = lineno
        engine = cols[3].strip() if len(cols) == 4 and cols[3].strip() else None
        pairs.append(ParallelPair(sid, tokenize(cols[1]), tokenize(cols[2]), engine))
    if pairs:
        src = corpus_stats(p.source for p in pairs)
        tgt = corpus_stats(p.target for p in pairs)
        logger.info("%s: %d sentences; source %d words / %d unique; target %d words / %d unique",
                    path, src.sentences, src.words, src.unique_words, tgt.words, tgt.unique_words)
    return pairs


def load_monolingual_corpus(path: str | Path) -> list[TokenizedSentence]:
    return [tokenize(line) for line in _read_lines(path) if line.strip()]


def ngrams(tokens: Sequence[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


@dataclass(frozen=True)
class NgramTable:
    """Corpus counts of order-``n`` n-grams plus quartile frequency thresholds.

    An n-gram is *low* frequency when its count is at most ``low_threshold``
    (unseen n-grams have count 0, hence are low) and *high* frequency when its
    count is at least ``high_threshold`` and strictly above ``low_threshold``,
    so the two bands never overlap.
    """

    order: int
    counts: Mapping[tuple[str, ...], int] = field(repr=False)
    low_threshold: float
    high_threshold: float

    @property
    def distinct(self) -> int:
        return len(self.counts)

    def count(self, gram: tuple[str, ...]) -> int:
        return self.counts.get(gram, 0)

    def is_low(self, gram: tuple[str, ...]) -> bool:
        return self.count(gram) <= self.low_threshold

    def is_high(self, gram: tuple[str, ...]) -> bool:
        c = self.count(gram)
        return c >= self.high_threshold and c > self.low_threshold

    def to_json(self) -> str:
        rows = [[*gram, c] for gram, c in sorted(self.counts.items())]
        doc = {
            "version": TABLE_FORMAT_VERSION,
            "order": self.order,
            "low_threshold": self.low_threshold,
            "high_threshold": self.high_threshold,
            "counts": rows,
        }
        return json.dumps(doc, ensure_ascii=False)

    def to_dict(self) -> dict:
        return json.loads(self.to_json())

    @classmethod
    def from_dict(cls, doc: Mapping) -> NgramTable:
        if doc.get("version") != TABLE_FORMAT_VERSION:
            raise DataError(f"unsupported n-gram table version {doc.get('version')!r}")
        order = int(doc["order"])
        counts = {}
        for row in doc["counts"]:
            if len(row) != order + 1:
                raise DataError(f"n-gram table row {row!r} does not match order {order}")
            counts[tuple(row[:-1])] = int(row[-1])
        return cls(order, counts, float(doc["low_threshold"]), float(doc["high_threshold"]))

    @classmethod
    def from_json(cls, text: str) -> NgramTable:
        return cls.from_dict(json.loads(text))


def quartile_thresholds(counts: Iterable[int]) -> tuple[float, float]:
    """25th and 75th percentiles of ``counts``, linearly interpolated between ranks."""
    arr = np.sort(np.fromiter(counts, dtype=float))
    if arr.size == 0:
        raise DataError("cannot compute frequency thresholds of an empty table")
    low, high = np.percentile(arr, [25, 75], method="linear")
    return float(low), float(high)


def build_ngram_table(sentences: Iterable[TokenizedSentence | Sequence[str]], order: int) -> NgramTable:
    """Count within-sentence n-grams of ``order`` (no boundary padding)."""
    if order not in (1, 2, 3):
        raise UsageError(f"n-gram order must be 1, 2 or 3, got {order}")
    counts: Counter[tuple[str, ...]] = Counter()
    for sent in sentences:
        tokens = sent.tokens if isinstance(sent, TokenizedSentence) else tuple(sent)
        counts.update(ngrams(tokens, order))
    if not counts:
        raise DataError(f"no {order}-grams in corpus (every sentence shorter than {order} tokens)")
    low, high = quartile_thresholds(counts.values())
    return NgramTable(order, dict(sorted(counts.items())), low, high)
