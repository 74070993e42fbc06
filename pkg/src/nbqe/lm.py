"""Laplace-smoothed n-gram language model used for the LM-probability features."""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from nbqe.errors import DataError, UsageError
from nbqe.text import TokenizedSentence

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
RESERVED = frozenset((BOS, EOS, UNK))

LM_FORMAT_VERSION = 1

Context = tuple[str, ...]


def _tokens(sent: TokenizedSentence | Sequence[str]) -> tuple[str, ...]:
    return sent.tokens if isinstance(sent, TokenizedSentence) else tuple(sent)


def pad(tokens: Sequence[str], order: int) -> list[str]:
    return [BOS] * (order - 1) + list(tokens) + [EOS]


@dataclass(frozen=True)
class NgramLanguageModel:
    """Add-one smoothed n-gram model with a closed vocabulary.

    ``counts[k]`` maps each length-``k`` context to successor counts for
    k = 0 .. order-1; only the top order is used for scoring, lower orders are
    kept for inspection. The vocabulary holds every training token plus EOS and
    UNK; BOS is never predicted and so is not part of it.
    """

    order: int
    vocabulary: frozenset[str]
    counts: tuple[Mapping[Context, Mapping[str, int]], ...] = field(repr=False)
    _totals: Mapping[Context, int] = field(repr=False, compare=False)

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)

    def map_token(self, token: str) -> str:
        return token if token in self.vocabulary else UNK

    def prob(self, token: str, context: Sequence[str]) -> float:
        """P(token | context) with add-one smoothing; unseen contexts are uniform."""
        ctx = tuple(context)[-(self.order - 1):] if self.order > 1 else ()
        ctx = tuple(c if c == BOS else self.map_token(c) for c in ctx)
        token = self.map_token(token)
        successors = self.counts[self.order - 1].get(ctx)
        if successors is None:
            return 1.0 / self.vocab_size
        return (successors.get(token, 0) + 1) / (self._totals[ctx] + self.vocab_size)

    def sentence_logprob(self, sentence: TokenizedSentence | Sequence[str]) -> float:
        tokens = [self.map_token(t) for t in _tokens(sentence)]
        padded = pad(tokens, self.order)
        h = self.order - 1
        return sum(math.log(self.prob(padded[i], padded[i - h:i])) for i in range(h, len(padded)))

    def to_dict(self) -> dict:
        doc_counts = []
        for k, table in enumerate(self.counts):
            rows = [[*ctx, tok, c] for ctx, succ in table.items() for tok, c in succ.items()]
            rows.sort(key=lambda r: tuple(r[:-1]))
            doc_counts.append({"context_length": k, "ngrams": rows})
        return {
            "version": LM_FORMAT_VERSION,
            "order": self.order,
            "vocab": sorted(self.vocabulary),
            "counts": doc_counts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, doc: Mapping) -> NgramLanguageModel:
        if doc.get("version") != LM_FORMAT_VERSION:
            raise DataError(f"unsupported language model version {doc.get('version')!r}")
        order = int(doc["order"])
        tables = []
        for k, entry in enumerate(doc["counts"]):
            if entry["context_length"] != k:
                raise DataError("language model counts out of order")
            table: dict[Context, dict[str, int]] = defaultdict(dict)
            for row in entry["ngrams"]:
                *ctx, tok, c = row
                table[tuple(ctx)][tok] = int(c)
            tables.append(dict(table))
        if len(tables) != order:
            raise DataError(f"language model has {len(tables)} count tables for order {order}")
        return _assemble(order, frozenset(doc["vocab"]), tables)

    @classmethod
    def from_json(cls, text: str) -> NgramLanguageModel:
        return cls.from_dict(json.loads(text))


def _assemble(order, vocabulary, tables) -> NgramLanguageModel:
    totals = {ctx: sum(succ.values()) for ctx, succ in tables[-1].items()}
    return NgramLanguageModel(order, vocabulary, tuple(tables), totals)


def train_lm(sentences: Iterable[TokenizedSentence | Sequence[str]], order: int = 3) -> NgramLanguageModel:
    if order < 1:
        raise UsageError(f"language model order must be >= 1, got {order}")
    tables: list[dict[Context, Counter[str]]] = [defaultdict(Counter) for _ in range(order)]
    vocab = {EOS, UNK}
    n_sent = 0
    for sent in sentences:
        tokens = _tokens(sent)
        bad = RESERVED.intersection(tokens)
        if bad:
            raise DataError(f"reserved symbol {sorted(bad)[0]!r} in language model training text")
        n_sent += 1
        vocab.update(tokens)
        padded = pad(tokens, order)
        for i in range(order - 1, len(padded)):
            for k in range(order):
                tables[k][tuple(padded[i - k:i])][padded[i]] += 1
    if n_sent == 0:
        raise DataError("cannot train a language model on an empty corpus")
    frozen = [
        {ctx: dict(sorted(succ.items())) for ctx, succ in sorted(table.items())}
        for table in tables
    ]
    return _assemble(order, frozenset(vocab), frozen)


def sentence_avg_logprob(model: NgramLanguageModel, sentence: TokenizedSentence | Sequence[str]) -> float:
    """Natural-log probability per predicted position (tokens plus the end marker)."""
    n = len(_tokens(sentence))
    return model.sentence_logprob(sentence) / (n + 1)
