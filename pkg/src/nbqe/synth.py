"""Seeded synthetic English-Hindi corpus with noise-correlated human scores.

Each pair is a clean word-for-word "translation" of a Markov-chain source
sentence, then degraded by a per-pair noise level: target words are dropped,
replaced by out-of-vocabulary strings or duplicated, and punctuation is
removed. The ten annotation scores are drawn around ``4 * (1 - noise)``, so
noisier pairs receive lower normalized scores.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from nbqe.features import TranslationTable, write_translation_table
from nbqe.grading import N_PARAMETERS, HumanAnnotation, write_annotations

ENGINES = ("engine-a", "engine-b", "engine-c")
# Beta(a, b) parameters of the base noise per engine; engine-a is the cleanest.
ENGINE_NOISE = {"engine-a": (2.0, 4.0), "engine-b": (2.0, 3.0), "engine-c": (3.0, 3.0)}

FUNCTION_WORDS = ("the", "a", "of", "to", "in", "is", "and", "for", "on", "with")
EN_ONSETS = list("bcdfghjklmnprstvwz") + ["ch", "sh", "th", "st", "tr", "pl"]
EN_VOWELS = ["a", "e", "i", "o", "u", "ai", "ea", "ou"]
HI_CONSONANTS = list("कखगघचछजझटठडढतथदधनपफबभमयरलवशसह")
HI_MATRAS = ["", "ा", "ि", "ी", "ु", "ू", "े", "ै", "ो", "ौ"]
SENTENCE_END = {".": "।", "?": "?", "!": "!"}


@dataclass
class SynthConfig:
    size: int = 300
    seed: int = 0
    vocab_size: int = 150
    min_len: int = 5
    max_len: int = 14
    id_prefix: str = "s"


class _Lexicon:
    def __init__(self, rng: np.random.Generator, vocab_size: int):
        words = list(FUNCTION_WORDS)
        seen = set(words)
        while len(words) < vocab_size:
            w = "".join(rng.choice(EN_ONSETS) + rng.choice(EN_VOWELS) for _ in range(rng.integers(1, 4)))
            if w not in seen:
                seen.add(w)
                words.append(w)
        self.words = words
        ranks = np.arange(1, len(words) + 1)
        self.unigram = (1.0 / ranks ** 1.1) / np.sum(1.0 / ranks ** 1.1)
        self.successors = [rng.choice(len(words), size=3, replace=False, p=self.unigram)
                           for _ in words]
        self.translations: list[list[tuple[str, float]]] = []
        used: set[str] = set()
        for _ in words:
            k = int(rng.integers(1, 4))
            probs = np.sort(rng.dirichlet(np.ones(k) * 2.0))[::-1]
            cands = []
            for p in probs:
                t = self._hindi_word(rng, used)
                cands.append((t, round(float(max(p, 1e-3)), 6)))
            self.translations.append(cands)
        self.rare_cutoff = len(words) // 2

    @staticmethod
    def _hindi_word(rng, used) -> str:
        while True:
            w = "".join(rng.choice(HI_CONSONANTS) + rng.choice(HI_MATRAS) for _ in range(rng.integers(1, 4)))
            if w not in used:
                used.add(w)
                return w

    def ttable(self) -> TranslationTable:
        return TranslationTable.from_pairs(
            (src, tgt, p) for src, cands in zip(self.words, self.translations) for tgt, p in cands)


def _oov(rng) -> str:
    return "".join(rng.choice(HI_CONSONANTS) + "्" + rng.choice(HI_CONSONANTS) for _ in range(2))


def _source_sentence(rng, lex: _Lexicon, cfg: SynthConfig) -> list[int]:
    n = int(rng.integers(cfg.min_len, cfg.max_len + 1))
    idx = [int(rng.choice(len(lex.words), p=lex.unigram))]
    while len(idx) < n:
        if rng.random() < 0.7:
            idx.append(int(rng.choice(lex.successors[idx[-1]])))
        else:
            idx.append(int(rng.choice(len(lex.words), p=lex.unigram)))
    return idx


def _render_source(lex, idx, comma_at, end) -> str:
    words = [lex.words[i] for i in idx]
    words[0] = words[0].capitalize()
    if comma_at is not None:
        words[comma_at] += ","
    return " ".join(words) + end


def _translate(rng, lex, idx, comma_at, end, noise) -> str:
    out: list[str] = []
    for pos, i in enumerate(idx):
        cands = lex.translations[i]
        word = cands[0][0] if rng.random() < 0.85 else cands[int(rng.integers(len(cands)))][0]
        r = rng.random()
        if r < 0.6 * noise:
            pass
        elif r < 1.1 * noise:
            out.append(_oov(rng))
        else:
            out.append(word)
            if rng.random() < 0.5 * noise:
                out.append(word)
        if pos == comma_at and rng.random() >= noise:
            out.append(",")
    if not out:
        out.append(_oov(rng))
    text = " ".join(out)
    if rng.random() >= noise:
        text += " " + SENTENCE_END[end]
    return text


def _annotate(rng, sid: str, noise: float) -> HumanAnnotation:
    centre = 4.0 * (1.0 - noise)
    scores = np.clip(np.rint(centre + rng.normal(0.0, 0.6, size=N_PARAMETERS)), 0, 4).astype(int)
    return HumanAnnotation(sid, tuple(int(s) for s in scores))


@dataclass
class SynthCorpus:
    rows: list[tuple[str, str, str, str]]
    annotations: list[HumanAnnotation]
    noise: list[float]
    ttable: TranslationTable


def generate(cfg: SynthConfig, lexicon_seed: int | None = None) -> SynthCorpus:
    """Generate ``cfg.size`` pairs. The lexicon (and so the translation table)
    depends only on ``lexicon_seed`` (default: ``cfg.seed``), so train and test
    sets sharing a lexicon can be drawn with different sentence seeds."""
    lex = _Lexicon(np.random.default_rng(cfg.seed if lexicon_seed is None else lexicon_seed), cfg.vocab_size)
    rng = np.random.default_rng([cfg.seed, 1])
    rows, notes, noises = [], [], []
    for i in range(cfg.size):
        sid = f"{cfg.id_prefix}{i + 1:05d}"
        engine = ENGINES[i % len(ENGINES)]
        idx = _source_sentence(rng, lex, cfg)
        comma_at = int(rng.integers(1, len(idx) - 1)) if len(idx) > 4 and rng.random() < 0.4 else None
        end = str(rng.choice(list(SENTENCE_END), p=[0.8, 0.1, 0.1]))
        # longer sentences and rarer words are harder to translate
        rare = np.mean([w >= lex.rare_cutoff for w in idx])
        a, b = ENGINE_NOISE[engine]
        noise = float(np.clip(rng.beta(a, b) + 0.015 * (len(idx) - 10) + 0.3 * rare, 0.0, 1.0))
        rows.append((sid, _render_source(lex, idx, comma_at, end),
                     _translate(rng, lex, idx, comma_at, end, noise), engine))
        notes.append(_annotate(rng, sid, noise))
        noises.append(noise)
    return SynthCorpus(rows, notes, noises, lex.ttable())


def write_corpus(path: str | Path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write("\t".join(row) + "\n")


def write_synth(out_dir: str | Path, cfg: SynthConfig, test_size: int = 0) -> dict[str, Path]:
    """Write corpus.tsv, annotations.tsv and ttable.tsv (plus test.tsv and
    test_annotations.tsv when ``test_size`` > 0) into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    train = generate(cfg)
    paths = {"corpus": out / "corpus.tsv", "annotations": out / "annotations.tsv", "ttable": out / "ttable.tsv"}
    write_corpus(paths["corpus"], train.rows)
    write_annotations(paths["annotations"], train.annotations)
    write_translation_table(paths["ttable"], train.ttable)
    if test_size > 0:
        test_cfg = SynthConfig(size=test_size, seed=cfg.seed + 1_000_003, vocab_size=cfg.vocab_size,
                               min_len=cfg.min_len, max_len=cfg.max_len, id_prefix="t")
        test = generate(test_cfg, lexicon_seed=cfg.seed)
        paths["test"] = out / "test.tsv"
        paths["test_annotations"] = out / "test_annotations.tsv"
        write_corpus(paths["test"], test.rows)
        write_annotations(paths["test_annotations"], test.annotations)
    return paths
