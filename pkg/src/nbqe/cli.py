"""Command line interface: ``nbqe {synth,train,predict,evaluate}``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

from nbqe import __version__
from nbqe.bayes import NaiveBayesModel, fit
from nbqe.errors import DataError, UsageError
from nbqe.evaluation import build_report, grade_distribution, render_tables, reports_to_json
from nbqe.features import (
    DEFAULT_TRANSLATION_THRESHOLD,
    N_FEATURES,
    FeatureResources,
    TranslationTable,
    extract_batch,
    load_translation_table,
    write_feature_file,
)
from nbqe.grading import GRADES, Grade, grade_annotation, load_annotations, load_gold_grades
from nbqe.lm import NgramLanguageModel, train_lm
from nbqe.synth import SynthConfig, write_synth
from nbqe.text import (
    NgramTable,
    build_ngram_table,
    corpus_stats,
    load_monolingual_corpus,
    load_parallel_corpus,
)

logger = logging.getLogger("nbqe")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
RESOURCES_FORMAT_VERSION = 1
PREDICTION_HEADER = ("id", "grade", *(f"p_{g.label}" for g in GRADES))
DEFAULT_ENGINE = "all"


@dataclass
class PipelineConfig:
    lm_order: int = 3
    translation_threshold: float = DEFAULT_TRANSLATION_THRESHOLD
    seed: int = 0

    def validate(self) -> None:
        if self.lm_order not in (1, 2, 3):
            raise UsageError(f"lm_order must be 1, 2 or 3, got {self.lm_order}")
        if not 0.0 < self.translation_threshold < 1.0:
            raise UsageError(f"translation_threshold must lie in (0, 1), got {self.translation_threshold}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config(args) -> PipelineConfig:
    """Defaults, then the optional JSON config file, then explicit flags."""
    values: dict = {}
    if args.config:
        try:
            values = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise UsageError(f"{args.config}: no such config file") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: invalid JSON ({exc})") from None
        unknown = set(values) - set(PipelineConfig.__dataclass_fields__)
        if unknown:
            raise UsageError(f"{args.config}: unknown config keys {sorted(unknown)}")
    for key in PipelineConfig.__dataclass_fields__:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    cfg = PipelineConfig(**values)
    cfg.validate()
    return cfg


def save_resources(path, cfg: PipelineConfig, res: FeatureResources) -> None:
    doc = {
        "version": RESOURCES_FORMAT_VERSION,
        "lm_order": cfg.lm_order,
        "translation_threshold": res.threshold,
        "src_lm": res.src_lm.to_dict(),
        "tgt_lm": res.tgt_lm.to_dict(),
        "src_tables": [res.src_tables[n].to_dict() for n in (1, 2, 3)],
        "ttable": [list(r) for r in res.ttable.rows()],
    }
    Path(path).write_text(json.dumps(doc, ensure_ascii=False) + "\n", encoding="utf-8")


def load_resources(path) -> FeatureResources:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    if doc.get("version") != RESOURCES_FORMAT_VERSION:
        raise DataError(f"{path}: unsupported resources version {doc.get('version')!r}")
    tables = [NgramTable.from_dict(t) for t in doc["src_tables"]]
    return FeatureResources(
        src_lm=NgramLanguageModel.from_dict(doc["src_lm"]),
        tgt_lm=NgramLanguageModel.from_dict(doc["tgt_lm"]),
        src_tables={t.order: t for t in tables},
        ttable=TranslationTable.from_pairs(tuple(r) for r in doc["ttable"]),
        threshold=float(doc["translation_threshold"]),
    )


def default_resources_path(model_path) -> Path:
    p = Path(model_path)
    return p.with_name(p.stem + ".resources.json")


def _gold_by_id(args) -> dict[str, Grade]:
    if args.gold:
        return load_gold_grades(args.gold)
    return {sid: grade_annotation(a) for sid, a in load_annotations(args.annotations).items()}


def cmd_synth(args) -> int:
    cfg = _load_config(args)
    synth = SynthConfig(size=args.size, seed=cfg.seed, vocab_size=args.vocab_size)
    if synth.size < 0 or synth.vocab_size < 20:
        raise UsageError("--size must be >= 0 and --vocab-size >= 20")
    paths = write_synth(args.out_dir, synth, test_size=args.test_size)
    for name, p in paths.items():
        print(f"{name}\t{p}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _load_config(args)
    pairs = load_parallel_corpus(args.corpus)
    if not pairs:
        raise DataError(f"{args.corpus}: empty training corpus")
    gold = _gold_by_id(args)
    missing = [p.id for p in pairs if p.id not in gold]
    if missing:
        raise DataError(f"no human judgement for sentence id {missing[0]!r}")
    ttable = load_translation_table(args.ttable)

    sources = [p.source for p in pairs]
    targets = [p.target for p in pairs]
    src_lm_text = sources + (load_monolingual_corpus(args.source_lm_text) if args.source_lm_text else [])
    tgt_lm_text = targets + (load_monolingual_corpus(args.target_lm_text) if args.target_lm_text else [])
    res = FeatureResources(
        src_lm=train_lm(src_lm_text, cfg.lm_order),
        tgt_lm=train_lm(tgt_lm_text, cfg.lm_order),
        src_tables={n: build_ngram_table(sources, n) for n in (1, 2, 3)},
        ttable=ttable,
        threshold=cfg.translation_threshold,
    )
    X = extract_batch(pairs, res)
    y = [gold[p.id] for p in pairs]
    model = fit(X, y)

    model.save(args.model)
    save_resources(args.resources or default_resources_path(args.model), cfg, res)
    if args.features_out:
        write_feature_file(args.features_out, [p.id for p in pairs], X)

    print("corpus\tsentences\twords\tunique_words")
    for side, sents in (("source", sources), ("target", targets)):
        st = corpus_stats(sents)
        print(f"{side}\t{st.sentences}\t{st.words}\t{st.unique_words}")
    print("grade\ttraining_count")
    for g, n in grade_distribution(y).items():
        print(f"{g.label}\t{n}")
    return EXIT_OK


def cmd_predict(args) -> int:
    model = NaiveBayesModel.load(args.model)
    if model.n_features != N_FEATURES:
        raise DataError(f"{args.model}: model has {model.n_features} features, extractor produces {N_FEATURES}")
    res = load_resources(args.resources or default_resources_path(args.model))
    pairs = load_parallel_corpus(args.corpus)
    X = extract_batch(pairs, res)
    if args.features_out:
        write_feature_file(args.features_out, [p.id for p in pairs], X)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(PREDICTION_HEADER) + "\n")
        for pair, row in zip(pairs, X):
            post = model.posteriors(row)
            grade = model.predict(row)
            fh.write("\t".join([pair.id, grade.label, *(f"{p:.6f}" for p in post)]) + "\n")
    logger.info("wrote %d predictions to %s", len(pairs), args.out)
    return EXIT_OK


def read_predictions(path) -> dict[str, Grade]:
    try:
        lines = Path(path).read_text(encoding="utf-8").split("\n")
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    if not lines or lines[0].rstrip("\r").split("\t") != list(PREDICTION_HEADER):
        raise DataError(f"{path}:1: missing or malformed prediction header")
    out: dict[str, Grade] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cols = line.rstrip("\r").split("\t")
        if len(cols) != len(PREDICTION_HEADER):
            raise DataError(f"{path}:{lineno}: expected {len(PREDICTION_HEADER)} columns, got {len(cols)}")
        if cols[0] in out:
            raise DataError(f"{path}:{lineno}: duplicate id {cols[0]!r}")
        try:
            out[cols[0]] = Grade.parse(cols[1])
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
    return out


def cmd_evaluate(args) -> int:
    predicted = read_predictions(args.predictions)
    gold = _gold_by_id(args)
    for sid in predicted:
        if sid not in gold:
            raise DataError(f"id {sid!r} has a prediction but no gold grade")
    for sid in gold:
        if sid not in predicted:
            raise DataError(f"id {sid!r} has a gold grade but no prediction")
    engines: dict[str, str] = {}
    if args.corpus:
        engines = {p.id: p.engine or DEFAULT_ENGINE for p in load_parallel_corpus(args.corpus)}
    groups: dict[str, list[str]] = defaultdict(list)
    for sid in sorted(gold):
        groups[engines.get(sid, DEFAULT_ENGINE)].append(sid)
    reports = [build_report(engine, [predicted[s] for s in ids], [gold[s] for s in ids])
               for engine, ids in sorted(groups.items())]

    text = render_tables(reports)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(reports_to_json(reports), encoding="utf-8")
    (out / "report.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with lm_order, translation_threshold, seed")
    common.add_argument("--seed", type=int, default=None, help="random seed (synthetic data only)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="nbqe", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic corpus, annotations and ttable")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--size", type=int, default=300)
    p.add_argument("--test-size", type=int, default=0)
    p.add_argument("--vocab-size", type=int, default=150)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", parents=[common], help="extract features and fit the classifier")
    p.add_argument("--corpus", required=True, help="parallel TSV: id, source, target[, engine]")
    gold = p.add_mutually_exclusive_group(required=True)
    gold.add_argument("--annotations", help="TSV: id and ten 0-4 judgements")
    gold.add_argument("--gold", help="TSV: id and grade")
    p.add_argument("--ttable", required=True, help="TSV: source, target, probability")
    p.add_argument("--model", required=True, help="output model JSON")
    p.add_argument("--resources", help="output feature resources JSON (default: <model>.resources.json)")
    p.add_argument("--lm-order", dest="lm_order", type=int, default=None)
    p.add_argument("--threshold", dest="translation_threshold", type=float, default=None)
    p.add_argument("--source-lm-text", help="extra monolingual source text for the source LM")
    p.add_argument("--target-lm-text", help="extra monolingual target text for the target LM")
    p.add_argument("--features-out", help="also write the feature TSV")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="grade unseen translations")
    p.add_argument("--model", required=True)
    p.add_argument("--resources")
    p.add_argument("--corpus", required=True, help="parallel TSV of pairs to grade")
    p.add_argument("--out", required=True, help="output predictions TSV")
    p.add_argument("--features-out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common], help="compare predictions with human grades")
    p.add_argument("--predictions", required=True)
    gold = p.add_mutually_exclusive_group(required=True)
    gold.add_argument("--annotations")
    gold.add_argument("--gold")
    p.add_argument("--corpus", help="parallel TSV supplying engine labels")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_evaluate)
    return parser


_OUTPUT_ARGS = {
    "train": ("model", "resources", "features_out"),
    "predict": ("out", "features_out"),
}


def _make_output_dirs(args):
    for name in _OUTPUT_ARGS.get(args.command, ()):
        if getattr(args, name, None):
            Path(getattr(args, name)).parent.mkdir(parents=True, exist_ok=True)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help/--version exit 0; argument errors exit EXIT_USAGE via _Parser.error
        return exc.code or EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        _make_output_dirs(args)
        return args.func(args)
    except UsageError as exc:
        print(f"nbqe: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"nbqe: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"nbqe: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
