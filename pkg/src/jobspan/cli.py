"""Single entry-point command line: index, tor, cvalue, eval, gen.

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 internal
error. Diagnostics go to stderr; data goes to stdout or to output files.
Every run emits a single-line JSON manifest on stderr recording the
subcommand, resolved parameters, input file digests, tool version and
elapsed time; identical manifests (ignoring time) imply identical outputs.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from . import cvalue as cvalue_mod
from . import evaluation as eval_mod
from . import synthgen
from . import ratio as tor_mod
from .errors import DataFormatError, JobspanError
from .index import TitleIndex, build_index
from .normalize import join, normalize, read_counted_title_file, read_title_file

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's default 2
        raise UsageError(f"{self.prog}: {message}")


def _read_corpus(paths: list[str], fmt: str) -> dict:
    """Read one or more corpus files into a merged count mapping."""
    counts: dict = {}
    for path in paths:
        if fmt == "tsv":
            pairs = read_counted_title_file(path)
        else:
            pairs = [(t, 1) for t in read_title_file(path)]
        for tokens, count in pairs:
            counts[tokens] = counts.get(tokens, 0) + count
    return counts


def _read_vacancies(path: str, fmt: str) -> list:
    """Vacancy inputs: plain title lines, or column 1 of a labeled TSV."""
    if fmt == "labeled":
        return [item.vacancy for item in eval_mod.read_labeled(path)]
    return read_title_file(path)


def _parse_bounds(text: str) -> tor_mod.Bounds:
    try:
        low, high = text.split(":")
        return tor_mod.Bounds(float(low), float(high))
    except ValueError as exc:
        raise UsageError(f"invalid bounds {text!r} (expected R_MIN:R_MAX): {exc}") from None


def _mode(flag: str) -> str:
    return flag.replace("-", "_")


# -- commands ----------------------------------------------------------------


def cmd_index_build(args) -> int:
    index = build_index(_read_corpus(args.input, args.format))
    index.save(args.output)
    print(f"indexed {index.stats.n_unique_titles} unique titles "
          f"({index.stats.n_instances} instances) -> {args.output}", file=sys.stderr)
    return EXIT_OK


def cmd_index_stats(args) -> int:
    index = TitleIndex.load(args.index)
    print(json.dumps({
        "n_unique_titles": index.stats.n_unique_titles,
        "max_tokens_per_title": index.stats.max_tokens_per_title,
        "n_instances": index.stats.n_instances,
    }, sort_keys=True))
    return EXIT_OK


def cmd_tor_ratio(args) -> int:
    index = TitleIndex.load(args.index)
    tokens = normalize(args.title)
    if not tokens:
        raise DataFormatError(f"title {args.title!r} normalizes to nothing")
    score = tor_mod.tor(index, tokens, _mode(args.mode))
    print(json.dumps({
        "title": join(tokens),
        "standalone": score.standalone,
        "contained": score.contained,
        "ratio": score.ratio,
    }, sort_keys=True))
    return EXIT_OK


def cmd_tor_extract(args) -> int:
    index = TitleIndex.load(args.index)
    vacancies = _read_vacancies(args.input, args.input_format)
    bounds = _parse_bounds(args.bounds)
    strategy = _mode(args.strategy)
    mode = _mode(args.mode)

    def one(vacancy):
        return tor_mod.extract_job_title(
            index, vacancy, bounds, strategy, args.fallback, mode
        )

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            predictions = list(pool.map(one, vacancies))
    else:
        predictions = [one(v) for v in vacancies]
    tor_mod.write_predictions(predictions, args.output)
    print(f"extracted {len(predictions)} predictions -> {args.output}", file=sys.stderr)
    return EXIT_OK


def cmd_tor_tune(args) -> int:
    index = TitleIndex.load(args.index)
    train = eval_mod.read_labeled(args.train)
    bounds = tor_mod.tune_bounds(
        index, train, args.grid_step, _mode(args.strategy), _mode(args.mode)
    )
    print(f"{bounds.r_min}:{bounds.r_max}")
    return EXIT_OK


def cmd_tor_histogram(args) -> int:
    index = TitleIndex.load(args.index)
    titles = read_title_file(args.titles)
    bins = tor_mod.ratio_histogram(index, titles, args.bin_width, _mode(args.mode))
    with open(args.output, "w", encoding="utf-8", newline="\n") as handle:
        for start, end, count in bins:
            handle.write(f"{start!r}\t{end!r}\t{count}\n")
    print(f"histogram with {len(bins)} bins -> {args.output}", file=sys.stderr)
    return EXIT_OK


def cmd_cvalue_score(args) -> int:
    scores = cvalue_mod.cvalue_scores(
        _read_corpus(args.input, args.format), args.min_count, args.weight
    )
    cvalue_mod.write_scores(scores, args.output)
    print(f"scored {len(scores)} candidates -> {args.output}", file=sys.stderr)
    return EXIT_OK


def cmd_cvalue_extract(args) -> int:
    scores = cvalue_mod.read_scores(args.scores)
    vacancies = _read_vacancies(args.input, args.input_format)
    predictions = [cvalue_mod.cvalue_extract(scores, v, args.threshold) for v in vacancies]
    tor_mod.write_predictions(predictions, args.output)
    print(f"extracted {len(predictions)} predictions -> {args.output}", file=sys.stderr)
    return EXIT_OK


def cmd_cvalue_identity(args) -> int:
    vacancies = _read_vacancies(args.input, args.input_format)
    predictions = [cvalue_mod.identity_extract(v) for v in vacancies]
    tor_mod.write_predictions(predictions, args.output)
    print(f"wrote {len(predictions)} identity predictions -> {args.output}", file=sys.stderr)
    return EXIT_OK


def cmd_eval_run(args) -> int:
    predictions = tor_mod.read_predictions(args.pred)
    golds = eval_mod.read_labeled(args.gold)
    if len(predictions) != len(golds):
        raise DataFormatError(
            f"{args.pred} has {len(predictions)} rows but {args.gold} has {len(golds)}"
        )
    for i, (pred, gold) in enumerate(zip(predictions, golds), start=1):
        if pred.vacancy != gold.vacancy:
            raise DataFormatError(
                f"row {i}: prediction vacancy {join(pred.vacancy)!r} does not match "
                f"gold vacancy {join(gold.vacancy)!r}"
            )
    report = eval_mod.evaluate(predictions, golds)
    if args.output:
        eval_mod.write_report(report, args.output)
        print(f"report -> {args.output}", file=sys.stderr)
    else:
        print(json.dumps(report.to_json_dict(), sort_keys=True, indent=2))
    return EXIT_OK


def cmd_eval_split(args) -> int:
    titles = read_title_file(args.titles)
    train, test = eval_mod.inclusion_safe_split(titles, args.test_fraction, args.seed)
    for path, side in ((args.out_train, train), (args.out_test, test)):
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            for tokens in sorted(side, key=lambda t: (len(t), t)):
                handle.write(join(tokens) + "\n")
    print(f"split {len(train)} train / {len(test)} test titles "
          f"-> {args.out_train}, {args.out_test}", file=sys.stderr)
    return EXIT_OK


def cmd_eval_label(args) -> int:
    vacancies = read_title_file(args.vacancies)
    titles = read_title_file(args.titles)
    labeled, background = eval_mod.label_vacancies(vacancies, titles)
    eval_mod.write_labeled(labeled, args.out_labeled)
    with open(args.out_background, "w", encoding="utf-8", newline="\n") as handle:
        for tokens, count in sorted(background.items(), key=lambda kv: (len(kv[0]), kv[0])):
            handle.write(f"{join(tokens)}\t{count}\n")
    print(f"labeled {len(labeled)} vacancies, {sum(background.values())} background "
          f"-> {args.out_labeled}, {args.out_background}", file=sys.stderr)
    return EXIT_OK


def cmd_gen_corpus(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as handle:
            try:
                data = json.load(handle)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"{args.config}: invalid JSON: {exc}") from None
        config = synthgen.SynthConfig.from_json_dict(data)
    else:
        config = synthgen.SynthConfig()
    overrides = {
        name: getattr(args, name)
        for name in ("seed", "n_vacancies", "n_job_titles")
        if getattr(args, name) is not None
    }
    if overrides:
        config = dataclasses.replace(config, **overrides)
    try:
        config.validate()
    except ValueError as exc:
        raise DataFormatError(str(exc)) from None
    out_dir = args.out_dir or os.environ.get("JOBSPAN_DATA_DIR", "data")
    corpus = synthgen.generate(config)
    paths = synthgen.write_corpus(corpus, out_dir)
    print(f"generated {len(corpus.vacancies)} vacancies over "
          f"{len(corpus.job_titles)} job titles -> {out_dir}", file=sys.stderr)
    for path in paths.values():
        print(f"  {path}", file=sys.stderr)
    return EXIT_OK


# -- wiring -------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="jobspan", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"jobspan {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, metavar="GROUP")

    common = _Parser(add_help=False)
    common.add_argument("--manifest", metavar="FILE", default=None,
                        help="also write the run manifest JSON to FILE")

    def leaf(group, name, func, inputs, help_text):
        sub = group.add_parser(name, parents=[common], help=help_text)
        sub.set_defaults(func=func, input_args=inputs)
        return sub

    index_g = groups.add_parser("index", help="build and inspect title indexes")
    index_cmds = index_g.add_subparsers(dest="command", required=True, metavar="CMD")
    p = leaf(index_cmds, "build", cmd_index_build, ["input"], "build an index file")
    p.add_argument("--input", action="append", required=True, metavar="FILE",
                   help="corpus file; repeat to merge shards")
    p.add_argument("--format", choices=["lines", "tsv"], default="lines",
                   help="lines: one raw title per line; tsv: title<TAB>count")
    p.add_argument("--output", required=True, metavar="FILE")
    p = leaf(index_cmds, "stats", cmd_index_stats, ["index"], "print index statistics")
    p.add_argument("--index", required=True, metavar="FILE")

    tor_g = groups.add_parser("tor", help="occurrence-ratio scoring and extraction")
    tor_cmds = tor_g.add_subparsers(dest="command", required=True, metavar="CMD")
    p = leaf(tor_cmds, "ratio", cmd_tor_ratio, ["index"], "score one title")
    p.add_argument("--index", required=True, metavar="FILE")
    p.add_argument("--title", required=True)
    p.add_argument("--mode", choices=["exact", "cover-sum"], default="exact")
    p = leaf(tor_cmds, "extract", cmd_tor_extract, ["index", "input"],
             "extract job-title spans for a vacancy file")
    p.add_argument("--index", required=True, metavar="FILE")
    p.add_argument("--input", required=True, metavar="FILE")
    p.add_argument("--input-format", choices=["lines", "labeled"], default="lines",
                   help="labeled: read vacancies from column 1 of a labeled TSV")
    p.add_argument("--bounds", required=True, metavar="R_MIN:R_MAX")
    p.add_argument("--strategy", choices=["max-ratio", "longest"], default="max-ratio")
    p.add_argument("--fallback", choices=["none", "identity"], default="none")
    p.add_argument("--mode", choices=["exact", "cover-sum"], default="exact")
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap; output order is input order regardless")
    p.add_argument("--output", required=True, metavar="FILE")
    p = leaf(tor_cmds, "tune", cmd_tor_tune, ["index", "train"],
             "grid-search ratio bounds on labeled data")
    p.add_argument("--index", required=True, metavar="FILE")
    p.add_argument("--train", required=True, metavar="FILE")
    p.add_argument("--grid-step", type=float, default=tor_mod.DEFAULT_GRID_STEP)
    p.add_argument("--strategy", choices=["max-ratio", "longest"], default="max-ratio")
    p.add_argument("--mode", choices=["exact", "cover-sum"], default="exact")
    p = leaf(tor_cmds, "histogram", cmd_tor_histogram, ["index", "titles"],
             "bin indexed titles by ratio")
    p.add_argument("--index", required=True, metavar="FILE")
    p.add_argument("--titles", required=True, metavar="FILE")
    p.add_argument("--bin-width", type=float, default=0.05)
    p.add_argument("--mode", choices=["exact", "cover-sum"], default="exact")
    p.add_argument("--output", required=True, metavar="FILE")

    cvalue_g = groups.add_parser("cvalue", help="C-value and identity baselines")
    cvalue_cmds = cvalue_g.add_subparsers(dest="command", required=True, metavar="CMD")
    p = leaf(cvalue_cmds, "score", cmd_cvalue_score, ["input"], "score corpus n-grams")
    p.add_argument("--input", action="append", required=True, metavar="FILE")
    p.add_argument("--format", choices=["lines", "tsv"], default="lines")
    p.add_argument("--min-count", type=int, default=cvalue_mod.DEFAULT_MIN_COUNT)
    p.add_argument("--weight", choices=["classic", "smoothed"], default="classic")
    p.add_argument("--output", required=True, metavar="FILE")
    p = leaf(cvalue_cmds, "extract", cmd_cvalue_extract, ["scores", "input"],
             "extract best-scoring subspans")
    p.add_argument("--scores", required=True, metavar="FILE")
    p.add_argument("--input", required=True, metavar="FILE")
    p.add_argument("--input-format", choices=["lines", "labeled"], default="lines")
    p.add_argument("--threshold", type=float, default=cvalue_mod.DEFAULT_THRESHOLD)
    p.add_argument("--output", required=True, metavar="FILE")
    p = leaf(cvalue_cmds, "identity", cmd_cvalue_identity, ["input"],
             "predict every whole vacancy title (baseline)")
    p.add_argument("--input", required=True, metavar="FILE")
    p.add_argument("--input-format", choices=["lines", "labeled"], default="lines")
    p.add_argument("--output", required=True, metavar="FILE")

    eval_g = groups.add_parser("eval", help="datasets and metrics")
    eval_cmds = eval_g.add_subparsers(dest="command", required=True, metavar="CMD")
    p = leaf(eval_cmds, "run", cmd_eval_run, ["pred", "gold"],
             "score predictions against gold labels")
    p.add_argument("--pred", required=True, metavar="FILE")
    p.add_argument("--gold", required=True, metavar="FILE")
    p.add_argument("--output", metavar="FILE", default=None,
                   help="report file; prints to stdout when omitted")
    p = leaf(eval_cmds, "split", cmd_eval_split, ["titles"],
             "containment-safe train/test title split")
    p.add_argument("--titles", required=True, metavar="FILE")
    p.add_argument("--test-fraction", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-train", metavar="FILE", default="train_titles.txt")
    p.add_argument("--out-test", metavar="FILE", default="test_titles.txt")
    p = leaf(eval_cmds, "label", cmd_eval_label, ["vacancies", "titles"],
             "auto-annotate vacancies with contained known titles")
    p.add_argument("--vacancies", required=True, metavar="FILE")
    p.add_argument("--titles", required=True, metavar="FILE")
    p.add_argument("--out-labeled", metavar="FILE", default="labeled.tsv")
    p.add_argument("--out-background", metavar="FILE", default="background.tsv")

    gen_g = groups.add_parser("gen", help="synthetic corpus generation")
    gen_cmds = gen_g.add_subparsers(dest="command", required=True, metavar="CMD")
    p = leaf(gen_cmds, "corpus", cmd_gen_corpus, ["config"],
             "generate a labeled synthetic corpus")
    p.add_argument("--config", metavar="FILE", default=None,
                   help="generator config JSON; defaults used when omitted")
    p.add_argument("--out-dir", metavar="DIR", default=None,
                   help="output directory (default: $JOBSPAN_DATA_DIR or ./data)")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--n-vacancies", type=int, default=None)
    p.add_argument("--n-job-titles", type=int, default=None)

    return parser


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return "sha256:" + digest.hexdigest()


def _emit_manifest(args, argv: list[str], elapsed: float) -> None:
    skip = {"func", "input_args", "manifest", "group", "command"}
    parameters = {k: v for k, v in vars(args).items() if k not in skip}
    inputs = {}
    for name in args.input_args:
        value = getattr(args, name, None)
        paths = value if isinstance(value, list) else [value]
        for path in paths:
            if path and Path(path).is_file():
                inputs[str(path)] = _sha256(path)
    manifest = {
        "command": f"{args.group} {args.command}",
        "parameters": parameters,
        "inputs": inputs,
        "version": __version__,
        "elapsed_seconds": round(elapsed, 6),
    }
    line = json.dumps(manifest, sort_keys=True, default=str)
    print(line, file=sys.stderr)
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(line + "\n")


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        print("run 'jobspan --help' for usage", file=sys.stderr)
        return EXIT_USAGE
    started = time.perf_counter()
    try:
        code = args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (DataFormatError, JobspanError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # invariant violation or bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit_manifest(args, argv, time.perf_counter() - started)
    return code


if __name__ == "__main__":
    sys.exit(main())
