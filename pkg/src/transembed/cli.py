"""``transembed`` command-line interface.

Exit status is 0 on success, 1 on a runtime error (one-line diagnostic on
stderr) and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bicvm, nmt, pivot, skipgram
from .config import ConfigError, load_config_file, resolve, schema, write_resolved
from .corpus import load_mono, parallel_from_files
from .embstore import (EmbeddingSpace, OutOfVocabulary, cosine, intersect_vocab, load_text,
                       neighbors, save_text)
from .eval import (ReportRow, curve_csv, eval_analogy, eval_similarity, eval_synant, eval_toefl,
                   format_retained, learning_curve, load_analogies, load_similarity, load_synant,
                   load_toefl, pretty, solve_analogy, to_csv)
from .eval.datasets import split_fields

log = logging.getLogger("transembed")

PROG = "transembed"

_HELP = {
    "dim": "embedding dimension", "hidden": "GRU hidden size", "lr": "initial learning rate",
    "epochs": "training epochs", "negatives": "noise words per pair", "window": "max window radius",
    "alpha": "noise distribution exponent", "margin": "hinge margin", "budget": "sampled-softmax candidates",
    "clip": "gradient-norm clip", "batch": "minibatch size", "softmax": "full or sampled",
    "variant": "plain or attention", "seed": "random seed", "workers": "training threads",
    "sample": "frequent-word downsampling threshold", "init_scale": "uniform init range",
}


def _add_config_flags(p: argparse.ArgumentParser, command: str):
    p.add_argument("--config", help="JSON config file (flags override it)")
    for key, typ in schema(command).items():
        flag = "--" + key.replace("_", "-")
        if typ is list:
            p.add_argument(flag, dest=key, default=None, help="comma-separated list")
        else:
            p.add_argument(flag, dest=key, type=typ, default=None, help=_HELP.get(key))


def _flag_values(args, command: str) -> dict:
    values = {k: getattr(args, k) for k in schema(command)}
    for key in ("fractions", "datasets"):
        if isinstance(values.get(key), str):
            values[key] = [x for x in values[key].split(",") if x]
    if values.get("fractions"):
        values["fractions"] = [float(x) for x in values["fractions"]]
    return values


def _config(args, command: str):
    file_values = load_config_file(args.config) if args.config else {}
    return resolve(command, file_values, _flag_values(args, command))


def _require(data: dict, *keys):
    missing = [k for k in keys if not data.get(k)]
    if missing:
        raise ConfigError("missing required setting(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --- training commands --------------------------------------------------------

def cmd_train_skipgram(args) -> int:
    cfg, data = _config(args, "train-skipgram")
    _require(data, "corpus", "out")
    corpus = load_mono(data["corpus"], max_size=data["vocab_size"], min_count=data["min_count"])
    model = skipgram.train(corpus, cfg)
    save_text(model.to_space(), data["out"])
    write_resolved(data["out"], "train-skipgram", cfg, data)
    print(f"wrote {data['out']} ({corpus.vocab.size} words, {cfg.dim} dims)", file=sys.stderr)
    return 0


def _bitext(data):
    return parallel_from_files(data["source"], data["target"], data["source_vocab_size"],
                               data["target_vocab_size"], data["min_count"])


def cmd_train_bicvm(args) -> int:
    cfg, data = _config(args, "train-bicvm")
    _require(data, "source", "target", "out")
    model = bicvm.train(_bitext(data), cfg)
    for side in ("source", "target"):
        save_text(model.to_space(side), f"{data['out']}.{side}.vec")
    write_resolved(data["out"], "train-bicvm", cfg, data)
    print(f"wrote {data['out']}.source.vec and {data['out']}.target.vec", file=sys.stderr)
    return 0


def cmd_train_nmt(args) -> int:
    cfg, data = _config(args, "train-nmt")
    _require(data, "source", "target", "out")
    result = nmt.train(_bitext(data), cfg)
    nmt.save_checkpoint(result.model, data["out"], extra={"config": nmt.config_dict(cfg),
                                                           "epoch_losses": result.epoch_losses})
    exports = {"source": data.get("export_source") or f"{data['out']}.source.vec",
               "target": data.get("export_target")}
    for side, path in exports.items():
        if path:
            save_text(nmt.export_embeddings(result.model, side), path)
    write_resolved(data["out"], "train-nmt", cfg, data)
    print(f"wrote {data['out']} and {exports['source']}", file=sys.stderr)
    return 0


# --- evaluation ---------------------------------------------------------------

def _load_spaces(args) -> list[tuple[str, EmbeddingSpace]]:
    paths = list(args.space or [])
    for group in args.spaces or []:
        paths += [p for p in group.split(",") if p]
    if not paths:
        raise ConfigError("give at least one --space or --spaces")
    names = [n for n in (args.names or "").split(",") if n] or [Path(p).stem for p in paths]
    if len(names) != len(paths):
        raise ConfigError(f"{len(names)} names for {len(paths)} spaces")
    return list(zip(names, (load_text(p) for p in paths)))


def evaluate(spaces, *, similarity=(), toefl=None, analogy=None, synant=None, intersect=False,
             full_vocab=False, folds=10, seed=0, log_stream=None) -> list[ReportRow]:
    """Rows for every (space, dataset); with ``intersect`` all spaces share one vocabulary."""
    log_stream = log_stream or sys.stderr
    restrict = None
    if intersect:
        restrict = set(intersect_vocab([s for _, s in spaces]))
        print(f"shared vocabulary: {len(restrict)} words", file=log_stream)
    rows = []
    for name, space in spaces:
        for ds in similarity:
            r = eval_similarity(space, ds, restrict)
            rows.append(ReportRow(name, ds.name, "rho", r.rho, r.used, r.skipped))
        if toefl is not None:
            qs = toefl[1]
            r = eval_toefl(space, qs, restrict, full_vocab=full_vocab)
            rows.append(ReportRow(name, toefl[0], "%", r.accuracy, r.retained, r.dropped))
            if r.ties:
                print(f"{name}: {r.ties} TOEFL ties scored as incorrect", file=log_stream)
        if synant is not None:
            r = eval_synant(space, synant, folds=folds, seed=seed, restrict=restrict)
            rows.append(ReportRow(name, synant.name, "%", r.accuracy, r.used, r.skipped))
        if analogy is not None:
            r = eval_analogy(space, analogy[1], restrict)
            print(f"{name}: {format_retained(r)}", file=log_stream)
            for cat in ("syntactic", "semantic"):
                acc = r.accuracy(cat)
                if acc is not None:
                    rows.append(ReportRow(name, f"{analogy[0]}-{cat}", "%", acc,
                                          getattr(r, f"retained_{cat}"), r.dropped))
    return rows


def cmd_eval(args) -> int:
    spaces = _load_spaces(args)
    if not (args.dataset or args.toefl or args.analogy or args.synant):
        raise ConfigError("nothing to evaluate: give --dataset, --toefl, --analogy or --synant")
    rows = evaluate(
        spaces,
        similarity=[load_similarity(p) for p in args.dataset or []],
        toefl=(Path(args.toefl).stem, load_toefl(args.toefl)) if args.toefl else None,
        analogy=(Path(args.analogy).stem, load_analogies(args.analogy)) if args.analogy else None,
        synant=load_synant(args.synant) if args.synant else None,
        intersect=args.intersect, full_vocab=args.toefl_full_vocab, folds=args.folds, seed=args.seed)
    _emit(pretty(rows) if args.pretty else to_csv(rows), args.out)
    return 0


def cmd_neighbors(args) -> int:
    space = load_text(args.space)
    lines = ["word,rank,neighbor,cosine\n"]
    for word in args.words:
        for rank, (w, c) in enumerate(neighbors(space, word, args.k, drop_plurals=args.drop_plurals), 1):
            lines.append(f"{word},{rank},{w},{c:.6f}\n")
    _emit("".join(lines), args.out)
    return 0


def cmd_analogy(args) -> int:
    space = load_text(args.space)
    lines = ["rank,answer,cosine\n"]
    for rank, (w, c) in enumerate(solve_analogy(space, args.a, args.b, args.c, args.k), 1):
        lines.append(f"{rank},{w},{c:.6f}\n")
    _emit("".join(lines), args.out)
    return 0


def cmd_curve(args) -> int:
    cfg, data = _config(args, "curve")
    _require(data, "corpus", "fractions", "datasets")
    corpus = load_mono(data["corpus"], max_size=data["vocab_size"], min_count=data["min_count"])
    datasets = [load_similarity(p) for p in data["datasets"]]
    rows = learning_curve(corpus, data["fractions"], datasets, cfg, jobs=data["jobs"])
    text = curve_csv(rows)
    _emit(text, data.get("out"))
    if data.get("out"):
        write_resolved(data["out"], "curve", cfg, data)
    return 0


def cmd_pivot(args) -> int:
    corpus = parallel_from_files(args.source, args.target, min_count=args.min_count)
    table = pivot.estimate_translations(corpus, args.threshold)
    space = load_text(args.space)
    pairs = []
    for n, line in enumerate(Path(args.pairs).read_text(encoding="utf-8").splitlines(), 1):
        if line.strip() and not line.startswith("#"):
            parts = split_fields(line)
            if len(parts) < 2:
                raise ValueError(f"{args.pairs}:{n}: expected word1,word2")
            pairs.append((parts[0].lower(), parts[1].lower()))
    rows, summary = pivot.pivot_report(table, space, pairs)
    _emit(pivot.report_csv(rows), args.out)
    text = pivot.summary_csv(summary)
    if args.summary:
        Path(args.summary).write_text(text, encoding="utf-8")
    else:
        sys.stderr.write(text)
    return 0


# --- interactive loop ---------------------------------------------------------

REPL_USAGE = "commands: n <word> [k] | a <a> <b> <c> | c <w1> <w2> | q"


def repl(spaces, stdin=None, stdout=None):
    """Line-oriented query loop over one or more spaces; never exits on bad input."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    if not spaces:
        raise ValueError("repl needs at least one space")
    many = len(spaces) > 1

    def say(name, text):
        print(f"{name}: {text}" if many else text, file=stdout)

    for line in stdin:
        parts = line.split()
        if not parts:
            continue
        cmd, rest = parts[0], parts[1:]
        if cmd == "q":
            break
        for name, space in spaces:
            try:
                if cmd == "n" and len(rest) in (1, 2):
                    k = int(rest[1]) if len(rest) == 2 else 10
                    found = neighbors(space, rest[0], k)
                    say(name, " ".join(f"{w}({c:.3f})" for w, c in found))
                elif cmd == "a" and len(rest) == 3:
                    (w, c), = solve_analogy(space, *rest, k=1)
                    say(name, f"{w} ({c:.4f})")
                elif cmd == "c" and len(rest) == 2:
                    say(name, f"{round(cosine(space, *rest), 6)}")
                else:
                    print(REPL_USAGE, file=stdout)
                    break
            except OutOfVocabulary as e:
                say(name, str(e))
            except ValueError as e:
                say(name, f"error: {e}")
        stdout.flush()
    return 0


def cmd_repl(args) -> int:
    return repl(_load_spaces(args))


# --- parser ---------------------------------------------------------------------

def _space_flags(p, multi=True):
    p.add_argument("--space", action="append", help="embedding file (repeatable)")
    if multi:
        p.add_argument("--spaces", action="append", help="comma-separated embedding files")
        p.add_argument("--names", help="comma-separated model names (default: file stems)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Train and evaluate word embeddings.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log training progress")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    for name, fn, helptext in (("train-skipgram", cmd_train_skipgram, "monolingual skipgram"),
                               ("train-bicvm", cmd_train_bicvm, "bilingual additive model"),
                               ("train-nmt", cmd_train_nmt, "GRU encoder-decoder")):
        p = sub.add_parser(name, help=helptext)
        _add_config_flags(p, name)
        p.set_defaults(func=fn)

    p = sub.add_parser("eval", help="score spaces on gold standards")
    _space_flags(p)
    p.add_argument("--intersect", action="store_true", help="restrict all spaces to shared words")
    p.add_argument("--dataset", action="append", help="similarity file (repeatable)")
    p.add_argument("--toefl")
    p.add_argument("--toefl-full-vocab", action="store_true",
                   help="answer TOEFL by nearest neighbour over the whole vocabulary")
    p.add_argument("--analogy")
    p.add_argument("--synant")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pretty", action="store_true", help="human-readable table instead of CSV")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("neighbors", help="nearest neighbours by cosine")
    p.add_argument("--space", required=True)
    p.add_argument("words", nargs="+")
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--drop-plurals", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_neighbors)

    p = sub.add_parser("analogy", help="solve a : b :: c : ?")
    p.add_argument("--space", required=True)
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("c")
    p.add_argument("-k", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analogy)

    p = sub.add_parser("curve", help="similarity vs. training-data fraction")
    _add_config_flags(p, "curve")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("pivot", help="shared-translation report")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--space", required=True, help="source-side embeddings")
    p.add_argument("--pairs", required=True, help="file of word1,word2 lines")
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--summary", help="write the summary CSV here instead of stderr")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pivot)

    p = sub.add_parser("repl", help="interactive queries")
    _space_flags(p)
    p.set_defaults(func=cmd_repl)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError, KeyError, FloatingPointError) as e:
        msg = str(e) if not isinstance(e, KeyError) or isinstance(e, OutOfVocabulary) else f"missing key {e}"
        print(f"{PROG}: error: {msg}", file=sys.stderr)
        return 1


run = main

if __name__ == "__main__":
    sys.exit(main())
