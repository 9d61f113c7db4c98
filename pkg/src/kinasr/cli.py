"""Command-line entry point.

Every subcommand maps 1:1 to a module operation, reads/writes JSONL between
stages, and drops a resolved-config.json next to its outputs so a run can
be reproduced byte-for-byte from (inputs, config, seed).

Exit codes: 0 success, 1 validation error, 2 I/O error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import audio, ctc, curriculum, metrics, pseudo_label, tokenizer
from .align.store import Document, MarkStore
from .errors import KinasrError
from .manifest import read_manifest, write_manifest

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _write_config(out_path: Path, args: argparse.Namespace) -> None:
    """Record the fully resolved config next to the artifact."""
    resolved = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    resolved = {k: (str(v) if isinstance(v, Path) else v) for k, v in resolved.items()}
    target = out_path if out_path.is_dir() else out_path.parent
    target.mkdir(parents=True, exist_ok=True)
    with open(target / "resolved-config.json", "w", encoding="utf-8") as f:
        json.dump(resolved, f, indent=2, sort_keys=True)
        f.write("\n")


def _log_seed(args) -> None:
    if getattr(args, "seed", None) is not None:
        print(f"seed: {args.seed}", file=sys.stderr)


# --- subcommand handlers ---

def cmd_vocab(args) -> int:
    vocab = tokenizer.build_vocab(args.mode)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    vocab.save(out)
    _write_config(out, args)
    print(f"{len(vocab)} tokens -> {out}")
    return EXIT_OK


def cmd_tokenize(args) -> int:
    vocab = tokenizer.Vocabulary.load(args.vocab)
    if args.text is not None:
        lines = [args.text]
    else:
        with open(args.input, encoding="utf-8") as f:
            lines = [line.rstrip("\n") for line in f]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        for i, line in enumerate(lines):
            text = line if args.no_normalize else tokenizer.normalize(line)
            seq = tokenizer.tokenize(text, vocab)
            record = {
                "line": i,
                "text": text,
                "ids": list(seq.ids),
                "tokens": [vocab.tokens[t] for t in seq.ids],
                "syllables": tokenizer.syllable_count(text),
            }
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
    _write_config(out, args)
    print(f"{len(lines)} line(s) -> {out}")
    return EXIT_OK


def cmd_decode(args) -> int:
    vocab = tokenizer.Vocabulary.load(args.vocab)
    posts = [ctc.load_posteriorgram(p) for p in args.posteriors]
    config = ctc.DecodeConfig(
        beam_width=args.beam,
        lm_weight=args.lm_weight,
        length_bonus=args.length_bonus,
    )
    items = ctc.batch_decode(posts, vocab, config)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    n_err = 0
    with open(out, "w", encoding="utf-8") as f:
        for path, item in zip(args.posteriors, items):
            utt_id = Path(path).stem
            if item.error is not None:
                n_err += 1
                f.write(json.dumps({"id": utt_id, "error": item.error}) + "\n")
                continue
            for line in ctc.nbest_jsonl_lines(utt_id, item.result):
                f.write(line + "\n")
    _write_config(out, args)
    print(f"{len(items) - n_err} decoded, {n_err} failed -> {out}")
    return EXIT_OK if n_err == 0 else EXIT_VALIDATION


def cmd_eval(args) -> int:
    if not args.pairs and not (args.refs and args.hyps):
        raise KinasrError("provide --pairs or both --refs and --hyps")
    if args.pairs:
        pairs = metrics.read_pairs_jsonl(args.pairs)
    else:
        refs = {}
        labels = {}
        with open(args.refs, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    raw = json.loads(line)
                    refs[str(raw["id"])] = raw.get("reference", raw.get("transcript", ""))
                    labels[str(raw["id"])] = raw.get("labels", {})
        pairs = []
        with open(args.hyps, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    raw = json.loads(line)
                    pid = str(raw["id"])
                    if pid not in refs:
                        raise KinasrError(f"hypothesis id {pid!r} has no reference")
                    pairs.append(metrics.EvalPair(
                        reference=refs[pid],
                        hypothesis=raw.get("hypothesis", raw.get("transcript", "")),
                        pair_id=pid,
                        labels=labels[pid],
                    ))
    report = metrics.corpus_eval(pairs, group_by=args.group_by,
                                 strip_apostrophe=args.strip_apostrophe)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    _write_config(out, args)
    print(f"cer={report.cer:.4f} wer={report.wer:.4f} over {report.n_pairs} pairs -> {out}")
    return EXIT_OK


def cmd_silences(args) -> int:
    wav = audio.read_wav(args.audio)
    markers = audio.detect_silences(
        wav,
        energy_db_threshold=args.threshold_db,
        min_silence=args.min_silence,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        json.dump({"audio": str(args.audio), "duration": wav.duration,
                   "silence_markers": [m.time for m in markers]}, f, indent=2)
        f.write("\n")
    _write_config(out, args)
    print(f"{len(markers)} silence(s) -> {out}")
    return EXIT_OK


def cmd_segment(args) -> int:
    if args.audio:
        duration = audio.read_wav(args.audio).duration
    else:
        duration = args.duration
    if duration is None:
        raise KinasrError("provide --audio or --duration")
    segments = audio.random_segments(duration, min_len=args.min_len,
                                     max_len=args.max_len, seed=args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        for i, (start, end) in enumerate(segments):
            f.write(json.dumps({"index": i, "start": start, "end": end}) + "\n")
    _write_config(out, args)
    _log_seed(args)
    print(f"{len(segments)} segment(s) covering {duration:.1f}s -> {out}")
    return EXIT_OK


def cmd_filter(args) -> int:
    entries = read_manifest(args.manifest)
    rate_stats = None
    if args.rate_mean is not None and args.rate_std is not None:
        rate_stats = (args.rate_mean, args.rate_std)
    kept, rejected = audio.filter_segments(entries, rate_stats=rate_stats)
    write_manifest(kept, args.out_kept)
    out_rej = Path(args.out_rejected)
    out_rej.parent.mkdir(parents=True, exist_ok=True)
    with open(out_rej, "w", encoding="utf-8") as f:
        for entry, reason in rejected:
            f.write(json.dumps({"id": entry.id, "reason": reason}) + "\n")
    _write_config(Path(args.out_kept), args)
    print(f"kept {len(kept)}, rejected {len(rejected)}")
    return EXIT_OK


def cmd_split(args) -> int:
    entries = read_manifest(args.manifest)
    ratios = tuple(float(r) for r in args.ratios.split(","))
    if len(ratios) != 3:
        raise KinasrError(f"need three ratios, got {args.ratios!r}")
    train, dev, test = audio.split_dataset(entries, ratios=ratios, seed=args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_manifest(train, out_dir / "train.jsonl")
    write_manifest(dev, out_dir / "dev.jsonl")
    write_manifest(test, out_dir / "test.jsonl")
    _write_config(out_dir, args)
    _log_seed(args)
    print(f"train={len(train)} dev={len(dev)} test={len(test)} -> {out_dir}")
    return EXIT_OK


def cmd_rank(args) -> int:
    pool = read_manifest(args.pool)
    ranked = curriculum.rank_by_cer(pool)
    write_manifest(ranked, args.out)
    _write_config(Path(args.out), args)
    print(f"{len(ranked)} entries ranked -> {args.out}")
    return EXIT_OK


def cmd_plan(args) -> int:
    clean = read_manifest(args.clean)
    pool = read_manifest(args.pool)
    plan = curriculum.build_plan(clean, pool, size_measure=args.size_measure)
    plan_path = curriculum.write_plan(plan, args.out_dir)
    _write_config(Path(args.out_dir), args)
    sizes = [s.cumulative_size for s in plan.stages]
    print(f"{len(plan.stages)} stages, cumulative {sizes} -> {plan_path}")
    return EXIT_OK


def cmd_select(args) -> int:
    decoded = read_manifest(args.manifest)
    cfg = pseudo_label.SelectionConfig(
        min_ctc_score_per_frame=args.min_ctc_per_frame,
        min_lm_logprob_per_token=args.min_lm_per_token,
        target_hours=args.target_hours,
        generation=args.generation,
    )
    selected = pseudo_label.select(decoded, cfg)
    write_manifest(selected, args.out)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            json.dump(pseudo_label.generation_report(selected), f, indent=2)
            f.write("\n")
    _write_config(Path(args.out), args)
    hours = sum(e.duration for e in selected) / 3600.0
    print(f"generation {cfg.generation}: {len(selected)} entries, {hours:.1f}h -> {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .align.service import create_app

    host, port = args.host, args.port
    bind = os.environ.get("KINASR_BIND")
    if bind:
        host, _, port_s = bind.partition(":")
        port = int(port_s) if port_s else port
    store = MarkStore(args.store)
    uvicorn.run(create_app(store), host=host, port=port)
    return EXIT_OK


def cmd_import(args) -> int:
    store = MarkStore(args.store)
    count = 0
    for path in args.documents:
        with open(path, encoding="utf-8") as f:
            store.import_document(Document.from_dict(json.load(f)))
        count += 1
    print(f"imported {count} document(s) into {args.store}")
    return EXIT_OK


def cmd_compile(args) -> int:
    store = MarkStore(args.store)
    doc_ids = args.docs.split(",") if args.docs else None
    kept, rejected = store.compile_dataset(args.annotator, doc_ids=doc_ids)
    write_manifest(kept, args.out_kept)
    out_rej = Path(args.out_rejected)
    out_rej.parent.mkdir(parents=True, exist_ok=True)
    with open(out_rej, "w", encoding="utf-8") as f:
        for entry, reason in rejected:
            f.write(json.dumps({"id": entry.id, "reason": reason}) + "\n")
    _write_config(Path(args.out_kept), args)
    print(f"kept {len(kept)}, rejected {len(rejected)}")
    return EXIT_OK


def cmd_agreement(args) -> int:
    store = MarkStore(args.store)
    doc_ids = args.docs.split(",") if args.docs else None
    report = store.agreement(args.a, args.b, doc_ids=doc_ids)
    payload = {
        "agreement": report.ratio,
        "n_agreeing": report.n_agreeing,
        "n_markers": report.n_markers,
        "doc_ids": report.doc_ids,
    }
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
        _write_config(out, args)
    print(json.dumps(payload))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="kinasr", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("vocab", help="build a tokenizer vocabulary")
    p.add_argument("--mode", choices=["character", "syllable"], default="syllable")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("tokenize", help="tokenize text lines")
    p.add_argument("--vocab", required=True)
    p.add_argument("--text")
    p.add_argument("--input", help="text file, one utterance per line")
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("decode", help="CTC beam-search decode posteriorgrams")
    p.add_argument("--posteriors", nargs="+", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--beam", type=int, default=24)
    p.add_argument("--lm-weight", type=float, default=0.0)
    p.add_argument("--length-bonus", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", help="corpus CER/WER")
    p.add_argument("--pairs", help="JSONL of {id, reference, hypothesis, labels}")
    p.add_argument("--refs", help="JSONL of {id, reference, labels}")
    p.add_argument("--hyps", help="JSONL of {id, hypothesis}")
    p.add_argument("--group-by")
    p.add_argument("--strip-apostrophe", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("silences", help="detect long-enough pauses")
    p.add_argument("--audio", required=True)
    p.add_argument("--threshold-db", type=float, default=-40.0)
    p.add_argument("--min-silence", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_silences)

    p = sub.add_parser("segment", help="random 5-25s segmentation")
    p.add_argument("--audio")
    p.add_argument("--duration", type=float)
    p.add_argument("--min-len", type=float, default=5.0)
    p.add_argument("--max-len", type=float, default=25.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("filter", help="post-processing filters")
    p.add_argument("--manifest", required=True)
    p.add_argument("--rate-mean", type=float)
    p.add_argument("--rate-std", type=float)
    p.add_argument("--out-kept", required=True)
    p.add_argument("--out-rejected", required=True)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("split", help="train/dev/test split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--ratios", default="0.90,0.05,0.05")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("rank", help="rank pool by CER vs baseline hypotheses")
    p.add_argument("--pool", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("plan", help="build doubling curriculum plan")
    p.add_argument("--clean", required=True)
    p.add_argument("--pool", required=True, help="manifest ranked ascending by cer_vs_baseline")
    p.add_argument("--size-measure", choices=["count", "hours"], default="hours")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("select", help="threshold + rank pseudo-labels")
    p.add_argument("--manifest", required=True)
    p.add_argument("--min-ctc-per-frame", type=float, required=True)
    p.add_argument("--min-lm-per-token", type=float, required=True)
    p.add_argument("--target-hours", type=float, required=True)
    p.add_argument("--generation", type=int, default=1)
    p.add_argument("--report")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("serve", help="run the alignment service")
    p.add_argument("--store", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8700)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("import", help="import alignment documents")
    p.add_argument("--store", required=True)
    p.add_argument("--documents", nargs="+", required=True)
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("compile", help="compile aligned dataset from marks")
    p.add_argument("--store", required=True)
    p.add_argument("--annotator", required=True)
    p.add_argument("--docs", help="comma-separated document ids")
    p.add_argument("--out-kept", required=True)
    p.add_argument("--out-rejected", required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("agreement", help="inter-annotator agreement ratio")
    p.add_argument("--store", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--docs", help="comma-separated document ids")
    p.add_argument("--out")
    p.set_defaults(func=cmd_agreement)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KinasrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
