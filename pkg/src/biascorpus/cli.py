"""Command-line surface: one subcommand per pipeline stage.

Every command reads and writes the JSONL/JSON formats of its module, writes a
run manifest next to each output, and exits 0 on success, 1 on operational
error, 2 on usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from biascorpus import __version__
from biascorpus.errors import BiasCorpusError, Misaligned
from biascorpus.io import read_jsonl, write_json, write_jsonl
from biascorpus.manifest import (
    RunManifest,
    apply_env_overrides,
    load_config_file,
    stage_seed,
    verify_against_manifest,
)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="master seed for all stage randomness")
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--out", help="primary output path")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    parser.add_argument("--stamp", action="store_true", help="record wall-clock time in the manifest")
    parser.add_argument("--verify", action="store_true", help="refuse to run if recorded inputs drifted")


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def _load_lexicon(args):
    from biascorpus.lexicon import load_default_lexicon, load_lexicon

    path = getattr(args, "lexicon", None)
    expand = bool(getattr(args, "expand_suffixes", False))
    if path and path != "default":
        return load_lexicon(path, expand_suffixes=expand), path
    return load_default_lexicon(expand_suffixes=expand), None


def _config_mapping(args) -> dict:
    cfg = load_config_file(args.config) if args.config else {}
    return apply_env_overrides(cfg)


def _finish(args, manifest: RunManifest, out_path: str | Path) -> None:
    if args.stamp:
        manifest.stamp()
    path = manifest.write(out_path)
    _say(args, f"wrote {out_path} (+ {path.name})")


# -- commands -----------------------------------------------------------


def cmd_ingest(args) -> int:
    from biascorpus.corpus import (
        DateWindow,
        FetchStats,
        SourceConfig,
        fetch_documents,
        fixture_corpus_path,
        ingest,
    )

    lexicon, lexicon_path = _load_lexicon(args)
    cfg = _config_mapping(args)
    if args.fixture:
        source = SourceConfig(local_dir=str(fixture_corpus_path().parent))
        input_paths = [fixture_corpus_path()]
    else:
        source = SourceConfig.from_mapping(cfg)
        input_paths = []
        if source.local_dir:
            input_paths = sorted(Path(source.local_dir).glob("*.jsonl"))
    window = DateWindow.parse(args.date_from, args.date_to)
    out = args.out or "sentences.jsonl"
    if args.verify:
        verify_against_manifest(out)

    stats = FetchStats()
    docs = fetch_documents(
        lexicon.all_forms(), window, source, query_lexicon=lexicon, stats=stats
    )
    sentences = ingest(docs)
    write_jsonl(out, (s.to_record() for s in sentences))

    manifest = RunManifest(
        command="ingest",
        config={
            "fixture": bool(args.fixture),
            "date_from": window.start.isoformat(),
            "date_to": window.end.isoformat() if window.end else None,
            "source": {k: v for k, v in cfg.items()},
            "lexicon": lexicon_path or "default",
        },
        seed=args.seed,
    )
    for p in input_paths:
        manifest.add_input(p)
    if lexicon_path:
        manifest.add_input(lexicon_path)
    manifest.add_output(out)
    _finish(args, manifest, out)
    _say(
        args,
        f"fetched {stats.fetched} documents ({stats.excluded_date} outside window, "
        f"{stats.excluded_no_match} without keywords, {stats.skipped_malformed} malformed) "
        f"-> {len(sentences)} sentences",
    )
    return 0


def cmd_extract(args) -> int:
    from biascorpus.corpus import ContextSentence
    from biascorpus.dataset import extract_candidates, write_candidates_jsonl

    lexicon, lexicon_path = _load_lexicon(args)
    out = args.out or "candidates.jsonl"
    if args.verify:
        verify_against_manifest(out)
    sentences = [ContextSentence.from_record(r) for r in read_jsonl(args.sentences)]
    candidates = extract_candidates(sentences, lexicon)
    write_candidates_jsonl(out, candidates)

    manifest = RunManifest(
        command="extract",
        config={"sentences": args.sentences, "lexicon": lexicon_path or "default"},
        seed=args.seed,
    )
    manifest.add_input(args.sentences)
    if lexicon_path:
        manifest.add_input(lexicon_path)
    manifest.add_output(out)
    _finish(args, manifest, out)
    _say(args, f"{len(candidates)} candidates from {len(sentences)} sentences")
    return 0


def cmd_sample(args) -> int:
    from biascorpus.dataset import read_candidates_jsonl, sample_batch, write_candidates_jsonl

    out = args.out or "batch.jsonl"
    if args.verify:
        verify_against_manifest(out)
    candidates = read_candidates_jsonl(args.candidates)
    already = set()
    if args.already_labeled:
        already = {rec["item_id"] for rec in read_jsonl(args.already_labeled)}
    seen_terms = set()
    if args.seen_terms:
        seen_terms = {
            line.strip()
            for line in Path(args.seen_terms).read_text(encoding="utf-8").splitlines()
            if line.strip()
        }
    seed = stage_seed(args.seed, "sample")
    batch = sample_batch(candidates, args.strategy, args.n, seed, already, seen_terms)
    write_candidates_jsonl(out, batch)

    manifest = RunManifest(
        command="sample",
        config={"strategy": args.strategy, "n": args.n, "candidates": args.candidates},
        seed=args.seed,
        sub_seeds={"sample": seed},
    )
    manifest.add_input(args.candidates)
    if args.already_labeled:
        manifest.add_input(args.already_labeled)
    if args.seen_terms:
        manifest.add_input(args.seen_terms)
    manifest.add_output(out)
    _finish(args, manifest, out)
    return 0


def cmd_serve(args) -> int:
    from biascorpus.annotation import AnnotationStore
    from biascorpus.dataset import read_candidates_jsonl

    store = AnnotationStore(args.data_dir)
    if args.batch:
        batch = read_candidates_jsonl(args.batch)
        session = store.open_session(
            batch,
            [a.strip() for a in args.annotators.split(",") if a.strip()],
            args.overlap,
            stage_seed(args.seed, "session"),
            session_id=args.session_id,
        )
        _say(args, f"opened session {session.session_id} with {len(batch)} items")
    from biascorpus.service import create_app

    import uvicorn

    app = create_app(store, ui_dir=args.ui_dir)
    _say(args, f"serving on http://{args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_iaa(args) -> int:
    from biascorpus.annotation import AnnotationStore

    store = AnnotationStore(args.data_dir)
    session_id = args.session or next(iter(store.sessions), None)
    if session_id is None:
        raise BiasCorpusError("no sessions found in data dir")
    report = store.iaa_report(session_id, label_space=args.space)
    out = args.out or "iaa.json"
    write_json(out, report.to_json())
    manifest = RunManifest(
        command="iaa", config={"session": session_id, "space": args.space}, seed=args.seed
    )
    manifest.add_output(out)
    _finish(args, manifest, out)
    if report.kappa is not None:
        _say(args, f"kappa = {report.kappa:.4f} ({report.interpretation})")
    else:
        _say(args, "kappa undefined: all mass in one category")
    return 0


def cmd_dataset_build(args) -> int:
    from biascorpus.dataset import (
        AnnotationRecord,
        ResolutionPolicy,
        export_dataset,
        read_candidates_jsonl,
        resolve_labels,
    )

    out = args.out or "dataset.jsonl"
    if args.verify:
        verify_against_manifest(out)
    candidates = {c.item_id: c for c in read_candidates_jsonl(args.candidates)}
    records = [AnnotationRecord.from_record(r) for r in read_jsonl(args.annotations)]
    policy = ResolutionPolicy(
        disagreement=args.policy,
        expert_annotator_id=args.expert,
        max_reannotation_rounds=args.max_rounds,
    )
    result = resolve_labels(records, candidates, policy)
    export_dataset(result, out, csv_path=args.csv)
    if args.requeue:
        write_jsonl(args.requeue, ({"item_id": i} for i in result.requeue))

    manifest = RunManifest(
        command="dataset build",
        config={
            "annotations": args.annotations,
            "candidates": args.candidates,
            "policy": args.policy,
            "expert": args.expert,
            "max_rounds": args.max_rounds,
        },
        seed=args.seed,
    )
    manifest.add_input(args.annotations)
    manifest.add_input(args.candidates)
    manifest.add_output(out)
    if args.csv:
        manifest.add_output(args.csv)
    if args.requeue:
        manifest.add_output(args.requeue)
    _finish(args, manifest, out)
    _say(
        args,
        f"{len(result.instances)} instances, {len(result.requeue)} requeued, "
        f"{len(result.dropped)} dropped",
    )
    return 0


def cmd_stats(args) -> int:
    from biascorpus.dataset import dataset_stats, read_dataset_jsonl

    lexicon, _ = _load_lexicon(args)
    instances = read_dataset_jsonl(args.dataset)
    report = dataset_stats(instances, lexicon)
    out = args.out or "stats.json"
    write_json(out, report.to_json())
    manifest = RunManifest(command="stats", config={"dataset": args.dataset}, seed=args.seed)
    manifest.add_input(args.dataset)
    manifest.add_output(out)
    _finish(args, manifest, out)
    _say(args, report.to_table())
    return 0


def _write_split_files(args, splits, out_dir: Path, config_snapshot: dict, command: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name in ("train", "val", "test"):
        path = out_dir / f"{name}.jsonl"
        write_jsonl(path, (i.to_record() for i in getattr(splits, name)))
        paths[name] = path
    manifest_file = out_dir / "split_manifest.json"
    write_json(manifest_file, splits.manifest() | {"config": config_snapshot})

    manifest = RunManifest(command=command, config=config_snapshot, seed=args.seed,
                           sub_seeds={"split": splits.seed})
    manifest.add_input(args.dataset)
    for path in paths.values():
        manifest.add_output(path)
    manifest.add_output(manifest_file)
    _finish(args, manifest, manifest_file)
    _say(
        args,
        f"train/val/test = {len(splits.train)}/{len(splits.val)}/{len(splits.test)}"
        + (f", held out {len(splits.held_out_terms)} terms" if splits.held_out_terms else ""),
    )


def cmd_split(args) -> int:
    from biascorpus.dataset import read_dataset_jsonl
    from biascorpus.splits import SplitConfig, split_dataset

    proportions = tuple(float(p) for p in args.proportions.split(","))
    if len(proportions) != 3:
        raise BiasCorpusError(f"expected three proportions, got {args.proportions!r}")
    dataset = read_dataset_jsonl(args.dataset)
    seed = stage_seed(args.seed, "split")
    config = SplitConfig(proportions=proportions, seed=seed, stratify=args.stratify)
    splits = split_dataset(dataset, config)
    out_dir = Path(args.out or "splits")
    snapshot = {
        "dataset": args.dataset,
        "proportions": list(proportions),
        "stratify": args.stratify,
        "regime": "in_domain",
    }
    _write_split_files(args, splits, out_dir, snapshot, "split")
    return 0


def cmd_holdout(args) -> int:
    from biascorpus.dataset import read_dataset_jsonl
    from biascorpus.splits import holdout_rare_terms

    lexicon, lexicon_path = _load_lexicon(args)
    proportions = tuple(float(p) for p in args.proportions.split(","))
    dataset = read_dataset_jsonl(args.dataset)
    seed = stage_seed(args.seed, "holdout")
    splits = holdout_rare_terms(
        dataset, lexicon, args.threshold, proportions=proportions, seed=seed, test_mode=args.test_mode
    )
    if splits.nothing_held_out:
        _say(args, "nothing held out: no term at or under the threshold")
    out_dir = Path(args.out or "holdout")
    snapshot = {
        "dataset": args.dataset,
        "threshold": args.threshold,
        "test_mode": args.test_mode,
        "lexicon": lexicon_path or "default",
        "regime": "out_of_domain",
    }
    _write_split_files(args, splits, out_dir, snapshot, "holdout")
    return 0


def cmd_resample(args) -> int:
    from biascorpus.dataset import read_dataset_jsonl
    from biascorpus.splits import ResampleConfig, ResampleStrategy, preset_config, resample

    out = args.out or "resampled.jsonl"
    if args.verify:
        verify_against_manifest(out)
    train = read_dataset_jsonl(args.train)
    seed = stage_seed(args.seed, "resample")
    if args.preset:
        config = preset_config(args.preset, seed=seed)
    else:
        if args.ratio is None or args.size is None:
            raise BiasCorpusError("either --preset or both --ratio and --size are required")
        config = ResampleConfig(
            strategy=ResampleStrategy(args.strategy),
            target_biased_ratio=args.ratio,
            target_size=args.size,
            seed=seed,
        )
    resampled = resample(train, config)
    write_jsonl(out, (i.to_record() for i in resampled))

    manifest = RunManifest(
        command="resample",
        config={
            "train": args.train,
            "strategy": config.strategy.value,
            "ratio": config.target_biased_ratio,
            "size": config.target_size,
            "preset": args.preset,
        },
        seed=args.seed,
        sub_seeds={"resample": seed},
    )
    manifest.add_input(args.train)
    manifest.add_output(out)
    _finish(args, manifest, out)
    _say(args, f"resampled {len(train)} -> {len(resampled)} instances")
    return 0


def _make_adapter(args, lexicon):
    from biascorpus.classifiers import (
        ChatClientConfig,
        ChatCompletionAdapter,
        MockAdapter,
        RemoteAdapter,
        RuleAdapter,
        SubprocessAdapter,
    )

    kind = args.adapter
    if kind == "rule":
        return RuleAdapter(lexicon)
    if kind == "mock":
        return MockAdapter()
    if kind.startswith("subprocess:"):
        import shlex

        return SubprocessAdapter(shlex.split(kind[len("subprocess:") :]))
    if kind.startswith("http:") or kind.startswith("https:"):
        return RemoteAdapter(kind)
    if kind.startswith("chat:"):
        cfg = _config_mapping(args)
        endpoint = cfg.get("chat_endpoint")
        if not endpoint:
            raise BiasCorpusError("chat adapter needs chat_endpoint in --config or env")
        return ChatCompletionAdapter(
            ChatClientConfig(
                endpoint=endpoint,
                model=kind[len("chat:") :],
                auth_token_env=cfg.get("chat_token_env", "BIASCORPUS_API_TOKEN"),
            )
        )
    raise BiasCorpusError(f"unknown adapter {kind!r}")


def _read_items(path: str):
    from biascorpus.dataset import CandidateItem, LabeledInstance

    items = []
    for rec in read_jsonl(path):
        if "sentence" in rec:
            items.append(CandidateItem.from_record(rec))
        else:
            items.append(LabeledInstance.from_record(rec))
    return items


def cmd_classify(args) -> int:
    from biascorpus.classifiers import BatchConfig, classify_batch, failures_only, predictions_only
    from biascorpus.evaluation import write_predictions_jsonl

    lexicon, _ = _load_lexicon(args)
    out = args.out or "predictions.jsonl"
    if args.verify:
        verify_against_manifest(out)
    items = _read_items(args.items)
    adapter = _make_adapter(args, lexicon)
    outcomes = classify_batch(adapter, items, BatchConfig(threshold=args.threshold))
    preds = predictions_only(outcomes)
    failures = failures_only(outcomes)
    write_predictions_jsonl(out, preds)
    if failures:
        write_jsonl(
            str(out) + ".failures.jsonl",
            ({"item_id": f.item_id, "error": f.error} for f in failures),
        )

    manifest = RunManifest(
        command="classify",
        config={"items": args.items, "adapter": args.adapter, "threshold": args.threshold},
        seed=args.seed,
    )
    manifest.add_input(args.items)
    manifest.add_output(out)
    _finish(args, manifest, out)
    _say(args, f"{len(preds)} predictions, {len(failures)} failures")
    return 1 if failures else 0


def cmd_eval(args) -> int:
    from biascorpus.dataset import read_dataset_jsonl
    from biascorpus.evaluation import evaluate, read_predictions_jsonl

    out = args.out or "report.json"
    if args.verify:
        verify_against_manifest(out)
    preds = read_predictions_jsonl(args.preds)
    instances = read_dataset_jsonl(args.gold)
    report = evaluate(
        preds,
        instances,
        regime=args.regime,
        strategy=args.strategy,
        drop_abstained=args.drop_abstain,
    )
    write_json(out, report.to_json())

    manifest = RunManifest(
        command="eval",
        config={
            "preds": args.preds,
            "gold": args.gold,
            "regime": args.regime,
            "strategy": args.strategy,
            "drop_abstain": args.drop_abstain,
        },
        seed=args.seed,
    )
    manifest.add_input(args.preds)
    manifest.add_input(args.gold)
    manifest.add_output(out)
    _finish(args, manifest, out)
    _say(
        args,
        f"f1_positive={report.f1_positive:.4f} f1_macro={report.f1_macro:.4f} "
        f"f1_micro={report.f1_micro:.4f} accuracy={report.accuracy:.4f} "
        f"abstained={report.abstain_count}",
    )
    return 0


def cmd_explain(args) -> int:
    from biascorpus.explain import ExplainConfig, explain_instance, render_html

    lexicon, _ = _load_lexicon(args)
    out = args.out or "explanation.json"
    if args.verify:
        verify_against_manifest(out)
    items = {i.item_id: i for i in _read_items(args.items)}
    if args.item_id not in items:
        raise BiasCorpusError(f"item {args.item_id!r} not found in {args.items}")
    item = items[args.item_id]
    text = item.text if hasattr(item, "text") else item.sentence.text

    adapter = _make_adapter(args, lexicon)

    def scorer(texts):
        from biascorpus.classifiers import AdapterRequest

        requests_ = [AdapterRequest(id=str(i), text=t) for i, t in enumerate(texts)]
        result = adapter.score_batch(requests_)
        out_scores = []
        for req in requests_:
            value = result[req.id]
            if isinstance(value, Exception):
                raise value
            out_scores.append(0.0 if value is None else float(value))
        return out_scores

    config = ExplainConfig(
        n_samples=args.samples, top_k=args.top_k, seed=stage_seed(args.seed, "explain")
    )
    explanation = explain_instance(args.item_id, text, scorer, config)
    write_json(out, explanation.to_json())
    if args.html:
        Path(args.html).write_text(render_html(text, explanation), encoding="utf-8")

    manifest = RunManifest(
        command="explain",
        config={
            "items": args.items,
            "item_id": args.item_id,
            "adapter": args.adapter,
            "samples": args.samples,
            "top_k": args.top_k,
        },
        seed=args.seed,
        sub_seeds={"explain": config.seed},
    )
    manifest.add_input(args.items)
    manifest.add_output(out)
    if args.html:
        manifest.add_output(args.html)
    _finish(args, manifest, out)
    return 0


def cmd_report(args) -> int:
    from biascorpus.evaluation import ConfusionMatrix, EvalReport, comparison_table
    from biascorpus.io import read_json

    reports = []
    for path in args.reports:
        rec = read_json(path)
        reports.append(
            EvalReport(
                model_id=rec["model_id"],
                regime=rec["regime"],
                strategy=rec["strategy"],
                confusion=ConfusionMatrix(**rec["confusion"]),
                f1_positive=rec["f1_positive"],
                f1_macro=rec["f1_macro"],
                f1_micro=rec["f1_micro"],
                accuracy=rec["accuracy"],
                abstain_count=rec.get("abstain_count", 0),
            )
        )
    out_dir = Path(args.out or "reports")
    out_dir.mkdir(parents=True, exist_ok=True)
    model_text, model_csv = comparison_table(reports, rows="model_id", metric=args.metric)
    strat_text, strat_csv = comparison_table(reports, rows="strategy", metric=args.metric)
    (out_dir / "models_by_regime.csv").write_text(model_csv, encoding="utf-8")
    (out_dir / "strategies_by_regime.csv").write_text(strat_csv, encoding="utf-8")
    tables = f"{model_text}\n\n{strat_text}\n"
    (out_dir / "tables.txt").write_text(tables, encoding="utf-8")

    manifest = RunManifest(
        command="report", config={"reports": list(args.reports), "metric": args.metric}, seed=args.seed
    )
    for p in args.reports:
        manifest.add_input(p)
    for name in ("models_by_regime.csv", "strategies_by_regime.csv", "tables.txt"):
        manifest.add_output(out_dir / name)
    _finish(args, manifest, out_dir / "tables.txt")
    _say(args, tables)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biascorpus",
        description="Bias-term corpus mining, annotation, and evaluation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, **kwargs) -> argparse.ArgumentParser:
        p = sub.add_parser(name, **kwargs)
        _common(p)
        p.set_defaults(func=func)
        return p

    p = add("ingest", cmd_ingest, help="fetch, normalize, segment, deduplicate")
    p.add_argument("--fixture", action="store_true", help="use the bundled fixture corpus")
    p.add_argument("--lexicon", default="default")
    p.add_argument("--expand-suffixes", action="store_true")
    p.add_argument("--date-from", dest="date_from")
    p.add_argument("--date-to", dest="date_to")

    p = add("extract", cmd_extract, help="sentences with lexicon matches become candidates")
    p.add_argument("--sentences", required=True)
    p.add_argument("--lexicon", default="default")
    p.add_argument("--expand-suffixes", action="store_true")

    p = add("sample", cmd_sample, help="draw an annotation batch")
    p.add_argument("--candidates", required=True)
    p.add_argument("--strategy", choices=("random", "term_diversity"), default="random")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--already-labeled", dest="already_labeled")
    p.add_argument("--seen-terms", dest="seen_terms")

    import os

    p = add("serve", cmd_serve, help="run the annotation service")
    p.add_argument("--data-dir", default=os.environ.get("BIASCORPUS_DATA_DIR"),
                   required="BIASCORPUS_DATA_DIR" not in os.environ)
    p.add_argument("--batch", help="candidates file to open as a session")
    p.add_argument("--annotators", default="annotator-1")
    p.add_argument("--overlap", type=float, default=0.0)
    p.add_argument("--session-id")
    p.add_argument("--host", default=os.environ.get("BIASCORPUS_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(os.environ.get("BIASCORPUS_PORT", "8400")))
    p.add_argument("--ui-dir", default=os.environ.get("BIASCORPUS_UI_DIR"))

    p = add("iaa", cmd_iaa, help="agreement report for a session")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--session")
    p.add_argument("--space", choices=("four_way", "binary"), default="four_way")

    p_dataset = sub.add_parser("dataset", help="dataset operations")
    dsub = p_dataset.add_subparsers(dest="dataset_command", required=True)
    p = dsub.add_parser("build", help="resolve annotations into the labeled dataset")
    _common(p)
    p.set_defaults(func=cmd_dataset_build)
    p.add_argument("--annotations", required=True)
    p.add_argument("--candidates", required=True)
    p.add_argument("--policy", choices=("expert", "majority"), default="expert")
    p.add_argument("--expert", help="expert annotator id whose label overrides")
    p.add_argument("--max-rounds", dest="max_rounds", type=int, default=2)
    p.add_argument("--csv", help="also export item_id,text,label CSV")
    p.add_argument("--requeue", help="write requeued item ids here")

    p = add("stats", cmd_stats, help="dataset statistics")
    p.add_argument("--dataset", required=True)
    p.add_argument("--lexicon", default="default")
    p.add_argument("--expand-suffixes", action="store_true")

    p = add("split", cmd_split, help="train/val/test split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--proportions", default="0.6,0.2,0.2")
    p.add_argument("--stratify", action="store_true")

    p = add("holdout", cmd_holdout, help="out-of-domain rare-term holdout")
    p.add_argument("--dataset", required=True)
    p.add_argument("--lexicon", default="default")
    p.add_argument("--expand-suffixes", action="store_true")
    p.add_argument("--threshold", type=int, default=10)
    p.add_argument("--proportions", default="0.6,0.2,0.2")
    p.add_argument("--test-mode", dest="test_mode", choices=("excluded_only", "mixed"), default="excluded_only")

    p = add("resample", cmd_resample, help="rebalance a training split")
    p.add_argument("--train", required=True)
    p.add_argument("--strategy", choices=("none", "undersample", "oversample", "balanced"), default="none")
    p.add_argument("--ratio", type=float)
    p.add_argument("--size", type=int)
    p.add_argument("--preset", choices=("undersample", "oversample", "balanced"))

    p = add("classify", cmd_classify, help="run an adapter over items")
    p.add_argument("--items", required=True)
    p.add_argument("--adapter", required=True, help="rule | mock | subprocess:CMD | http(s)://URL | chat:MODEL")
    p.add_argument("--lexicon", default="default")
    p.add_argument("--expand-suffixes", action="store_true")
    p.add_argument("--threshold", type=float, default=0.5)

    p = add("eval", cmd_eval, help="score predictions against gold labels")
    p.add_argument("--preds", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--regime", default="in_domain")
    p.add_argument("--strategy", default="none")
    p.add_argument("--drop-abstain", dest="drop_abstain", action="store_true")

    p = add("explain", cmd_explain, help="explain one prediction by perturbation")
    p.add_argument("--items", required=True)
    p.add_argument("--item-id", dest="item_id", required=True)
    p.add_argument("--adapter", required=True)
    p.add_argument("--lexicon", default="default")
    p.add_argument("--expand-suffixes", action="store_true")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--top-k", dest="top_k", type=int, default=8)
    p.add_argument("--html")

    p = add("report", cmd_report, help="comparison tables across eval reports")
    p.add_argument("reports", nargs="+")
    p.add_argument("--metric", default="f1_positive")

    return parser


def main(argv: list[str] | None = None) -> int:
    import os

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BiasCorpusError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1
    except Exception as exc:
        if os.environ.get("BIASCORPUS_DEBUG"):
            raise
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
