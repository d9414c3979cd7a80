"""Command-line front end: prepare -> classify -> evaluate -> report, and compare.

Exit codes: 0 success, 1 user or data error, 2 provider or transport failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

from modgate import corpus as corpus_mod
from modgate.errlab import (
    RunRecord,
    compare_runs,
    metrics_markdown,
    misclassification_report,
    run_from_records,
)
from modgate.errors import ModgateError, ProviderError, ReplayMiss
from modgate.evalkit import ConfusionMatrix, MetricsReport
from modgate.modelgw import (
    API_KEY_ENV,
    Gateway,
    ResponseCache,
    ScriptedProvider,
    live_provider_from_env,
    load_model_config,
    record_replay,
    with_overrides,
)
from modgate.promptkit import resolve_prompt_spec
from modgate.records import read_run_records, score_response, write_run_records
from modgate.taxonomy import CATEGORIES, load_taxonomy

log = logging.getLogger("modgate")

EXIT_OK, EXIT_USER, EXIT_PROVIDER = 0, 1, 2


class UsageError(Exception):
    """Bad invocation or input data; maps to exit code 1."""


def _err(msg: str) -> None:
    print(f"modgate: {msg}", file=sys.stderr)


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _check_writable(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise UsageError(f"{path} already exists (outputs are write-once; pass --force to replace)")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def manifest_path(run_path: Path) -> Path:
    return run_path.with_name(run_path.name + ".manifest.json")


def _twin(path: Path, suffix: str) -> Path:
    return path.with_suffix(suffix) if path.suffix != suffix else path.with_name(path.name + suffix)


# -- prepare -----------------------------------------------------------------


def cmd_prepare(args) -> int:
    taxonomy = load_taxonomy(args.taxonomy)
    out = Path(args.out)
    _check_writable(out, args.force)
    corpus = corpus_mod.load_corpus(args.corpus, taxonomy)
    sample = corpus_mod.balance_sample(corpus, args.per_category, args.neutral, args.seed)
    _write(out, corpus_mod.dump_corpus(sample))
    stats = corpus_mod.corpus_stats(sample)
    summary = ", ".join(f"{c.value} {n}" for c, n in stats.items())
    print(f"wrote {len(sample)} comments to {out} (seed {args.seed}): {summary}", file=sys.stderr)
    return EXIT_OK


# -- classify ----------------------------------------------------------------


def _load_script(path: Path) -> dict[str, str]:
    try:
        data = json.loads(path.read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read script {path}: {exc}") from exc
    if not isinstance(data, dict) or not all(isinstance(v, str) for v in data.values()):
        raise UsageError(f"script {path} must map comment ids to response text")
    return data


def cmd_classify(args) -> int:
    taxonomy = load_taxonomy(args.taxonomy)
    config, extra = load_model_config(args.model_config)
    config = with_overrides(config, concurrency_limit=args.concurrency)
    out = Path(args.out)
    _check_writable(out, args.force)

    provider = None
    if config.provider == "live-http":
        if not os.environ.get(API_KEY_ENV, "").strip():
            raise UsageError(f"{API_KEY_ENV} must be set for the live-http provider")
        provider = live_provider_from_env()
    if config.provider == "replay":
        if not args.cache:
            raise UsageError("the replay provider needs --cache pointing at a recorded file")
        cache = record_replay(args.cache)
    else:
        cache = ResponseCache(args.cache)
    if config.provider == "scripted":
        script = extra.get("script")
        if not script:
            raise UsageError("scripted provider needs a 'script' entry in the model config")
        script_path = Path(args.model_config).parent / script
        provider = ScriptedProvider(_load_script(script_path))

    spec = resolve_prompt_spec(args.prompt, taxonomy, args.prompt_dir)
    corpus_path = Path(args.corpus)
    corpus_digest = _sha256_file(corpus_path) if corpus_path.is_file() else None
    corpus = corpus_mod.load_corpus(corpus_path, taxonomy)
    run_id = args.run_id or f"{spec.version_id}-{config.model_id}-{corpus_digest[:8]}"
    started = _now()

    items = Gateway(config, cache, provider).classify_batch(spec, corpus)
    failures = [it for it in items if not it.ok]
    if failures:
        for it in failures[:10]:
            _err(f"{it.comment.id}: {it.error}")
        _err(f"{len(failures)} of {len(items)} comments failed; successful responses are cached")
        if any(isinstance(it.error, ReplayMiss) for it in failures):
            return EXIT_USER
        return EXIT_PROVIDER

    records = [
        score_response(
            it.comment.id, it.comment.gold, it.response.content, taxonomy,
            prompt_version=spec.version_id, model_id=config.model_id,
            from_cache=it.response.from_cache,
        )
        for it in items
    ]
    manifest = {
        "run_id": run_id,
        "corpus": {"path": str(corpus_path), "sha256": corpus_digest},
        "prompt_version": spec.version_id,
        "model": config.public_dict(),
        "cache": str(args.cache) if args.cache else None,
        "seed": args.seed,
        "records": len(records),
        "provider_calls": sum(not it.response.from_cache for it in items),
        "started_at": started,
        "completed_at": _now(),
    }
    tmp = out.with_name(out.name + ".tmp")
    write_run_records(records, tmp)
    os.replace(tmp, out)
    _write(manifest_path(out), json.dumps(manifest, indent=2) + "\n")
    failed = sum(r.parse_failed for r in records)
    print(
        f"classified {len(records)} comments with {spec.version_id} on {config.model_id} "
        f"({manifest['provider_calls']} provider calls, {failed} unparseable) -> {out}",
        file=sys.stderr,
    )
    return EXIT_OK


# -- evaluate / report -------------------------------------------------------


def _load_run(path: Path) -> RunRecord:
    records = read_run_records(path)
    if not records:
        raise UsageError(f"run file {path} has no records")
    run_id = path.stem
    mpath = manifest_path(path)
    if mpath.is_file():
        try:
            run_id = json.loads(mpath.read_text("utf-8")).get("run_id") or run_id
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad manifest {mpath}: {exc}") from exc
    try:
        return run_from_records(run_id, records)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def evaluation_document(run: RunRecord) -> dict:
    return {
        "run_id": run.run_id,
        "prompt_version": run.prompt_version,
        "model_id": run.model_id,
        "parse_failed": sum(r.parse_failed for r in run.records),
        "categories": [c.value for c in CATEGORIES],
        "confusion": run.matrix.to_lists(),
        "metrics": run.metrics.to_dict(),
    }


def cmd_evaluate(args) -> int:
    out = Path(args.out)
    md = _twin(out, ".md")
    _check_writable(out, args.force)
    _check_writable(md, args.force)
    run = _load_run(Path(args.run))
    doc = evaluation_document(run)
    _write(out, json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    _write(md, metrics_markdown(run))
    m = run.metrics
    print(
        f"{run.run_id}: MCC {m.mcc:.3f}, accuracy {m.accuracy:.4f}, binary P/R/F1 "
        f"{m.binary.precision:.4f}/{m.binary.recall:.4f}/{m.binary.f1:.4f}, "
        f"{doc['parse_failed']} unparseable -> {out}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_report(args) -> int:
    out = Path(args.out)
    js = _twin(out, ".json")
    _check_writable(out, args.force)
    _check_writable(js, args.force)
    run = _load_run(Path(args.run))
    report = misclassification_report(run, top_k=args.top)
    _write(out, report.to_markdown())
    _write(js, report.to_json())
    print(
        f"{run.run_id}: {len(report.false_positives)} false positives, "
        f"{len(report.false_negatives)} false negatives -> {out}",
        file=sys.stderr,
    )
    return EXIT_OK


# -- compare -----------------------------------------------------------------


def _load_comparable(path: Path) -> RunRecord:
    if path.suffix == ".jsonl":
        return _load_run(path)
    try:
        doc = json.loads(path.read_text("utf-8"))
        cm = ConfusionMatrix.from_lists(doc["confusion"]) if "confusion" in doc else None
        return RunRecord(doc["run_id"], doc["prompt_version"], doc["model_id"],
                         MetricsReport.from_dict(doc["metrics"]), None, cm)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot read evaluation report {path}: {exc!r}") from exc


def cmd_compare(args) -> int:
    out = Path(args.out)
    csv_path = _twin(out, ".csv")
    _check_writable(out, args.force)
    _check_writable(csv_path, args.force)
    runs = [_load_comparable(Path(p)) for p in args.runs]
    seen: dict[str, str] = {}
    for path, run in zip(args.runs, runs):
        if run.run_id in seen:
            raise UsageError(f"run id {run.run_id!r} appears in both {seen[run.run_id]} and {path}")
        seen[run.run_id] = path
    try:
        table = compare_runs(runs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(out, table.to_text())
    _write(csv_path, table.to_csv())
    sys.stderr.write(table.to_text())
    return EXIT_OK


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modgate", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, taxonomy=True):
        sp.add_argument("--out", required=True, help="output path")
        sp.add_argument("--force", action="store_true", help="replace existing outputs")
        if taxonomy:
            sp.add_argument("--taxonomy", default=None, help="taxonomy schema file (default: bundled)")

    sp = sub.add_parser("prepare", help="balance-sample a labeled corpus")
    sp.add_argument("--corpus", required=True, help="input dataset (JSONL)")
    sp.add_argument("--per-category", type=int, default=40)
    sp.add_argument("--neutral", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_prepare)

    sp = sub.add_parser("classify", help="classify a corpus with one prompt version and model")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--prompt", required=True, help="prompt version id (e.g. P19) or spec file")
    sp.add_argument("--prompt-dir", default=None, help="directory of prompt specs (default: bundled)")
    sp.add_argument("--model-config", required=True, help="model config file (YAML)")
    sp.add_argument("--cache", default=None, help="response cache / replay file (JSONL)")
    sp.add_argument("--concurrency", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None, help="sampling seed recorded in the manifest")
    sp.add_argument("--run-id", default=None)
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("evaluate", help="compute metrics for a run file")
    sp.add_argument("--run", required=True)
    common(sp, taxonomy=False)
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("report", help="misclassification report for a run file")
    sp.add_argument("--run", required=True)
    sp.add_argument("--top", type=int, default=10, help="number of top confusions to list")
    common(sp, taxonomy=False)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("compare", help="compare MCC across evaluated runs")
    sp.add_argument("runs", nargs="+", help="evaluation reports (.json) or run files (.jsonl)")
    common(sp, taxonomy=False)
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ProviderError as exc:
        _err(str(exc))
        return EXIT_PROVIDER
    except (UsageError, ModgateError, ValueError) as exc:
        _err(str(exc))
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
