"""End-to-end orchestration: ingest, attribute, dedup, summarize.

Each stage persists into the event store before the next starts, so a
failure mid-run keeps everything the earlier stages produced; errors carry
their stage label. Re-running over an unchanged corpus appends nothing but
the run-completed marker: every stage helper skips writes whose target
state already holds.
"""

from __future__ import annotations

import time
from dataclasses import replace
from pathlib import Path

from .attribution import batch_attribute, load_ruleset
from .ingest import amendment_to_record, ingest_plaintext_file, load_corpus
from .prompts import PromptMode
from .similarity import DuplicateCluster, Metric, duplicate_rate, find_duplicates
from .store import Store, summary_from_dict
from .summarizer import BackendConfig, CompletionClient, summarize


class PipelineStageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")


def _load_any(corpus_path: str | Path, fmt: str = "auto"):
    path = Path(corpus_path)
    if fmt == "text" or (fmt == "auto" and path.suffix in (".txt", ".text")):
        return ingest_plaintext_file(path)
    return load_corpus(path)


def run_pipeline(
    corpus_path: str | Path,
    rules_path: str | Path,
    backend: BackendConfig,
    store: Store,
    history_path: str | Path | None = None,
    threshold: float = 0.95,
    metric: Metric = Metric.JARO_WINKLER,
    mode: PromptMode = PromptMode.ZERO_SHOT,
    reuse_cluster_summaries: bool = True,
    corpus_format: str = "auto",
    client: CompletionClient | None = None,
    clock=None,
) -> dict:
    """Run all stages into ``store`` and return the pipeline report."""
    timings: dict[str, float] = {}
    report: dict = {"counts": {}, "timings": timings}

    t0 = time.perf_counter()
    try:
        corpus, parse_report = _load_any(corpus_path, corpus_format)
        new_amendments = 0
        for a in corpus:
            if store.add_amendment(amendment_to_record(a)):
                new_amendments += 1
    except Exception as exc:
        raise PipelineStageError("ingest", exc) from exc
    timings["ingest"] = time.perf_counter() - t0
    report["counts"]["amendments"] = len(corpus)
    report["counts"]["ingested_new"] = new_amendments
    report["counts"]["parse_rejected"] = len(parse_report.rejected)

    t0 = time.perf_counter()
    try:
        ruleset = load_ruleset(rules_path)
        attributions, coverage = batch_attribute(corpus, ruleset)
        for att in attributions:
            store.set_attribution(att)
    except Exception as exc:
        raise PipelineStageError("attribute", exc) from exc
    timings["attribute"] = time.perf_counter() - t0
    report["coverage"] = coverage
    report["counts"]["attributed"] = sum(1 for a in attributions if a.bureau is not None)

    t0 = time.perf_counter()
    try:
        history = None
        if history_path is not None:
            history, _ = _load_any(history_path, corpus_format)
        matches, clusters = find_duplicates(
            corpus, history=history, threshold=threshold, metric=metric
        )
        store.set_clusters(clusters, processed_ids=[a.id for a in corpus])
    except Exception as exc:
        raise PipelineStageError("dedup", exc) from exc
    timings["dedup"] = time.perf_counter() - t0
    report["counts"]["matches"] = len(matches)
    report["counts"]["clusters"] = len(clusters)
    report["duplicate_rate"] = duplicate_rate(clusters, len(corpus))

    t0 = time.perf_counter()
    generated = reused = skipped = 0
    try:
        representative_of = {}
        if reuse_cluster_summaries:
            for cluster in clusters:
                for member in cluster.member_ids:
                    if member != cluster.representative_id:
                        representative_of[member] = cluster.representative_id

        corpus_ids = [a.id for a in corpus]
        by_id = corpus.by_id()
        # representatives (and singletons) first, then reuse for members
        for ident in corpus_ids:
            if ident in representative_of:
                continue
            if store.summary_of.get(ident):
                skipped += 1
                continue
            record = summarize(by_id[ident], backend, mode, client=client, clock=clock)
            store.add_summary(record)
            generated += 1
        for ident in corpus_ids:
            rep = representative_of.get(ident)
            if rep is None:
                continue
            if store.summary_of.get(ident):
                skipped += 1
                continue
            rep_summary_id = store.summary_of.get(rep)
            if rep_summary_id is None:
                # representative lives in the history corpus and has no
                # stored summary to reuse: generate normally
                record = summarize(by_id[ident], backend, mode, client=client, clock=clock)
                store.add_summary(record)
                generated += 1
                continue
            from .store import summary_from_dict
            from dataclasses import replace as _replace

            rep_record = summary_from_dict(store.summaries[rep_summary_id])
            reuse_record = _replace(
                rep_record,
                summary_id=f"{rep_summary_id}-reuse-{ident}",
                amendment_id=ident,
            )
            store.add_summary(reuse_record, reused_from=rep)
            reused += 1
    except Exception as exc:
        raise PipelineStageError("summarize", exc) from exc
    timings["summarize"] = time.perf_counter() - t0
    report["counts"]["summaries_generated"] = generated
    report["counts"]["summaries_reused"] = reused
    report["counts"]["summaries_skipped"] = skipped

    store.record_run(report)
    return report
