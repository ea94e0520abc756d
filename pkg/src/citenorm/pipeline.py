"""End-to-end runs: ingest -> reference sets -> indicators -> unit reports."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import Corpus, IngestionReport, corpus_stats, ingest
from .indicators import IndicatorRecord, RankClassScheme, fractional_scores, score_all
from .refset import Grouping, RefSetPolicy, RefSets, build_refsets
from .report import (
    OutputBundle,
    TrendReport,
    UnitDefinition,
    UnitReport,
    trend_variance,
    unit_report,
)
from .scheme import Scheme


@dataclass
class ScoreRun:
    corpus: Corpus
    ingestion: IngestionReport
    refsets: RefSets
    records: list[IndicatorRecord]
    classes: RankClassScheme
    skipped_edges: int = 0
    unit_reports: list[UnitReport] = field(default_factory=list)
    trends: list[TrendReport] = field(default_factory=list)

    def by_id(self) -> dict[str, IndicatorRecord]:
        return {r.pub_id: r for r in self.records}

    def diagnostics(self, scheme: Scheme | None) -> dict:
        policy = self.refsets.policy
        diag = {
            "run": {
                "grouping": policy.grouping.value,
                "level": policy.level.value if policy.grouping is Grouping.CLASSIFICATION else None,
                "min_size": policy.min_size,
                "fallback": policy.fallback.value,
                "thresholds": list(self.classes.thresholds),
                "census_note": self.corpus.census_note,
            },
            "ingestion": self.ingestion.to_dict(),
            "exclusions": self.refsets.exclusions.to_dict(),
            "fractional_skipped_edges": self.skipped_edges,
            "n_records": len(self.records),
            "n_sets": len(self.refsets.sets),
            "n_fallback_sets": sum(s.fallback_applied for s in self.refsets.sets),
            "n_exhausted_sets": sum(s.fallback_exhausted for s in self.refsets.sets),
        }
        if scheme is not None and policy.grouping is Grouping.CLASSIFICATION:
            diag["coverage"] = corpus_stats(self.corpus, scheme, policy.level).to_dict()
        return diag

    def bundle(self, scheme: Scheme | None) -> OutputBundle:
        return OutputBundle(self.records, self.unit_reports, self.diagnostics(scheme), self.refsets, self.trends)


def score_corpus(
    corpus: Corpus,
    ingestion: IngestionReport,
    scheme: Scheme | None,
    policy: RefSetPolicy = RefSetPolicy(),
    classes: RankClassScheme = RankClassScheme(),
    workers: int = 1,
) -> ScoreRun:
    refsets = build_refsets(corpus, scheme, policy)
    skipped: list = []
    fractional = fractional_scores(corpus, skipped)
    records = score_all(corpus, refsets, classes, fractional, workers=workers)
    return ScoreRun(corpus, ingestion, refsets, records, classes, len(skipped))


def score_files(
    scheme: Scheme,
    pubs_path: "str | Path",
    edges_path: "str | Path | None" = None,
    policy: RefSetPolicy = RefSetPolicy(),
    classes: RankClassScheme = RankClassScheme(),
    workers: int = 1,
    census_note: str = "",
) -> ScoreRun:
    with open(pubs_path, encoding="utf-8") as pubs:
        if edges_path is None:
            corpus, rep = ingest(pubs, None, scheme, census_note)
        else:
            with open(edges_path, encoding="utf-8") as edges:
                corpus, rep = ingest(pubs, edges, scheme, census_note)
    return score_corpus(corpus, rep, scheme, policy, classes, workers)


def add_unit_reports(run: ScoreRun, units: Sequence[UnitDefinition]) -> list[UnitReport]:
    by_id = run.by_id()
    grouping = run.refsets.policy.grouping.value
    run.unit_reports = [unit_report(by_id, u, run.corpus, grouping) for u in units]
    run.trends = []
    for u, rep in zip(units, run.unit_reports):
        if len(rep.per_year) >= 2:
            run.trends.append(trend_variance(by_id, u, run.corpus))
    return run.unit_reports

