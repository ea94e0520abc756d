"""Per-publication normalized impact scores computed within reference sets."""
from __future__ import annotations

import math
import statistics
from bisect import bisect_right
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import CitationEdge, Corpus, effective_citations, effective_ref_count
from .refset import ReferenceSet, RefSets, SetKey

DEFAULT_THRESHOLDS = (50.0, 75.0, 90.0, 95.0, 99.0)


class ScoringError(ValueError):
    pass


@dataclass(frozen=True)
class RankClassScheme:
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS

    def __post_init__(self) -> None:
        ts = tuple(float(t) for t in self.thresholds)
        if not ts:
            raise ValueError("at least one threshold is required")
        if any(not 0.0 < t < 100.0 for t in ts):
            raise ValueError("thresholds must lie strictly between 0 and 100")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("thresholds must be strictly increasing")
        object.__setattr__(self, "thresholds", ts)

    @classmethod
    def parse(cls, text: str) -> "RankClassScheme":
        try:
            values = [float(part) for part in text.split(",") if part.strip()]
        except ValueError:
            raise ValueError(f"thresholds must be comma-separated numbers, got {text!r}") from None
        return cls(tuple(values))

    @property
    def labels(self) -> tuple[str, ...]:
        ts = self.thresholds
        return (f"bottom {ts[0]:g}%",) + tuple(f"top {100 - t:g}%" for t in ts)

    @property
    def intervals(self) -> tuple[tuple[float, float], ...]:
        edges = (0.0,) + self.thresholds + (100.0,)
        return tuple(zip(edges, edges[1:]))


def percentile_scores(set_citations: Sequence[tuple[str, int]]) -> dict[str, float]:
    """Mean-rank percentile of every paper in one reference set.

    With L papers cited strictly less and E papers tied (self included), the
    percentile is ``100 * (L + 0.5 * E) / n``.
    """
    n = len(set_citations)
    if n == 0:
        raise ScoringError("percentiles need a non-empty set")
    ids = [pid for pid, _ in set_citations]
    counts = np.fromiter((c for _, c in set_citations), dtype=np.int64, count=n)
    values, inverse, ties = np.unique(counts, return_inverse=True, return_counts=True)
    below = np.concatenate(([0], np.cumsum(ties)[:-1]))
    per_value = 100.0 * (below + 0.5 * ties) / n
    return dict(zip(ids, per_value[inverse].tolist()))


def rank_class(percentile: float, classes: RankClassScheme = RankClassScheme()) -> str:
    """Label of the interval holding ``percentile``; boundaries go to the upper class."""
    return classes.labels[bisect_right(classes.thresholds, percentile)]


def rcr_scores(set_citations: Sequence[tuple[str, int]]) -> dict[str, float | None]:
    """Citations divided by the set's mean; None for every member when the mean is 0."""
    if not set_citations:
        raise ScoringError("RCR needs a non-empty set")
    mean = math.fsum(c for _, c in set_citations) / len(set_citations)
    if mean == 0:
        return {pid: None for pid, _ in set_citations}
    return {pid: c / mean for pid, c in set_citations}


def fractional_scores(corpus: Corpus, skipped: list[CitationEdge] | None = None) -> dict[str, float]:
    """Sum of 1/N over each paper's citing papers, N being the citing reference-list length.

    Dangling edges contribute nothing. Edges whose citing paper has no known
    reference count are skipped and appended to ``skipped`` when given.
    """
    parts: dict[str, list[float]] = defaultdict(list)
    for edge in corpus.edges:
        if corpus.is_dangling(edge):
            continue
        n_refs = effective_ref_count(corpus, edge.citing_id)
        if n_refs is None:
            if skipped is not None:
                skipped.append(edge)
            continue
        parts[edge.cited_id].append(1.0 / n_refs)
    return {pid: math.fsum(parts[pid]) if pid in parts else 0.0 for pid in corpus.publications}


@dataclass(frozen=True)
class SkewnessReport:
    mean: float
    median: float
    skew_flag: bool
    top_paper_share: float

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "median": self.median,
            "skew_flag": self.skew_flag,
            "top_paper_share": self.top_paper_share,
        }


def skewness_report(counts: Sequence[int]) -> SkewnessReport:
    """Mean vs median and the most-cited paper's share of all citations in the set.

    ``skew_flag`` is set when the mean exceeds 1.5 times the median.
    """
    if not counts:
        raise ScoringError("skewness needs a non-empty set")
    total = math.fsum(counts)
    mean = total / len(counts)
    median = float(statistics.median(counts))
    share = max(counts) / total if total else 0.0
    return SkewnessReport(mean, median, mean > 1.5 * median, share)


@dataclass(frozen=True)
class IndicatorRecord:
    pub_id: str
    set_key: SetKey
    resolved_level: str
    fallback_applied: bool
    n_set: int
    citations: int
    set_mean: float
    percentile: float
    rank_class: str
    rcr: float | None
    fractional_citations: float
    year: int

    @property
    def rcr_defined(self) -> bool:
        return self.rcr is not None


def _score_set(
    refset: ReferenceSet,
    counts: dict[str, int],
    fractional: dict[str, float],
    classes: RankClassScheme,
    years: dict[str, int],
) -> list[IndicatorRecord]:
    pairs = [(pid, counts[pid]) for pid in refset.member_ids]
    pct = percentile_scores(pairs)
    rcr = rcr_scores(pairs)
    mean = math.fsum(c for _, c in pairs) / len(pairs)
    return [
        IndicatorRecord(
            pub_id=pid,
            set_key=refset.key,
            resolved_level=refset.resolved_level,
            fallback_applied=refset.fallback_applied,
            n_set=refset.size,
            citations=c,
            set_mean=mean,
            percentile=pct[pid],
            rank_class=rank_class(pct[pid], classes),
            rcr=rcr[pid],
            fractional_citations=fractional.get(pid, 0.0),
            year=years[pid],
        )
        for pid, c in sorted(pairs)
    ]


def score_all(
    corpus: Corpus,
    refsets: RefSets,
    classes: RankClassScheme = RankClassScheme(),
    fractional: dict[str, float] | None = None,
    workers: int = 1,
) -> list[IndicatorRecord]:
    """One IndicatorRecord per publication in any reference set, ordered by (set key, id)."""
    missing = [pid for s in refsets.sets for pid in s.member_ids if pid not in corpus]
    if missing:
        raise ScoringError(
            f"reference sets do not match the corpus: {len(missing)} unknown id(s), e.g. {missing[0]}"
        )
    if fractional is None:
        fractional = fractional_scores(corpus)
    members = [pid for s in refsets.sets for pid in s.member_ids]
    counts = {pid: effective_citations(corpus, pid) for pid in members}
    years = {pid: corpus.publications[pid].year for pid in members}

    ordered = sorted(refsets.sets, key=lambda s: s.key)

    def work(s: ReferenceSet) -> list[IndicatorRecord]:
        return _score_set(s, counts, fractional, classes, years)

    if workers > 1 and len(ordered) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks: Iterable[list[IndicatorRecord]] = list(pool.map(work, ordered))
    else:
        chunks = map(work, ordered)
    return [rec for chunk in chunks for rec in chunk]
