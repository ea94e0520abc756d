"""Field-normalized citation indicators built on publication-level classification schemes."""

__version__ = "0.1.0"

from .corpus import (
    CitationEdge,
    Corpus,
    CorpusError,
    IngestionReport,
    Publication,
    corpus_stats,
    effective_citations,
    effective_ref_count,
    ingest,
)
from .indicators import (
    IndicatorRecord,
    RankClassScheme,
    fractional_scores,
    percentile_scores,
    rank_class,
    rcr_scores,
    score_all,
    skewness_report,
)
from .refset import ReferenceSet, RefSetPolicy, build_refsets
from .report import UnitDefinition, UnitReport, trend_variance, unit_report, write_outputs
from .scheme import Level, Scheme, SchemeError, SchemeNode, load_scheme, parse_scheme, resolve_level

__all__ = [
    "CitationEdge",
    "Corpus",
    "CorpusError",
    "IndicatorRecord",
    "IngestionReport",
    "Level",
    "Publication",
    "RankClassScheme",
    "RefSetPolicy",
    "ReferenceSet",
    "Scheme",
    "SchemeError",
    "SchemeNode",
    "UnitDefinition",
    "UnitReport",
    "build_refsets",
    "corpus_stats",
    "effective_citations",
    "effective_ref_count",
    "fractional_scores",
    "ingest",
    "load_scheme",
    "parse_scheme",
    "percentile_scores",
    "rank_class",
    "rcr_scores",
    "resolve_level",
    "score_all",
    "skewness_report",
    "trend_variance",
    "unit_report",
    "write_outputs",
]
