"""Aggregation of indicator records to evaluation units, and file output."""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .indicators import IndicatorRecord, skewness_report

INDICATOR_COLUMNS = (
    "pub_id",
    "set_code",
    "set_year",
    "resolved_level",
    "fallback",
    "n_set",
    "citations",
    "percentile",
    "rank_class",
    "rcr",
    "rcr_defined",
    "fractional",
)

TOP10_THRESHOLD = 90.0


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class UnitDefinition:
    unit_id: str
    member_pub_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        ids = tuple(self.member_pub_ids)
        dupes = sorted(m for m, k in Counter(ids).items() if k > 1)
        if dupes:
            raise ReportError(f"unit {self.unit_id}: duplicate member id(s) {', '.join(dupes)}")
        object.__setattr__(self, "member_pub_ids", ids)


def read_units(lines: Iterable[str]) -> list[UnitDefinition]:
    """Unit file: one unit per line, ``unit_id<TAB>pub_id<TAB>pub_id...``."""
    units: list[UnitDefinition] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(lines, start=1):
        text = raw.rstrip("\r\n")
        if not text.strip() or text.startswith("#"):
            continue
        parts = [p.strip() for p in text.split("\t") if p.strip()]
        if parts[0] in seen:
            raise ReportError(f"units line {lineno}: duplicate unit id {parts[0]}")
        seen.add(parts[0])
        try:
            units.append(UnitDefinition(parts[0], tuple(parts[1:])))
        except ReportError as exc:
            raise ReportError(f"units line {lineno}: {exc}") from None
    return units


def write_units(units: Iterable[UnitDefinition], fh) -> None:
    for unit in units:
        fh.write("\t".join((unit.unit_id,) + unit.member_pub_ids) + "\n")


def _mean(values: Sequence[float]) -> float | None:
    return math.fsum(values) / len(values) if values else None


@dataclass(frozen=True)
class YearSummary:
    n: int
    mean_percentile: float
    mncs: float | None


@dataclass(frozen=True)
class UnitReport:
    unit_id: str
    n_scored: int
    n_excluded: int
    mean_percentile: float | None
    pp_top10: float | None
    mncs: float | None
    per_year: dict[int, YearSummary]
    n_fallback: int = 0
    excluded_ids: tuple[str, ...] = ()
    grouping: str | None = None

    def to_dict(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "grouping": self.grouping,
            "n_scored": self.n_scored,
            "n_excluded": self.n_excluded,
            "n_fallback": self.n_fallback,
            "mean_percentile": self.mean_percentile,
            "pp_top10": self.pp_top10,
            "mncs": self.mncs,
            "mncs_defined": self.mncs is not None,
            "per_year": {
                str(y): {"n": s.n, "mean_percentile": s.mean_percentile, "mncs": s.mncs}
                for y, s in sorted(self.per_year.items())
            },
            "excluded_ids": list(self.excluded_ids[:100]),
        }


def _index(records: Iterable[IndicatorRecord]) -> dict[str, IndicatorRecord]:
    return {r.pub_id: r for r in records}


def _unit_members(
    by_id: Mapping[str, IndicatorRecord], unit: UnitDefinition, known_ids
) -> tuple[list[IndicatorRecord], list[str]]:
    if not unit.member_pub_ids:
        raise ReportError(f"unit {unit.unit_id} has no members")
    if known_ids is not None:
        unknown = [m for m in unit.member_pub_ids if m not in known_ids]
        if unknown:
            raise ReportError(f"unit {unit.unit_id}: unknown publication id {unknown[0]}")
    scored = [by_id[m] for m in unit.member_pub_ids if m in by_id]
    excluded = [m for m in unit.member_pub_ids if m not in by_id]
    return scored, excluded


def _summarize(recs: Sequence[IndicatorRecord]) -> tuple[float | None, float | None]:
    return (
        _mean([r.percentile for r in recs]),
        _mean([r.rcr for r in recs if r.rcr is not None]),
    )


def unit_report(
    records: "Iterable[IndicatorRecord] | Mapping[str, IndicatorRecord]",
    unit: UnitDefinition,
    known_ids=None,
    grouping: str | None = None,
) -> UnitReport:
    """Aggregate a unit's member scores.

    Members without a record are counted as excluded. When ``known_ids`` (for
    instance a Corpus) is given, ids outside it raise ReportError.
    """
    by_id = records if isinstance(records, Mapping) else _index(records)
    scored, excluded = _unit_members(by_id, unit, known_ids)

    years: dict[int, list[IndicatorRecord]] = defaultdict(list)
    for r in scored:
        years[r.year].append(r)
    per_year = {}
    for y in sorted(years):
        mp, mncs = _summarize(years[y])
        per_year[y] = YearSummary(len(years[y]), mp, mncs)

    mean_pct, mncs = _summarize(scored)
    top = sum(1 for r in scored if r.percentile >= TOP10_THRESHOLD)
    return UnitReport(
        unit_id=unit.unit_id,
        n_scored=len(scored),
        n_excluded=len(excluded),
        mean_percentile=mean_pct,
        pp_top10=top / len(scored) if scored else None,
        mncs=mncs,
        per_year=per_year,
        n_fallback=sum(1 for r in scored if r.fallback_applied),
        excluded_ids=tuple(excluded),
        grouping=grouping,
    )


@dataclass(frozen=True)
class TrendReport:
    unit_id: str
    years: tuple[int, ...]
    mean_percentile: tuple[float, ...]
    mncs: tuple[float | None, ...]
    percentile_variance: float
    mncs_variance: float | None

    def to_dict(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "years": list(self.years),
            "mean_percentile": list(self.mean_percentile),
            "mncs": list(self.mncs),
            "percentile_variance": self.percentile_variance,
            "mncs_variance": self.mncs_variance,
        }


def trend_variance(
    records: "Iterable[IndicatorRecord] | Mapping[str, IndicatorRecord]",
    unit: UnitDefinition,
    known_ids=None,
) -> TrendReport:
    """Yearly mean percentile and MNCS of a unit, with their population variances across years.

    ``mncs_variance`` is None when fewer than two years have a defined MNCS.
    """
    rep = unit_report(records, unit, known_ids)
    if len(rep.per_year) < 2:
        raise ReportError(f"unit {unit.unit_id} spans fewer than two publication years")
    years = tuple(sorted(rep.per_year))
    pct = tuple(rep.per_year[y].mean_percentile for y in years)
    mncs = tuple(rep.per_year[y].mncs for y in years)
    defined = [m for m in mncs if m is not None]
    return TrendReport(
        unit_id=unit.unit_id,
        years=years,
        mean_percentile=pct,
        mncs=mncs,
        percentile_variance=statistics.pvariance(pct),
        mncs_variance=statistics.pvariance(defined) if len(defined) >= 2 else None,
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def indicator_row(rec: IndicatorRecord) -> list[str]:
    return [
        rec.pub_id,
        rec.set_key[0],
        str(rec.set_key[1]),
        rec.resolved_level,
        _fmt(rec.fallback_applied),
        str(rec.n_set),
        str(rec.citations),
        _fmt(rec.percentile),
        rec.rank_class,
        _fmt(rec.rcr),
        _fmt(rec.rcr_defined),
        _fmt(rec.fractional_citations),
    ]


def indicator_dict(rec: IndicatorRecord) -> dict:
    return dict(zip(INDICATOR_COLUMNS, [
        rec.pub_id, rec.set_key[0], rec.set_key[1], rec.resolved_level, rec.fallback_applied,
        rec.n_set, rec.citations, rec.percentile, rec.rank_class, rec.rcr, rec.rcr_defined,
        rec.fractional_citations,
    ]))


def _tsv(rows: Iterable[Sequence[str]], header: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _jsonl(docs: Iterable[dict]) -> str:
    return "".join(json.dumps(d, sort_keys=True, separators=(",", ":")) + "\n" for d in docs)


def set_diagnostics(records: Sequence[IndicatorRecord], refsets=None) -> list[dict]:
    """Skewness figures for every reference set represented in ``records``."""
    by_set: dict = defaultdict(list)
    for r in records:
        by_set[r.set_key].append(r)
    rows = []
    for key in sorted(by_set):
        recs = by_set[key]
        sk = skewness_report([r.citations for r in recs])
        row = {
            "set_code": key[0],
            "set_year": key[1],
            "n_set": len(recs),
            "resolved_level": recs[0].resolved_level,
            "fallback_applied": recs[0].fallback_applied,
        }
        if refsets is not None:
            row["fallback_exhausted"] = refsets[key].fallback_exhausted
        row.update(sk.to_dict())
        rows.append(row)
    return rows


@dataclass
class OutputBundle:
    records: Sequence[IndicatorRecord]
    unit_reports: Sequence[UnitReport] = ()
    diagnostics: dict = field(default_factory=dict)
    refsets: object = None
    trends: Sequence[TrendReport] = ()


def write_outputs(bundle: OutputBundle, destination: "str | Path") -> list[Path]:
    """Write indicator, unit and diagnostic files under ``destination``; returns the paths.

    Output is byte-identical for identical inputs.
    """
    dest = Path(destination)
    try:
        dest.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {dest}: {exc.strerror}") from exc

    files: dict[str, str] = {}
    files["indicators.tsv"] = _tsv((indicator_row(r) for r in bundle.records), INDICATOR_COLUMNS)
    files["indicators.jsonl"] = _jsonl(indicator_dict(r) for r in bundle.records)

    sets = set_diagnostics(bundle.records, bundle.refsets)
    set_cols = [
        "set_code", "set_year", "n_set", "resolved_level", "fallback_applied",
        "fallback_exhausted", "mean", "median", "skew_flag", "top_paper_share",
    ]
    files["sets.tsv"] = _tsv(([_fmt(s.get(c)) for c in set_cols] for s in sets), set_cols)

    if bundle.unit_reports:
        unit_cols = [
            "unit_id", "grouping", "n_scored", "n_excluded", "n_fallback",
            "mean_percentile", "pp_top10", "mncs", "mncs_defined",
        ]
        docs = [u.to_dict() for u in bundle.unit_reports]
        files["units.tsv"] = _tsv(([_fmt(d[c]) for c in unit_cols] for d in docs), unit_cols)
        files["units.jsonl"] = _jsonl(docs)
        year_rows = [
            [u.unit_id, str(y), str(s.n), _fmt(s.mean_percentile), _fmt(s.mncs)]
            for u in bundle.unit_reports
            for y, s in sorted(u.per_year.items())
        ]
        files["unit_years.tsv"] = _tsv(year_rows, ["unit_id", "year", "n", "mean_percentile", "mncs"])

    if bundle.trends:
        files["trends.jsonl"] = _jsonl(t.to_dict() for t in bundle.trends)

    diagnostics = dict(bundle.diagnostics)
    diagnostics["sets"] = sets
    files["diagnostics.json"] = json.dumps(diagnostics, sort_keys=True, indent=2) + "\n"

    written = []
    for name, text in files.items():
        path = dest / name
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from exc
        written.append(path)
    return written
