"""Publication records, the citation graph, and ingestion.

Publication file: JSON Lines, one object per line with keys
``id, year, code, journal, citations, refs, xref`` (all but ``id`` and
``year`` optional). Edge file: two columns ``citing_id, cited_id``, tab- or
comma-separated; a ``citing_id,cited_id`` header line is allowed.
"""
from __future__ import annotations

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from statistics import fmean
from typing import Iterable, Mapping

from .scheme import Level, Scheme, resolve_level

log = logging.getLogger(__name__)

MAX_LISTED_IDS = 100

_KNOWN_KEYS = {"id", "year", "code", "journal", "citations", "refs", "xref"}


class CorpusError(ValueError):
    """Malformed record or a violated corpus invariant."""

    def __init__(self, message: str, line: int | None = None, source: str = "publications"):
        self.line = line
        where = f"{source} line {line}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Publication:
    id: str
    year: int
    principal_code: str | None = None
    journal_id: str | None = None
    declared_citation_count: int | None = None
    declared_ref_count: int | None = None
    cross_ref_codes: tuple[str, ...] = ()

    def to_record(self) -> dict:
        rec: dict = {"id": self.id, "year": self.year}
        if self.principal_code is not None:
            rec["code"] = self.principal_code
        if self.journal_id is not None:
            rec["journal"] = self.journal_id
        if self.declared_citation_count is not None:
            rec["citations"] = self.declared_citation_count
        if self.declared_ref_count is not None:
            rec["refs"] = self.declared_ref_count
        if self.cross_ref_codes:
            rec["xref"] = list(self.cross_ref_codes)
        return rec


@dataclass(frozen=True)
class CitationEdge:
    citing_id: str
    cited_id: str


@dataclass
class IngestionReport:
    accepted: int = 0
    edges_accepted: int = 0
    unclassifiable: list[str] = field(default_factory=list)
    uncoded: list[str] = field(default_factory=list)
    unknown_xref: list[str] = field(default_factory=list)
    dangling_edges: list[tuple[str, str]] = field(default_factory=list)
    duplicate_edges: list[tuple[str, str]] = field(default_factory=list)
    self_citations: list[str] = field(default_factory=list)
    citation_mismatches: list[str] = field(default_factory=list)
    refs_below_edges: list[str] = field(default_factory=list)

    FLAG_FIELDS = (
        "unclassifiable",
        "unknown_xref",
        "dangling_edges",
        "duplicate_edges",
        "self_citations",
        "citation_mismatches",
        "refs_below_edges",
    )

    @property
    def n_flags(self) -> int:
        return sum(len(getattr(self, name)) for name in self.FLAG_FIELDS)

    def to_dict(self) -> dict:
        out: dict = {"accepted": self.accepted, "edges_accepted": self.edges_accepted}
        for name in ("uncoded",) + self.FLAG_FIELDS:
            items = getattr(self, name)
            shown = [list(i) if isinstance(i, tuple) else i for i in items[:MAX_LISTED_IDS]]
            out[name] = {"count": len(items), "first": shown}
        out["flags"] = self.n_flags
        return out


@dataclass
class Corpus:
    publications: dict[str, Publication]
    edges: list[CitationEdge]
    census_note: str = ""
    scheme: Scheme | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.inbound: Counter[str] = Counter()
        self.outbound: Counter[str] = Counter()
        self.dangling: list[CitationEdge] = []
        for e in self.edges:
            if e.citing_id in self.publications and e.cited_id in self.publications:
                self.inbound[e.cited_id] += 1
            else:
                self.dangling.append(e)
            # dangling targets still occupy a slot in the citing paper's reference list
            if e.citing_id in self.publications:
                self.outbound[e.citing_id] += 1

    def __len__(self) -> int:
        return len(self.publications)

    def __contains__(self, pub_id: object) -> bool:
        return pub_id in self.publications

    def get(self, pub_id: str) -> Publication:
        try:
            return self.publications[pub_id]
        except KeyError:
            raise KeyError(f"unknown publication id {pub_id!r}") from None

    def is_dangling(self, edge: CitationEdge) -> bool:
        return edge.citing_id not in self.publications or edge.cited_id not in self.publications

    def is_classified(self, pub_id: str) -> bool:
        code = self.get(pub_id).principal_code
        return code is not None and (self.scheme is None or code in self.scheme)

    def classified_ids(self) -> list[str]:
        return sorted(pid for pid in self.publications if self.is_classified(pid))


def effective_citations(corpus: Corpus, pub_id: str) -> int:
    """Declared citation count if present, else the number of inbound non-dangling edges."""
    pub = corpus.get(pub_id)
    if pub.declared_citation_count is not None:
        return pub.declared_citation_count
    return corpus.inbound.get(pub_id, 0)


def effective_ref_count(corpus: Corpus, pub_id: str) -> int | None:
    """Declared reference-list length if present, else the out-degree; None when neither."""
    pub = corpus.get(pub_id)
    if pub.declared_ref_count is not None:
        return pub.declared_ref_count
    return corpus.outbound.get(pub_id) or None


def _parse_publication(obj: object, lineno: int) -> Publication:
    if not isinstance(obj, dict):
        raise CorpusError("record is not an object", lineno)
    extra = set(obj) - _KNOWN_KEYS
    if extra:
        raise CorpusError(f"unknown keys: {', '.join(sorted(extra))}", lineno)

    pid = obj.get("id")
    if not isinstance(pid, str) or not pid:
        raise CorpusError("'id' must be a non-empty string", lineno)
    year = obj.get("year")
    if isinstance(year, bool) or not isinstance(year, int):
        raise CorpusError(f"{pid}: 'year' must be an integer", lineno)

    def opt_str(key: str) -> str | None:
        val = obj.get(key)
        if val is None or val == "":
            return None
        if isinstance(val, (int, float)) and not isinstance(val, bool):
            return str(val)
        if not isinstance(val, str):
            raise CorpusError(f"{pid}: '{key}' must be a single string", lineno)
        return val

    def opt_int(key: str, minimum: int) -> int | None:
        val = obj.get(key)
        if val is None:
            return None
        if isinstance(val, bool) or not isinstance(val, int) or val < minimum:
            raise CorpusError(f"{pid}: '{key}' must be an integer >= {minimum}", lineno)
        return val

    xref = obj.get("xref") or []
    if not isinstance(xref, list) or not all(isinstance(x, (str, int)) for x in xref):
        raise CorpusError(f"{pid}: 'xref' must be a list of codes", lineno)

    return Publication(
        id=pid,
        year=year,
        principal_code=opt_str("code"),
        journal_id=opt_str("journal"),
        declared_citation_count=opt_int("citations", 0),
        declared_ref_count=opt_int("refs", 1),
        cross_ref_codes=tuple(str(x) for x in xref),
    )


def read_publications(lines: Iterable[str]) -> list[Publication]:
    pubs: list[Publication] = []
    first_line: dict[str, int] = {}
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON ({exc.msg})", lineno) from None
        pub = _parse_publication(obj, lineno)
        if pub.id in first_line:
            raise CorpusError(
                f"duplicate publication id {pub.id} (first seen on line {first_line[pub.id]})", lineno
            )
        first_line[pub.id] = lineno
        pubs.append(pub)
    return pubs


def read_edges(lines: Iterable[str]) -> list[tuple[int, CitationEdge]]:
    edges = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        parts = [p.strip() for p in (text.split("\t") if "\t" in text else text.split(","))]
        if len(parts) != 2 or not all(parts):
            raise CorpusError("expected two columns: citing_id, cited_id", lineno, source="edges")
        if lineno == 1 and parts == ["citing_id", "cited_id"]:
            continue
        edges.append((lineno, CitationEdge(parts[0], parts[1])))
    return edges


def ingest(
    pub_source: Iterable[str],
    edge_source: Iterable[str] | None,
    scheme: Scheme,
    census_note: str = "",
) -> tuple[Corpus, IngestionReport]:
    """Parse and validate publications and edges against ``scheme``.

    Malformed records and duplicate publication ids raise :class:`CorpusError`.
    Everything else (unknown codes, dangling/duplicate/self edges, count
    mismatches) is kept or dropped as documented and listed in the report.
    """
    report = IngestionReport()
    pubs = read_publications(pub_source)
    publications = {p.id: p for p in sorted(pubs, key=lambda p: p.id)}
    report.accepted = len(publications)

    for pid, pub in publications.items():
        if pub.principal_code is None:
            report.uncoded.append(pid)
        elif pub.principal_code not in scheme:
            report.unclassifiable.append(pid)
        if any(x not in scheme for x in pub.cross_ref_codes):
            report.unknown_xref.append(pid)

    seen: set[tuple[str, str]] = set()
    edges: list[CitationEdge] = []
    for _, edge in read_edges(edge_source or []):
        pair = (edge.citing_id, edge.cited_id)
        if edge.citing_id == edge.cited_id:
            report.self_citations.append(edge.citing_id)
            continue
        if pair in seen:
            report.duplicate_edges.append(pair)
            continue
        seen.add(pair)
        edges.append(edge)
    edges.sort(key=lambda e: (e.citing_id, e.cited_id))
    report.duplicate_edges.sort()
    report.self_citations.sort()

    corpus = Corpus(publications, edges, census_note=census_note, scheme=scheme)
    report.edges_accepted = len(edges)
    report.dangling_edges = [(e.citing_id, e.cited_id) for e in corpus.dangling]

    for pid, pub in publications.items():
        if pub.declared_citation_count is not None and pid in corpus.inbound:
            if corpus.inbound[pid] != pub.declared_citation_count:
                report.citation_mismatches.append(pid)
        if pub.declared_ref_count is not None and corpus.outbound.get(pid, 0) > pub.declared_ref_count:
            report.refs_below_edges.append(pid)

    if report.n_flags:
        log.warning("ingestion flagged %d item(s)", report.n_flags)
    return corpus, report


def write_publications(pubs: Iterable[Publication], fh) -> None:
    for pub in pubs:
        fh.write(json.dumps(pub.to_record(), separators=(",", ":")))
        fh.write("\n")


@dataclass(frozen=True)
class CorpusStats:
    level: Level
    rows: list[tuple[str, int, int]]
    yearly: dict[int, dict[str, float]]
    unclassifiable: int

    def to_dict(self) -> dict:
        return {
            "level": self.level.value,
            "rows": [{"code": c, "year": y, "count": n} for c, y, n in self.rows],
            "yearly": {str(y): s for y, s in self.yearly.items()},
            "unclassifiable": self.unclassifiable,
        }


def corpus_stats(corpus: Corpus, scheme: Scheme, level: "Level | str") -> CorpusStats:
    """Publication counts per (code at ``level``, year) plus min/max/mean per year.

    Publications coded above ``level`` are counted under their own code.
    """
    target = Level.parse(level)
    counts: Counter[tuple[str, int]] = Counter()
    excluded = 0
    for pid, pub in corpus.publications.items():
        code = pub.principal_code
        if code is None or code not in scheme:
            excluded += 1
            continue
        node_level = scheme.node(code).level
        lv = target if target.depth <= node_level.depth else node_level
        counts[(resolve_level(scheme, code, lv), pub.year)] += 1

    rows = sorted(((c, y, n) for (c, y), n in counts.items()), key=lambda r: (r[1], r[0]))
    per_year: Mapping[int, list[int]] = defaultdict(list)
    for _, y, n in rows:
        per_year[y].append(n)
    yearly = {
        y: {"codes": len(ns), "min": min(ns), "max": max(ns), "mean": fmean(ns)}
        for y, ns in sorted(per_year.items())
    }
    return CorpusStats(target, rows, yearly, excluded)
