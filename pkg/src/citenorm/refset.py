"""Reference sets: groups of publications sharing a field code (or journal) and year."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum

from .corpus import Corpus
from .scheme import Level, Scheme, resolve_level

JOURNAL_LEVEL = "journal"


class Grouping(str, Enum):
    CLASSIFICATION = "classification"
    JOURNAL = "journal"


class Fallback(str, Enum):
    PARENT_LEVEL = "parent_level"
    EXCLUDE = "exclude"


def _enum(cls, value, what):
    try:
        return cls(value)
    except ValueError:
        choices = ", ".join(v.value for v in cls)
        raise ValueError(f"unknown {what} {value!r} (expected one of: {choices})") from None


@dataclass(frozen=True)
class RefSetPolicy:
    grouping: Grouping = Grouping.CLASSIFICATION
    level: Level = Level.SECTION
    min_size: int = 50
    fallback: Fallback = Fallback.PARENT_LEVEL

    def __post_init__(self) -> None:
        object.__setattr__(self, "grouping", _enum(Grouping, self.grouping, "grouping"))
        object.__setattr__(self, "level", Level.parse(self.level))
        object.__setattr__(self, "fallback", _enum(Fallback, self.fallback, "fallback"))
        if isinstance(self.min_size, bool) or not isinstance(self.min_size, int) or self.min_size < 2:
            raise ValueError("min_size must be an integer >= 2")


SetKey = tuple[str, int]


@dataclass(frozen=True)
class ReferenceSet:
    key: SetKey
    member_ids: tuple[str, ...]
    resolved_level: str
    fallback_applied: bool = False
    fallback_exhausted: bool = False

    @property
    def size(self) -> int:
        return len(self.member_ids)

    def to_dict(self) -> dict:
        return {
            "code": self.key[0],
            "year": self.key[1],
            "size": self.size,
            "resolved_level": self.resolved_level,
            "fallback_applied": self.fallback_applied,
            "fallback_exhausted": self.fallback_exhausted,
        }


@dataclass
class ExclusionReport:
    unclassifiable: list[str] = field(default_factory=list)
    no_journal: list[str] = field(default_factory=list)
    undersized: list[str] = field(default_factory=list)

    def all_ids(self) -> set[str]:
        return set(self.unclassifiable) | set(self.no_journal) | set(self.undersized)

    def to_dict(self) -> dict:
        return {
            name: {"count": len(ids), "ids": ids[:100]}
            for name, ids in (
                ("unclassifiable", self.unclassifiable),
                ("no_journal", self.no_journal),
                ("undersized", self.undersized),
            )
        }


@dataclass
class RefSets:
    policy: RefSetPolicy
    assignment: dict[str, SetKey]
    sets: list[ReferenceSet]
    exclusions: ExclusionReport

    def __post_init__(self) -> None:
        self._by_key = {s.key: s for s in self.sets}

    def __getitem__(self, key: SetKey) -> ReferenceSet:
        return self._by_key[key]

    def set_of(self, pub_id: str) -> ReferenceSet:
        return self._by_key[self.assignment[pub_id]]


def build_refsets(corpus: Corpus, scheme: Scheme | None, policy: RefSetPolicy) -> RefSets:
    """Partition scorable publications into reference sets under ``policy``.

    Classification grouping starts every publication at ``policy.level`` (or
    at its own code when that is coarser). Groups smaller than
    ``policy.min_size`` either move up one level at a time, merging with
    whatever else lands at the parent, or are excluded. Heading-level groups
    that remain undersized are kept and marked ``fallback_exhausted``.
    """
    if policy.grouping is Grouping.JOURNAL:
        return _by_journal(corpus, policy)
    if scheme is None:
        raise ValueError("classification grouping needs a scheme")
    return _by_classification(corpus, scheme, policy)


def _by_journal(corpus: Corpus, policy: RefSetPolicy) -> RefSets:
    exclusions = ExclusionReport()
    groups: dict[SetKey, list[str]] = defaultdict(list)
    for pid in sorted(corpus.publications):
        pub = corpus.publications[pid]
        if pub.journal_id is None:
            exclusions.no_journal.append(pid)
        else:
            groups[(pub.journal_id, pub.year)].append(pid)

    sets = []
    for key in sorted(groups, key=_key_order):
        members = tuple(groups[key])
        small = len(members) < policy.min_size
        if small and policy.fallback is Fallback.EXCLUDE:
            exclusions.undersized.extend(members)
            continue
        sets.append(ReferenceSet(key, members, JOURNAL_LEVEL, False, small))
    return _finish(policy, sets, exclusions)


def _by_classification(corpus: Corpus, scheme: Scheme, policy: RefSetPolicy) -> RefSets:
    exclusions = ExclusionReport()
    # (code, year) -> member ids; moved tracks members that left their starting group
    groups: dict[SetKey, list[str]] = defaultdict(list)
    moved: set[str] = set()
    for pid in sorted(corpus.publications):
        pub = corpus.publications[pid]
        code = pub.principal_code
        if code is None or code not in scheme:
            exclusions.unclassifiable.append(pid)
            continue
        node_level = scheme.node(code).level
        start = policy.level if policy.level.depth <= node_level.depth else node_level
        groups[(resolve_level(scheme, code, start), pub.year)].append(pid)

    # deepest level first, so each parent sees every member moved up into it
    for level in (Level.SUBSECTION, Level.SECTION):
        for key in sorted(groups, key=_key_order):
            code, year = key
            if scheme.node(code).level is not level or len(groups[key]) >= policy.min_size:
                continue
            members = groups.pop(key)
            if policy.fallback is Fallback.EXCLUDE:
                exclusions.undersized.extend(members)
                continue
            parent = scheme.node(code).parent_code
            groups[(parent, year)].extend(members)
            moved.update(members)

    sets = []
    for key in sorted(groups, key=_key_order):
        members = tuple(sorted(groups[key]))
        node = scheme.node(key[0])
        small = len(members) < policy.min_size
        if small and policy.fallback is Fallback.EXCLUDE:
            exclusions.undersized.extend(members)
            continue
        sets.append(
            ReferenceSet(
                key,
                members,
                node.level.value,
                fallback_applied=any(m in moved for m in members),
                fallback_exhausted=small,
            )
        )
    exclusions.undersized.sort()
    return _finish(policy, sets, exclusions)


def _key_order(key: SetKey) -> tuple[int, str]:
    return key[1], key[0]


def _finish(policy: RefSetPolicy, sets: list[ReferenceSet], exclusions: ExclusionReport) -> RefSets:
    assignment = {pid: s.key for s in sets for pid in s.member_ids}
    return RefSets(policy, assignment, sets, exclusions)
