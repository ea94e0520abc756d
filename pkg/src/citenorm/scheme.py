"""Hierarchical classification schemes (heading -> section -> subsection).

A scheme file is tab-separated text, one node per line::

    code<TAB>label<TAB>level<TAB>parent_code

``parent_code`` is empty for headings. Blank lines and lines starting with
``#`` are ignored. Codes are opaque strings.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping


class Level(str, Enum):
    HEADING = "heading"
    SECTION = "section"
    SUBSECTION = "subsection"

    @property
    def depth(self) -> int:
        return _DEPTH[self]

    @classmethod
    def parse(cls, value: "str | Level") -> "Level":
        try:
            return cls(value)
        except ValueError:
            choices = ", ".join(lv.value for lv in cls)
            raise ValueError(f"unknown level {value!r} (expected one of: {choices})") from None


_DEPTH = {Level.HEADING: 0, Level.SECTION: 1, Level.SUBSECTION: 2}
LEVELS = (Level.HEADING, Level.SECTION, Level.SUBSECTION)


class SchemeError(ValueError):
    """Raised for malformed or inconsistent scheme definitions."""

    def __init__(self, message: str, code: str | None = None, line: int | None = None):
        self.code = code
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class SchemeNode:
    code: str
    label: str
    level: Level
    parent_code: str | None = None
    children: tuple[str, ...] = ()


@dataclass(frozen=True)
class Scheme:
    name: str
    nodes: Mapping[str, SchemeNode]
    roots: tuple[str, ...]
    _lines: Mapping[str, int] = field(default_factory=dict, compare=False, repr=False)

    def __contains__(self, code: object) -> bool:
        return code in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, code: str) -> SchemeNode:
        try:
            return self.nodes[code]
        except KeyError:
            raise KeyError(f"unknown code {code!r}") from None

    def count(self, level: Level) -> int:
        return sum(1 for n in self.nodes.values() if n.level is level)

    def deepest_level(self) -> Level:
        return max((n.level for n in self.nodes.values()), key=lambda lv: lv.depth)

    def walk(self) -> Iterable[SchemeNode]:
        """Depth-first pre-order traversal, roots and children in source order."""
        stack = [self.nodes[c] for c in reversed(self.roots)]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(self.nodes[c] for c in reversed(node.children))

    def summary(self) -> str:
        parts = [f"{self.count(Level.HEADING)} headings", f"{self.count(Level.SECTION)} sections"]
        n_sub = self.count(Level.SUBSECTION)
        if n_sub:
            parts.append(f"{n_sub} subsections")
        return ", ".join(parts)


def resolve_level(scheme: Scheme, code: str, target_level: "Level | str") -> str:
    """Return the ancestor-or-self of ``code`` that sits at ``target_level``."""
    target = Level.parse(target_level)
    node = scheme.node(code)
    if target.depth > node.level.depth:
        raise ValueError(
            f"cannot resolve {code!r} ({node.level.value}) down to {target.value}"
        )
    while node.level is not target:
        node = scheme.nodes[node.parent_code]
    return node.code


def parse_scheme(source: "str | Iterable[str]", name: str = "scheme") -> Scheme:
    """Parse scheme text (a string or an iterable of lines) into a validated Scheme."""
    if isinstance(source, str):
        source = io.StringIO(source)

    records: list[tuple[int, str, str, Level, str | None]] = []
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(source, start=1):
        text = raw.rstrip("\r\n")
        if not text.strip() or text.lstrip().startswith("#"):
            continue
        row = next(csv.reader([text], delimiter="\t"))
        if len(row) == 3:
            row.append("")
        if len(row) != 4:
            raise SchemeError(f"expected 4 tab-separated fields, got {len(row)}", line=lineno)
        code, label, level_text, parent = (c.strip() for c in row)
        if not code:
            raise SchemeError("empty code", line=lineno)
        try:
            level = Level.parse(level_text)
        except ValueError as exc:
            raise SchemeError(str(exc), code=code, line=lineno) from None
        if code in lines:
            raise SchemeError(
                f"duplicate code {code} (first defined on line {lines[code]})", code=code, line=lineno
            )
        lines[code] = lineno
        records.append((lineno, code, label, level, parent or None))

    if not records:
        raise SchemeError("scheme defines no nodes")

    by_code = {r[1]: r for r in records}
    for lineno, code, _, level, parent in records:
        if parent is None:
            if level is not Level.HEADING:
                raise SchemeError(f"{level.value} {code} has no parent", code=code, line=lineno)
            continue
        if parent not in by_code:
            raise SchemeError(f"unknown parent {parent}", code=code, line=lineno)

    _check_cycles(by_code)

    for lineno, code, _, level, parent in records:
        if parent is None:
            continue
        parent_level = by_code[parent][3]
        if level is Level.HEADING:
            raise SchemeError(f"heading {code} must not have a parent", code=code, line=lineno)
        if parent_level.depth != level.depth - 1:
            raise SchemeError(
                f"level skip: {level.value} {code} has {parent_level.value} parent {parent}",
                code=code,
                line=lineno,
            )

    children: dict[str, list[str]] = {r[1]: [] for r in records}
    for _, code, _, _, parent in records:
        if parent is not None:
            children[parent].append(code)

    nodes = {
        code: SchemeNode(code, label, level, parent, tuple(children[code]))
        for _, code, label, level, parent in records
    }
    roots = tuple(code for _, code, _, _, parent in records if parent is None)
    return Scheme(name=name, nodes=nodes, roots=roots, _lines=lines)


def _check_cycles(by_code: dict) -> None:
    done: set[str] = set()
    for start in by_code:
        path: list[str] = []
        seen: set[str] = set()
        code: str | None = start
        while code is not None and code not in done:
            if code in seen:
                lineno = by_code[code][0]
                cycle = " -> ".join(path[path.index(code):] + [code])
                raise SchemeError(f"cycle through {code}: {cycle}", code=code, line=lineno)
            seen.add(code)
            path.append(code)
            code = by_code[code][4]
        done.update(path)


def load_scheme(path: "str | Path") -> Scheme:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return parse_scheme(fh, name=path.stem)


def dump_scheme(scheme: Scheme) -> str:
    """Serialize to the scheme file format (depth-first, source order)."""
    out = io.StringIO()
    out.write(f"# {scheme.name}\n")
    for node in scheme.walk():
        out.write("\t".join([node.code, node.label, node.level.value, node.parent_code or ""]))
        out.write("\n")
    return out.getvalue()


BUILTIN_SCHEMES = ("ca_sections", "ca_sections_synthetic_sub")


def builtin_scheme_path(name: str) -> Path:
    """Path to a scheme fixture shipped with the package."""
    stem = name[: -len(".scheme")] if name.endswith(".scheme") else name
    if stem not in BUILTIN_SCHEMES:
        raise KeyError(f"no built-in scheme named {name!r}")
    return Path(str(resources.files("citenorm") / "data" / f"{stem}.scheme"))
