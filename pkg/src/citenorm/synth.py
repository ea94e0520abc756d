"""Seeded synthetic corpora with per-field citation distributions.

Randomness comes from NumPy's PCG64 bit generator seeded with ``seed``, so
a spec reproduces the same files on every platform.

Spec file (JSON)::

    {
      "seed": 7,
      "edge_mode": "counts_only",          # or "full_graph"
      "fields": [
        {"code": "25", "year": 2010, "n_pubs": 1000,
         "family": "lognormal", "params": {"mu": 1.0, "sigma": 1.0},
         "journals": [{"id": "J1", "offset": -0.5}, {"id": "J2", "offset": 0.5}]}
      ],
      "graph": {"n_citing": 500, "mean_out_degree": 8},
      "units": [{"id": "INST", "code": "25", "per_year": 4, "offset": 0.0}]
    }

A field entry may give ``"years": [...]`` instead of ``"year"``. Journal
``offset`` shifts the lognormal ``mu`` of that journal's papers. A unit
draws ``per_year`` papers per year of its field, placed in random journals
(``"placement": "spread"``) or all in one randomly chosen journal per year
(``"single"``), with citations drawn using the unit's own ``offset`` rather than
the journal's; the ids are written to a units file.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .corpus import Publication, write_publications
from .report import UnitDefinition, write_units

FAMILIES = ("lognormal", "negative_binomial", "constant")
EDGE_MODES = ("counts_only", "full_graph")
PLACEMENTS = ("spread", "single")


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class Journal:
    id: str
    offset: float = 0.0


@dataclass(frozen=True)
class FieldSpec:
    code: str
    year: int
    n_pubs: int
    family: str = "lognormal"
    params: dict = field(default_factory=dict)
    journals: tuple[Journal, ...] = ()

    def __post_init__(self) -> None:
        if self.n_pubs < 1:
            raise SynthError(f"field {self.code}/{self.year}: n_pubs must be >= 1")
        _check_family(self.family, self.params, f"field {self.code}/{self.year}")
        if self.journals and self.family != "lognormal":
            if any(j.offset for j in self.journals):
                raise SynthError(f"field {self.code}/{self.year}: journal offsets need the lognormal family")


@dataclass(frozen=True)
class UnitSpec:
    id: str
    code: str
    per_year: int
    offset: float = 0.0
    placement: str = "spread"


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    fields: tuple[FieldSpec, ...]
    edge_mode: str = "counts_only"
    n_citing: int = 0
    mean_out_degree: float = 0.0
    citing_code: str | None = None
    citing_year: int | None = None
    units: tuple[UnitSpec, ...] = ()

    def __post_init__(self) -> None:
        if not self.fields:
            raise SynthError("spec needs at least one field")
        if self.edge_mode not in EDGE_MODES:
            raise SynthError(f"unknown edge_mode {self.edge_mode!r}")
        if self.edge_mode == "full_graph":
            if self.n_citing < 1:
                raise SynthError("full_graph needs graph.n_citing >= 1")
            if self.mean_out_degree < 1:
                raise SynthError("full_graph needs graph.mean_out_degree >= 1")
        keys = [(f.code, f.year) for f in self.fields]
        if len(set(keys)) != len(keys):
            raise SynthError("field entries must have distinct (code, year)")
        for u in self.units:
            field_years = [f for f in self.fields if f.code == u.code]
            if not field_years:
                raise SynthError(f"unit {u.id}: no field with code {u.code}")
            if any(f.family != "lognormal" for f in field_years):
                raise SynthError(f"unit {u.id}: units need lognormal fields")
            if u.per_year < 1 or any(u.per_year > f.n_pubs for f in field_years):
                raise SynthError(f"unit {u.id}: per_year must be between 1 and n_pubs")
            if u.placement not in PLACEMENTS:
                raise SynthError(f"unit {u.id}: placement must be one of: {', '.join(PLACEMENTS)}")


def _check_family(family: str, params: dict, where: str) -> None:
    def num(key: str) -> float:
        if key not in params:
            raise SynthError(f"{where}: {family} needs parameter {key!r}")
        value = params[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise SynthError(f"{where}: parameter {key!r} must be a finite number")
        return float(value)

    if family == "lognormal":
        num("mu")
        if num("sigma") < 0:
            raise SynthError(f"{where}: sigma must be >= 0")
    elif family == "negative_binomial":
        if num("n") <= 0:
            raise SynthError(f"{where}: n must be > 0")
        p = num("p")
        if not 0 < p <= 1:
            raise SynthError(f"{where}: p must be in (0, 1]")
    elif family == "constant":
        c = params.get("c")
        if isinstance(c, bool) or not isinstance(c, int) or c < 0:
            raise SynthError(f"{where}: constant needs a non-negative integer 'c'")
    else:
        raise SynthError(f"{where}: unknown distribution family {family!r} (expected one of: {', '.join(FAMILIES)})")


def spec_from_dict(doc: dict[str, Any]) -> SynthSpec:
    try:
        fields = []
        for entry in doc["fields"]:
            years = entry["years"] if "years" in entry else [entry["year"]]
            journals = tuple(Journal(str(j["id"]), float(j.get("offset", 0.0))) for j in entry.get("journals", []))
            for year in years:
                fields.append(
                    FieldSpec(
                        code=str(entry["code"]),
                        year=int(year),
                        n_pubs=int(entry["n_pubs"]),
                        family=entry.get("family", "lognormal"),
                        params=dict(entry.get("params", {})),
                        journals=journals,
                    )
                )
        graph = doc.get("graph", {})
        units = tuple(
            UnitSpec(
                str(u["id"]),
                str(u["code"]),
                int(u["per_year"]),
                float(u.get("offset", 0.0)),
                u.get("placement", "spread"),
            )
            for u in doc.get("units", [])
        )
        return SynthSpec(
            seed=int(doc["seed"]),
            fields=tuple(fields),
            edge_mode=doc.get("edge_mode", "counts_only"),
            n_citing=int(graph.get("n_citing", 0)),
            mean_out_degree=float(graph.get("mean_out_degree", 0.0)),
            citing_code=graph.get("citing_code"),
            citing_year=graph.get("citing_year"),
            units=units,
        )
    except KeyError as exc:
        raise SynthError(f"spec is missing key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SynthError):
            raise
        raise SynthError(f"invalid spec: {exc}") from None


def load_spec(path: "str | Path") -> SynthSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SynthError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None
    return spec_from_dict(doc)


def _draw(rng: np.random.Generator, f: FieldSpec, size: int, mu_shift: float = 0.0) -> np.ndarray:
    p = f.params
    if f.family == "lognormal":
        return np.floor(rng.lognormal(float(p["mu"]) + mu_shift, float(p["sigma"]), size)).astype(np.int64)
    if f.family == "negative_binomial":
        return rng.negative_binomial(float(p["n"]), float(p["p"]), size).astype(np.int64)
    return np.full(size, int(p["c"]), dtype=np.int64)


@dataclass
class SynthCorpus:
    publications: list[Publication]
    edges: list[tuple[str, str]]
    units: list[UnitDefinition]


def generate_corpus(spec: SynthSpec) -> SynthCorpus:
    """Draw every publication, edge and unit membership for ``spec`` in memory."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    full_graph = spec.edge_mode == "full_graph"
    pubs: list[Publication] = []
    weights: list[int] = []
    unit_members: dict[str, list[str]] = {u.id: [] for u in spec.units}

    for f in spec.fields:
        n = f.n_pubs
        ids = [f"{f.code}-{f.year}-{i:06d}" for i in range(n)]
        journal_of: list[Journal | None]
        if f.journals:
            journal_of = [f.journals[i % len(f.journals)] for i in range(n)]
            shifts = np.array([j.offset for j in journal_of])
        else:
            journal_of = [None] * n
            shifts = np.zeros(n)

        counts = np.empty(n, dtype=np.int64)
        for shift in sorted(set(shifts.tolist())):
            mask = shifts == shift
            counts[mask] = _draw(rng, f, int(mask.sum()), shift)

        for u in spec.units:
            if u.code != f.code:
                continue
            picked = np.sort(rng.choice(n, size=u.per_year, replace=False))
            if f.journals:
                if u.placement == "single":
                    outlet = f.journals[int(rng.integers(len(f.journals)))]
                    for idx in picked:
                        journal_of[idx] = outlet
                else:
                    for idx in picked:
                        journal_of[idx] = f.journals[int(rng.integers(len(f.journals)))]
            counts[picked] = _draw(rng, f, u.per_year, u.offset)
            unit_members[u.id].extend(ids[i] for i in picked)

        for i, pid in enumerate(ids):
            j = journal_of[i]
            pubs.append(
                Publication(
                    id=pid,
                    year=f.year,
                    principal_code=f.code,
                    journal_id=j.id if j else None,
                    declared_citation_count=None if full_graph else int(counts[i]),
                )
            )
        weights.extend(int(c) for c in counts)

    edges: list[tuple[str, str]] = []
    if full_graph:
        targets = [p.id for p in pubs]
        prob = np.asarray(weights, dtype=float) + 1.0
        prob /= prob.sum()
        code = spec.citing_code or spec.fields[0].code
        year = spec.citing_year if spec.citing_year is not None else max(f.year for f in spec.fields) + 1
        for i in range(spec.n_citing):
            cid = f"C-{year}-{i:06d}"
            degree = min(1 + int(rng.poisson(spec.mean_out_degree - 1)), len(targets))
            chosen = np.sort(rng.choice(len(targets), size=degree, replace=False, p=prob))
            pubs.append(Publication(id=cid, year=year, principal_code=code))
            edges.extend((cid, targets[k]) for k in chosen)

    units = [UnitDefinition(uid, tuple(members)) for uid, members in unit_members.items()]
    return SynthCorpus(pubs, edges, units)


def generate(spec: SynthSpec, outdir: "str | Path") -> dict[str, Path]:
    """Write ``publications.jsonl`` (plus ``edges.tsv`` and ``units.tsv`` when present)."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    data = generate_corpus(spec)
    paths = {"publications": out / "publications.jsonl"}
    with paths["publications"].open("w", encoding="utf-8", newline="\n") as fh:
        write_publications(data.publications, fh)
    if spec.edge_mode == "full_graph":
        paths["edges"] = out / "edges.tsv"
        with paths["edges"].open("w", encoding="utf-8", newline="\n") as fh:
            fh.write("citing_id\tcited_id\n")
            fh.writelines(f"{a}\t{b}\n" for a, b in data.edges)
    if data.units:
        paths["units"] = out / "units.tsv"
        with paths["units"].open("w", encoding="utf-8", newline="\n") as fh:
            write_units(data.units, fh)
    return paths
