"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 I/O error.
Data goes to stdout or ``--outdir``; warnings and diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import CorpusError, ingest
from .indicators import RankClassScheme, ScoringError
from .pipeline import add_unit_reports, score_files
from .refset import RefSetPolicy, build_refsets
from .report import ReportError, read_units, write_outputs
from .scheme import BUILTIN_SCHEMES, SchemeError, builtin_scheme_path, load_scheme
from .synth import SynthError, generate, load_spec

log = logging.getLogger("citenorm")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _scheme_path(value: str) -> Path:
    path = Path(value)
    if not path.exists():
        stem = path.name[: -len(".scheme")] if path.name.endswith(".scheme") else path.name
        if stem in BUILTIN_SCHEMES and path.parent == Path("."):
            return builtin_scheme_path(stem)
    return path


def _thresholds(text: str) -> RankClassScheme:
    try:
        return RankClassScheme.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _policy(args) -> RefSetPolicy:
    try:
        return RefSetPolicy(args.grouping, args.level, args.min_size, args.fallback)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", required=True, help="scheme file (or a built-in name: %s)" % ", ".join(BUILTIN_SCHEMES))
    p.add_argument("--pubs", required=True, type=Path, help="publication file (JSON Lines)")
    p.add_argument("--edges", type=Path, help="citation edge file (citing_id, cited_id)")
    p.add_argument("--census-note", default="", help="when/how citation counts were observed")


def _add_policy(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grouping", default="classification", choices=["classification", "journal"],
                   help="classification (recommended) or journal; journal mode exists for comparison only")
    p.add_argument("--level", default="section", choices=["heading", "section", "subsection"])
    p.add_argument("--min-size", type=int, default=50, help="minimum reference-set size (default 50)")
    p.add_argument("--fallback", default="parent_level", choices=["parent_level", "exclude"])


def _add_scoring(p: argparse.ArgumentParser) -> None:
    p.add_argument("--thresholds", default="50,75,90,95,99", help="percentile rank-class cut points")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker cap for per-set scoring")
    p.add_argument("--outdir", required=True, type=Path)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="citenorm", description="Field-normalized citation indicators.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress warnings on stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    p = sub.add_parser("scheme-check", help="validate a scheme file and print its size")
    p.add_argument("scheme")

    p = sub.add_parser("ingest", help="validate corpus files and print the ingestion report")
    _add_inputs(p)
    p.add_argument("--out", type=Path, help="write the report here instead of stdout")

    p = sub.add_parser("refsets", help="build reference sets and print a summary")
    _add_inputs(p)
    _add_policy(p)
    p.add_argument("--out", type=Path, help="write the summary here instead of stdout")

    p = sub.add_parser("score", help="score every publication and write the indicator table")
    _add_inputs(p)
    _add_policy(p)
    _add_scoring(p)

    p = sub.add_parser("report", help="score, then aggregate to units")
    _add_inputs(p)
    _add_policy(p)
    _add_scoring(p)
    p.add_argument("--units", required=True, type=Path, help="unit file: unit_id<TAB>pub_id...")

    p = sub.add_parser("synth", help="generate a synthetic corpus from a spec file")
    p.add_argument("spec", type=Path)
    p.add_argument("--outdir", required=True, type=Path)
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _cmd_scheme_check(args) -> int:
    scheme = load_scheme(_scheme_path(args.scheme))
    print(scheme.summary())
    return EXIT_OK


def _open_corpus(args):
    scheme = load_scheme(_scheme_path(args.scheme))
    with open(args.pubs, encoding="utf-8") as pubs:
        if args.edges is None:
            corpus, rep = ingest(pubs, None, scheme, args.census_note)
        else:
            with open(args.edges, encoding="utf-8") as edges:
                corpus, rep = ingest(pubs, edges, scheme, args.census_note)
    return scheme, corpus, rep


def _cmd_ingest(args) -> int:
    _, _, rep = _open_corpus(args)
    _emit(_dump(rep.to_dict()), args.out)
    return EXIT_OK


def _cmd_refsets(args) -> int:
    policy = _policy(args)
    scheme, corpus, _ = _open_corpus(args)
    refsets = build_refsets(corpus, scheme, policy)
    doc = {
        "grouping": policy.grouping.value,
        "sets": [s.to_dict() for s in refsets.sets],
        "exclusions": refsets.exclusions.to_dict(),
    }
    _emit(_dump(doc), args.out)
    return EXIT_OK


def _cmd_score(args, with_units: bool = False) -> int:
    policy = _policy(args)
    classes = _thresholds(args.thresholds)
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    units = None
    if with_units:
        with open(args.units, encoding="utf-8") as fh:
            units = read_units(fh)
    scheme = load_scheme(_scheme_path(args.scheme))
    run = score_files(scheme, args.pubs, args.edges, policy, classes, args.threads, args.census_note)
    if units is not None:
        add_unit_reports(run, units)
    paths = write_outputs(run.bundle(scheme), args.outdir)
    excl = run.refsets.exclusions
    if excl.all_ids():
        log.warning(
            "excluded from scoring: %d unclassifiable, %d without journal, %d in undersized sets",
            len(excl.unclassifiable), len(excl.no_journal), len(excl.undersized),
        )
    if run.skipped_edges:
        log.warning("fractional counting skipped %d edge(s) with unknown reference counts", run.skipped_edges)
    log.info("wrote %d records to %s", len(run.records), paths[0])
    return EXIT_OK


def _cmd_synth(args) -> int:
    spec = load_spec(args.spec)
    paths = generate(spec, args.outdir)
    for name, path in paths.items():
        print(f"{name}\t{path}")
    return EXIT_OK


def _configure_logging(quiet: bool) -> None:
    for h in list(log.handlers):
        if getattr(h, "_citenorm", False):
            log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    handler._citenorm = True
    log.addHandler(handler)
    log.setLevel(logging.ERROR if quiet else logging.WARNING)


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    _configure_logging(args.quiet)
    if args.command is None:
        build_parser().print_usage(sys.stderr)
        return EXIT_USAGE

    handlers = {
        "scheme-check": _cmd_scheme_check,
        "ingest": _cmd_ingest,
        "refsets": _cmd_refsets,
        "score": _cmd_score,
        "report": lambda a: _cmd_score(a, with_units=True),
        "synth": _cmd_synth,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemeError, CorpusError, ReportError, ScoringError, SynthError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        name = getattr(exc, "filename", None)
        msg = f"{exc.strerror}: {name}" if name and exc.strerror else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_IO
    except UnicodeDecodeError as exc:
        print(f"error: input is not valid UTF-8 ({exc.reason})", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
