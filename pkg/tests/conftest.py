import io
import json

import pytest

from citenorm.corpus import ingest
from citenorm.scheme import builtin_scheme_path, load_scheme

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def ca_scheme():
    return load_scheme(builtin_scheme_path("ca_sections"))


@pytest.fixture(scope="session")
def sub_scheme():
    return load_scheme(builtin_scheme_path("ca_sections_synthetic_sub"))


def pub_lines(records):
    return io.StringIO("".join(json.dumps(r) + "\n" for r in records))


def edge_lines(pairs):
    return io.StringIO("".join(f"{a}\t{b}\n" for a, b in pairs))


def make_corpus(scheme, records, edges=None):
    return ingest(pub_lines(records), edge_lines(edges) if edges is not None else None, scheme)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
