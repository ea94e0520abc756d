import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from citenorm.scheme import (
    Level,
    SchemeError,
    dump_scheme,
    parse_scheme,
    resolve_level,
)

ORGANIC = [
    "General Organic Chemistry",
    "Physical Organic Chemistry",
    "Aliphatic Compounds",
    "Alicyclic Compounds",
    "Benzene, Its Derivatives, and Condensed Benzenoid Compounds",
    "Biomolecules and Their Synthetic Analogs",
    "Heterocyclic Compounds (One Hetero Atom)",
    "Heterocyclic Compounds (More Than One Hetero Atom)",
    "Organometallic and Organometalloidal Compounds",
    "Terpenes and Terpenoids",
    "Alkaloids",
    "Steroids",
    "Carbohydrates",
    "Amino Acids, Peptides, and Proteins",
]


def test_table1_fixture(ca_scheme):
    assert ca_scheme.roots == ("BIO", "ORG", "MAC", "APP", "PIA")
    assert ca_scheme.count(Level.SECTION) == 80
    assert [len(ca_scheme.node(h).children) for h in ca_scheme.roots] == [20, 14, 12, 18, 16]
    org = ca_scheme.node("ORG")
    assert org.children == tuple(str(n) for n in range(21, 35))
    assert [ca_scheme.node(c).label for c in org.children] == ORGANIC
    assert ca_scheme.summary() == "5 headings, 80 sections"


def test_minimal_scheme():
    s = parse_scheme("X\tOnly heading\theading\t\n")
    assert s.roots == ("X",)
    assert len(s) == 1


def test_comments_and_blank_lines_ignored():
    s = parse_scheme("# header\n\nA\tA\theading\t\n  # indented comment\n1\tone\tsection\tA\n")
    assert len(s) == 2


def test_parent_may_follow_child():
    s = parse_scheme("1\tone\tsection\tA\nA\tA\theading\t\n")
    assert s.node("A").children == ("1",)


@pytest.mark.parametrize(
    "text, fragment, line",
    [
        ("ORG\tO\theading\t\n25\tx\tsection\tORG2\n", "unknown parent ORG2", 2),
        ("ORG\tO\theading\t\nORG\tagain\theading\t\n", "duplicate code ORG", 2),
        ("ORG\tO\theading\t\n25.1\tx\tsubsection\tORG\n", "level skip", 2),
        ("ORG\tO\theading\t\n25\tx\tsection\t\n", "has no parent", 2),
        ("ORG\tO\theading\t\n25\tx\tsection\tORG\n26\ty\tsection\t25\n", "level skip", 3),
        ("A\ta\tsection\tB\nB\tb\tsection\tA\nH\th\theading\t\n", "cycle", 1),
        ("A\ta\tbranch\t\n", "unknown level", 1),
        ("A\ta\n", "expected 4", 1),
        ("# nothing\n", "no nodes", None),
    ],
)
def test_parse_errors(text, fragment, line):
    with pytest.raises(SchemeError) as err:
        parse_scheme(text)
    assert fragment in str(err.value)
    assert err.value.line == line


def test_error_carries_code():
    with pytest.raises(SchemeError) as err:
        parse_scheme("ORG\tO\theading\t\n25\tx\tsection\tORG2\n")
    assert err.value.code == "25"


def test_resolve_level(sub_scheme, ca_scheme):
    assert resolve_level(sub_scheme, "27.3", Level.SECTION) == "27"
    assert resolve_level(sub_scheme, "27.3", "heading") == "ORG"
    assert resolve_level(ca_scheme, "25", Level.SECTION) == "25"
    assert resolve_level(ca_scheme, "25", Level.HEADING) == "ORG"


def test_resolve_level_errors(ca_scheme):
    with pytest.raises(KeyError):
        resolve_level(ca_scheme, "99", Level.SECTION)
    with pytest.raises(ValueError):
        resolve_level(ca_scheme, "ORG", Level.SECTION)


def test_resolve_level_total(sub_scheme):
    for node in sub_scheme.nodes.values():
        for lv in Level:
            if lv.depth <= node.level.depth:
                assert sub_scheme.node(resolve_level(sub_scheme, node.code, lv)).level is lv


def test_round_trip(sub_scheme):
    again = parse_scheme(dump_scheme(sub_scheme), name=sub_scheme.name)
    assert again == sub_scheme
    assert again.roots == sub_scheme.roots
    assert all(again.node(c).children == n.children for c, n in sub_scheme.nodes.items())


def test_deterministic(ca_scheme):
    text = dump_scheme(ca_scheme)
    assert parse_scheme(text) == parse_scheme(text)


@st.composite
def random_forest(draw):
    n_head = draw(st.integers(1, 4))
    lines = []
    sections = []
    for h in range(n_head):
        lines.append(f"H{h}\th\theading\t")
        for s in range(draw(st.integers(0, 4))):
            code = f"{h}.{s}"
            sections.append(code)
            lines.append(f"{code}\ts\tsection\tH{h}")
    for sec in sections:
        for k in range(draw(st.integers(0, 3))):
            lines.append(f"{sec}.{k}\tsub\tsubsection\t{sec}")
    order = draw(st.permutations(lines))
    return "\n".join(order) + "\n"


@settings(max_examples=60, deadline=None)
@given(random_forest())
def test_round_trip_property(text):
    scheme = parse_scheme(text)
    assert parse_scheme(dump_scheme(scheme)) == scheme
    for node in scheme.nodes.values():
        if node.parent_code is not None:
            assert scheme.node(node.parent_code).level.depth == node.level.depth - 1
