from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reprokg.rdf import BNode, Graph, IRI, Literal, Triple  # noqa: E402
from reprokg.rdf.terms import XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
EX = "http://example.org/"

_STRINGS = ["", "plain", 'with "quotes"', "line\nbreak", "tab\there", "back\\slash", "Grüße", "日本", "a'b", "\r\n"]


def random_iri(rng: random.Random, pool: int = 12) -> IRI:
    n = rng.randrange(pool)
    kind = rng.random()
    if kind < 0.7:
        return IRI(f"{EX}n{n}")
    if kind < 0.85:
        return IRI(f"http://other.example/path/{n}#frag")
    return IRI(f"urn:x-test:{n}")


def random_literal(rng: random.Random) -> Literal:
    k = rng.randrange(8)
    if k == 0:
        return Literal(rng.choice(_STRINGS))
    if k == 1:
        return Literal(rng.choice(_STRINGS[1:4]), language=rng.choice(["en", "de", "en-GB"]))
    if k == 2:
        return Literal(str(rng.randint(-50, 50)), XSD_INTEGER)
    if k == 3:
        return Literal(f"{rng.randint(-99, 99) / 10:.1f}", XSD_DECIMAL)
    if k == 4:
        return Literal(f"{rng.randint(1, 9)}.5E{rng.randint(-3, 3)}", XSD_DOUBLE)
    if k == 5:
        return Literal(rng.choice(["true", "false"]), XSD_BOOLEAN)
    if k == 6:
        return Literal(f"v{rng.randrange(5)}", f"{EX}dt")
    return Literal("2024-01-0%dT00:00:00Z" % rng.randint(1, 9), "http://www.w3.org/2001/XMLSchema#dateTime")


def random_graph(rng: random.Random, max_triples: int = 25, max_blanks: int = 8) -> Graph:
    blanks = [BNode(f"b{i}") for i in range(rng.randint(0, max_blanks))]
    g = Graph(prefixes={"ex": EX} if rng.random() < 0.8 else {})
    for _ in range(rng.randint(0, max_triples)):
        s = rng.choice(blanks) if blanks and rng.random() < 0.3 else random_iri(rng)
        p = IRI(f"{EX}p{rng.randrange(4)}")
        r = rng.random()
        if r < 0.35:
            o = random_iri(rng)
        elif r < 0.55 and blanks:
            o = rng.choice(blanks)
        else:
            o = random_literal(rng)
        g.add(Triple(s, p, o))
    return g


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
