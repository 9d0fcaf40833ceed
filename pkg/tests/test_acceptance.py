"""Acceptance suite: one PASS/FAIL line per criterion.

Lines are printed as each criterion finishes and repeated in the terminal
summary, so they show up under plain ``pytest -v`` as well as ``-s``.
"""
import random
import time

import pytest
import yaml

from conftest import FIXTURES, ROOT, random_graph
from oracles import reachable_upstream
from pipeline import cli, run_pipeline, snapshot
from querygen import case_matches, run_case
from reprokg.catalog import Workspace, verify
from reprokg.en50549 import DISCONNECTED, FAIL, PASS, apr_spec, evaluate, nor_spec
from reprokg.fixtures import (
    BASE,
    PN,
    UN,
    annotate_directory,
    digital_twin_account,
    digital_twin_template,
    generate_synthetic_trace,
    workflow_graph,
)
from reprokg.opensvp import parse_channel_map, parse_log
from reprokg.prov import check_completeness, mint, upstream
from reprokg.rdf import isomorphic
from reprokg.scm import diff_configurations, load_configuration
from reprokg.shapes import check_shapes
from reprokg.store import Store
from reprokg.turtle import parse_turtle, serialize_turtle
from reprokg.vocab import VOCABULARIES, all_shapes, emit_vocabulary

RESULTS = []


@pytest.fixture
def criterion(request):
    """Yields a setter for the detail text; records PASS or FAIL when the test ends."""
    name = request.node.name.removeprefix("test_")
    detail = {"text": ""}
    yield lambda text: detail.update(text=text)
    failed = getattr(request.node, "rep_call", None) is None or request.node.rep_call.failed
    line = f"{'FAIL' if failed else 'PASS'} {name}: {detail['text']}".rstrip(": ")
    RESULTS.append(line)
    print("\n" + line)


def ucd_trace(name):
    cmap = parse_channel_map((FIXTURES / "ucd" / "channel-map.yaml").read_text())
    return parse_log((FIXTURES / "ucd" / "logs" / f"{name}.csv").read_text(), cmap)


def test_c1_nor_sequence(criterion):
    start = time.perf_counter()
    verdict = evaluate(ucd_trace("nor"), nor_spec(UN))
    elapsed = time.perf_counter() - start
    assert len(verdict.segments) == 3
    assert all(abs(r.observed_mean - r.expected) <= 0.01 for r in verdict.per_level)
    assert verdict.outcome == PASS
    assert elapsed < 1.0
    criterion(f"3 segments, max error {max(abs(r.observed_mean - r.expected) for r in verdict.per_level):.4f} pu, {elapsed * 1000:.0f} ms")


def test_c2_apr_sequence(criterion):
    verdict = evaluate(ucd_trace("apr"), apr_spec(PN))
    assert len(verdict.per_level) == 12
    assert all(abs(r.observed_mean - r.expected) <= 0.01 for r in verdict.per_level)
    assert verdict.outcome == PASS
    points = list(range(0, 1440, 11)) + [1439]
    for at in points:
        bad = evaluate(generate_synthetic_trace(apr_spec(PN), 1, 0.002, disconnect_at=at, seed=at), apr_spec(PN))
        assert bad.outcome == FAIL and DISCONNECTED in bad.reasons, at
    criterion(f"12 levels PASS, {len(points)} disconnection points all FAIL")


def test_c3_breaker_state_gap(criterion):
    stripped = check_completeness(Store([annotate_directory(FIXTURES / "ucd-stripped")]))
    r7 = [v for v in stripped.violations if v.rule_id == "R7"]
    assert r7 and all("BreakerState" in v.message for v in r7)
    full = check_completeness(Store([annotate_directory(FIXTURES / "ucd")]))
    assert full.score == 1.0 and not full.violations
    criterion(f"stripped {stripped.score:.3f} with {len(r7)} R7 violations, full 1.0")


def test_c4_upstream_lineage(criterion):
    store = Store([workflow_graph(digital_twin_template(), digital_twin_account())])
    target = mint(BASE, "entity", "DS3")
    start = time.perf_counter()
    got = upstream(store, target)
    elapsed = time.perf_counter() - start
    names = {x.value.rsplit("/", 1)[1] for x in got}
    assert names == {"DS2", "twinModel", "DS1", "modelConfig", "code"}
    doc = yaml.safe_load((FIXTURES / "digital-twin" / "account.yaml").read_text())
    producer = {e: a for a in doc["activities"] for e in a.get("generated", [])}
    edges = [(e["id"], s) for e in doc["entities"] for s in e.get("derivedFrom", [])]
    edges += [(e, u) for e, a in producer.items() for u in a.get("used", [])]
    assert names == reachable_upstream(edges, "DS3")
    assert elapsed < 0.1
    criterion(f"{sorted(names)} in {elapsed * 1000:.2f} ms")


def test_c5_configuration_diff(criterion):
    report = diff_configurations(load_configuration(FIXTURES / "ucd" / "config.yaml"),
                                 load_configuration(FIXTURES / "zhaw" / "config.yaml"))
    changes = {(c.attribute, c.value_a, c.value_b) for c in report.changed_attributes}
    assert changes == {("phases", 1, 3), ("operatingPoint", 0.62, 0.92)}
    assert not (report.added_systems or report.removed_systems or report.added_connections or report.removed_connections)
    criterion("phases 1->3, operatingPoint 0.62->0.92, nothing else")


def test_c6_turtle_round_trip(criterion):
    rng = random.Random(6)
    n = 1000
    for _ in range(n):
        g = random_graph(rng)
        text = serialize_turtle(g)
        assert isomorphic(parse_turtle(text), g), text
    criterion(f"{n} random graphs isomorphic after round-trip")


def test_c7_query_oracle(criterion):
    n, nonempty = 500, 0
    for seed in range(70000, 70000 + n):
        text, actual, expected, spec = run_case(seed)
        assert case_matches(actual, expected, spec), text
        nonempty += bool(expected)
    criterion(f"{n} cases match the nested-loop oracle ({nonempty} non-empty)")


def test_c8_end_to_end(criterion, tmp_path):
    steps = run_pipeline(tmp_path)
    assert all(code == 0 for _, code, _ in steps), steps
    first = snapshot(tmp_path)
    again = run_pipeline(tmp_path)
    assert all(code == 0 for _, code, _ in again)
    assert snapshot(tmp_path) == first
    checked = verify(Workspace(tmp_path))
    assert checked
    assert cli("publish", "--workspace", tmp_path, "--verify")[0] == 0
    criterion(f"{len(steps)} steps exit 0, re-run byte-identical, {len(checked)} checksums verified")


def test_c9_vocabularies(criterion):
    assert len(VOCABULARIES) == 4
    for name, factory in sorted(VOCABULARIES.items()):
        g = emit_vocabulary(factory())
        text = serialize_turtle(g)
        assert isomorphic(parse_turtle(text), g), name
        assert check_shapes(Store([g]), all_shapes()) == [], name
        assert text == (ROOT / "vocab" / f"{name}.ttl").read_text(encoding="utf-8"), name
    criterion(f"{', '.join(sorted(VOCABULARIES))} emit, reparse, conform and match goldens")
