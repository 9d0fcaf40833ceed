import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES
from reprokg import errors
from reprokg.fixtures import ucd_traces
from reprokg.opensvp import (
    AnnotationContext,
    Channel,
    MeasurementTrace,
    SuiteConfig,
    TestConfig,
    annotate,
    channel_map_text,
    flatten_suite,
    parse_channel_map,
    parse_log,
    parse_suite,
    parse_test,
    write_log,
)
from reprokg.rdf.terms import RDF_TYPE
from reprokg.shapes import check_shapes
from reprokg.store import Store
from reprokg.turtle import serialize_turtle
from reprokg.vocab import ANNOT, HTD, annotation_shapes

CMAP = """
channels:
  AC_VRMS: {phenomenon: Voltage, unit: V}
  AC_P: {phenomenon: ActivePower, unit: W}
"""
CTX = {"organization": "ucd", "datasetId": "ds", "systemConfigId": "cfg"}


def test_minimal_suite():
    s = parse_suite("suite: s\ntests: [t1]\n")
    assert s.name == "s" and s.test_refs == ["t1"] and s.nested_suite_refs == []


def test_self_referencing_suite():
    with pytest.raises(errors.CyclicSuite):
        parse_suite("suite: s\ntests: [t]\nsuites: [s]\n")


def test_nested_cycle_and_unknown_reference():
    a = SuiteConfig("a", ["t1"], ["b"])
    b = SuiteConfig("b", ["t2"], ["a"])
    with pytest.raises(errors.CyclicSuite):
        flatten_suite(a, {"a": a, "b": b})
    with pytest.raises(errors.UnresolvedReference):
        flatten_suite(SuiteConfig("a", [], ["zzz"]))
    c = SuiteConfig("c", ["t3", "t1"])
    assert flatten_suite(SuiteConfig("top", ["t1"], ["c"]), {"c": c}) == ["t1", "t3"]


def test_test_config_with_standard():
    t = parse_test("test: nor\nstandard: 'EN 50549-10:2022'\nparams: {Un: 230, ratedPower: 5000.0, grid: 'EU', strict: true}\n")
    assert t.standard_ref == "EN 50549-10:2022"
    assert t.params == {"Un": 230, "ratedPower": 5000.0, "grid": "EU", "strict": True}


def test_suite_syntax_error_position():
    with pytest.raises(errors.SyntaxError) as info:
        parse_suite("suite: s\ntests: [a, b\n")
    assert info.value.line >= 2


def test_three_row_log():
    trace = parse_log("time,AC_VRMS,AC_P\n0,230,100\n1,231,101\n2,229,99\n", CMAP)
    assert [c.name for c in trace.channels] == ["AC_VRMS", "AC_P"]
    assert len(trace) == 3
    assert trace.channel("AC_P").phenomenon == ANNOT.ActivePower


def test_decreasing_time():
    with pytest.raises(errors.NonMonotoneTimestamps) as info:
        parse_log("time,AC_VRMS,AC_P\n0,1,1\n2,1,1\n1,1,1\n", CMAP)
    assert info.value.row == 3


@pytest.mark.parametrize(
    "csv_text,exc,row",
    [
        ("time,AC_VRMS,AC_P\n0,1\n", errors.ArityMismatch, 1),
        ("time,AC_VRMS,AC_P,EXTRA\n0,1,1,1\n", errors.UnmappedColumn, None),
        ("time,AC_VRMS,AC_P\n0,1,1\n1,x,1\n", errors.NonNumericValue, 2),
        ("time,AC_VRMS,AC_P\n0,1,nan\n", errors.NonNumericValue, 1),
        ("AC_VRMS,AC_P\n1,1\n", errors.ChannelMissing, None),
    ],
)
def test_log_errors(csv_text, exc, row):
    with pytest.raises(exc) as info:
        parse_log(csv_text, CMAP)
    if row is not None:
        assert info.value.row == row


def test_iso_timestamps_become_offsets():
    trace = parse_log("time,AC_VRMS,AC_P\n2023-05-10T09:00:00Z,1,1\n2023-05-10T09:00:01.5Z,1,1\n", CMAP)
    assert trace.times == [0.0, 1.5]
    assert trace.start_time == "2023-05-10T09:00:00Z"


def test_ucd_log_maps_four_phenomena():
    cmap = parse_channel_map((FIXTURES / "ucd-stripped" / "channel-map.yaml").read_text())
    trace = parse_log((FIXTURES / "ucd-stripped" / "logs" / "nor.csv").read_text(), cmap)
    assert {c.phenomenon for c in trace.channels} == {ANNOT.Voltage, ANNOT.Current, ANNOT.ActivePower, ANNOT.ReactivePower}
    assert len(trace) == 1800


finite = st.floats(allow_nan=False, allow_infinity=False, width=64, min_value=-1e12, max_value=1e12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(min_value=0.001, max_value=100.0), finite, finite), min_size=0, max_size=30))
def test_write_then_parse_is_identity(samples):
    t, times = 0.0, []
    for dt, _, _ in samples:
        t += dt
        times.append(round(t, 6))
    if len(set(times)) != len(times) or times != sorted(times):
        return
    chans = [Channel("V", ANNOT.Voltage, "V"), Channel("P", ANNOT.ActivePower, "W")]
    trace = MeasurementTrace(chans, times, [(a, b) for _, a, b in samples], "2024-01-01T00:00:00Z")
    back = parse_log(write_log(trace), channel_map_text(trace))
    assert back.channels == trace.channels and back.times == trace.times and back.rows == trace.rows
    assert back.start_time == trace.start_time


def test_annotate_empty_suite():
    g = annotate(SuiteConfig("s"), [], {}, CTX)
    types = {t.object for t in g.triples_matching(None, RDF_TYPE)}
    assert ANNOT.Organization in types and ANNOT.Dataset in types
    assert ANNOT.LogFile not in types and HTD.TestCase not in types


def test_annotate_one_trace_four_channels():
    traces = ucd_traces(breaker=False)
    g = annotate(SuiteConfig("s", ["nor"]), [TestConfig("nor")], {"nor": traces["nor"]}, CTX)
    measurements = [t.subject for t in g.triples_matching(None, RDF_TYPE, ANNOT.Measurement)]
    assert len(measurements) == 4
    for m in measurements:
        assert len(list(g.triples_matching(m, ANNOT.recordsPhenomenon))) == 1


def test_annotate_is_lossless_and_deterministic():
    traces = ucd_traces()
    tests = [TestConfig("nor"), TestConfig("apr"), TestConfig("spare")]
    suite = SuiteConfig("s", ["nor", "apr", "spare"])
    g = annotate(suite, tests, traces, CTX)
    n_channels = sum(len(t.channels) for t in traces.values())
    assert len(list(g.triples_matching(None, RDF_TYPE, ANNOT.Measurement))) == n_channels
    assert len(list(g.triples_matching(None, RDF_TYPE, HTD.TestSpecification))) == len(tests)
    assert len(list(g.triples_matching(None, RDF_TYPE, HTD.TestExecution))) == len(traces)
    assert serialize_turtle(g) == serialize_turtle(annotate(suite, tests, traces, CTX))


def test_annotate_unresolved_references():
    with pytest.raises(errors.UnresolvedReference):
        annotate(SuiteConfig("s", ["missing"]), [], {}, CTX)
    with pytest.raises(errors.UnresolvedReference):
        annotate(SuiteConfig("s", ["nor"]), [TestConfig("nor")], {"other": ucd_traces()["nor"]}, CTX)


def test_full_fixture_conforms_to_annotation_shapes():
    from reprokg.fixtures import annotate_directory

    g = annotate_directory(FIXTURES / "ucd")
    assert [v for v in check_shapes(Store([g]), annotation_shapes())] == []


def test_context_validation():
    ctx = AnnotationContext.from_yaml((FIXTURES / "ucd" / "context.yaml").read_text())
    assert ctx.organization == "ucd" and ctx.dataset_id == "ucd-inverter"
    with pytest.raises(errors.InputError):
        AnnotationContext.from_dict({"datasetId": "x"})


def test_trace_construction_invariants():
    chans = [Channel("V", ANNOT.Voltage, "V")]
    with pytest.raises(errors.ArityMismatch):
        MeasurementTrace(chans, [0.0], [(1.0, 2.0)])
    with pytest.raises(errors.NonMonotoneTimestamps):
        MeasurementTrace(chans, [0.0, 0.0], [(1.0,), (1.0,)])
    rng = random.Random(0)
    times = sorted(rng.sample(range(1000), 50))
    trace = MeasurementTrace(chans, [float(t) for t in times], [(rng.random(),) for _ in times])
    assert trace.duration == times[-1] - times[0]
