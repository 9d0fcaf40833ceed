import random
import time

import pytest

from reprokg import errors
from reprokg.en50549 import (
    APR,
    DISCONNECTED,
    FAIL,
    INCONCLUSIVE,
    NOR,
    PASS,
    Level,
    TestSequenceSpec,
    apr_spec,
    detect_steps,
    evaluate,
    nor_spec,
    plot_data_csv,
    spec_for,
    verdict_to_rdf,
    window_average,
)
from reprokg.fixtures import PN, UN, generate_synthetic_trace
from reprokg.opensvp import Channel, MeasurementTrace
from reprokg.rdf import IRI
from reprokg.shapes import check_shapes
from reprokg.store import Store
from reprokg.vocab import htd_shapes


def step_series(levels, dwell, rate=1.0):
    out = []
    n = int(dwell * rate)
    for k, lv in enumerate(levels):
        for i in range(n):
            out.append(((k * n + i) / rate, lv))
    return out


def test_nor_spec_levels():
    s = nor_spec(230)
    assert [lv.setpoint for lv in s.levels] == [0.85, 1.00, 1.10]
    assert {lv.dwell for lv in s.levels} == {600}
    assert s.averaging_window == 60 and s.instantaneous_window == 1


def test_apr_spec_levels():
    s = apr_spec(5000)
    assert [lv.setpoint for lv in s.levels] == [0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.3, 0.6, 1.0]
    assert {lv.dwell for lv in s.levels} == {120}


@pytest.mark.parametrize("bad", [0, -1, float("nan")])
def test_invalid_nominal(bad):
    with pytest.raises(errors.InvalidNominal):
        nor_spec(bad)
    with pytest.raises(errors.InvalidNominal):
        apr_spec(bad)


def test_spec_invariants():
    with pytest.raises(errors.InvalidSpec):
        TestSequenceSpec(NOR, [Level(1.6, 600)], Un=230)
    with pytest.raises(errors.InvalidSpec):
        TestSequenceSpec(NOR, [Level(1.0, 30)], Un=230)
    with pytest.raises(errors.InvalidSpec):
        TestSequenceSpec(NOR, [Level(1.0, 600)], Un=230, tolerance=0)
    assert spec_for("apr", Pn=1).kind == APR
    with pytest.raises(errors.InputError):
        spec_for("frequency", Un=1)


def test_detect_three_nor_steps():
    segs = detect_steps(step_series([0.85, 1.0, 1.1], 600), 300)
    assert [s.level for s in segs] == [0.85, 1.0, 1.1]
    assert [s.start_time for s in segs] == [0, 600, 1200]
    assert [s.duration for s in segs] == [600, 600, 600]


def test_constant_and_short_series():
    segs = detect_steps(step_series([0.5], 100), 50)
    assert len(segs) == 1 and segs[0].duration == 100
    assert detect_steps(step_series([0.5], 10), 50) == []
    with pytest.raises(errors.EmptySeries):
        detect_steps([(0, 1.0)], 1)


def test_change_points_recovered_exactly():
    rng = random.Random(50549)
    grid = [round(0.1 + 0.05 * k, 2) for k in range(28)]
    for _ in range(60):
        rate = rng.choice([1.0, 2.0, 0.5])
        levels = [rng.choice(grid)]
        for _ in range(rng.randint(1, 8)):
            levels.append(rng.choice([g for g in grid if abs(g - levels[-1]) >= 0.05]))
        dwells = [rng.choice([60, 90, 120, 200]) for _ in levels]
        series, bounds, t = [], [], 0.0
        for lv, dw in zip(levels, dwells):
            bounds.append(t)
            for i in range(int(dw * rate)):
                series.append((t + i / rate, lv))
            t += dw
        segs = detect_steps(series, min(dwells) / 2)
        assert [s.level for s in segs] == levels
        for s, b in zip(segs, bounds):
            assert abs(s.start_time - b) <= 1 / rate


def test_window_average_constant_any_window():
    series = step_series([0.5], 120)
    for w in (1, 7, 60, 119, 120):
        assert window_average(series, w) == pytest.approx(0.5)


def test_window_average_ramp_closed_form():
    # samples t = 0..60 of v = t / 60; the closed window holds all 61 samples
    series = [(float(t), t / 60) for t in range(61)]
    assert window_average(series, 60) == pytest.approx(sum(t / 60 for t in range(61)) / 61)
    assert window_average(series, 60) == pytest.approx(0.5)


def test_window_average_irregular_is_time_weighted():
    series = [(0.0, 0.0), (1.0, 0.0), (10.0, 1.0)]
    # trapezoid over [0, 10]: 0 for 1 s, then a ramp 0 to 1 over 9 s
    assert window_average(series, 10) == pytest.approx(4.5 / 10)


def test_window_too_long():
    with pytest.raises(errors.WindowTooLong):
        window_average(step_series([0.5], 30), 60)


def test_clean_nor_passes():
    trace = generate_synthetic_trace(nor_spec(UN), 1, 0)
    assert len(trace) == 1800
    v = evaluate(trace, nor_spec(UN))
    assert v.outcome == PASS
    assert [r.within_tolerance for r in v.per_level] == [True] * 3
    assert [r.expected for r in v.per_level] == [0.85, 1.0, 1.1]


def test_clean_apr_passes():
    trace = generate_synthetic_trace(apr_spec(PN), 1, 0)
    assert len(trace) == 1440
    v = evaluate(trace, apr_spec(PN))
    assert v.outcome == PASS and len(v.per_level) == 12


@pytest.mark.parametrize("at", [0, 130, 700, 1439])
def test_apr_disconnection_fails(at):
    trace = generate_synthetic_trace(apr_spec(PN), 1, 0, disconnect_at=at)
    v = evaluate(trace, apr_spec(PN))
    assert v.outcome == FAIL and v.reasons[0] == DISCONNECTED


def test_disconnection_inferred_without_breaker():
    trace = generate_synthetic_trace(nor_spec(UN, PN), 1, 0, disconnect_at=700, breaker=False)
    v = evaluate(trace, nor_spec(UN, PN))
    assert v.outcome == FAIL and v.reasons[0] == DISCONNECTED
    assert v.connectivity_inferred
    assert any("inferred" in r for r in v.reasons)


def test_values_zero_after_disconnect():
    trace = generate_synthetic_trace(nor_spec(UN), 1, 0, disconnect_at=700)
    for t, row in zip(trace.times, trace.rows):
        if t >= 700:
            assert set(row) == {0.0}


def test_two_segments_inconclusive():
    two = TestSequenceSpec(NOR, [Level(0.85, 600), Level(1.0, 600)], Un=UN)
    trace = generate_synthetic_trace(two, 1, 0)
    v = evaluate(trace, nor_spec(UN))
    assert v.outcome == INCONCLUSIVE and len(v.segments) == 2


def test_missing_channel():
    trace = MeasurementTrace([Channel("X", IRI("http://example.org/x"), "1")], [0.0, 1.0], [(1.0,), (1.0,)])
    with pytest.raises(errors.ChannelMissing):
        evaluate(trace, nor_spec(UN))


def per_unit(trace, un, pn):
    scale = {"AC_VRMS": un, "AC_IRMS": pn / un, "AC_P": pn, "AC_Q": pn, "BRK": 1.0}
    factors = [scale[c.name] for c in trace.channels]
    rows = [tuple(v / f for v, f in zip(row, factors)) for row in trace.rows]
    return MeasurementTrace(trace.channels, trace.times, rows, trace.start_time)


@pytest.mark.parametrize("kind", [NOR, APR])
@pytest.mark.parametrize("disconnect", [None, 500])
@pytest.mark.parametrize("breaker", [True, False])
def test_scale_invariance(kind, disconnect, breaker):
    spec = spec_for(kind, Un=UN, Pn=PN)
    unit = spec_for(kind, Un=1.0, Pn=1.0)
    trace = generate_synthetic_trace(spec, 1, 0.01, disconnect_at=disconnect, seed=3, breaker=breaker)
    a = evaluate(trace, spec)
    b = evaluate(per_unit(trace, UN, PN), unit)
    assert a.outcome == b.outcome
    assert [(r.within_tolerance, r.connected) for r in a.per_level] == [(r.within_tolerance, r.connected) for r in b.per_level]


def test_shrinking_tolerance_never_turns_fail_into_pass():
    rng = random.Random(77)
    for _ in range(10):
        spec = nor_spec(UN)
        shifted = TestSequenceSpec(NOR, [Level(lv.setpoint + rng.uniform(-0.04, 0.04), lv.dwell) for lv in spec.levels], Un=UN)
        trace = generate_synthetic_trace(shifted, 1, 0.003, seed=rng.randrange(1000))
        seen_fail = False
        for tol in (0.08, 0.05, 0.03, 0.02, 0.01, 0.005, 0.001):
            out = evaluate(trace, spec.with_tolerance(tol)).outcome
            if seen_fail:
                assert out != PASS
            seen_fail = seen_fail or out == FAIL


def test_nor_runtime():
    trace = generate_synthetic_trace(nor_spec(UN), 1, 0.002, seed=1)
    start = time.perf_counter()
    evaluate(trace, nor_spec(UN))
    assert time.perf_counter() - start < 1.0


def test_verdict_exports():
    spec = nor_spec(UN)
    trace = generate_synthetic_trace(spec, 1, 0)
    v = evaluate(trace, spec)
    g = verdict_to_rdf(v, IRI("http://example.org/lab/execution/x"), IRI("http://example.org/lab/testspec/nor"))
    assert check_shapes(Store([g]), htd_shapes()) == []
    d = v.as_dict()
    assert d["kind"] == "verdict" and d["outcome"] == PASS and len(d["perLevel"]) == 3
    lines = plot_data_csv(trace, spec, v).splitlines()
    assert lines[0] == "time,observed_pu,expected_pu,level" and len(lines) == 1801
