"""Step reconstruction and verdicts for two EN 50549-10 sequences.

NOR: continuous operation at 0.85, 1.00 and 1.10 Un, 600 s each.
APR: active power reduced from 0.9 to 0.1 Pn in 0.1 steps, then raised
to 0.3, 0.6 and 1.0 Pn, 120 s each, judged on the 60 s mean of each level.

The default tolerance (0.05 pu) is a placeholder, not a value taken from
the standard.
"""

from __future__ import annotations

import bisect
import csv
import io
import statistics
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import errors
from .opensvp import MeasurementTrace
from .rdf.graph import Graph
from .rdf.terms import IRI, RDF_TYPE, Literal, Triple, literal
from .vocab import ANNOT, HTD, PREFIXES

NOR = "NormalOperatingRange"
APR = "ActivePowerReduction"
KIND_ALIASES = {"nor": NOR, "normaloperatingrange": NOR, "apr": APR, "activepowerreduction": APR}

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"
DISCONNECTED = "disconnection detected"

DEFAULT_TOLERANCE = 0.05
DEFAULT_DEADBAND = 0.02
DISCONNECT_FRACTION = 0.02
BREAKER_THRESHOLD = 0.5


@dataclass(frozen=True)
class Level:
    setpoint: float
    dwell: float


@dataclass(frozen=True)
class TestSequenceSpec:
    __test__ = False

    kind: str
    levels: tuple[Level, ...]
    Un: Optional[float] = None
    Pn: Optional[float] = None
    averaging_window: float = 60.0
    instantaneous_window: float = 1.0
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.kind not in (NOR, APR):
            raise errors.InvalidSpec(f"unknown sequence kind {self.kind!r}")
        if not self.levels:
            raise errors.InvalidSpec("sequence has no levels")
        for lv in self.levels:
            if not 0 < lv.setpoint <= 1.5:
                raise errors.InvalidSpec(f"setpoint {lv.setpoint} outside (0, 1.5]")
            if not lv.dwell > 0:
                raise errors.InvalidSpec(f"dwell {lv.dwell} must be positive")
        if not 0 < self.averaging_window <= self.min_dwell:
            raise errors.InvalidSpec("averaging window must be positive and no longer than the shortest dwell")
        if not self.tolerance > 0:
            raise errors.InvalidSpec("tolerance must be positive")
        for name in ("Un", "Pn"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise errors.InvalidNominal(f"{name} must be positive, got {v}")

    @property
    def min_dwell(self) -> float:
        return min(lv.dwell for lv in self.levels)

    @property
    def setpoints(self) -> list[float]:
        return [lv.setpoint for lv in self.levels]

    @property
    def total_duration(self) -> float:
        return sum(lv.dwell for lv in self.levels)

    @property
    def nominal(self) -> float:
        """Nominal the target channel is normalised by."""
        value = self.Un if self.kind == NOR else self.Pn
        if value is None:
            raise errors.InvalidNominal(f"{self.kind} needs {'Un' if self.kind == NOR else 'Pn'}")
        return value

    @property
    def target_phenomenon(self) -> IRI:
        return ANNOT.Voltage if self.kind == NOR else ANNOT.ActivePower

    def with_tolerance(self, tolerance: float) -> "TestSequenceSpec":
        return TestSequenceSpec(
            self.kind, self.levels, self.Un, self.Pn, self.averaging_window, self.instantaneous_window, tolerance
        )


def _positive(name: str, value) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise errors.InvalidNominal(f"{name} must be a number, got {value!r}") from None
    if not v > 0:
        raise errors.InvalidNominal(f"{name} must be positive, got {value}")
    return v


def nor_spec(Un: float, Pn: Optional[float] = None, tolerance: float = DEFAULT_TOLERANCE) -> TestSequenceSpec:
    un = _positive("Un", Un)
    pn = _positive("Pn", Pn) if Pn is not None else None
    levels = tuple(Level(s, 600.0) for s in (0.85, 1.00, 1.10))
    return TestSequenceSpec(NOR, levels, Un=un, Pn=pn, tolerance=tolerance)


def apr_spec(Pn: float, Un: Optional[float] = None, tolerance: float = DEFAULT_TOLERANCE) -> TestSequenceSpec:
    pn = _positive("Pn", Pn)
    un = _positive("Un", Un) if Un is not None else None
    setpoints = (0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.3, 0.6, 1.0)
    return TestSequenceSpec(APR, tuple(Level(s, 120.0) for s in setpoints), Un=un, Pn=pn, tolerance=tolerance)


def spec_for(kind: str, Un: Optional[float] = None, Pn: Optional[float] = None, tolerance: float = DEFAULT_TOLERANCE) -> TestSequenceSpec:
    resolved = KIND_ALIASES.get(kind.replace("-", "").replace("_", "").lower())
    if resolved is None:
        raise errors.InvalidSpec(f"unknown sequence kind {kind!r} (expected NOR or APR)")
    if resolved == NOR:
        return nor_spec(Un if Un is not None else 0, Pn, tolerance)
    return apr_spec(Pn if Pn is not None else 0, Un, tolerance)


# segmentation


@dataclass(frozen=True)
class StepSegment:
    level: float
    start_time: float
    duration: float
    start_index: int
    end_index: int  # inclusive

    @property
    def end_time(self) -> float:
        """Time of the last sample in the segment."""
        return self.start_time + self.duration - self._tail

    _tail: float = 0.0

    def as_dict(self) -> dict:
        return {"level": self.level, "startTime": self.start_time, "duration": self.duration}


def median_interval(times: Sequence[float]) -> float:
    if len(times) < 2:
        return 0.0
    return statistics.median(b - a for a, b in zip(times, times[1:]))


def _check_series(series) -> tuple[list[float], list[float]]:
    if len(series) < 2:
        raise errors.EmptySeries("need at least two samples")
    times = [float(t) for t, _ in series]
    values = [float(v) for _, v in series]
    for i in range(1, len(times)):
        if not times[i] > times[i - 1]:
            raise errors.NonMonotoneTimestamps(i + 1)
    return times, values


def detect_steps(series: Sequence[tuple[float, float]], min_dwell: float, deadband: float = DEFAULT_DEADBAND) -> list[StepSegment]:
    """Greedy plateau search.

    A segment grows while every sample stays within +-deadband of the segment
    median. Runs shorter than min_dwell are transition samples and belong to
    no segment. Durations count one median sample interval for the last sample.
    """
    times, values = _check_series(series)
    dt = median_interval(times)
    n = len(values)
    out: list[StepSegment] = []
    i = 0
    while i < n:
        block = [values[i]]
        j = i
        while j + 1 < n:
            bisect.insort(block, values[j + 1])
            med = block[(len(block) - 1) // 2] if len(block) % 2 else (block[len(block) // 2 - 1] + block[len(block) // 2]) / 2
            if block[0] < med - deadband or block[-1] > med + deadband:
                block.pop(bisect.bisect_left(block, values[j + 1]))
                break
            j += 1
        duration = times[j] - times[i] + dt
        if duration >= min_dwell:
            out.append(StepSegment(statistics.median(block), times[i], duration, i, j, dt))
            i = j + 1
        else:
            i += 1
    return out


def _uniform(times: Sequence[float]) -> bool:
    if len(times) < 3:
        return True
    dt = median_interval(times)
    return all(abs((b - a) - dt) <= 1e-9 * max(1.0, abs(dt)) for a, b in zip(times, times[1:]))


def window_average(
    series: Sequence[tuple[float, float]],
    window: float,
    anchor: Optional[float] = None,
    duration: Optional[float] = None,
) -> float:
    """Mean over the closed interval [anchor - window, anchor] (anchor defaults to the last sample).

    Uniform sampling gives the arithmetic mean of the samples inside; irregular
    sampling falls back to a trapezoidal time-weighted mean.
    """
    times, values = (list(x) for x in zip(*series)) if series else ([], [])
    if not times:
        raise errors.EmptySeries("empty series")
    end = times[-1] if anchor is None else float(anchor)
    if duration is None:
        duration = end - times[0] + median_interval(times)
    if window > duration + 1e-9:
        raise errors.WindowTooLong(f"window {window} s exceeds segment duration {duration} s")
    lo = end - window
    eps = 1e-9 * max(1.0, abs(end))
    idx = [k for k, t in enumerate(times) if lo - eps <= t <= end + eps]
    if not idx:
        raise errors.EmptySeries(f"no samples in [{lo}, {end}]")
    if len(idx) == 1 or _uniform([times[k] for k in idx]):
        return sum(values[k] for k in idx) / len(idx)
    area = 0.0
    for a, b in zip(idx, idx[1:]):
        area += (times[b] - times[a]) * (values[a] + values[b]) / 2
    return area / (times[idx[-1]] - times[idx[0]])


# verdicts


@dataclass(frozen=True)
class LevelResult:
    index: int
    expected: float
    observed_mean: float
    within_tolerance: bool
    connected: bool
    segment: Optional[StepSegment] = None

    def as_dict(self) -> dict:
        d = {
            "index": self.index,
            "expected": self.expected,
            "observedMean": round(self.observed_mean, 9),
            "withinTolerance": self.within_tolerance,
            "connected": self.connected,
        }
        if self.segment is not None:
            d["startTime"] = self.segment.start_time
            d["duration"] = self.segment.duration
        return d


@dataclass
class Verdict:
    outcome: str
    per_level: list[LevelResult] = field(default_factory=list)
    reasons: list[str] = field(default_factory=list)
    kind: str = ""
    segments: list[StepSegment] = field(default_factory=list)
    connectivity_source: str = ""
    connectivity_inferred: bool = False

    def as_dict(self) -> dict:
        return {
            "kind": "verdict",
            "version": 1,
            "sequence": self.kind,
            "outcome": self.outcome,
            "connectivity": {"source": self.connectivity_source, "inferred": self.connectivity_inferred},
            "segments": len(self.segments),
            "perLevel": [lv.as_dict() for lv in self.per_level],
            "reasons": list(self.reasons),
        }


def _connectivity(trace: MeasurementTrace, spec: TestSequenceSpec, signal: Optional[str]):
    """Per-sample connected flags, the channel used, and whether the signal was inferred."""
    name = signal
    if name is None:
        ch = trace.channel_for(ANNOT.BreakerState)
        name = ch.name if ch is not None else None
    if name is not None:
        return [v > BREAKER_THRESHOLD for v in trace.column(name)], name, False
    power = trace.channel_for(ANNOT.ActivePower)
    if power is not None and spec.Pn is not None:
        limit = DISCONNECT_FRACTION * spec.Pn
        return [v > limit for v in trace.column(power.name)], power.name, True
    target = trace.channel_for(spec.target_phenomenon)
    if target is None:
        raise errors.ChannelMissing(f"no channel records {spec.target_phenomenon.value}")
    limit = DISCONNECT_FRACTION * spec.nominal
    return [v > limit for v in trace.column(target.name)], target.name, True


def target_channel(trace: MeasurementTrace, spec: TestSequenceSpec, channel: Optional[str] = None) -> str:
    if channel is not None:
        trace.channel(channel)
        return channel
    ch = trace.channel_for(spec.target_phenomenon)
    if ch is None:
        raise errors.ChannelMissing(f"trace has no channel recording {spec.target_phenomenon.value.rsplit('#', 1)[-1]}")
    return ch.name


def evaluate(
    trace: MeasurementTrace,
    spec: TestSequenceSpec,
    connectivity_signal: Optional[str] = None,
    channel: Optional[str] = None,
    deadband: float = DEFAULT_DEADBAND,
    min_dwell: Optional[float] = None,
) -> Verdict:
    """PASS iff every level is matched, within tolerance and connected.

    A disconnection anywhere in the trace is a FAIL even when segmentation
    also failed; a segment count mismatch on its own is INCONCLUSIVE.
    """
    name = target_channel(trace, spec, channel)
    nominal = spec.nominal
    series = [(t, v / nominal) for t, v in trace.series(name)]
    flags, source, inferred = _connectivity(trace, spec, connectivity_signal)
    verdict = Verdict(INCONCLUSIVE, kind=spec.kind, connectivity_source=source, connectivity_inferred=inferred)
    if inferred:
        verdict.reasons.append(f"connectivity inferred from {source}; no breaker-state channel recorded")

    segments = detect_steps(series, spec.min_dwell / 2 if min_dwell is None else min_dwell, deadband)
    verdict.segments = segments
    disconnected = not all(flags)
    if len(segments) == len(spec.levels):
        for k, (lv, seg) in enumerate(zip(spec.levels, segments)):
            part = series[seg.start_index : seg.end_index + 1]
            mean = window_average(part, spec.averaging_window, duration=seg.duration)
            connected = all(flags[seg.start_index : seg.end_index + 1])
            ok = abs(mean - lv.setpoint) <= spec.tolerance + 1e-12
            verdict.per_level.append(LevelResult(k, lv.setpoint, mean, ok, connected, seg))
            if not ok:
                verdict.reasons.append(
                    f"level {k} ({lv.setpoint:g} pu): mean {mean:.4f} pu outside tolerance {spec.tolerance:g}"
                )
        verdict.outcome = PASS if all(r.within_tolerance and r.connected for r in verdict.per_level) else FAIL
    else:
        verdict.reasons.append(f"expected {len(spec.levels)} levels, detected {len(segments)} segments")
    if disconnected:
        first = flags.index(False)
        verdict.reasons.insert(0, DISCONNECTED)
        verdict.reasons.insert(1, f"unit disconnected at t={trace.times[first]:g} s")
        verdict.outcome = FAIL
    return verdict


# exports


def verdict_to_rdf(verdict: Verdict, execution: IRI, specification: Optional[IRI] = None) -> Graph:
    g = Graph(prefixes={k: PREFIXES[k] for k in ("rdf", "rdfs", "xsd", "htd")})
    v = IRI(execution.value + "/verdict")
    g.add(Triple(execution, HTD.hasVerdict, v))
    g.add(Triple(v, RDF_TYPE, HTD.Verdict))
    g.add(Triple(v, HTD.outcome, Literal(verdict.outcome)))
    if specification is not None:
        g.add(Triple(v, HTD.evaluatedAgainst, specification))
    for r in verdict.reasons:
        g.add(Triple(v, HTD.reason, Literal(r)))
    for lv in verdict.per_level:
        node = IRI(f"{v.value}/level/{lv.index}")
        g.add(Triple(v, HTD.hasLevelResult, node))
        g.add(Triple(node, RDF_TYPE, HTD.LevelResult))
        g.add(Triple(node, HTD.levelIndex, literal(lv.index)))
        g.add(Triple(node, HTD.expectedLevel, literal(float(lv.expected))))
        g.add(Triple(node, HTD.observedMean, literal(round(lv.observed_mean, 6))))
        g.add(Triple(node, HTD.withinTolerance, literal(lv.within_tolerance)))
        g.add(Triple(node, HTD.connected, literal(lv.connected)))
    return g


def plot_data_csv(trace: MeasurementTrace, spec: TestSequenceSpec, verdict: Verdict, channel: Optional[str] = None) -> str:
    """Per-sample level vs time: time, observed (pu), expected (pu, blank in transitions), segment index."""
    name = target_channel(trace, spec, channel)
    nominal = spec.nominal
    expected: dict[int, tuple[int, float]] = {}
    if len(verdict.segments) == len(spec.levels):
        for k, (lv, seg) in enumerate(zip(spec.levels, verdict.segments)):
            for i in range(seg.start_index, seg.end_index + 1):
                expected[i] = (k, lv.setpoint)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time", "observed_pu", "expected_pu", "level"])
    for i, (t, v) in enumerate(trace.series(name)):
        k, e = expected.get(i, ("", ""))
        w.writerow([repr(float(t)), repr(v / nominal), "" if e == "" else repr(e), k])
    return buf.getvalue()


__all__ = [
    "APR", "DISCONNECTED", "FAIL", "INCONCLUSIVE", "Level", "LevelResult", "NOR", "PASS", "StepSegment",
    "TestSequenceSpec", "Verdict", "apr_spec", "detect_steps", "evaluate", "median_interval", "nor_spec",
    "plot_data_csv", "spec_for", "target_channel", "verdict_to_rdf", "window_average",
]
