"""OpenSVP-style suite/test files, measurement logs, and the annotation graph built from them.

Suite and test files use a simplified YAML schema (see docs/ste-tst-schema.md)
rather than the native OpenSVP formats. Logs are CSV with a header row; a
channel map binds every data column to a phenomenon and a unit.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field
from datetime import timedelta
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union
from urllib.parse import quote

import yaml

from . import errors
from .prov import format_timestamp, parse_timestamp, timestamp_literal
from .rdf.graph import Graph, expand
from .rdf.terms import IRI, PROV, RDF_TYPE, RDFS_LABEL, Literal, Triple, is_valid_iri, literal
from .scm import config_iri
from .vocab import ANNOT, HTD, PREFIXES, PROVX, UNIT

ParamValue = Union[int, float, str, bool]


@dataclass
class SuiteConfig:
    name: str
    test_refs: list[str] = field(default_factory=list)
    nested_suite_refs: list[str] = field(default_factory=list)
    params: dict[str, ParamValue] = field(default_factory=dict)
    label: str = ""


@dataclass
class TestConfig:
    __test__ = False  # not a pytest class

    name: str
    script_ref: str = ""
    params: dict[str, ParamValue] = field(default_factory=dict)
    standard_ref: Optional[str] = None
    required_phenomena: list[IRI] = field(default_factory=list)
    label: str = ""


@dataclass(frozen=True)
class Channel:
    name: str
    phenomenon: IRI
    unit: str


@dataclass
class MeasurementTrace:
    """Channel series sharing one time axis (seconds); start_time anchors offset zero when known."""

    channels: list[Channel]
    times: list[float]
    rows: list[tuple[float, ...]]
    start_time: Optional[str] = None
    time_column: str = "time"

    def __post_init__(self):
        for i, row in enumerate(self.rows, start=1):
            if len(row) != len(self.channels):
                raise errors.ArityMismatch(i, len(self.channels), len(row))
        if len(self.rows) != len(self.times):
            raise errors.InputError("trace has different numbers of timestamps and rows")
        for i in range(1, len(self.times)):
            if not self.times[i] > self.times[i - 1]:
                raise errors.NonMonotoneTimestamps(i + 1)

    def __len__(self) -> int:
        return len(self.times)

    def channel(self, name: str) -> Channel:
        for ch in self.channels:
            if ch.name == name:
                return ch
        raise errors.ChannelMissing(f"trace has no channel {name!r}")

    def has_channel(self, name: str) -> bool:
        return any(ch.name == name for ch in self.channels)

    def channel_for(self, phenomenon: IRI) -> Optional[Channel]:
        return next((ch for ch in self.channels if ch.phenomenon == phenomenon), None)

    def column(self, name: str) -> list[float]:
        idx = self.channels.index(self.channel(name))
        return [row[idx] for row in self.rows]

    def series(self, name: str) -> list[tuple[float, float]]:
        return list(zip(self.times, self.column(name)))

    @property
    def duration(self) -> float:
        return self.times[-1] - self.times[0] if self.times else 0.0


# config files


def _load_yaml(text: str, what: str) -> dict:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line, col = (mark.line + 1, mark.column + 1) if mark is not None else (1, 1)
        raise errors.SyntaxError(f"{what}: {getattr(exc, 'problem', None) or exc}", line, col) from exc
    if not isinstance(doc, dict):
        raise errors.SyntaxError(f"{what}: expected a mapping at top level")
    return doc


def _name_list(doc: dict, key: str, what: str) -> list[str]:
    raw = doc.get(key) or []
    if not isinstance(raw, list) or not all(isinstance(x, str) and x for x in raw):
        raise errors.InputError(f"{what}: {key!r} must be a list of names")
    return list(raw)


def _params(doc: dict, what: str) -> dict[str, ParamValue]:
    raw = doc.get("params") or {}
    if not isinstance(raw, dict):
        raise errors.InputError(f"{what}: 'params' must be a mapping")
    out = {}
    for k, v in raw.items():
        if not isinstance(v, (int, float, str, bool)) or isinstance(v, float) and not math.isfinite(v):
            raise errors.InputError(f"{what}: parameter {k!r} must be a number, text or boolean")
        out[str(k)] = v
    return out


def parse_suite(text: str) -> SuiteConfig:
    doc = _load_yaml(text, "suite")
    name = doc.get("suite")
    if not isinstance(name, str) or not name:
        raise errors.InputError("suite: missing 'suite' name")
    suite = SuiteConfig(
        name=name,
        test_refs=_name_list(doc, "tests", "suite"),
        nested_suite_refs=_name_list(doc, "suites", "suite"),
        params=_params(doc, "suite"),
        label=str(doc.get("label") or ""),
    )
    if name in suite.nested_suite_refs:
        raise errors.CyclicSuite(f"suite {name!r} includes itself")
    if len(set(suite.test_refs)) != len(suite.test_refs):
        raise errors.InputError(f"suite {name!r} lists a test twice")
    return suite


def resolve_phenomenon(name: str, prefixes: Optional[Mapping[str, str]] = None) -> IRI:
    """Bare names resolve in the annotation namespace; prefixed names and IRIs pass through."""
    if is_valid_iri(name) and "://" in name:
        return IRI(name)
    if ":" in name:
        return IRI(expand(dict(prefixes or PREFIXES), name))
    return ANNOT.term(name)


def parse_test(text: str) -> TestConfig:
    doc = _load_yaml(text, "test")
    name = doc.get("test")
    if not isinstance(name, str) or not name:
        raise errors.InputError("test: missing 'test' name")
    standard = doc.get("standard")
    return TestConfig(
        name=name,
        script_ref=str(doc.get("script") or ""),
        params=_params(doc, f"test {name!r}"),
        standard_ref=str(standard) if standard is not None else None,
        required_phenomena=[resolve_phenomenon(p) for p in _name_list(doc, "requiredPhenomena", f"test {name!r}")],
        label=str(doc.get("label") or ""),
    )


def flatten_suite(suite: SuiteConfig, suites: Optional[Mapping[str, SuiteConfig]] = None) -> list[str]:
    """Test names reachable from the suite, depth first, each once; cycles raise CyclicSuite."""
    suites = dict(suites or {})
    out: list[str] = []

    def walk(s: SuiteConfig, path: tuple[str, ...]):
        for t in s.test_refs:
            if t not in out:
                out.append(t)
        for ref in s.nested_suite_refs:
            if ref in path:
                raise errors.CyclicSuite(" -> ".join((*path, ref)))
            if ref not in suites:
                raise errors.UnresolvedReference(f"suite {s.name!r} includes unknown suite {ref!r}")
            walk(suites[ref], (*path, ref))

    walk(suite, (suite.name,))
    return out


# logs


@dataclass(frozen=True)
class ChannelMap:
    channels: dict[str, tuple[IRI, str]]
    time_column: str = "time"
    start_time: Optional[str] = None


def parse_channel_map(text: str) -> ChannelMap:
    doc = _load_yaml(text, "channel map")
    raw = doc.get("channels")
    if not isinstance(raw, dict) or not raw:
        raise errors.InputError("channel map: 'channels' must be a non-empty mapping")
    channels = {}
    for col, spec in raw.items():
        if not isinstance(spec, dict) or "phenomenon" not in spec or "unit" not in spec:
            raise errors.InputError(f"channel map: column {col!r} needs 'phenomenon' and 'unit'")
        channels[str(col)] = (resolve_phenomenon(str(spec["phenomenon"])), str(spec["unit"]))
    start = doc.get("start")
    if start is not None:
        start = format_timestamp(parse_timestamp(str(start)))
    return ChannelMap(channels, str(doc.get("time", "time")), start)


def _as_channel_map(channel_map) -> ChannelMap:
    if isinstance(channel_map, ChannelMap):
        return channel_map
    if isinstance(channel_map, str):
        return parse_channel_map(channel_map)
    if isinstance(channel_map, Mapping):
        return ChannelMap({k: (v[0] if isinstance(v[0], IRI) else resolve_phenomenon(v[0]), v[1]) for k, v in channel_map.items()})
    raise TypeError("channel map must be a ChannelMap, YAML text, or a mapping")


def _number(text: str, row: int, column: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise errors.NonNumericValue(row, column, text) from None
    if not math.isfinite(x):
        raise errors.NonNumericValue(row, column, text)
    return x


def parse_log(csv_text: str, channel_map) -> MeasurementTrace:
    """Rows are numbered from 1 (first data row) in every error."""
    cmap = _as_channel_map(channel_map)
    reader = csv.reader(io.StringIO(csv_text.lstrip("﻿")))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise errors.EmptySeries("log has no header row") from None
    if cmap.time_column not in header:
        raise errors.ChannelMissing(f"log has no time column {cmap.time_column!r}")
    tcol = header.index(cmap.time_column)
    data_cols = [(i, h) for i, h in enumerate(header) if i != tcol]
    for _, h in data_cols:
        if h not in cmap.channels:
            raise errors.UnmappedColumn(h)
    channels = [Channel(h, *cmap.channels[h]) for _, h in data_cols]

    times: list[float] = []
    rows: list[tuple[float, ...]] = []
    start_dt = None
    n = 0
    for raw in reader:
        if not raw or all(not c.strip() for c in raw):
            continue
        n += 1
        if len(raw) != len(header):
            raise errors.ArityMismatch(n, len(header), len(raw))
        stamp = raw[tcol].strip()
        try:
            t = float(stamp)
        except ValueError:
            try:
                dt = parse_timestamp(stamp)
            except errors.InvalidTimestamp:
                raise errors.NonNumericValue(n, cmap.time_column, stamp) from None
            if start_dt is None:
                if times:
                    raise errors.NonNumericValue(n, cmap.time_column, stamp)
                start_dt = dt
            t = (dt - start_dt).total_seconds()
        else:
            if start_dt is not None or not math.isfinite(t):
                raise errors.NonNumericValue(n, cmap.time_column, stamp)
        if times and not t > times[-1]:
            raise errors.NonMonotoneTimestamps(n)
        times.append(t)
        rows.append(tuple(_number(raw[i].strip(), n, h) for i, h in data_cols))
    start = format_timestamp(start_dt) if start_dt is not None else cmap.start_time
    return MeasurementTrace(channels, times, rows, start, cmap.time_column)


def _num_text(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def write_log(trace: MeasurementTrace) -> str:
    """CSV text with seconds offsets; values are written at full float precision."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([trace.time_column, *(ch.name for ch in trace.channels)])
    for t, row in zip(trace.times, trace.rows):
        w.writerow([_num_text(t), *(_num_text(v) for v in row)])
    return buf.getvalue()


def channel_map_text(trace: MeasurementTrace) -> str:
    """Channel map (YAML) that re-reads write_log output into the same trace."""
    doc: dict = {"time": trace.time_column}
    if trace.start_time:
        doc["start"] = trace.start_time
    doc["channels"] = {ch.name: {"phenomenon": ch.phenomenon.value, "unit": ch.unit} for ch in trace.channels}
    return yaml.safe_dump(doc, sort_keys=False, allow_unicode=True)


def sha256_file(path: Union[str, Path]) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# annotation


@dataclass
class AnnotationContext:
    organization: str
    dataset_id: str
    system_config_id: Optional[str] = None
    base: str = "http://example.org/lab"
    organization_label: str = ""
    dataset_title: str = ""
    start_times: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: Mapping, default_base: Optional[str] = None) -> "AnnotationContext":
        org = doc.get("organization")
        if isinstance(org, Mapping):
            org_id, org_label = org.get("id"), str(org.get("label") or "")
        else:
            org_id, org_label = org, ""
        if not org_id or not doc.get("datasetId"):
            raise errors.InputError("context needs 'organization' and 'datasetId'")
        base = str(doc.get("baseIri") or default_base or cls.base)
        if not is_valid_iri(base):
            raise errors.InvalidIri(f"base IRI {base!r} is not absolute")
        return cls(
            organization=str(org_id),
            dataset_id=str(doc["datasetId"]),
            system_config_id=doc.get("systemConfigId"),
            base=base,
            organization_label=org_label,
            dataset_title=str(doc.get("datasetTitle") or ""),
            start_times={str(k): str(v) for k, v in (doc.get("startTimes") or {}).items()},
        )

    @classmethod
    def from_yaml(cls, text: str, default_base: Optional[str] = None) -> "AnnotationContext":
        return cls.from_dict(_load_yaml(text, "context"), default_base)


@dataclass(frozen=True)
class LogRef:
    path: str
    sha256: str


def _seg(text: str) -> str:
    return quote(str(text), safe="")


class _Minter:
    def __init__(self, base: str):
        self.root = base.rstrip("/")

    def __call__(self, *parts: str) -> IRI:
        return IRI("/".join((self.root, *parts)))


def unit_iri(unit: str) -> IRI:
    return UNIT.term(_seg(unit) if unit else "one")


def annotate(
    suite: SuiteConfig,
    tests: Sequence[TestConfig],
    traces: Mapping[str, MeasurementTrace],
    context: Union[AnnotationContext, Mapping],
    files: Optional[Mapping[str, LogRef]] = None,
    suites: Optional[Mapping[str, SuiteConfig]] = None,
) -> Graph:
    """Annotation graph for one dataset: organization, dataset, logs, measurements, and HTD test nodes.

    Log files are numbered 1..n in suite order of the tests that own a trace.
    """
    ctx = context if isinstance(context, AnnotationContext) else AnnotationContext.from_dict(context)
    files = dict(files or {})
    by_name = {}
    for t in tests:
        if t.name in by_name:
            raise errors.InputError(f"test {t.name!r} defined twice")
        by_name[t.name] = t
    order = flatten_suite(suite, suites)
    for ref in order:
        if ref not in by_name:
            raise errors.UnresolvedReference(f"suite {suite.name!r} references unknown test {ref!r}")
    for name in traces:
        if name not in order:
            raise errors.UnresolvedReference(f"trace for {name!r} matches no test in suite {suite.name!r}")

    mint = _Minter(ctx.base)
    g = Graph(prefixes={k: PREFIXES[k] for k in ("rdf", "rdfs", "xsd", "prov", "provx", "htd", "annot", "unit", "scm")})
    add = g.add

    org = mint("org", _seg(ctx.organization))
    ds = mint("dataset", _seg(ctx.dataset_id))
    add(Triple(org, RDF_TYPE, ANNOT.Organization))
    add(Triple(org, RDF_TYPE, PROV.Agent))
    add(Triple(org, PROVX.localId, Literal(ctx.organization)))
    add(Triple(org, PROVX.agentKind, Literal("organization")))
    if ctx.organization_label:
        add(Triple(org, RDFS_LABEL, Literal(ctx.organization_label)))
    add(Triple(org, ANNOT.owns, ds))
    add(Triple(org, ANNOT.provides, ds))
    add(Triple(ds, RDF_TYPE, ANNOT.Dataset))
    add(Triple(ds, RDF_TYPE, PROV.Entity))
    add(Triple(ds, PROVX.localId, Literal(ctx.dataset_id)))
    if ctx.dataset_title:
        add(Triple(ds, RDFS_LABEL, Literal(ctx.dataset_title)))
    if not order:
        return g

    case = mint("testcase", _seg(suite.name))
    add(Triple(case, RDF_TYPE, HTD.TestCase))
    add(Triple(case, PROVX.localId, Literal(suite.name)))
    if suite.label:
        add(Triple(case, RDFS_LABEL, Literal(suite.label)))
    config = config_iri(ctx.base, ctx.system_config_id) if ctx.system_config_id else None

    campaign = mint("execution", _seg(ctx.dataset_id))
    add(Triple(campaign, RDF_TYPE, PROV.Activity))
    add(Triple(campaign, PROVX.localId, Literal(ctx.dataset_id)))
    add(Triple(campaign, PROV.wasAssociatedWith, org))
    add(Triple(ds, PROV.wasGeneratedBy, campaign))
    spans = []

    log_no = 0
    for name in order:
        test = by_name[name]
        spec = mint("testspec", _seg(name))
        add(Triple(case, HTD.hasSpecification, spec))
        add(Triple(spec, RDF_TYPE, HTD.TestSpecification))
        add(Triple(spec, PROVX.localId, Literal(name)))
        if test.label:
            add(Triple(spec, RDFS_LABEL, Literal(test.label)))
        if test.script_ref:
            add(Triple(spec, HTD.scriptRef, Literal(test.script_ref)))
        if test.standard_ref:
            add(Triple(spec, HTD.conformsToStandard, Literal(test.standard_ref)))
        params = {**suite.params, **test.params}
        for pname in sorted(params):
            p = IRI(f"{spec.value}/param/{_seg(pname)}")
            add(Triple(spec, HTD.hasParameter, p))
            add(Triple(p, RDF_TYPE, HTD.Parameter))
            add(Triple(p, HTD.parameterName, Literal(pname)))
            add(Triple(p, HTD.parameterValue, literal(params[pname])))
        for ph in test.required_phenomena:
            add(Triple(spec, HTD.requiresPhenomenon, ph))
            add(Triple(ph, RDF_TYPE, ANNOT.Phenomenon))

        trace = traces.get(name)
        if trace is None:
            continue
        log_no += 1
        ex = mint("execution", _seg(ctx.dataset_id), _seg(name))
        add(Triple(ex, RDF_TYPE, HTD.TestExecution))
        add(Triple(ex, RDF_TYPE, PROV.Activity))
        add(Triple(ex, PROVX.localId, Literal(f"{ctx.dataset_id}/{name}")))
        add(Triple(ex, HTD.executesSpecification, spec))
        add(Triple(ex, PROV.wasAssociatedWith, org))
        if config is not None:
            add(Triple(ex, HTD.usesSystemConfiguration, config))
        start = ctx.start_times.get(name) or trace.start_time
        if start and trace.times:
            t0 = parse_timestamp(start)
            begin = t0 + timedelta(seconds=trace.times[0]) if trace.start_time is None else t0
            end = begin + timedelta(seconds=trace.duration)
            add(Triple(ex, PROV.startedAtTime, timestamp_literal(begin)))
            add(Triple(ex, PROV.endedAtTime, timestamp_literal(end)))
            spans.append((begin, end))

        log = mint("dataset", _seg(ctx.dataset_id), "log", str(log_no))
        add(Triple(ds, ANNOT.containsLogFile, log))
        add(Triple(log, RDF_TYPE, ANNOT.LogFile))
        add(Triple(log, RDF_TYPE, PROV.Entity))
        add(Triple(log, PROV.wasGeneratedBy, ex))
        ref = files.get(name)
        if ref is not None:
            add(Triple(log, ANNOT.filePath, Literal(ref.path)))
            add(Triple(log, ANNOT.sha256, Literal(ref.sha256)))
        for ch in trace.channels:
            m = mint("measurement", _seg(ctx.dataset_id), "log", str(log_no), _seg(ch.name))
            add(Triple(log, ANNOT.storesMeasurement, m))
            add(Triple(m, RDF_TYPE, ANNOT.Measurement))
            add(Triple(m, ANNOT.channelName, Literal(ch.name)))
            add(Triple(m, ANNOT.recordsPhenomenon, ch.phenomenon))
            add(Triple(ch.phenomenon, RDF_TYPE, ANNOT.Phenomenon))
            u = unit_iri(ch.unit)
            add(Triple(m, ANNOT.hasUnit, u))
            add(Triple(u, RDF_TYPE, ANNOT.Unit))
            add(Triple(u, ANNOT.unitSymbol, Literal(ch.unit)))
            add(Triple(m, ANNOT.sampleCount, literal(len(trace))))
            if start and trace.times:
                add(Triple(m, ANNOT.hasTimestamp, timestamp_literal(spans[-1][0])))

    if spans:
        add(Triple(campaign, PROV.startedAtTime, timestamp_literal(min(s for s, _ in spans))))
        add(Triple(campaign, PROV.endedAtTime, timestamp_literal(max(e for _, e in spans))))
    return g


__all__ = [
    "AnnotationContext", "Channel", "ChannelMap", "LogRef", "MeasurementTrace", "SuiteConfig", "TestConfig",
    "annotate", "channel_map_text", "flatten_suite", "parse_channel_map", "parse_log", "parse_suite",
    "parse_test", "resolve_phenomenon", "sha256_file", "unit_iri", "write_log",
]
