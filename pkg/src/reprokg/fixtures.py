"""Desk-scale fixtures for the two case studies.

* PV-inverter conformity test run at UCD and reproduced at ZHAW: system
  configurations, suite/test files, synthetic NOR/APR logs, and the
  annotation graphs built from them.
* Digital-twin workflow: provenance only, DS1/DS2 -> twin model -> DS3.

Run ``python -m reprokg.fixtures [DIR]`` to regenerate the fixture tree.
Noise uses ``random.Random(seed).gauss``; the seed per trace is recorded in
the generated README.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path
from typing import Optional, Union

import yaml

from . import errors
from .en50549 import NOR, TestSequenceSpec, apr_spec, nor_spec
from .opensvp import (
    AnnotationContext,
    Channel,
    LogRef,
    MeasurementTrace,
    annotate,
    channel_map_text,
    parse_channel_map,
    parse_log,
    parse_suite,
    parse_test,
    sha256_file,
    write_log,
)
from .prov import (
    Activity,
    Agent,
    Entity,
    ExecutionAccount,
    TemplateProcess,
    TemplateVariable,
    WorkflowTemplate,
    account_to_dict,
    template_to_dict,
    template_to_rdf,
    to_prov_rdf,
)
from .rdf.graph import Graph
from .scm import (
    Attribute,
    ConnectionEdge,
    ConnectionPoint,
    EndpointRef,
    SystemConfiguration,
    SystemNode,
    dump_configuration_yaml,
    to_rdf,
)
from .turtle import serialize_turtle
from .vocab import ANNOT

BASE = "http://example.org/lab"
UN = 230.0
PN = 5000.0
NOR_SEED = 50549
APR_SEED = 50550
NOISE = 0.002


# synthetic traces


def generate_synthetic_trace(
    spec: TestSequenceSpec,
    sample_rate: float = 1.0,
    noise: float = 0.0,
    disconnect_at: Optional[float] = None,
    seed: int = 0,
    breaker: bool = True,
    operating_point: float = 1.0,
    start_time: Optional[str] = None,
) -> MeasurementTrace:
    """Piecewise-constant V, I, P, Q (and breaker) channels following the sequence levels.

    The swept quantity (voltage for NOR, active power for APR) steps through
    the levels; the other is held at operating_point (P) or 1.0 (V). After
    disconnect_at every channel reads 0. Noise is additive, in per-unit of
    the respective nominal.
    """
    if not sample_rate > 0:
        raise errors.InvalidSpec("sample rate must be positive")
    if not noise >= 0:
        raise errors.InvalidSpec("noise must be non-negative")
    un = spec.Un or 1.0
    pn = spec.Pn or 1.0
    rng = random.Random(seed)
    bounds = []
    acc = 0.0
    for lv in spec.levels:
        acc += lv.dwell
        bounds.append((acc, lv.setpoint))
    n = int(round(spec.total_duration * sample_rate))
    times, rows = [], []
    k = 0
    for i in range(n):
        t = i / sample_rate
        while k < len(bounds) - 1 and t >= bounds[k][0] - 1e-9:
            k += 1
        level = bounds[k][1]
        v_pu, p_pu = (level, operating_point) if spec.kind == NOR else (1.0, level)
        if noise:
            v_pu += rng.gauss(0.0, noise)
            p_pu += rng.gauss(0.0, noise)
            q_pu = rng.gauss(0.0, noise)
        else:
            q_pu = 0.0
        v, p, q = v_pu * un, p_pu * pn, q_pu * pn
        cur = p / v if v else 0.0
        brk = 1.0
        if disconnect_at is not None and t >= disconnect_at:
            v = cur = p = q = brk = 0.0
        row = [round(v, 4), round(cur, 4), round(p, 4), round(q, 4)]
        if breaker:
            row.append(brk)
        times.append(float(t) if t != int(t) else float(int(t)))
        rows.append(tuple(float(x) + 0.0 for x in row))
    channels = [
        Channel("AC_VRMS", ANNOT.Voltage, "V"),
        Channel("AC_IRMS", ANNOT.Current, "A"),
        Channel("AC_P", ANNOT.ActivePower, "W"),
        Channel("AC_Q", ANNOT.ReactivePower, "var"),
    ]
    if breaker:
        channels.append(Channel("BRK", ANNOT.BreakerState, "1"))
    return MeasurementTrace(channels, times, rows, start_time)


# system configurations


def _inverter_setup(cfg_id: str, label: str, phases: int, operating_point: float) -> SystemConfiguration:
    ac, dc, ict = "ElectricalAC", "ElectricalDC", "ICT"
    systems = [
        SystemNode(
            "inverter",
            "PVInverter",
            "SuT",
            [ConnectionPoint("ac", ac), ConnectionPoint("dc", dc), ConnectionPoint("comm", ict)],
            [
                Attribute("phases", phases),
                Attribute("operatingPoint", operating_point),
                Attribute("ratedPower", PN, "W"),
                Attribute("nominalVoltage", UN, "V"),
            ],
            "PV inverter",
        ),
        SystemNode("gridSimulator", "GridSimulator", "testEquipment", [ConnectionPoint("ac", ac)], [], "AC grid simulator"),
        SystemNode(
            "dcAmplifier",
            "DCAmplifier",
            "testEquipment",
            [ConnectionPoint("dc", dc), ConnectionPoint("ctrl", ict)],
            [],
            "DC amplifier emulating the PV array",
        ),
        SystemNode(
            "rtComputer",
            "RTComputer",
            "infrastructure",
            [ConnectionPoint("eth", ict)],
            [],
            "real-time computer",
        ),
        SystemNode(
            "dataLogger",
            "DataLogger",
            "infrastructure",
            [ConnectionPoint("meas", ict)],
            [],
            "measurement data logger",
        ),
    ]
    E = EndpointRef
    connections = [
        ConnectionEdge("acLink", E("inverter", "ac"), E("gridSimulator", "ac"), ac),
        ConnectionEdge("dcLink", E("dcAmplifier", "dc"), E("inverter", "dc"), dc),
        ConnectionEdge("ctrlLink", E("rtComputer", "eth"), E("dcAmplifier", "ctrl"), ict),
        ConnectionEdge("measLink", E("dataLogger", "meas"), E("inverter", "comm"), ict),
    ]
    return SystemConfiguration(cfg_id, systems, connections, {ac, dc, ict}, True, label)


def ucd_configuration() -> SystemConfiguration:
    return _inverter_setup("ucd-pv-inverter", "UCD PV inverter test setup", 1, 0.62)


def zhaw_configuration() -> SystemConfiguration:
    return _inverter_setup("zhaw-pv-inverter", "ZHAW PV inverter test setup", 3, 0.92)


# OpenSVP-style inputs

SUITE_YAML = """\
suite: en50549-pv-inverter
label: EN 50549-10 conformity tests on a PV inverter
params:
  Un: 230
  Pn: 5000
tests:
  - nor
  - apr
"""

NOR_YAML = """\
test: nor
label: Continuous operating voltage range
script: en50549/normal_operating_range.py
standard: EN 50549-10:2022
params:
  kind: NOR
  dwell: 600
requiredPhenomena: [Voltage, Current, ActivePower, ReactivePower, BreakerState]
"""

APR_YAML = """\
test: apr
label: Active power reduction on set-point
script: en50549/active_power_reduction.py
standard: EN 50549-10:2022
params:
  kind: APR
  dwell: 120
  averagingWindow: 60
requiredPhenomena: [Voltage, Current, ActivePower, ReactivePower, BreakerState]
"""

CONTEXT_YAML = """\
baseIri: http://example.org/lab
organization:
  id: ucd
  label: University College Dublin
datasetId: ucd-inverter
datasetTitle: EN 50549-10 PV inverter tests (synthetic stand-in)
systemConfigId: ucd-pv-inverter
startTimes:
  nor: "2023-05-10T09:00:00Z"
  apr: "2023-05-10T10:00:00Z"
"""


def ucd_traces(breaker: bool = True) -> dict[str, MeasurementTrace]:
    return {
        "nor": generate_synthetic_trace(nor_spec(UN, PN), noise=NOISE, seed=NOR_SEED, breaker=breaker, operating_point=0.62),
        "apr": generate_synthetic_trace(apr_spec(PN, UN), noise=NOISE, seed=APR_SEED, breaker=breaker),
    }


# workflows


def digital_twin_template() -> WorkflowTemplate:
    return WorkflowTemplate(
        "pv-digital-twin",
        processes=[
            TemplateProcess("trainTwin", "train digital twin", ["historicalData", "modelConfig", "code"], ["twinModel"]),
            TemplateProcess("applyTwin", "apply digital twin", ["twinModel", "inputData"], ["enrichedData"]),
        ],
        variables=[
            TemplateVariable("historicalData", "data", "historical PV measurements"),
            TemplateVariable("modelConfig", "parameter", "model configuration"),
            TemplateVariable("code", "data", "training code"),
            TemplateVariable("twinModel", "data", "trained twin model"),
            TemplateVariable("inputData", "data", "input dataset"),
            TemplateVariable("enrichedData", "data", "enriched output dataset"),
        ],
        label="PV digital-twin workflow",
    )


def digital_twin_account() -> ExecutionAccount:
    return ExecutionAccount(
        "pv-digital-twin-run",
        template_id="pv-digital-twin",
        label="PV digital-twin run",
        agents=[
            Agent("researcher", "researcher", "person"),
            Agent("twinSoftware", "digital-twin software", "softwareAgent"),
        ],
        entities=[
            Entity("DS1", "historical PV dataset", "historicalData"),
            Entity("modelConfig", "model configuration", "modelConfig"),
            Entity("code", "training code", "code"),
            Entity("twinModel", "trained twin model", "twinModel", ["DS1", "modelConfig", "code"]),
            Entity("DS2", "input dataset", "inputData"),
            Entity("DS3", "enriched output dataset", "enrichedData", ["DS2", "twinModel"]),
        ],
        activities=[
            Activity(
                "trainTwin", "researcher", "2023-03-01T08:00:00Z", "2023-03-01T12:00:00Z", "trainTwin",
                ["DS1", "modelConfig", "code"], ["twinModel"], "train twin",
            ),
            Activity(
                "applyTwin", "twinSoftware", "2023-03-02T08:00:00Z", "2023-03-02T08:30:00Z", "applyTwin",
                ["twinModel", "DS2"], ["DS3"], "apply twin",
            ),
        ],
    )


def testing_process_template() -> WorkflowTemplate:
    """Generic test workflow: specify, configure lab, execute, evaluate."""
    return WorkflowTemplate(
        "testing-process",
        processes=[
            TemplateProcess("specify", "specify test", ["requirements"], ["testSpec"]),
            TemplateProcess("configureLab", "configure laboratory", ["testSpec"], ["labConfig"]),
            TemplateProcess("executeTest", "execute test", ["testSpec", "labConfig"], ["measurements"]),
            TemplateProcess("evaluate", "evaluate results", ["measurements", "testSpec"], ["verdict"]),
        ],
        variables=[
            TemplateVariable("requirements", "parameter", "test requirements"),
            TemplateVariable("testSpec", "data", "test specification"),
            TemplateVariable("labConfig", "data", "laboratory configuration"),
            TemplateVariable("measurements", "data", "measurement logs"),
            TemplateVariable("verdict", "data", "test verdict"),
        ],
        label="testing process",
    )


def testing_process_account() -> ExecutionAccount:
    return ExecutionAccount(
        "ucd-testing-run",
        template_id="testing-process",
        label="UCD inverter test run",
        agents=[Agent("engineer", "test engineer", "person"), Agent("ucd", "University College Dublin", "organization")],
        entities=[
            Entity("requirements", "EN 50549-10 requirements", "requirements"),
            Entity("testSpec", "inverter test specification", "testSpec", ["requirements"]),
            Entity("labConfig", "UCD laboratory configuration", "labConfig", ["testSpec"]),
            Entity("measurements", "inverter measurement logs", "measurements", ["labConfig"]),
            Entity("verdict", "test verdict", "verdict", ["measurements", "testSpec"]),
        ],
        activities=[
            Activity("specify", "engineer", "2023-05-01T09:00:00Z", "2023-05-01T17:00:00Z", "specify", ["requirements"], ["testSpec"]),
            Activity("configureLab", "engineer", "2023-05-09T09:00:00Z", "2023-05-09T17:00:00Z", "configureLab", ["testSpec"], ["labConfig"]),
            Activity("executeTest", "ucd", "2023-05-10T09:00:00Z", "2023-05-10T10:24:00Z", "executeTest", ["testSpec", "labConfig"], ["measurements"]),
            Activity("evaluate", "engineer", "2023-05-11T09:00:00Z", "2023-05-11T12:00:00Z", "evaluate", ["measurements", "testSpec"], ["verdict"]),
        ],
    )


def workflow_graph(template: WorkflowTemplate, account: ExecutionAccount) -> Graph:
    return template_to_rdf(template, BASE) | to_prov_rdf(account, template, BASE)


# fixture tree

README = """\
# Fixtures

Synthetic stand-ins for the two case studies. Nothing here is laboratory data:
the measured waveforms were never published as tables, so the logs are
generated from the test sequences. Regenerate everything with

    python -m reprokg.fixtures fixtures

## PV-inverter conformity test (UCD, reproduced at ZHAW)

| file | content |
|------|---------|
| `ucd/config.yaml` | UCD test setup: single-phase inverter at operating point 0.62, grid simulator, DC amplifier, RT computer, data logger |
| `zhaw/config.yaml` | ZHAW test setup: same topology, three-phase inverter at 0.92 |
| `ucd/suite.yaml` | suite file (STE) listing the two tests |
| `ucd/tests/nor.yaml`, `ucd/tests/apr.yaml` | test files (TST) for the voltage-range and power-reduction sequences |
| `ucd/logs/nor.csv` | NOR trace, 1 Hz, 1800 rows: 0.85/1.00/1.10 Un for 600 s each, noise seed {nor_seed} |
| `ucd/logs/apr.csv` | APR trace, 1 Hz, 1440 rows: 0.9 to 0.1 Pn then 0.3/0.6/1.0 Pn, 120 s each, noise seed {apr_seed} |
| `ucd/channel-map.yaml` | column to phenomenon/unit binding, including the breaker state |
| `ucd/context.yaml` | organization, dataset id, configuration id, start times |
| `ucd-stripped/` | same test without a breaker-state channel, as in the original UCD logs |
| `golden/ucd-inverter.ttl` | annotation graph of `ucd/` |
| `golden/ucd-stripped.ttl` | annotation graph of `ucd-stripped/`; fails completeness rule R7 |
| `golden/ucd-config.ttl`, `golden/zhaw-config.ttl` | the two configurations as RDF |

Noise: `random.Random(seed).gauss(0, {noise})` per sample, in per-unit, added to
voltage, active power and reactive power, values rounded to 4 decimals.
Nominals: Un = 230 V, Pn = 5000 W.

## Digital-twin workflow

| file | content |
|------|---------|
| `digital-twin/template.yaml` | workflow template: trainTwin, applyTwin |
| `digital-twin/account.yaml` | execution account: DS1, modelConfig and code train the twin; the twin applied to DS2 yields DS3 |
| `digital-twin/ds1.csv` | three-row placeholder series (twin training is out of scope) |
| `golden/digital-twin.ttl` | template plus account as PROV |

## Generic testing process

| file | content |
|------|---------|
| `testing-process/template.yaml` | specify, configure lab, execute test, evaluate |
| `testing-process/account.yaml` | one execution of that template |
| `golden/testing-process.ttl` | template plus account as PROV |
"""

DS1_CSV = "time,irradiance,ac_power\n2023-02-01T12:00:00Z,812.5,3950.0\n2023-02-01T12:15:00Z,820.0,3990.5\n2023-02-01T12:30:00Z,798.25,3902.0\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _dump(doc) -> str:
    return yaml.safe_dump(doc, sort_keys=False, allow_unicode=True)


def annotate_directory(root: Union[str, Path]) -> Graph:
    """Annotation graph of a fixture-style directory (suite, tests/, logs/, channel map, context, config)."""
    root = Path(root)
    suite = parse_suite((root / "suite.yaml").read_text(encoding="utf-8"))
    tests = [parse_test(p.read_text(encoding="utf-8")) for p in sorted((root / "tests").glob("*.yaml"))]
    cmap = parse_channel_map((root / "channel-map.yaml").read_text(encoding="utf-8"))
    traces, files = {}, {}
    for p in sorted((root / "logs").glob("*.csv")):
        traces[p.stem] = parse_log(p.read_text(encoding="utf-8"), cmap)
        files[p.stem] = LogRef(p.relative_to(root).as_posix(), sha256_file(p))
    ctx = AnnotationContext.from_yaml((root / "context.yaml").read_text(encoding="utf-8"))
    g = annotate(suite, tests, traces, ctx, files)
    cfg_path = root / "config.yaml"
    if cfg_path.exists():
        from .scm import load_configuration

        g = g | to_rdf(load_configuration(cfg_path), ctx.base)
    return g


def write_fixture_tree(root: Union[str, Path]) -> list[Path]:
    """Write every fixture file under root; returns the paths written, sorted."""
    root = Path(root)
    written: list[Path] = []

    def put(rel: str, text: str) -> None:
        _write(root / rel, text)
        written.append(root / rel)

    put("README.md", README.format(nor_seed=NOR_SEED, apr_seed=APR_SEED, noise=NOISE))
    for variant, breaker in (("ucd", True), ("ucd-stripped", False)):
        put(f"{variant}/suite.yaml", SUITE_YAML)
        put(f"{variant}/tests/nor.yaml", NOR_YAML)
        put(f"{variant}/tests/apr.yaml", APR_YAML)
        put(f"{variant}/context.yaml", CONTEXT_YAML)
        put(f"{variant}/config.yaml", dump_configuration_yaml(ucd_configuration()))
        traces = ucd_traces(breaker)
        put(f"{variant}/channel-map.yaml", channel_map_text(traces["nor"]))
        for name, trace in traces.items():
            put(f"{variant}/logs/{name}.csv", write_log(trace))
    put("zhaw/config.yaml", dump_configuration_yaml(zhaw_configuration()))

    put("digital-twin/template.yaml", _dump(template_to_dict(digital_twin_template())))
    put("digital-twin/account.yaml", _dump(account_to_dict(digital_twin_account())))
    put("digital-twin/ds1.csv", DS1_CSV)
    put("testing-process/template.yaml", _dump(template_to_dict(testing_process_template())))
    put("testing-process/account.yaml", _dump(account_to_dict(testing_process_account())))

    put("golden/ucd-inverter.ttl", serialize_turtle(annotate_directory(root / "ucd")))
    put("golden/ucd-stripped.ttl", serialize_turtle(annotate_directory(root / "ucd-stripped")))
    put("golden/ucd-config.ttl", serialize_turtle(to_rdf(ucd_configuration(), BASE)))
    put("golden/zhaw-config.ttl", serialize_turtle(to_rdf(zhaw_configuration(), BASE)))
    put("golden/digital-twin.ttl", serialize_turtle(workflow_graph(digital_twin_template(), digital_twin_account())))
    put("golden/testing-process.ttl", serialize_turtle(workflow_graph(testing_process_template(), testing_process_account())))
    return sorted(written)


def main(argv: Optional[list[str]] = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    root = Path(args[0]) if args else Path("fixtures")
    for p in write_fixture_tree(root):
        print(p)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
