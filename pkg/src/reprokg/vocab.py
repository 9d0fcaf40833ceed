"""Ontology viewpoints as term constants, declaration graphs and shape rules.

Four vocabularies are provided:

* ``htd``   - test description layers (test case, specification, experiment);
* ``scm``   - multi-domain system configuration topology;
* ``provx`` - the PROV core subset plus a workflow-template extension;
* ``annot`` - dataset / log file / measurement annotation model.

HTD and SCM have no published namespace, so all project namespaces are minted
under :data:`PROJECT_BASE`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import InconsistentVocabulary
from .rdf.graph import Graph
from .rdf.terms import (
    OWL,
    OWL_NS,
    PROV,
    RDF_NS,
    RDF_TYPE,
    RDFS,
    RDFS_LABEL,
    RDFS_NS,
    XSD,
    XSD_BOOLEAN,
    XSD_DATETIME,
    XSD_DECIMAL,
    XSD_INTEGER,
    XSD_STRING,
    IRI,
    Literal,
    Namespace,
    Triple,
)
from .shapes import DatatypeIs, MaxCount, MinCount, ShapeRule, ValueIn

PROJECT_BASE = "http://example.org/cpes-repro/ns/"

HTD = Namespace(PROJECT_BASE + "htd#")
SCM = Namespace(PROJECT_BASE + "scm#")
PROVX = Namespace(PROJECT_BASE + "provx#")
ANNOT = Namespace(PROJECT_BASE + "annot#")
UNIT = Namespace(PROJECT_BASE + "unit#")

PREFIXES = {
    "rdf": RDF_NS,
    "rdfs": RDFS_NS,
    "owl": OWL_NS,
    "xsd": XSD,
    "prov": str(PROV),
    "htd": str(HTD),
    "scm": str(SCM),
    "provx": str(PROVX),
    "annot": str(ANNOT),
    "unit": str(UNIT),
}

RDFS_LITERAL = RDFS_NS + "Literal"
OWL_THING = OWL_NS + "Thing"


@dataclass(frozen=True)
class ClassDecl:
    iri: str
    label: str
    comment: str = ""


@dataclass(frozen=True)
class PropertyDecl:
    iri: str
    domain: str
    range: str
    label: str

    @property
    def is_datatype_property(self) -> bool:
        return _is_datatype(self.range)


@dataclass(frozen=True)
class Individual:
    iri: str
    type: str
    label: str


@dataclass
class Vocabulary:
    name: str
    namespace: str
    classes: list[ClassDecl] = field(default_factory=list)
    properties: list[PropertyDecl] = field(default_factory=list)
    individuals: list[Individual] = field(default_factory=list)
    # classes declared by other vocabularies that domains/ranges may name
    external: frozenset = frozenset()
    prefixes: dict = field(default_factory=dict)

    def class_iris(self) -> set[str]:
        return {c.iri for c in self.classes}

    def term(self, local: str) -> IRI:
        iri = self.namespace + local
        for decl in (*self.classes, *self.properties, *self.individuals):
            if decl.iri == iri:
                return IRI(iri)
        raise KeyError(f"{local!r} is not declared in the {self.name} vocabulary")

    def local_names(self, kind: str = "classes") -> list[str]:
        decls = getattr(self, kind)
        return [_local(d.iri) for d in decls]

    def check(self) -> None:
        """Raise InconsistentVocabulary on duplicate names or dangling domain/range."""
        seen: set[str] = set()
        for decl in (*self.classes, *self.properties, *self.individuals):
            if decl.iri in seen:
                raise InconsistentVocabulary(f"{self.name}: duplicate declaration of {decl.iri}")
            seen.add(decl.iri)
        known = self.class_iris() | set(self.external) | {OWL_THING}
        for p in self.properties:
            if p.domain not in known:
                raise InconsistentVocabulary(f"{self.name}: {p.iri} has undeclared domain {p.domain}")
            if p.range not in known and not _is_datatype(p.range):
                raise InconsistentVocabulary(f"{self.name}: {p.iri} has undeclared range {p.range}")
        for ind in self.individuals:
            if ind.type not in known:
                raise InconsistentVocabulary(f"{self.name}: individual {ind.iri} has undeclared type {ind.type}")


def _local(iri: str) -> str:
    for sep in ("#", "/"):
        if sep in iri:
            iri = iri.rsplit(sep, 1)[1]
    return iri


def _is_datatype(iri: str) -> bool:
    return iri.startswith(XSD) or iri in (RDFS_LITERAL, RDF_NS + "langString")


def emit_vocabulary(v: Vocabulary) -> Graph:
    """Declaration graph: 2 triples per class and individual, 4 per property."""
    v.check()
    g = Graph(prefixes={"rdf": RDF_NS, "rdfs": RDFS_NS, "owl": OWL_NS, "xsd": XSD, **v.prefixes})
    for c in v.classes:
        g.add(Triple(IRI(c.iri), RDF_TYPE, OWL.Class))
        g.add(Triple(IRI(c.iri), RDFS_LABEL, Literal(c.label)))
    for p in v.properties:
        kind = OWL.DatatypeProperty if p.is_datatype_property else OWL.ObjectProperty
        g.add(Triple(IRI(p.iri), RDF_TYPE, kind))
        g.add(Triple(IRI(p.iri), RDFS.domain, IRI(p.domain)))
        g.add(Triple(IRI(p.iri), RDFS.range, IRI(p.range)))
        g.add(Triple(IRI(p.iri), RDFS_LABEL, Literal(p.label)))
    for ind in v.individuals:
        g.add(Triple(IRI(ind.iri), RDF_TYPE, IRI(ind.type)))
        g.add(Triple(IRI(ind.iri), RDFS_LABEL, Literal(ind.label)))
    return g


def _split_camel(name: str) -> str:
    out = []
    for i, ch in enumerate(name):
        if ch.isupper() and i and (not name[i - 1].isupper() or (i + 1 < len(name) and name[i + 1].islower())):
            out.append(" ")
        out.append(ch)
    return "".join(out).lower() if not name.isupper() else name


def _classes(ns: Namespace, *names: str, comments: Optional[dict] = None) -> list[ClassDecl]:
    comments = comments or {}
    return [ClassDecl(str(ns) + n, _split_camel(n), comments.get(n, "")) for n in names]


def _prop(ns: Namespace, name: str, domain: str, range_: str) -> PropertyDecl:
    return PropertyDecl(str(ns) + name, str(domain), str(range_), _split_camel(name))


# vocabularies


def htd_vocabulary() -> Vocabulary:
    """Test description layers.

    Test design (case, specification, criteria) never links directly to lab
    infrastructure; only executions and experiment specifications do.
    """
    h = HTD
    classes = _classes(
        h,
        "TestCase", "TestSpecification", "ExperimentSpecification", "ObjectUnderInvestigation",
        "SystemUnderTest", "FunctionUnderTest", "PurposeOfInvestigation", "TestCriteria", "TestSystem",
        "TestExecution", "Parameter", "Verdict", "LevelResult",
    )
    hs = lambda n: str(h) + n  # noqa: E731
    props = [
        _prop(h, "hasSpecification", hs("TestCase"), hs("TestSpecification")),
        _prop(h, "hasExperiment", hs("TestSpecification"), hs("ExperimentSpecification")),
        _prop(h, "investigates", hs("TestCase"), hs("ObjectUnderInvestigation")),
        _prop(h, "hasPurpose", hs("TestCase"), hs("PurposeOfInvestigation")),
        _prop(h, "hasSystemUnderTest", hs("TestCase"), hs("SystemUnderTest")),
        _prop(h, "hasFunctionUnderTest", hs("TestCase"), hs("FunctionUnderTest")),
        _prop(h, "appliesCriteria", hs("TestSpecification"), hs("TestCriteria")),
        _prop(h, "conformsToStandard", hs("TestSpecification"), XSD_STRING),
        _prop(h, "scriptRef", hs("TestSpecification"), XSD_STRING),
        _prop(h, "hasParameter", hs("TestSpecification"), hs("Parameter")),
        _prop(h, "parameterName", hs("Parameter"), XSD_STRING),
        _prop(h, "parameterValue", hs("Parameter"), RDFS_LITERAL),
        _prop(h, "requiresPhenomenon", hs("TestSpecification"), str(ANNOT) + "Phenomenon"),
        _prop(h, "realizedOn", hs("ExperimentSpecification"), hs("TestSystem")),
        _prop(h, "executesSpecification", hs("TestExecution"), hs("TestSpecification")),
        _prop(h, "usesSystemConfiguration", hs("TestExecution"), str(SCM) + "SystemConfiguration"),
        _prop(h, "hasVerdict", hs("TestExecution"), hs("Verdict")),
        _prop(h, "evaluatedAgainst", hs("Verdict"), hs("TestSpecification")),
        _prop(h, "outcome", hs("Verdict"), XSD_STRING),
        _prop(h, "reason", hs("Verdict"), XSD_STRING),
        _prop(h, "hasLevelResult", hs("Verdict"), hs("LevelResult")),
        _prop(h, "levelIndex", hs("LevelResult"), XSD_INTEGER),
        _prop(h, "expectedLevel", hs("LevelResult"), XSD_DECIMAL),
        _prop(h, "observedMean", hs("LevelResult"), XSD_DECIMAL),
        _prop(h, "withinTolerance", hs("LevelResult"), XSD_BOOLEAN),
        _prop(h, "connected", hs("LevelResult"), XSD_BOOLEAN),
    ]
    return Vocabulary(
        "htd",
        str(h),
        classes,
        props,
        external=frozenset({str(ANNOT) + "Phenomenon", str(SCM) + "SystemConfiguration"}),
        prefixes={"htd": str(h), "annot": str(ANNOT), "scm": str(SCM)},
    )


DOMAINS = ("ElectricalAC", "ElectricalDC", "ICT")
SYSTEM_TYPES = (
    "PVSystem", "PVInverter", "Switchboard", "ACPowerGrid", "GridSimulator", "DCAmplifier",
    "RTComputer", "DataLogger", "Sensor", "Busbar", "Network",
)
ROLES = ("SuT", "TestEquipment", "Infrastructure")


def scm_vocabulary() -> Vocabulary:
    s = SCM
    ss = lambda n: str(s) + n  # noqa: E731
    classes = _classes(
        s,
        "System", "Component", "ConnectionPoint", "Connection", "Domain", "Attribute",
        "SystemConfiguration", "SystemType", "Role",
    )
    props = [
        _prop(s, "hasSystem", ss("SystemConfiguration"), ss("System")),
        _prop(s, "hasConnection", ss("SystemConfiguration"), ss("Connection")),
        _prop(s, "usesDomain", ss("SystemConfiguration"), ss("Domain")),
        _prop(s, "isTestSetup", ss("SystemConfiguration"), XSD_BOOLEAN),
        _prop(s, "hasSubsystem", ss("System"), ss("System")),
        _prop(s, "hasComponent", ss("System"), ss("Component")),
        _prop(s, "hasConnectionPoint", ss("System"), ss("ConnectionPoint")),
        _prop(s, "connects", ss("Connection"), ss("ConnectionPoint")),
        _prop(s, "inDomain", ss("ConnectionPoint"), ss("Domain")),
        _prop(s, "carriesDomain", ss("Connection"), ss("Domain")),
        _prop(s, "hasAttribute", ss("System"), ss("Attribute")),
        _prop(s, "hasType", ss("System"), ss("SystemType")),
        _prop(s, "hasRole", ss("System"), ss("Role")),
        _prop(s, "localId", OWL_THING, XSD_STRING),
        _prop(s, "attributeName", ss("Attribute"), XSD_STRING),
        _prop(s, "attributeValue", ss("Attribute"), RDFS_LITERAL),
        _prop(s, "attributeUnit", ss("Attribute"), XSD_STRING),
    ]
    individuals = (
        [Individual(ss(d), ss("Domain"), _split_camel(d) if d != "ICT" else "ICT") for d in DOMAINS]
        + [Individual(ss(t), ss("SystemType"), _split_camel(t)) for t in SYSTEM_TYPES]
        + [Individual(ss(r), ss("Role"), {"SuT": "system under test"}.get(r, _split_camel(r))) for r in ROLES]
    )
    return Vocabulary("scm", str(s), classes, props, individuals, prefixes={"scm": str(s)})


PHENOMENA = ("Voltage", "Current", "ActivePower", "ReactivePower")


def prov_vocabulary() -> Vocabulary:
    p = PROV
    ps = lambda n: str(p) + n  # noqa: E731
    x = PROVX
    xs = lambda n: str(x) + n  # noqa: E731
    classes = _classes(p, "Entity", "Activity", "Agent") + _classes(
        x, "WorkflowTemplate", "TemplateProcess", "TemplateVariable", "ParameterVariable", "DataVariable",
        "WorkflowExecutionAccount",
    )
    props = [
        _prop(p, "wasGeneratedBy", ps("Entity"), ps("Activity")),
        _prop(p, "used", ps("Activity"), ps("Entity")),
        _prop(p, "wasAssociatedWith", ps("Activity"), ps("Agent")),
        _prop(p, "wasDerivedFrom", ps("Entity"), ps("Entity")),
        _prop(p, "wasAttributedTo", ps("Entity"), ps("Agent")),
        _prop(p, "startedAtTime", ps("Activity"), XSD_DATETIME),
        _prop(p, "endedAtTime", ps("Activity"), XSD_DATETIME),
        _prop(x, "correspondsToTemplate", xs("WorkflowExecutionAccount"), xs("WorkflowTemplate")),
        _prop(x, "correspondsToTemplateProcess", ps("Activity"), xs("TemplateProcess")),
        _prop(x, "correspondsToVariable", ps("Entity"), xs("TemplateVariable")),
        _prop(x, "account", ps("Activity"), xs("WorkflowExecutionAccount")),
        _prop(x, "isStepOfTemplate", xs("TemplateProcess"), xs("WorkflowTemplate")),
        _prop(x, "isVariableOfTemplate", xs("TemplateVariable"), xs("WorkflowTemplate")),
        _prop(x, "consumesVariable", xs("TemplateProcess"), xs("TemplateVariable")),
        _prop(x, "producesVariable", xs("TemplateProcess"), xs("TemplateVariable")),
        _prop(x, "stepIndex", xs("TemplateProcess"), XSD_INTEGER),
        _prop(x, "agentKind", ps("Agent"), XSD_STRING),
        _prop(x, "localId", OWL_THING, XSD_STRING),
    ]
    return Vocabulary("provx", str(x), classes, props, prefixes={"prov": str(p), "provx": str(x)})


def annotation_vocabulary() -> Vocabulary:
    a = ANNOT
    as_ = lambda n: str(a) + n  # noqa: E731
    classes = _classes(a, "Organization", "Dataset", "LogFile", "Measurement", "Phenomenon", "Unit")
    props = [
        _prop(a, "owns", as_("Organization"), as_("Dataset")),
        _prop(a, "provides", as_("Organization"), as_("Dataset")),
        _prop(a, "containsLogFile", as_("Dataset"), as_("LogFile")),
        _prop(a, "storesMeasurement", as_("LogFile"), as_("Measurement")),
        _prop(a, "recordsPhenomenon", as_("Measurement"), as_("Phenomenon")),
        _prop(a, "hasUnit", as_("Measurement"), as_("Unit")),
        _prop(a, "hasTimestamp", as_("Measurement"), XSD_DATETIME),
        _prop(a, "hasValue", as_("Measurement"), XSD_DECIMAL),
        _prop(a, "channelName", as_("Measurement"), XSD_STRING),
        _prop(a, "sampleCount", as_("Measurement"), XSD_INTEGER),
        _prop(a, "filePath", as_("LogFile"), XSD_STRING),
        _prop(a, "sha256", as_("LogFile"), XSD_STRING),
        _prop(a, "unitSymbol", as_("Unit"), XSD_STRING),
    ]
    individuals = [Individual(as_(ph), as_("Phenomenon"), _split_camel(ph)) for ph in PHENOMENA]
    return Vocabulary("annot", str(a), classes, props, individuals, prefixes={"annot": str(a)})


VOCABULARIES = {
    "htd": htd_vocabulary,
    "scm": scm_vocabulary,
    "provx": prov_vocabulary,
    "annot": annotation_vocabulary,
}


# shape rules


def scm_shapes() -> list[ShapeRule]:
    s = SCM
    return [
        ShapeRule("scm-connects-min", s.Connection, MinCount(s.connects, 2), "connection has fewer than two endpoints"),
        ShapeRule("scm-connects-max", s.Connection, MaxCount(s.connects, 2), "connection has more than two endpoints"),
        ShapeRule("scm-connection-domain", s.Connection, MinCount(s.carriesDomain, 1), "connection lacks a domain"),
        ShapeRule("scm-cp-domain", s.ConnectionPoint, MinCount(s.inDomain, 1), "connection point lacks a domain"),
        ShapeRule("scm-cp-domain-max", s.ConnectionPoint, MaxCount(s.inDomain, 1), "connection point has several domains"),
        ShapeRule("scm-system-type", s.System, MinCount(s.hasType, 1), "system lacks a system type"),
        ShapeRule("scm-system-id", s.System, MinCount(s.localId, 1), "system lacks an identifier"),
        ShapeRule("scm-cp-id", s.ConnectionPoint, MinCount(s.localId, 1), "connection point lacks an identifier"),
        ShapeRule("scm-connection-id", s.Connection, MinCount(s.localId, 1), "connection lacks an identifier"),
        ShapeRule("scm-config-id", s.SystemConfiguration, MinCount(s.localId, 1), "configuration lacks an identifier"),
        ShapeRule(
            "scm-role",
            s.System,
            ValueIn(s.hasRole, frozenset(s.term(r) for r in ROLES)),
            "system role is not one of SuT, TestEquipment, Infrastructure",
        ),
        ShapeRule("scm-attribute-name", s.Attribute, MinCount(s.attributeName, 1), "attribute lacks a name"),
        ShapeRule("scm-attribute-value", s.Attribute, MinCount(s.attributeValue, 1), "attribute lacks a value"),
    ]


def annotation_shapes() -> list[ShapeRule]:
    a = ANNOT
    return [
        ShapeRule("annot-measurement-phenomenon", a.Measurement, MinCount(a.recordsPhenomenon, 1), "measurement lacks phenomenon"),
        ShapeRule("annot-measurement-unit", a.Measurement, MinCount(a.hasUnit, 1), "measurement lacks unit"),
        ShapeRule("annot-measurement-value", a.Measurement, DatatypeIs(a.hasValue, XSD_DECIMAL), "measurement value is not a decimal"),
        ShapeRule("annot-measurement-time", a.Measurement, DatatypeIs(a.hasTimestamp, XSD_DATETIME), "measurement timestamp is not a dateTime"),
        ShapeRule("annot-log-measurement", a.LogFile, MinCount(a.storesMeasurement, 1), "log file stores no measurement"),
        ShapeRule("annot-log-checksum", a.LogFile, MinCount(a.sha256, 1), "log file lacks a checksum", "warning"),
        ShapeRule("annot-dataset-logs", a.Dataset, MinCount(a.containsLogFile, 1), "dataset contains no log file", "warning"),
    ]


def prov_shapes() -> list[ShapeRule]:
    p = PROV
    return [
        ShapeRule("prov-generation-unique", p.Entity, MaxCount(p.wasGeneratedBy, 1), "entity generated by more than one activity"),
        ShapeRule("prov-association", p.Activity, MinCount(p.wasAssociatedWith, 1), "activity has no associated agent"),
        ShapeRule("prov-start-unique", p.Activity, MaxCount(p.startedAtTime, 1), "activity has several start times"),
        ShapeRule("prov-end-unique", p.Activity, MaxCount(p.endedAtTime, 1), "activity has several end times"),
        ShapeRule("prov-start-datatype", p.Activity, DatatypeIs(p.startedAtTime, XSD_DATETIME), "start time is not a dateTime"),
        ShapeRule("prov-end-datatype", p.Activity, DatatypeIs(p.endedAtTime, XSD_DATETIME), "end time is not a dateTime"),
    ]


def htd_shapes() -> list[ShapeRule]:
    h = HTD
    return [
        ShapeRule("htd-execution-spec", h.TestExecution, MinCount(h.executesSpecification, 1), "test execution references no test specification"),
        ShapeRule("htd-execution-config", h.TestExecution, MinCount(h.usesSystemConfiguration, 1), "test execution references no system configuration"),
        ShapeRule(
            "htd-verdict-outcome",
            h.Verdict,
            ValueIn(h.outcome, frozenset(Literal(x) for x in ("PASS", "FAIL", "INCONCLUSIVE"))),
            "verdict outcome must be PASS, FAIL or INCONCLUSIVE",
        ),
    ]


SHAPE_SETS = {
    "htd": htd_shapes,
    "scm": scm_shapes,
    "provx": prov_shapes,
    "annot": annotation_shapes,
}


def all_shapes() -> list[ShapeRule]:
    return [rule for name in sorted(SHAPE_SETS) for rule in SHAPE_SETS[name]()]


__all__ = [
    "ANNOT", "DOMAINS", "HTD", "PHENOMENA", "PREFIXES", "PROJECT_BASE", "PROVX", "ROLES", "SCM",
    "SHAPE_SETS", "SYSTEM_TYPES", "UNIT", "VOCABULARIES", "ClassDecl", "Individual", "PropertyDecl",
    "Vocabulary", "all_shapes", "annotation_shapes", "annotation_vocabulary", "emit_vocabulary",
    "htd_shapes", "htd_vocabulary", "prov_shapes", "prov_vocabulary", "scm_shapes", "scm_vocabulary",
]
