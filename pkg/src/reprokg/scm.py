"""Multi-domain system configuration graphs: build, validate, diff, RDF export/import."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Union
from urllib.parse import quote, unquote

import yaml

from . import errors
from .rdf.graph import Graph
from .rdf.terms import (
    IRI,
    RDF_TYPE,
    RDFS_LABEL,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    BNode,
    Literal,
    Triple,
    is_valid_iri,
    literal,
    term_key,
)
from .shapes import check_shapes
from .store import Store
from .vocab import DOMAINS, PREFIXES, SCM, scm_shapes

ROLE_NAMES = {"SuT": "SuT", "testEquipment": "TestEquipment", "infrastructure": "Infrastructure"}
_ROLE_BY_IRI_LOCAL = {v: k for k, v in ROLE_NAMES.items()}

AttributeValue = Union[str, int, float, bool]


@dataclass(frozen=True, order=True)
class EndpointRef:
    system: str
    point: str

    @classmethod
    def parse(cls, text: str) -> "EndpointRef":
        system, sep, point = str(text).partition(".")
        if not sep or not system or not point:
            raise errors.InputError(f"endpoint reference must be 'system.point', got {text!r}")
        return cls(system, point)

    def __str__(self) -> str:
        return f"{self.system}.{self.point}"


@dataclass(frozen=True)
class ConnectionPoint:
    id: str
    domain: str
    label: str = ""


@dataclass(frozen=True)
class Attribute:
    name: str
    value: AttributeValue
    unit: Optional[str] = None


@dataclass
class SystemNode:
    id: str
    system_type: str
    role: Optional[str] = None
    connection_points: list[ConnectionPoint] = field(default_factory=list)
    attributes: list[Attribute] = field(default_factory=list)
    label: str = ""

    def point(self, point_id: str) -> Optional[ConnectionPoint]:
        for cp in self.connection_points:
            if cp.id == point_id:
                return cp
        return None

    def attribute(self, name: str) -> Optional[Attribute]:
        for a in self.attributes:
            if a.name == name:
                return a
        return None

    def canonical(self) -> "SystemNode":
        return replace(
            self,
            connection_points=sorted(self.connection_points, key=lambda c: c.id),
            attributes=sorted(self.attributes, key=lambda a: a.name),
        )


@dataclass
class ConnectionEdge:
    id: str
    endpoint_a: EndpointRef
    endpoint_b: EndpointRef
    domain: str

    def canonical(self) -> "ConnectionEdge":
        a, b = sorted((self.endpoint_a, self.endpoint_b))
        return replace(self, endpoint_a=a, endpoint_b=b)


@dataclass
class SystemConfiguration:
    id: str
    systems: list[SystemNode] = field(default_factory=list)
    connections: list[ConnectionEdge] = field(default_factory=list)
    domains: set[str] = field(default_factory=set)
    is_test_setup: bool = False
    label: str = ""

    def system(self, system_id: str) -> Optional[SystemNode]:
        for s in self.systems:
            if s.id == system_id:
                return s
        return None

    def all_domains(self) -> set[str]:
        used = {cp.domain for s in self.systems for cp in s.connection_points}
        used |= {c.domain for c in self.connections}
        return set(self.domains) | used

    def canonical(self) -> "SystemConfiguration":
        """Copy with every list in id order, for structural comparison."""
        return replace(
            self,
            systems=sorted((s.canonical() for s in self.systems), key=lambda s: s.id),
            connections=sorted((c.canonical() for c in self.connections), key=lambda c: c.id),
            domains=set(self.domains),
        )

    def structurally_equal(self, other: "SystemConfiguration") -> bool:
        return self.canonical() == other.canonical()


@dataclass(frozen=True)
class Finding:
    code: str
    subject: str
    message: str
    severity: str  # "violation" | "warning"

    def as_dict(self) -> dict:
        return {"code": self.code, "subject": self.subject, "message": self.message, "severity": self.severity}


# validation


def validate_configuration(cfg: SystemConfiguration) -> list[Finding]:
    """Structural findings, sorted; problems never raise."""
    found: list[Finding] = []

    def add(code, subject, message, severity="violation"):
        found.append(Finding(code, subject, message, severity))

    seen_sys: set[str] = set()
    for s in cfg.systems:
        if s.id in seen_sys:
            add("duplicate-id", s.id, f"system id {s.id!r} is used more than once")
        seen_sys.add(s.id)
        seen_cp: set[str] = set()
        for cp in s.connection_points:
            if cp.id in seen_cp:
                add("duplicate-id", f"{s.id}.{cp.id}", f"connection point id {cp.id!r} repeated in system {s.id!r}")
            seen_cp.add(cp.id)
        if s.role is not None and s.role not in ROLE_NAMES:
            add("unknown-role", s.id, f"role {s.role!r} is not one of {sorted(ROLE_NAMES)}")

    seen_conn: set[str] = set()
    connected: set[str] = set()
    for c in cfg.connections:
        if c.id in seen_conn:
            add("duplicate-id", c.id, f"connection id {c.id!r} is used more than once")
        seen_conn.add(c.id)
        if c.endpoint_a == c.endpoint_b:
            add("self-connection", c.id, f"connection {c.id!r} joins {c.endpoint_a} to itself")
        for ref in (c.endpoint_a, c.endpoint_b):
            system = cfg.system(ref.system)
            cp = system.point(ref.point) if system else None
            if cp is None:
                add("dangling-endpoint", c.id, f"connection {c.id!r} references missing point {ref}")
                continue
            connected.add(ref.system)
            if cp.domain != c.domain:
                add(
                    "domain-mismatch",
                    c.id,
                    f"connection {c.id!r} in domain {c.domain} touches {ref} in domain {cp.domain}",
                )

    if cfg.domains:
        for s in cfg.systems:
            for cp in s.connection_points:
                if cp.domain not in cfg.domains:
                    add("undeclared-domain", f"{s.id}.{cp.id}", f"domain {cp.domain!r} is not declared by the configuration")

    for s in cfg.systems:
        if s.id not in connected:
            add("isolated-system", s.id, f"system {s.id!r} has no connections", "warning")

    if cfg.is_test_setup and cfg.systems and not any(s.role == "SuT" for s in cfg.systems):
        add("missing-sut", cfg.id, "test setup designates no system under test", "warning")

    found = sorted(set(found), key=lambda f: (f.severity != "violation", f.code, f.subject, f.message))
    return found


def violations(findings: Iterable[Finding]) -> list[Finding]:
    return [f for f in findings if f.severity == "violation"]


# RDF


def _seg(text: str) -> str:
    return quote(text, safe="")


def config_iri(base: str, cfg_id: str) -> IRI:
    return IRI(f"{base.rstrip('/')}/config/{_seg(cfg_id)}")


def _scm_iri(name: str) -> IRI:
    """Names are SCM local names unless they already are absolute IRIs."""
    if is_valid_iri(name):
        return IRI(name)
    return SCM.term(_seg(name))


def _scm_name(iri: IRI) -> str:
    ns = str(SCM)
    return unquote(iri.value[len(ns):]) if iri.value.startswith(ns) else iri.value


_domain_iri = _type_iri = _scm_iri
_domain_name = _type_name = _scm_name


def _value_literal(value: AttributeValue) -> Literal:
    return literal(value)


def _literal_value(lit: Literal) -> AttributeValue:
    if lit.datatype == XSD_BOOLEAN:
        return lit.lexical == "true"
    if lit.datatype == XSD_INTEGER:
        return int(lit.lexical)
    if lit.datatype in (XSD_DECIMAL, XSD_DOUBLE):
        return float(lit.lexical)
    return lit.lexical


def to_rdf(cfg: SystemConfiguration, base: str = "http://example.org/lab") -> Graph:
    """SCM graph for a configuration; raises InvalidConfiguration on violations."""
    bad = violations(validate_configuration(cfg))
    if bad:
        raise errors.InvalidConfiguration(bad)
    g = Graph(prefixes={k: PREFIXES[k] for k in ("rdf", "rdfs", "xsd", "scm")})
    c = config_iri(base, cfg.id)
    root = c.value
    add = g.add
    add(Triple(c, RDF_TYPE, SCM.SystemConfiguration))
    add(Triple(c, SCM.localId, Literal(cfg.id)))
    if cfg.label:
        add(Triple(c, RDFS_LABEL, Literal(cfg.label)))
    if cfg.is_test_setup:
        add(Triple(c, SCM.isTestSetup, literal(True)))
    for d in sorted(cfg.domains):
        add(Triple(c, SCM.usesDomain, _domain_iri(d)))

    for s in cfg.systems:
        si = IRI(f"{root}/system/{_seg(s.id)}")
        add(Triple(c, SCM.hasSystem, si))
        add(Triple(si, RDF_TYPE, SCM.System))
        add(Triple(si, SCM.localId, Literal(s.id)))
        add(Triple(si, SCM.hasType, _type_iri(s.system_type)))
        if s.label:
            add(Triple(si, RDFS_LABEL, Literal(s.label)))
        if s.role is not None:
            add(Triple(si, SCM.hasRole, SCM.term(ROLE_NAMES[s.role])))
        for cp in s.connection_points:
            pi = IRI(f"{si.value}/cp/{_seg(cp.id)}")
            add(Triple(si, SCM.hasConnectionPoint, pi))
            add(Triple(pi, RDF_TYPE, SCM.ConnectionPoint))
            add(Triple(pi, SCM.localId, Literal(cp.id)))
            add(Triple(pi, SCM.inDomain, _domain_iri(cp.domain)))
            if cp.label:
                add(Triple(pi, RDFS_LABEL, Literal(cp.label)))
        for a in s.attributes:
            ai = IRI(f"{si.value}/attr/{_seg(a.name)}")
            add(Triple(si, SCM.hasAttribute, ai))
            add(Triple(ai, RDF_TYPE, SCM.Attribute))
            add(Triple(ai, SCM.attributeName, Literal(a.name)))
            add(Triple(ai, SCM.attributeValue, _value_literal(a.value)))
            if a.unit is not None:
                add(Triple(ai, SCM.attributeUnit, Literal(a.unit)))

    for e in cfg.connections:
        ei = IRI(f"{root}/connection/{_seg(e.id)}")
        add(Triple(c, SCM.hasConnection, ei))
        add(Triple(ei, RDF_TYPE, SCM.Connection))
        add(Triple(ei, SCM.localId, Literal(e.id)))
        add(Triple(ei, SCM.carriesDomain, _domain_iri(e.domain)))
        for ref in (e.endpoint_a, e.endpoint_b):
            add(Triple(ei, SCM.connects, IRI(f"{root}/system/{_seg(ref.system)}/cp/{_seg(ref.point)}")))
    return g


def _text(store: Store, node, prop) -> Optional[str]:
    v = store.value(node, prop)
    return v.lexical if isinstance(v, Literal) else None


def configuration_nodes(source: Union[Graph, Store]) -> list:
    store = source if isinstance(source, Store) else Store([source])
    return store.instances(SCM.SystemConfiguration)


def from_rdf(source: Union[Graph, Store], config: Optional[Union[str, IRI]] = None) -> SystemConfiguration:
    """Rebuild a configuration from its SCM graph (lists in id order)."""
    store = source if isinstance(source, Store) else Store([source])
    nodes = store.instances(SCM.SystemConfiguration)
    if config is not None:
        wanted = [n for n in nodes if n == config or _text(store, n, SCM.localId) == str(config)]
        nodes = wanted
    if not nodes:
        raise errors.EmptyConfiguration("graph contains no scm:SystemConfiguration node")
    if len(nodes) > 1:
        ids = ", ".join(term_key(n) for n in nodes)
        raise errors.InputError(f"several configurations in graph ({ids}); choose one")
    bad = [v for v in check_shapes(store, scm_shapes()) if v.severity == "violation"]
    if bad:
        raise errors.ShapeViolation(bad)

    c = nodes[0]
    cfg = SystemConfiguration(
        id=_text(store, c, SCM.localId) or "",
        label=_text(store, c, RDFS_LABEL) or "",
        is_test_setup=store.value(c, SCM.isTestSetup) == literal(True),
        domains={_domain_name(d) for d in store.objects(c, SCM.usesDomain) if isinstance(d, IRI)},
    )
    point_ref: dict = {}
    for si in sorted(store.objects(c, SCM.hasSystem), key=term_key):
        sid = _text(store, si, SCM.localId)
        role_iri = store.value(si, SCM.hasRole)
        role = None
        if isinstance(role_iri, IRI):
            role = _ROLE_BY_IRI_LOCAL.get(_domain_name(role_iri))
        node = SystemNode(
            id=sid,
            system_type=_type_name(store.value(si, SCM.hasType)),
            role=role,
            label=_text(store, si, RDFS_LABEL) or "",
        )
        for pi in store.objects(si, SCM.hasConnectionPoint):
            pid = _text(store, pi, SCM.localId)
            node.connection_points.append(
                ConnectionPoint(pid, _domain_name(store.value(pi, SCM.inDomain)), _text(store, pi, RDFS_LABEL) or "")
            )
            point_ref[pi] = EndpointRef(sid, pid)
        for ai in store.objects(si, SCM.hasAttribute):
            unit = _text(store, ai, SCM.attributeUnit)
            node.attributes.append(
                Attribute(_text(store, ai, SCM.attributeName), _literal_value(store.value(ai, SCM.attributeValue)), unit)
            )
        cfg.systems.append(node)

    for ei in store.objects(c, SCM.hasConnection):
        ends = sorted(store.objects(ei, SCM.connects), key=term_key)
        refs = []
        for p in ends:
            if p not in point_ref:
                raise errors.InputError(f"connection {term_key(ei)} references unknown point {term_key(p)}")
            refs.append(point_ref[p])
        a, b = sorted(refs)
        cfg.connections.append(
            ConnectionEdge(_text(store, ei, SCM.localId), a, b, _domain_name(store.value(ei, SCM.carriesDomain)))
        )
    return cfg.canonical()


# diff


@dataclass
class AttributeChange:
    id: str
    attribute: str
    value_a: Optional[AttributeValue]
    value_b: Optional[AttributeValue]

    def as_dict(self) -> dict:
        return {"id": self.id, "attribute": self.attribute, "valueA": self.value_a, "valueB": self.value_b}


@dataclass
class DiffReport:
    added_systems: list[str] = field(default_factory=list)
    removed_systems: list[str] = field(default_factory=list)
    changed_attributes: list[AttributeChange] = field(default_factory=list)
    added_connections: list[str] = field(default_factory=list)
    removed_connections: list[str] = field(default_factory=list)
    matched_systems: list[tuple[str, str]] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (
            self.added_systems or self.removed_systems or self.changed_attributes
            or self.added_connections or self.removed_connections
        )

    def as_dict(self) -> dict:
        return {
            "addedSystems": self.added_systems,
            "removedSystems": self.removed_systems,
            "matchedSystemsWithChangedAttributes": [c.as_dict() for c in self.changed_attributes],
            "addedConnections": self.added_connections,
            "removedConnections": self.removed_connections,
        }


def _match_systems(a: SystemConfiguration, b: SystemConfiguration) -> dict[str, str]:
    """Map system ids of a to ids of b: exact (type, id) first, then unique type match."""
    mapping: dict[str, str] = {}
    b_by_key = {(s.system_type, s.id): s for s in b.systems}
    for s in a.systems:
        if (s.system_type, s.id) in b_by_key:
            mapping[s.id] = s.id
    un_a = [s for s in a.systems if s.id not in mapping]
    taken = set(mapping.values())
    un_b = [s for s in b.systems if s.id not in taken]
    types = {s.system_type for s in un_a}
    for t in sorted(types):
        cand_a = [s for s in un_a if s.system_type == t]
        cand_b = [s for s in un_b if s.system_type == t]
        # ambiguous multi-matches stay unmatched
        if len(cand_a) == 1 and len(cand_b) == 1:
            mapping[cand_a[0].id] = cand_b[0].id
    return mapping


def diff_configurations(a: SystemConfiguration, b: SystemConfiguration) -> DiffReport:
    mapping = _match_systems(a, b)
    inverse = {v: k for k, v in mapping.items()}
    rep = DiffReport()
    rep.removed_systems = sorted(s.id for s in a.systems if s.id not in mapping)
    rep.added_systems = sorted(s.id for s in b.systems if s.id not in inverse)
    rep.matched_systems = sorted(mapping.items())
    for aid, bid in sorted(mapping.items()):
        sa, sb = a.system(aid), b.system(bid)
        names = sorted({x.name for x in sa.attributes} | {x.name for x in sb.attributes})
        for name in names:
            xa, xb = sa.attribute(name), sb.attribute(name)
            va = None if xa is None else xa.value
            vb = None if xb is None else xb.value
            ua = None if xa is None else xa.unit
            ub = None if xb is None else xb.unit
            if xa is None or xb is None or va != vb or type(va) is not type(vb) or ua != ub:
                rep.changed_attributes.append(AttributeChange(aid, name, va, vb))

    def conn_key(e: ConnectionEdge, translate: dict) -> tuple:
        ends = frozenset(
            (translate.get(r.system, "\0" + r.system), r.point) for r in (e.endpoint_a, e.endpoint_b)
        )
        return (e.domain, ends)

    # compare connections in a's id space
    ident = {s.id: s.id for s in a.systems}
    keys_a: dict[tuple, list[str]] = {}
    for e in a.connections:
        keys_a.setdefault(conn_key(e, ident), []).append(e.id)
    keys_b: dict[tuple, list[str]] = {}
    for e in b.connections:
        keys_b.setdefault(conn_key(e, inverse), []).append(e.id)
    for k, ids in keys_a.items():
        extra = len(ids) - len(keys_b.get(k, []))
        if extra > 0:
            rep.removed_connections.extend(sorted(ids)[-extra:])
    for k, ids in keys_b.items():
        extra = len(ids) - len(keys_a.get(k, []))
        if extra > 0:
            rep.added_connections.extend(sorted(ids)[-extra:])
    rep.removed_connections.sort()
    rep.added_connections.sort()
    return rep


# human-authored YAML documents


def _attr_from_yaml(name: str, spec) -> Attribute:
    if isinstance(spec, dict):
        if "value" not in spec:
            raise errors.InputError(f"attribute {name!r} needs a value")
        return Attribute(str(name), spec["value"], None if spec.get("unit") is None else str(spec["unit"]))
    return Attribute(str(name), spec)


def configuration_from_dict(doc: dict) -> SystemConfiguration:
    if not isinstance(doc, dict) or "id" not in doc:
        raise errors.InputError("configuration document must be a mapping with an 'id'")
    cfg = SystemConfiguration(
        id=str(doc["id"]),
        label=str(doc.get("label", "")),
        is_test_setup=bool(doc.get("testSetup", False)),
        domains={str(d) for d in doc.get("domains", []) or []},
    )
    for sdoc in doc.get("systems", []) or []:
        try:
            node = SystemNode(
                id=str(sdoc["id"]),
                system_type=str(sdoc["type"]),
                role=sdoc.get("role"),
                label=str(sdoc.get("label", "")),
            )
        except (KeyError, TypeError) as exc:
            raise errors.InputError(f"system entry needs 'id' and 'type': {sdoc!r}") from exc
        for cp in sdoc.get("connectionPoints", []) or []:
            try:
                node.connection_points.append(ConnectionPoint(str(cp["id"]), str(cp["domain"]), str(cp.get("label", ""))))
            except (KeyError, TypeError) as exc:
                raise errors.InputError(f"connection point needs 'id' and 'domain': {cp!r}") from exc
        attrs = sdoc.get("attributes", {}) or {}
        if isinstance(attrs, dict):
            for name, spec in attrs.items():
                node.attributes.append(_attr_from_yaml(name, spec))
        else:
            for spec in attrs:
                node.attributes.append(_attr_from_yaml(spec.get("name"), spec))
        cfg.systems.append(node)
    for cdoc in doc.get("connections", []) or []:
        try:
            cfg.connections.append(
                ConnectionEdge(
                    str(cdoc["id"]),
                    EndpointRef.parse(cdoc["from"]),
                    EndpointRef.parse(cdoc["to"]),
                    str(cdoc["domain"]),
                )
            )
        except (KeyError, TypeError) as exc:
            raise errors.InputError(f"connection needs 'id', 'from', 'to', 'domain': {cdoc!r}") from exc
    return cfg


def configuration_to_dict(cfg: SystemConfiguration) -> dict:
    cfg = cfg.canonical()
    doc: dict = {"id": cfg.id}
    if cfg.label:
        doc["label"] = cfg.label
    if cfg.is_test_setup:
        doc["testSetup"] = True
    if cfg.domains:
        doc["domains"] = sorted(cfg.domains)
    systems = []
    for s in cfg.systems:
        sd: dict = {"id": s.id, "type": s.system_type}
        if s.role:
            sd["role"] = s.role
        if s.label:
            sd["label"] = s.label
        sd["connectionPoints"] = [
            {"id": cp.id, "domain": cp.domain, **({"label": cp.label} if cp.label else {})} for cp in s.connection_points
        ]
        if s.attributes:
            sd["attributes"] = {
                a.name: ({"value": a.value, "unit": a.unit} if a.unit is not None else a.value) for a in s.attributes
            }
        systems.append(sd)
    doc["systems"] = systems
    doc["connections"] = [
        {"id": e.id, "from": str(e.endpoint_a), "to": str(e.endpoint_b), "domain": e.domain} for e in cfg.connections
    ]
    return doc


def load_configuration_yaml(text: str) -> SystemConfiguration:
    try:
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        line, col = (mark.line + 1, mark.column + 1) if mark else (1, 1)
        raise errors.SyntaxError(str(exc.problem or exc), line, col) from exc
    return configuration_from_dict(doc)


def dump_configuration_yaml(cfg: SystemConfiguration) -> str:
    return yaml.safe_dump(configuration_to_dict(cfg), sort_keys=False, allow_unicode=True)


def load_configuration(path) -> SystemConfiguration:
    """Read a configuration from ``.yaml``/``.yml`` or ``.ttl``."""
    from pathlib import Path

    from .turtle import parse_turtle

    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix == ".ttl":
        return from_rdf(parse_turtle(text))
    return load_configuration_yaml(text)


__all__ = [
    "Attribute", "AttributeChange", "ConnectionEdge", "ConnectionPoint", "DOMAINS", "DiffReport",
    "EndpointRef", "Finding", "SystemConfiguration", "SystemNode", "config_iri", "configuration_from_dict",
    "configuration_nodes", "configuration_to_dict", "diff_configurations", "dump_configuration_yaml",
    "from_rdf", "load_configuration", "load_configuration_yaml", "to_rdf", "validate_configuration", "violations",
]
