"""Workflow provenance: templates vs. execution accounts, lineage and completeness."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Mapping, Optional, Sequence, Union
from urllib.parse import quote

from . import errors
from .rdf.graph import Graph
from .rdf.terms import IRI, PROV, RDF_TYPE, RDFS_LABEL, XSD_DATETIME, Literal, Term, Triple, is_valid_iri, literal, term_key
from .shapes import MinCount, RuleInstance, ShapeRule, Violation, violations_of
from .store import Store
from .vocab import ANNOT, HTD, PREFIXES, PROVX

AGENT_KINDS = ("person", "organization", "softwareAgent")
VARIABLE_KINDS = ("data", "parameter")


# timestamps

_FRACTION = re.compile(r"\.(\d+)(?=[+-]\d\d:?\d\d$|$)")


def parse_timestamp(text: str) -> datetime:
    """ISO-8601 with an explicit offset; naive timestamps are rejected."""
    raw = str(text).strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    # fromisoformat on 3.10 only takes 3 or 6 fractional digits
    raw = _FRACTION.sub(lambda m: "." + (m.group(1) + "00000")[:6], raw, count=1)
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise errors.InvalidTimestamp(f"not an ISO-8601 timestamp: {text!r}") from exc
    if dt.tzinfo is None or dt.utcoffset() is None:
        raise errors.InvalidTimestamp(f"timestamp lacks a timezone: {text!r}")
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    if dt.tzinfo is None:
        raise errors.InvalidTimestamp("cannot format a naive datetime")
    dt = dt.astimezone(timezone.utc)
    text = dt.isoformat(timespec="microseconds" if dt.microsecond else "seconds")
    return text.replace("+00:00", "Z")


def timestamp_literal(value: Union[str, datetime]) -> Literal:
    dt = value if isinstance(value, datetime) else parse_timestamp(value)
    return Literal(format_timestamp(dt), XSD_DATETIME)


# value model


@dataclass
class TemplateVariable:
    id: str
    kind: str = "data"
    label: str = ""


@dataclass
class TemplateProcess:
    id: str
    label: str = ""
    consumes: list[str] = field(default_factory=list)
    produces: list[str] = field(default_factory=list)


@dataclass
class WorkflowTemplate:
    id: str
    processes: list[TemplateProcess] = field(default_factory=list)
    variables: list[TemplateVariable] = field(default_factory=list)
    label: str = ""

    def process(self, pid: str) -> Optional[TemplateProcess]:
        return next((p for p in self.processes if p.id == pid), None)

    def validate(self) -> None:
        declared = {}
        for v in self.variables:
            if v.kind not in VARIABLE_KINDS:
                raise errors.InputError(f"variable {v.id!r}: kind must be one of {VARIABLE_KINDS}")
            if v.id in declared:
                raise errors.InputError(f"variable {v.id!r} declared twice")
            declared[v.id] = v
        ids = [p.id for p in self.processes]
        if len(set(ids)) != len(ids):
            raise errors.InputError(f"template {self.id!r} repeats a process id")
        produced_at = {}
        for i, p in enumerate(self.processes):
            for var in (*p.consumes, *p.produces):
                if var not in declared:
                    raise errors.DanglingReference(f"process {p.id!r} references undeclared variable {var!r}")
            for var in p.produces:
                produced_at.setdefault(var, i)
        for i, p in enumerate(self.processes):
            for var in p.consumes:
                if produced_at.get(var, -1) > i:
                    raise errors.InputError(
                        f"process {p.id!r} consumes {var!r}, which is produced by a later process"
                    )


@dataclass
class Agent:
    id: str
    label: str = ""
    kind: str = "person"


@dataclass
class Entity:
    id: str
    label: str = ""
    variable_id: Optional[str] = None
    derived_from: list[str] = field(default_factory=list)
    types: list[str] = field(default_factory=list)


@dataclass
class Activity:
    id: str
    agent_id: Optional[str]
    start_time: Optional[str]
    end_time: Optional[str]
    template_process_id: Optional[str] = None
    used: list[str] = field(default_factory=list)
    generated: list[str] = field(default_factory=list)
    label: str = ""


@dataclass
class ExecutionAccount:
    id: str
    template_id: Optional[str] = None
    activities: list[Activity] = field(default_factory=list)
    entities: list[Entity] = field(default_factory=list)
    agents: list[Agent] = field(default_factory=list)
    label: str = ""

    def activity(self, aid: str) -> Optional[Activity]:
        return next((a for a in self.activities if a.id == aid), None)

    def validate(self) -> None:
        ents = {e.id for e in self.entities}
        agents = {a.id for a in self.agents}
        for a in self.agents:
            if a.kind not in AGENT_KINDS:
                raise errors.InputError(f"agent {a.id!r}: kind must be one of {AGENT_KINDS}")
        generator: dict[str, str] = {}
        for act in self.activities:
            if act.agent_id is not None and act.agent_id not in agents:
                raise errors.DanglingReference(f"activity {act.id!r} names undeclared agent {act.agent_id!r}")
            start = parse_timestamp(act.start_time) if act.start_time else None
            end = parse_timestamp(act.end_time) if act.end_time else None
            if start and end and end < start:
                raise errors.InputError(f"activity {act.id!r} ends before it starts")
            for e in (*act.used, *act.generated):
                if e not in ents:
                    raise errors.DanglingReference(f"activity {act.id!r} references undeclared entity {e!r}")
            for e in act.generated:
                if e in generator:
                    raise errors.InputError(f"entity {e!r} generated by both {generator[e]!r} and {act.id!r}")
                generator[e] = act.id
        for e in self.entities:
            for src in e.derived_from:
                if src not in ents:
                    raise errors.DanglingReference(f"entity {e.id!r} derived from undeclared entity {src!r}")


# YAML documents


def _items(doc: Mapping, key: str) -> list:
    raw = doc.get(key) or []
    if not isinstance(raw, list) or not all(isinstance(x, Mapping) for x in raw):
        raise errors.InputError(f"{key!r} must be a list of mappings")
    return raw


def _strs(doc: Mapping, key: str) -> list[str]:
    raw = doc.get(key) or []
    if isinstance(raw, str):
        raw = [raw]
    return [str(x) for x in raw]


def _ts(value) -> Optional[str]:
    if value is None:
        return None
    if isinstance(value, datetime):
        return format_timestamp(value)
    return str(value)


def template_from_dict(doc: Mapping) -> WorkflowTemplate:
    if not isinstance(doc, Mapping) or not doc.get("template"):
        raise errors.InputError("template document needs a 'template' id")
    try:
        t = WorkflowTemplate(
            id=str(doc["template"]),
            label=str(doc.get("label") or ""),
            variables=[TemplateVariable(str(v["id"]), str(v.get("kind", "data")), str(v.get("label") or "")) for v in _items(doc, "variables")],
            processes=[
                TemplateProcess(str(p["id"]), str(p.get("label") or ""), _strs(p, "consumes"), _strs(p, "produces"))
                for p in _items(doc, "processes")
            ],
        )
    except KeyError as exc:
        raise errors.InputError(f"template entry lacks {exc.args[0]!r}") from None
    t.validate()
    return t


def account_from_dict(doc: Mapping) -> ExecutionAccount:
    if not isinstance(doc, Mapping) or not doc.get("account"):
        raise errors.InputError("account document needs an 'account' id")
    try:
        acc = ExecutionAccount(
            id=str(doc["account"]),
            template_id=None if doc.get("template") is None else str(doc["template"]),
            label=str(doc.get("label") or ""),
            agents=[Agent(str(a["id"]), str(a.get("label") or ""), str(a.get("kind", "person"))) for a in _items(doc, "agents")],
            entities=[
                Entity(
                    str(e["id"]),
                    str(e.get("label") or ""),
                    None if e.get("variable") is None else str(e["variable"]),
                    _strs(e, "derivedFrom"),
                    _strs(e, "types"),
                )
                for e in _items(doc, "entities")
            ],
            activities=[
                Activity(
                    str(a["id"]),
                    None if a.get("agent") is None else str(a["agent"]),
                    _ts(a.get("start")),
                    _ts(a.get("end")),
                    None if a.get("process") is None else str(a["process"]),
                    _strs(a, "used"),
                    _strs(a, "generated"),
                    str(a.get("label") or ""),
                )
                for a in _items(doc, "activities")
            ],
        )
    except KeyError as exc:
        raise errors.InputError(f"account entry lacks {exc.args[0]!r}") from None
    acc.validate()
    return acc


def template_to_dict(t: WorkflowTemplate) -> dict:
    doc: dict = {"template": t.id}
    if t.label:
        doc["label"] = t.label
    doc["variables"] = [{"id": v.id, "kind": v.kind, **({"label": v.label} if v.label else {})} for v in t.variables]
    doc["processes"] = [
        {"id": p.id, **({"label": p.label} if p.label else {}), "consumes": list(p.consumes), "produces": list(p.produces)}
        for p in t.processes
    ]
    return doc


def account_to_dict(a: ExecutionAccount) -> dict:
    doc: dict = {"account": a.id}
    if a.template_id:
        doc["template"] = a.template_id
    if a.label:
        doc["label"] = a.label
    doc["agents"] = [{"id": g.id, "kind": g.kind, **({"label": g.label} if g.label else {})} for g in a.agents]
    ents = []
    for e in a.entities:
        d: dict = {"id": e.id}
        if e.label:
            d["label"] = e.label
        if e.variable_id:
            d["variable"] = e.variable_id
        if e.derived_from:
            d["derivedFrom"] = list(e.derived_from)
        if e.types:
            d["types"] = list(e.types)
        ents.append(d)
    doc["entities"] = ents
    acts = []
    for act in a.activities:
        d = {"id": act.id}
        for key, val in (("label", act.label), ("agent", act.agent_id), ("start", act.start_time), ("end", act.end_time), ("process", act.template_process_id)):
            if val:
                d[key] = val
        d["used"] = list(act.used)
        d["generated"] = list(act.generated)
        acts.append(d)
    doc["activities"] = acts
    return doc


# RDF


def mint(base: str, kind: str, ident: str) -> IRI:
    if is_valid_iri(ident):
        return IRI(ident)
    return IRI(f"{base.rstrip('/')}/{kind}/{quote(ident, safe='')}")


def _graph() -> Graph:
    return Graph(prefixes={k: PREFIXES[k] for k in ("rdf", "rdfs", "xsd", "prov", "provx", "annot")})


def template_to_rdf(template: WorkflowTemplate, base: str = "http://example.org/lab") -> Graph:
    template.validate()
    g = _graph()
    t = mint(base, "workflow", template.id)
    g.add(Triple(t, RDF_TYPE, PROVX.WorkflowTemplate))
    g.add(Triple(t, PROVX.localId, Literal(template.id)))
    if template.label:
        g.add(Triple(t, RDFS_LABEL, Literal(template.label)))
    var_iri = {}
    for v in template.variables:
        vi = mint(base, f"workflow/{quote(template.id, safe='')}/variable", v.id)
        var_iri[v.id] = vi
        g.add(Triple(vi, RDF_TYPE, PROVX.TemplateVariable))
        g.add(Triple(vi, RDF_TYPE, PROVX.DataVariable if v.kind == "data" else PROVX.ParameterVariable))
        g.add(Triple(vi, PROVX.isVariableOfTemplate, t))
        g.add(Triple(vi, PROVX.localId, Literal(v.id)))
        if v.label:
            g.add(Triple(vi, RDFS_LABEL, Literal(v.label)))
    for i, p in enumerate(template.processes):
        pi = process_iri(base, template.id, p.id)
        g.add(Triple(pi, RDF_TYPE, PROVX.TemplateProcess))
        g.add(Triple(pi, PROVX.isStepOfTemplate, t))
        g.add(Triple(pi, PROVX.localId, Literal(p.id)))
        g.add(Triple(pi, PROVX.stepIndex, literal(i)))
        if p.label:
            g.add(Triple(pi, RDFS_LABEL, Literal(p.label)))
        for v in p.consumes:
            g.add(Triple(pi, PROVX.consumesVariable, var_iri[v]))
        for v in p.produces:
            g.add(Triple(pi, PROVX.producesVariable, var_iri[v]))
    return g


def process_iri(base: str, template_id: str, process_id: str) -> IRI:
    return mint(base, f"workflow/{quote(template_id, safe='')}/process", process_id)


def to_prov_rdf(
    account: ExecutionAccount,
    template: Optional[WorkflowTemplate] = None,
    base: str = "http://example.org/lab",
) -> Graph:
    """PROV graph of an execution account, linked to its template when one is given."""
    account.validate()
    if template is not None:
        if account.template_id is not None and account.template_id != template.id:
            raise errors.TemplateMismatch(
                f"account {account.id!r} follows template {account.template_id!r}, not {template.id!r}"
            )
        for act in account.activities:
            if act.template_process_id is not None and template.process(act.template_process_id) is None:
                raise errors.DanglingReference(
                    f"activity {act.id!r} names unknown template process {act.template_process_id!r}"
                )
        declared = {v.id for v in template.variables}
        for e in account.entities:
            if e.variable_id is not None and e.variable_id not in declared:
                raise errors.DanglingReference(f"entity {e.id!r} names unknown variable {e.variable_id!r}")

    g = _graph()
    add = g.add
    acc = mint(base, "account", account.id)
    add(Triple(acc, RDF_TYPE, PROVX.WorkflowExecutionAccount))
    add(Triple(acc, PROVX.localId, Literal(account.id)))
    if account.label:
        add(Triple(acc, RDFS_LABEL, Literal(account.label)))
    template_id = account.template_id or (template.id if template is not None else None)
    if template_id is not None:
        add(Triple(acc, PROVX.correspondsToTemplate, mint(base, "workflow", template_id)))

    for ag in account.agents:
        ai = mint(base, "agent", ag.id)
        add(Triple(ai, RDF_TYPE, PROV.Agent))
        add(Triple(ai, PROVX.localId, Literal(ag.id)))
        add(Triple(ai, PROVX.agentKind, Literal(ag.kind)))
        if ag.label:
            add(Triple(ai, RDFS_LABEL, Literal(ag.label)))

    for act in account.activities:
        ai = mint(base, "activity", act.id)
        add(Triple(ai, RDF_TYPE, PROV.Activity))
        add(Triple(ai, PROVX.localId, Literal(act.id)))
        add(Triple(ai, PROVX.account, acc))
        if act.label:
            add(Triple(ai, RDFS_LABEL, Literal(act.label)))
        if act.agent_id is not None:
            add(Triple(ai, PROV.wasAssociatedWith, mint(base, "agent", act.agent_id)))
        if act.start_time:
            add(Triple(ai, PROV.startedAtTime, timestamp_literal(act.start_time)))
        if act.end_time:
            add(Triple(ai, PROV.endedAtTime, timestamp_literal(act.end_time)))
        for e in act.used:
            add(Triple(ai, PROV.used, mint(base, "entity", e)))
        for e in act.generated:
            add(Triple(mint(base, "entity", e), PROV.wasGeneratedBy, ai))
        if act.template_process_id is not None and template_id is not None:
            add(Triple(ai, PROVX.correspondsToTemplateProcess, process_iri(base, template_id, act.template_process_id)))

    for e in account.entities:
        ei = mint(base, "entity", e.id)
        add(Triple(ei, RDF_TYPE, PROV.Entity))
        add(Triple(ei, PROVX.localId, Literal(e.id)))
        for t in e.types:
            add(Triple(ei, RDF_TYPE, IRI(t)))
        if e.label:
            add(Triple(ei, RDFS_LABEL, Literal(e.label)))
        for src in e.derived_from:
            add(Triple(ei, PROV.wasDerivedFrom, mint(base, "entity", src)))
        if e.variable_id is not None and template_id is not None:
            add(
                Triple(
                    ei,
                    PROVX.correspondsToVariable,
                    mint(base, f"workflow/{quote(template_id, safe='')}/variable", e.variable_id),
                )
            )
    return g


# lineage


def _parents(store: Store, entity: Term) -> list[Term]:
    out = list(store.objects(entity, PROV.wasDerivedFrom))
    for act in store.objects(entity, PROV.wasGeneratedBy):
        out.extend(store.objects(act, PROV.used))
    return out


def upstream(store: Store, entity: Union[IRI, str]) -> set[Term]:
    """Everything the entity transitively derives from; the start entity is excluded."""
    start = IRI(entity) if isinstance(entity, str) else entity
    seen: set[Term] = set()
    stack = [start]
    while stack:
        node = stack.pop()
        for parent in _parents(store, node):
            if parent not in seen and parent != start:
                seen.add(parent)
                stack.append(parent)
    return seen


def derivation_cycles(store: Store) -> list[Term]:
    """Entities that are (transitively) upstream of themselves."""
    candidates: set[Term] = set()
    for t in store.triples(None, PROV.wasDerivedFrom, None):
        candidates.add(t.subject)
    for t in store.triples(None, PROV.wasGeneratedBy, None):
        candidates.add(t.subject)
    cyclic = []
    for e in candidates:
        stack = list(_parents(store, e))
        seen: set[Term] = set()
        while stack:
            n = stack.pop()
            if n == e:
                cyclic.append(e)
                break
            if n in seen:
                continue
            seen.add(n)
            stack.extend(_parents(store, n))
    return sorted(cyclic, key=term_key)


# template binding


@dataclass
class BindingReport:
    bound_processes: list[tuple[str, str]] = field(default_factory=list)  # (process id, activity id)
    unbound_template_processes: list[str] = field(default_factory=list)
    extra_activities: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "boundProcesses": [{"process": p, "activity": a} for p, a in self.bound_processes],
            "unboundTemplateProcesses": self.unbound_template_processes,
            "extraActivities": self.extra_activities,
        }


def bind_execution(template: WorkflowTemplate, account: ExecutionAccount) -> BindingReport:
    """Pair activities with template processes via their template process ids."""
    if account.template_id != template.id:
        raise errors.TemplateMismatch(
            f"account {account.id!r} follows template {account.template_id!r}, not {template.id!r}"
        )
    rep = BindingReport()
    covered = set()
    for act in account.activities:
        pid = act.template_process_id
        if pid is not None and template.process(pid) is not None:
            rep.bound_processes.append((pid, act.id))
            covered.add(pid)
        else:
            rep.extra_activities.append(act.id)
    # a process executed twice still counts once; the second activity is extra
    seen: set[str] = set()
    pairs = []
    for pid, aid in rep.bound_processes:
        if pid in seen:
            rep.extra_activities.append(aid)
        else:
            seen.add(pid)
            pairs.append((pid, aid))
    rep.bound_processes = pairs
    rep.unbound_template_processes = [p.id for p in template.processes if p.id not in covered]
    return rep


# completeness


@dataclass(frozen=True)
class TemplateCorrespondenceRule:
    """R6: account activities map onto the template's processes, and every process is executed."""

    id: str = "R6"
    severity: str = "violation"

    def evaluate(self, store: Store) -> list[RuleInstance]:
        out = []
        for acc in store.instances(PROVX.WorkflowExecutionAccount):
            for tmpl in store.objects(acc, PROVX.correspondsToTemplate):
                processes = set(store.subjects(PROVX.isStepOfTemplate, tmpl))
                activities = sorted(set(store.subjects(PROVX.account, acc)), key=term_key)
                executed = set()
                for act in activities:
                    targets = set(store.objects(act, PROVX.correspondsToTemplateProcess)) & processes
                    executed |= targets
                    out.append(
                        RuleInstance(
                            self.id,
                            act,
                            bool(targets),
                            self.severity,
                            f"activity has no corresponding process in template {_name(store, tmpl)}",
                        )
                    )
                for proc in sorted(processes, key=term_key):
                    out.append(
                        RuleInstance(
                            self.id,
                            proc,
                            proc in executed,
                            self.severity,
                            f"template process {_name(store, proc)} has no executing activity",
                        )
                    )
        return out


@dataclass(frozen=True)
class RequiredPhenomenaRule:
    """R7: every phenomenon a test specification requires appears among the recorded measurements."""

    id: str = "R7"
    severity: str = "violation"

    def evaluate(self, store: Store) -> list[RuleInstance]:
        out = []
        for ex in store.instances(HTD.TestExecution):
            required: set[Term] = set()
            for spec in store.objects(ex, HTD.executesSpecification):
                required.update(store.objects(spec, HTD.requiresPhenomenon))
            recorded: set[Term] = set()
            logs = set(store.subjects(PROV.wasGeneratedBy, ex))
            for ds in list(logs):
                logs.update(store.objects(ds, ANNOT.containsLogFile))
            for log in logs:
                for m in store.objects(log, ANNOT.storesMeasurement):
                    recorded.update(store.objects(m, ANNOT.recordsPhenomenon))
            for ph in sorted(required, key=term_key):
                out.append(
                    RuleInstance(
                        self.id,
                        ex,
                        ph in recorded,
                        self.severity,
                        f"required phenomenon {_name(store, ph)} is not recorded",
                    )
                )
        return out


def _name(store: Store, node: Term) -> str:
    lab = store.value(node, RDFS_LABEL)
    local = node.value.rsplit("#", 1)[-1].rsplit("/", 1)[-1] if isinstance(node, IRI) else term_key(node)
    if isinstance(lab, Literal) and lab.lexical != local:
        return f"{local} ({lab.lexical})"
    return local


def default_profile() -> list:
    """Reproducibility rules R1-R7."""
    return [
        ShapeRule("R1", ANNOT.Dataset, MinCount(PROV.wasGeneratedBy, 1), "result entity has no generating activity"),
        ShapeRule("R1", ANNOT.LogFile, MinCount(PROV.wasGeneratedBy, 1), "result entity has no generating activity"),
        ShapeRule("R2", PROV.Activity, MinCount(PROV.wasAssociatedWith, 1), "activity has no associated agent"),
        ShapeRule("R3", PROV.Activity, MinCount(PROV.startedAtTime, 1), "activity has no start time"),
        ShapeRule("R3", PROV.Activity, MinCount(PROV.endedAtTime, 1), "activity has no end time"),
        ShapeRule("R4", HTD.TestExecution, MinCount(HTD.executesSpecification, 1), "test execution references no test specification"),
        ShapeRule("R5", HTD.TestExecution, MinCount(HTD.usesSystemConfiguration, 1), "test execution references no system configuration"),
        TemplateCorrespondenceRule(),
        RequiredPhenomenaRule(),
    ]


RULE_IDS = ("R1", "R2", "R3", "R4", "R5", "R6", "R7")


def profile_from_ids(ids: Optional[Iterable[str]]) -> list:
    if ids is None:
        return default_profile()
    wanted = list(ids)
    unknown = [i for i in wanted if i not in RULE_IDS]
    if unknown:
        raise errors.InputError(f"unknown completeness rule(s): {', '.join(unknown)}")
    return [r for r in default_profile() if r.id in wanted]


@dataclass
class CompletenessReport:
    score: float
    violations: list[Violation]
    instances: int
    satisfied: int
    per_rule: dict[str, tuple[int, int]]  # rule id -> (satisfied, total)
    warnings: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "kind": "completeness",
            "version": 1,
            "score": self.score,
            "instances": self.instances,
            "satisfied": self.satisfied,
            "rules": {k: {"satisfied": s, "total": t} for k, (s, t) in sorted(self.per_rule.items())},
            "violations": [v.as_dict() for v in self.violations],
            "warnings": list(self.warnings),
        }


def check_completeness(
    store: Store,
    profile: Optional[Sequence] = None,
    weights: Optional[Mapping[str, float]] = None,
) -> CompletenessReport:
    """Score = weighted fraction of satisfied rule instances (equal weights by default)."""
    profile = default_profile() if profile is None else list(profile)
    weights = dict(weights or {})
    instances: list[RuleInstance] = []
    for rule in profile:
        instances.extend(rule.evaluate(store))
    per_rule: dict[str, list[int]] = {}
    num = den = 0.0
    for inst in instances:
        w = float(weights.get(inst.rule_id, 1.0))
        den += w
        num += w if inst.satisfied else 0.0
        tally = per_rule.setdefault(inst.rule_id, [0, 0])
        tally[1] += 1
        tally[0] += int(inst.satisfied)
    warnings = []
    if not instances:
        warnings.append("no targets")
        score = 1.0
    else:
        score = num / den if den > 0 else 1.0
    for e in derivation_cycles(store):
        warnings.append(f"derivation cycle through {term_key(e)}")
    return CompletenessReport(
        score=score,
        violations=violations_of(instances),
        instances=len(instances),
        satisfied=sum(1 for i in instances if i.satisfied),
        per_rule={k: (v[0], v[1]) for k, v in per_rule.items()},
        warnings=warnings,
    )


__all__ = [
    "AGENT_KINDS", "Activity", "Agent", "BindingReport", "CompletenessReport", "Entity", "ExecutionAccount",
    "RULE_IDS", "RequiredPhenomenaRule", "TemplateCorrespondenceRule", "TemplateProcess", "TemplateVariable",
    "WorkflowTemplate", "account_from_dict", "account_to_dict", "bind_execution", "check_completeness", "default_profile", "derivation_cycles",
    "format_timestamp", "mint", "parse_timestamp", "process_iri", "profile_from_ids", "template_from_dict", "template_to_dict", "template_to_rdf",
    "timestamp_literal", "to_prov_rdf", "upstream",
]
