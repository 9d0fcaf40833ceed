import random
import time

import pytest
import yaml

from conftest import FIXTURES
from oracles import reachable_upstream
from reprokg import errors
from reprokg.fixtures import (
    BASE,
    digital_twin_account,
    digital_twin_template,
    workflow_graph,
)
from reprokg.fixtures import testing_process_account as process_account
from reprokg.fixtures import testing_process_template as process_template
from reprokg.prov import (
    Activity,
    Agent,
    Entity,
    ExecutionAccount,
    TemplateProcess,
    TemplateVariable,
    WorkflowTemplate,
    account_from_dict,
    account_to_dict,
    bind_execution,
    check_completeness,
    mint,
    parse_timestamp,
    profile_from_ids,
    template_from_dict,
    to_prov_rdf,
    upstream,
)
from reprokg.rdf import Graph, IRI, Triple
from reprokg.rdf.terms import RDF_TYPE
from reprokg.shapes import check_shapes
from reprokg.store import Store
from reprokg.turtle import parse_turtle
from reprokg.vocab import PROVX, prov_shapes

PROV = "http://www.w3.org/ns/prov#"


def ent(name):
    return mint(BASE, "entity", name)


def twin_store():
    return Store([workflow_graph(digital_twin_template(), digital_twin_account())])


def yaml_edges(doc):
    """Lineage edges read straight from the account document."""
    edges = []
    producer = {}
    for act in doc.get("activities", []):
        for e in act.get("generated", []):
            producer[e] = act
    for e in doc.get("entities", []):
        for src in e.get("derivedFrom", []):
            edges.append((e["id"], src))
        act = producer.get(e["id"])
        if act:
            edges.extend((e["id"], u) for u in act.get("used", []))
    return edges


def test_upstream_of_ds3():
    store = twin_store()
    got = {x.value.rsplit("/", 1)[1] for x in upstream(store, ent("DS3"))}
    assert got == {"DS2", "twinModel", "DS1", "modelConfig", "code"}


def test_upstream_matches_reachability_oracle_on_fixtures():
    for name, account in [("digital-twin", digital_twin_account()), ("testing-process", process_account())]:
        doc = yaml.safe_load((FIXTURES / name / "account.yaml").read_text())
        edges = yaml_edges(doc)
        template = digital_twin_template() if name == "digital-twin" else process_template()
        store = Store([workflow_graph(template, account)])
        for e in doc["entities"]:
            expected = {ent(x) for x in reachable_upstream(edges, e["id"])}
            assert upstream(store, ent(e["id"])) == expected


def test_upstream_source_and_absent():
    store = twin_store()
    assert upstream(store, ent("DS1")) == set()
    assert upstream(store, "http://example.org/nowhere") == set()


def test_upstream_terminates_on_cycles_and_matches_oracle():
    rng = random.Random(21)
    for _ in range(50):
        n = rng.randint(2, 25)
        edges = [(f"e{rng.randrange(n)}", f"e{rng.randrange(n)}") for _ in range(rng.randint(0, 3 * n))]
        g = Graph([Triple(ent(a), IRI(PROV + "wasDerivedFrom"), ent(b)) for a, b in edges])
        store = Store([g])
        for i in range(n):
            assert upstream(store, ent(f"e{i}")) == {ent(x) for x in reachable_upstream(edges, f"e{i}")}


def test_cycles_warn_in_completeness():
    g = Graph([Triple(ent("a"), IRI(PROV + "wasDerivedFrom"), ent("b")), Triple(ent("b"), IRI(PROV + "wasDerivedFrom"), ent("a"))])
    report = check_completeness(Store([g]))
    assert any(w.startswith("derivation cycle") for w in report.warnings)


def test_upstream_is_fast():
    store = twin_store()
    start = time.perf_counter()
    upstream(store, ent("DS3"))
    assert time.perf_counter() - start < 0.1


def test_single_activity_graph():
    acc = ExecutionAccount(
        "run",
        agents=[Agent("alice")],
        entities=[Entity("out")],
        activities=[Activity("work", "alice", "2024-01-01T00:00:00Z", "2024-01-01T01:00:00Z", generated=["out"])],
    )
    g = to_prov_rdf(acc)
    act = mint(BASE, "activity", "work")
    assert Triple(ent("out"), IRI(PROV + "wasGeneratedBy"), act) in g
    assert Triple(act, IRI(PROV + "wasAssociatedWith"), mint(BASE, "agent", "alice")) in g


def test_empty_account_graph():
    g = to_prov_rdf(ExecutionAccount("nothing"))
    assert {t.subject for t in g} == {mint(BASE, "account", "nothing")}
    assert Triple(mint(BASE, "account", "nothing"), RDF_TYPE, PROVX.WorkflowExecutionAccount) in g


def test_digital_twin_chain():
    g = workflow_graph(digital_twin_template(), digital_twin_account())
    train, apply_ = mint(BASE, "activity", "trainTwin"), mint(BASE, "activity", "applyTwin")
    gen, used = IRI(PROV + "wasGeneratedBy"), IRI(PROV + "used")
    assert Triple(ent("DS3"), gen, apply_) in g
    assert Triple(ent("twinModel"), gen, train) in g
    assert {t.object for t in g.triples_matching(apply_, used)} == {ent("twinModel"), ent("DS2")}
    assert {t.object for t in g.triples_matching(train, used)} == {ent("DS1"), ent("modelConfig"), ent("code")}


@pytest.mark.parametrize("name", ["digital-twin", "testing-process"])
def test_prov_output_passes_prov_shapes(name):
    g = parse_turtle((FIXTURES / "golden" / f"{name}.ttl").read_text())
    assert check_shapes(Store([g]), prov_shapes()) == []


def test_dangling_references():
    acc = ExecutionAccount("a", agents=[Agent("x")], activities=[Activity("act", "x", None, None, used=["ghost"])])
    with pytest.raises(errors.DanglingReference):
        to_prov_rdf(acc)
    acc = ExecutionAccount("a", template_id="t", agents=[Agent("x")], activities=[Activity("act", "x", None, None, template_process_id="nope")])
    with pytest.raises(errors.DanglingReference):
        to_prov_rdf(acc, WorkflowTemplate("t"))


def test_account_invariants():
    with pytest.raises(errors.InputError):
        ExecutionAccount("a", agents=[Agent("x")], activities=[Activity("act", "x", "2024-01-02T00:00:00Z", "2024-01-01T00:00:00Z")]).validate()
    twice = ExecutionAccount(
        "a",
        agents=[Agent("x")],
        entities=[Entity("e")],
        activities=[Activity("one", "x", None, None, generated=["e"]), Activity("two", "x", None, None, generated=["e"])],
    )
    with pytest.raises(errors.InputError):
        twice.validate()


def test_timestamps_need_timezone():
    assert parse_timestamp("2024-01-01T00:00:00Z").utcoffset().total_seconds() == 0
    with pytest.raises(errors.InputError):
        parse_timestamp("2024-01-01T00:00:00")


def test_template_order_is_topological():
    t = WorkflowTemplate(
        "t",
        processes=[TemplateProcess("use", consumes=["x"]), TemplateProcess("make", produces=["x"])],
        variables=[TemplateVariable("x")],
    )
    with pytest.raises(errors.InputError):
        t.validate()


def test_bind_execution_full_and_partial():
    t, a = process_template(), process_account()
    rep = bind_execution(t, a)
    assert len(rep.bound_processes) == 4 and rep.unbound_template_processes == [] and rep.extra_activities == []
    partial = ExecutionAccount(a.id, a.template_id, a.activities[:3], a.entities, a.agents)
    rep = bind_execution(t, partial)
    assert len(rep.bound_processes) == 3 and len(rep.unbound_template_processes) == 1


def test_bind_execution_partition_property():
    rng = random.Random(9)
    t = process_template()
    pids = [p.id for p in t.processes]
    for _ in range(100):
        acts = [Activity(f"a{i}", None, None, None, rng.choice(pids + [None, "other"])) for i in range(rng.randint(0, 7))]
        acc = ExecutionAccount("x", t.id, acts)
        rep = bind_execution(t, acc)
        assert len(rep.bound_processes) + len(rep.unbound_template_processes) == len(t.processes)
        assert len(rep.bound_processes) + len(rep.extra_activities) == len(acts)


def test_bind_execution_template_mismatch():
    with pytest.raises(errors.TemplateMismatch):
        bind_execution(process_template(), ExecutionAccount("x", "other"))


def test_completeness_full_and_r6_gap():
    t, a = process_template(), process_account()
    full = check_completeness(Store([workflow_graph(t, a)]))
    assert full.score == 1.0 and full.violations == []
    # drop the execute-test activity: its template process is left without an execution
    short = ExecutionAccount(a.id, a.template_id, [x for x in a.activities if x.template_process_id != "executeTest"], a.entities, a.agents)
    report = check_completeness(Store([workflow_graph(t, short)]))
    assert "R6" in {v.rule_id for v in report.violations}
    assert report.score < 1.0


def test_completeness_monotone_under_repair():
    t, a = process_template(), process_account()
    full = workflow_graph(t, a)
    repairable = {PROV + p for p in ("wasGeneratedBy", "wasAssociatedWith", "startedAtTime", "endedAtTime")}
    repairable.add(str(PROVX.correspondsToTemplateProcess))
    triples = sorted(full, key=repr)
    candidates = [x for x in triples if x.predicate.value in repairable]
    rng = random.Random(13)
    for _ in range(30):
        removed = rng.sample(candidates, 6)
        g = Graph([x for x in triples if x not in removed])
        score = check_completeness(Store([g])).score
        assert score < 1.0
        for x in removed:
            g.add(x)
            new = check_completeness(Store([g])).score
            assert new >= score
            score = new
        assert score == 1.0


def test_empty_store_is_vacuous():
    report = check_completeness(Store())
    assert report.score == 1.0 and report.warnings == ["no targets"]


def test_profile_selection_and_weights():
    assert {r.id for r in profile_from_ids(["R1", "R7"])} == {"R1", "R7"}
    with pytest.raises(errors.InputError):
        profile_from_ids(["R9"])
    g = Graph([Triple(mint(BASE, "activity", "x"), RDF_TYPE, IRI(PROV + "Activity"))])
    plain = check_completeness(Store([g]), profile_from_ids(["R2", "R3"]))
    weighted = check_completeness(Store([g]), profile_from_ids(["R2", "R3"]), {"R2": 0.0})
    assert plain.score == 0.0 and weighted.score == 0.0
    assert plain.as_dict()["rules"] == {"R2": {"satisfied": 0, "total": 1}, "R3": {"satisfied": 0, "total": 2}}


@pytest.mark.parametrize("name", ["digital-twin", "testing-process"])
def test_yaml_documents_round_trip(name):
    tdoc = yaml.safe_load((FIXTURES / name / "template.yaml").read_text())
    adoc = yaml.safe_load((FIXTURES / name / "account.yaml").read_text())
    template, account = template_from_dict(tdoc), account_from_dict(adoc)
    assert account_to_dict(account_from_dict(account_to_dict(account))) == account_to_dict(account)
    assert to_prov_rdf(account, template) == to_prov_rdf(account_from_dict(account_to_dict(account)), template)
