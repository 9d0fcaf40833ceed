import random
from dataclasses import replace

import pytest

from conftest import FIXTURES
from reprokg import errors
from reprokg.fixtures import ucd_configuration, zhaw_configuration
from reprokg.rdf import Graph, Triple
from reprokg.rdf.terms import RDF_TYPE
from reprokg.scm import (
    Attribute,
    ConnectionEdge,
    ConnectionPoint,
    EndpointRef,
    SystemConfiguration,
    SystemNode,
    diff_configurations,
    dump_configuration_yaml,
    from_rdf,
    load_configuration,
    load_configuration_yaml,
    to_rdf,
    validate_configuration,
)
from reprokg.vocab import SCM


def codes(findings, severity="violation"):
    return sorted(f.code for f in findings if f.severity == severity)


def test_ucd_fixture_has_no_violations():
    cfg = ucd_configuration()
    assert len(cfg.systems) == 5
    assert codes(validate_configuration(cfg)) == []


def test_fixture_files_match_builders():
    assert load_configuration(FIXTURES / "ucd" / "config.yaml").structurally_equal(ucd_configuration())
    assert load_configuration(FIXTURES / "zhaw" / "config.yaml").structurally_equal(zhaw_configuration())


def test_domain_mismatch():
    cfg = SystemConfiguration(
        "x",
        systems=[
            SystemNode("a", "PVInverter", connection_points=[ConnectionPoint("ac", "ElectricalAC")]),
            SystemNode("b", "RTComputer", connection_points=[ConnectionPoint("eth", "ICT")]),
        ],
        connections=[ConnectionEdge("e", EndpointRef("a", "ac"), EndpointRef("b", "eth"), "ElectricalAC")],
    )
    assert "domain-mismatch" in codes(validate_configuration(cfg))


def test_empty_configuration_vacuous():
    assert validate_configuration(SystemConfiguration("empty")) == []


def test_dangling_duplicate_and_warnings():
    cfg = SystemConfiguration(
        "x",
        is_test_setup=True,
        systems=[
            SystemNode("a", "PVInverter", connection_points=[ConnectionPoint("p", "ICT")]),
            SystemNode("a", "Sensor"),
            SystemNode("lonely", "Sensor"),
        ],
        connections=[ConnectionEdge("e", EndpointRef("a", "p"), EndpointRef("ghost", "q"), "ICT")],
    )
    found = validate_configuration(cfg)
    assert {"dangling-endpoint", "duplicate-id"} <= set(codes(found))
    assert {"isolated-system", "missing-sut"} <= set(codes(found, "warning"))


def test_validation_is_order_independent():
    rng = random.Random(0)
    cfg = ucd_configuration()
    cfg.systems.append(SystemNode("spare", "Sensor"))
    base = validate_configuration(cfg)
    for _ in range(10):
        shuffled = replace(cfg, systems=rng.sample(cfg.systems, len(cfg.systems)),
                           connections=rng.sample(cfg.connections, len(cfg.connections)))
        assert validate_configuration(shuffled) == base


def test_empty_configuration_rdf():
    g = to_rdf(SystemConfiguration("empty"))
    assert len(g) == 2
    assert {t.predicate for t in g} == {RDF_TYPE, SCM.localId}


def test_single_system_single_point_rdf():
    cfg = SystemConfiguration("one", systems=[SystemNode("s", "PVSystem", connection_points=[ConnectionPoint("p", "ICT")])])
    g = to_rdf(cfg)
    # config: type, id, hasSystem; system: type, id, hasType, hasConnectionPoint; point: type, id, inDomain
    assert len(g) == 10
    preds = {t.predicate for t in g}
    assert {SCM.hasType, SCM.hasConnectionPoint, SCM.inDomain} <= preds


@pytest.mark.parametrize("factory", [ucd_configuration, zhaw_configuration])
def test_rdf_round_trip(factory):
    cfg = factory()
    assert from_rdf(to_rdf(cfg)).structurally_equal(cfg)


def test_round_trip_random_configurations():
    rng = random.Random(12)
    domains = ["ElectricalAC", "ElectricalDC", "ICT"]
    for n in range(30):
        systems = []
        for i in range(rng.randint(0, 5)):
            points = [ConnectionPoint(f"p{j}", rng.choice(domains), rng.choice(["", "port"])) for j in range(rng.randint(0, 3))]
            attrs = [Attribute(f"a{j}", rng.choice([1, 2.5, "x", True]), rng.choice([None, "V"])) for j in range(rng.randint(0, 2))]
            systems.append(SystemNode(f"s{i}", rng.choice(["PVSystem", "Sensor"]), rng.choice([None, "SuT", "testEquipment"]), points, attrs))
        conns = []
        pts = [(s.id, p) for s in systems for p in s.connection_points]
        for k in range(rng.randint(0, 3)):
            if len(pts) < 2:
                break
            (sa, pa), (sb, pb) = rng.sample(pts, 2)
            if pa.domain == pb.domain:
                conns.append(ConnectionEdge(f"c{k}", EndpointRef(sa, pa.id), EndpointRef(sb, pb.id), pa.domain))
        cfg = SystemConfiguration(f"cfg{n}", systems, conns, set(), rng.random() < 0.5, rng.choice(["", "label"]))
        assert from_rdf(to_rdf(cfg)).structurally_equal(cfg)


def test_from_rdf_missing_domain_is_shape_violation():
    g = to_rdf(ucd_configuration())
    bad = Graph([t for t in g if t.predicate != SCM.inDomain])
    with pytest.raises(errors.ShapeViolation):
        from_rdf(bad)


def test_from_rdf_empty_graph():
    with pytest.raises(errors.EmptyConfiguration):
        from_rdf(Graph())


def test_to_rdf_refuses_invalid():
    cfg = SystemConfiguration("x", systems=[SystemNode("a", "T"), SystemNode("a", "T")])
    with pytest.raises(errors.InvalidConfiguration):
        to_rdf(cfg)


def test_diff_identity():
    cfg = ucd_configuration()
    assert diff_configurations(cfg, cfg).empty


def test_diff_ucd_zhaw():
    report = diff_configurations(ucd_configuration(), zhaw_configuration())
    changes = {(c.id, c.attribute, c.value_a, c.value_b) for c in report.changed_attributes}
    assert changes == {("inverter", "phases", 1, 3), ("inverter", "operatingPoint", 0.62, 0.92)}
    assert not (report.added_systems or report.removed_systems or report.added_connections or report.removed_connections)


def test_diff_added_system_and_mirror():
    a = ucd_configuration()
    b = ucd_configuration()
    b.systems.append(SystemNode("sensor", "Sensor", connection_points=[ConnectionPoint("out", "ICT")]))
    ab, ba = diff_configurations(a, b), diff_configurations(b, a)
    assert ab.added_systems == ["sensor"] and ab.removed_systems == []
    assert ba.removed_systems == ["sensor"]
    u, z = ucd_configuration(), zhaw_configuration()
    fwd = {(c.id, c.attribute, c.value_a, c.value_b) for c in diff_configurations(u, z).changed_attributes}
    back = {(c.id, c.attribute, c.value_b, c.value_a) for c in diff_configurations(z, u).changed_attributes}
    assert fwd == back


def test_diff_matches_by_type_when_ids_differ():
    a = ucd_configuration()
    b = ucd_configuration()
    inv = b.system("inverter")
    inv.id = "pvInverter"
    for c in b.connections:
        c.endpoint_a = EndpointRef("pvInverter", c.endpoint_a.point) if c.endpoint_a.system == "inverter" else c.endpoint_a
        c.endpoint_b = EndpointRef("pvInverter", c.endpoint_b.point) if c.endpoint_b.system == "inverter" else c.endpoint_b
    report = diff_configurations(a, b)
    assert report.empty
    assert ("inverter", "pvInverter") in report.matched_systems


def test_yaml_round_trip():
    cfg = ucd_configuration()
    assert load_configuration_yaml(dump_configuration_yaml(cfg)).structurally_equal(cfg)


def test_yaml_errors():
    with pytest.raises(errors.InputError):
        load_configuration_yaml("id: x\nsystems: [ {type: T} ]")
    with pytest.raises(errors.InputError):
        load_configuration_yaml("- not\n- a mapping")
