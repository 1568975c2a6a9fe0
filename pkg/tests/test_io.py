import json
import random

import pydot
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from virusmachines import (
    InvalidMachineError,
    build_comb_b,
    build_example,
    build_lin_fin,
    build_union,
    export_dot,
    parse_machine,
    serialize_machine,
)
from virusmachines.io import MachineFormatError
from virusmachines.randomized import random_machine

from conftest import machines


# -- round trip ---------------------------------------------------------------

def test_serialized_key_order(example):
    doc = json.loads(serialize_machine(example))
    keys = [k for k in doc if k != "note"]
    assert keys == ["name", "hosts", "channels", "instructions", "instruction_edges",
                    "attachments", "initial_instruction"]
    assert doc["hosts"][0] == {"id": "h1", "viruses": 2}


def test_note_survives_round_trip():
    m = build_lin_fin(0, 2, 3)
    assert m.note and parse_machine(serialize_machine(m)).note == m.note


@pytest.mark.parametrize("m", [build_example(), build_comb_b(1, 2, 0, 2, 3), build_union([(2, 1), (3, 1)])])
def test_round_trip_constructions(m):
    text = serialize_machine(m)
    back = parse_machine(text)
    assert back == m and serialize_machine(back) == text


@settings(max_examples=100, deadline=None)
@given(machines())
def test_round_trip_drawn(m):
    assert parse_machine(serialize_machine(m)) == m


# -- rejections ---------------------------------------------------------------

def _doc(**changes):
    d = json.loads(serialize_machine(build_example()))
    d.update(changes)
    return d


def test_bad_json_reports_position():
    with pytest.raises(MachineFormatError) as err:
        parse_machine('{"name": "x",\n  "hosts": [}')
    assert err.value.where.startswith("line 2")


def test_unknown_top_key():
    with pytest.raises(MachineFormatError, match="unknown keys"):
        parse_machine(json.dumps(_doc(colour="red")))


def test_missing_top_key():
    d = _doc()
    del d["channels"]
    with pytest.raises(MachineFormatError, match="missing"):
        parse_machine(json.dumps(d))


def test_wrong_type_names_field_path():
    d = _doc()
    d["channels"][1]["weight"] = "2"
    with pytest.raises(MachineFormatError) as err:
        parse_machine(json.dumps(d))
    assert err.value.where == "channels[1].weight"


def test_bool_is_not_an_integer():
    d = _doc()
    d["hosts"][0]["viruses"] = True
    with pytest.raises(MachineFormatError):
        parse_machine(json.dumps(d))


def test_unknown_key_in_record():
    d = _doc()
    d["attachments"][0]["channel"]["via"] = "h9"
    with pytest.raises(MachineFormatError) as err:
        parse_machine(json.dumps(d))
    assert err.value.where == "attachments[0].channel"


def test_structurally_invalid_machine():
    d = _doc()
    d["instruction_edges"][0]["weight"] = 3
    with pytest.raises(InvalidMachineError) as err:
        parse_machine(json.dumps(d))
    assert "edge-weight" in {v.code for v in err.value.report.violations}


# -- DOT ----------------------------------------------------------------------

def _graph(text):
    (g,) = pydot.graph_from_dot_data(text)
    return g


def _shape(g, name):
    (node,) = g.get_node(f'"{name}"')
    return node.get("shape")


def test_dot_host_layer(example):
    g = _graph(export_dot(example, "host"))
    assert _shape(g, "h1") == "box" and _shape(g, "h0") == "doubleoctagon"
    assert len(g.get_edges()) == len(example.channels)


def test_dot_instruction_layer(example):
    g = _graph(export_dot(example, "instruction"))
    assert all(_shape(g, i) == "circle" for i in example.instructions)
    assert len(g.get_edges()) == len(example.instruction_edges)


def test_dot_combined_layer(example):
    g = _graph(export_dot(example, "combined"))
    dashed = [e for e in g.get_edges() if e.get("style") == "dashed"]
    assert len(dashed) == len(example.attachments)
    points = [n for n in g.get_nodes() if n.get("shape") == "point"]
    assert len(points) == len(example.channels)
    n_edges = 2 * len(example.channels) + len(example.instruction_edges) + len(example.attachments)
    assert len(g.get_edges()) == n_edges


def test_dot_weight_one_has_no_label(example):
    g = _graph(export_dot(example, "instruction"))
    labels = {(e.get_source(), e.get_destination()): e.get("label") for e in g.get_edges()}
    assert labels[('"i1"', '"i1"')] == '"2"'
    assert labels[('"i1"', '"i2"')] is None


def test_dot_unknown_layer(example):
    with pytest.raises(ValueError):
        export_dot(example, "everything")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_dot_always_parses(seed):
    m = random_machine(random.Random(seed), max_hosts=4, max_instructions=6)
    g = _graph(export_dot(m))
    assert len([e for e in g.get_edges() if e.get("style") == "dashed"]) == len(m.attachments)
