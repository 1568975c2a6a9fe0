import random
from graphlib import CycleError, TopologicalSorter

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from virusmachines import (
    ExplorationBounds,
    acyclic_host_bound,
    build_arith,
    build_example,
    build_finite_set,
    build_nat,
    build_singleton,
    classify,
    enumerate_generated_set,
    ingredient_profile,
    longest_simple_cycle,
    make_machine,
    prune_to_rooted_tree,
    reachable_instructions,
    tree_depth,
)
from virusmachines.analysis import CyclicGraphError, GraphTooLargeError
from virusmachines.randomized import add_unreachable_instructions, chain_flush_machine, random_machine


# -- reachability -------------------------------------------------------------

def test_reachable_example(example):
    assert reachable_instructions(example) == {"i1", "i2", "i3", "i4"}


def test_prune_drops_dead_instructions():
    m = make_machine([("h1", 1)], [("h1", "h0", 1)], ["i1", "i2", "dead"],
                     edges=[("i1", "i2"), ("dead", "i1")], attachments={"dead": ("h1", "h0")})
    p = prune_to_rooted_tree(m)
    assert p.instructions == ("i1", "i2")
    assert p.attachments == () and len(p.instruction_edges) == 1


def test_prune_is_identity_when_nothing_dead(nat):
    assert prune_to_rooted_tree(nat) is nat


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_prune_preserves_generated_set(seed):
    rng = random.Random(seed)
    m = random_machine(rng, planted_loop=seed % 2 == 0)
    padded = add_unreachable_instructions(m, rng)
    b = ExplorationBounds(20)
    assert enumerate_generated_set(prune_to_rooted_tree(padded), b).numbers == enumerate_generated_set(m, b).numbers


# -- cycles and depth ---------------------------------------------------------

def test_longest_cycle_nat(nat):
    assert longest_simple_cycle(nat.instruction_adjacency()) == 3
    assert longest_simple_cycle(nat.host_adjacency()) == 2


def test_longest_cycle_self_loop_and_tree():
    assert longest_simple_cycle({"a": ["a"]}) == 1
    assert longest_simple_cycle({"a": ["b", "c"], "b": ["d"], "c": [], "d": []}) == 0


def test_longest_cycle_prefers_longer_of_two():
    g = {"a": ["b"], "b": ["a", "c"], "c": ["d"], "d": ["e"], "e": ["b"]}
    assert longest_simple_cycle(g) == 4


def test_vertex_cap():
    g = {str(k): [str(k + 1)] for k in range(70)}
    with pytest.raises(GraphTooLargeError):
        longest_simple_cycle(g)


def _nx_longest(g):
    dg = nx.DiGraph()
    for v, succ in g.items():
        dg.add_node(v)
        dg.add_edges_from((v, w) for w in succ)
    return max((len(c) for c in nx.simple_cycles(dg)), default=0)


def _acyclic(g):
    try:
        TopologicalSorter(g).prepare()
    except CycleError:
        return False
    return True


graphs = st.integers(1, 7).flatmap(
    lambda n: st.fixed_dictionaries(
        {str(v): st.lists(st.sampled_from([str(k) for k in range(n)]), unique=True, max_size=3) for v in range(n)}
    )
)


@settings(max_examples=200, deadline=None)
@given(graphs)
def test_longest_cycle_matches_networkx(g):
    got = longest_simple_cycle(g)
    assert got == _nx_longest(g)
    assert (got == 0) == _acyclic(g)


def test_tree_depth_examples():
    assert tree_depth({"a": []}, "a") == 0
    assert tree_depth({"a": ["b", "c"], "b": ["d"], "c": [], "d": []}, "a") == 2
    assert tree_depth({"a": ["b"], "b": [], "z": ["z"]}, "a") == 1


def test_tree_depth_refuses_cycles(nat):
    with pytest.raises(CyclicGraphError):
        tree_depth(nat.instruction_adjacency(), "i1")


# -- profiles -----------------------------------------------------------------

def test_profile_example(example):
    rep = enumerate_generated_set(example, ExplorationBounds(20))
    prof = ingredient_profile(example, rep)
    assert prof.as_tuple() == (True, 2, 4, 2, 2, 2, 0, 1) and prof.nvh_exact


def test_profile_singleton():
    m = build_singleton(5)
    prof = ingredient_profile(m, enumerate_generated_set(m, ExplorationBounds(5)))
    assert prof.as_tuple() == (True, 1, 1, 1, 5, 1, 0, 0)


def test_profile_arith():
    m = build_arith(2, 3)
    prof = ingredient_profile(m, enumerate_generated_set(m, ExplorationBounds(60)))
    assert prof.as_tuple() == (False, 2, 15, 2, 2, 2, 2, 6)
    assert not prof.nvh_exact


def test_profile_without_enumeration(nat):
    prof = ingredient_profile(nat)
    assert prof.nvh_r is None and not prof.nvh_exact
    assert prof.to_dict()["nvh"] is None and prof.to_dict()["beta"] == "T"


# -- acyclic bound ------------------------------------------------------------

def test_bound_example(example):
    assert acyclic_host_bound(example) == 6


def test_bound_chain():
    # h1 -3-> h2 -3-> h0 with 1 virus in h1: one virus becomes 9
    m = make_machine([("h1", 1), ("h2", 0)], [("h1", "h2", 3), ("h2", "h0", 3)],
                     ["i1", "i2", "i3"], edges=[("i1", "i1", 2), ("i1", "i2", 1), ("i2", "i2", 2), ("i2", "i3", 1)],
                     attachments={"i1": ("h1", "h2"), "i2": ("h2", "h0")})
    assert acyclic_host_bound(m) == 9
    rep = enumerate_generated_set(m, ExplorationBounds(50))
    assert rep.exact and max(rep.numbers) == 9


def test_bound_refuses_cycles(nat):
    with pytest.raises(CyclicGraphError):
        acyclic_host_bound(nat)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_bound_attained_by_flush(seed):
    m = chain_flush_machine(random.Random(seed))
    rep = enumerate_generated_set(m, ExplorationBounds(500))
    assert rep.exact and rep.numbers == (acyclic_host_bound(m),)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_bound_dominates_outputs(seed):
    m = random_machine(random.Random(seed), host_acyclic=True, planted_loop=True)
    rep = enumerate_generated_set(m, ExplorationBounds(40))
    assert all(n <= acyclic_host_bound(m) for n in rep.numbers)


# -- classification -----------------------------------------------------------

def _classify(m, steps=40):
    return classify(m, ingredient_profile(m, enumerate_generated_set(m, ExplorationBounds(steps))))


def test_classify_singleton():
    cls = _classify(build_singleton(4))
    assert {"Singleton", "NFIN", "NLinFIN", "NCombFIN"} <= cls.members()


def test_classify_example_is_finite_by_host_graph():
    cls = _classify(build_example())
    rules = {v.rule: v.verdict for v in cls.verdicts}
    assert rules["host-acyclic"] == "member" and rules["instruction-tree"] == "inconclusive"


def test_classify_finite_set_by_instruction_tree():
    cls = _classify(build_finite_set([1, 3]))
    rules = {v.rule: v.verdict for v in cls.verdicts}
    assert rules["instruction-tree"] == "member" and "nfin-instgraph" in cls.signatures()


def test_classify_nat_claims_nothing(nat):
    cls = _classify(nat)
    assert cls.members() == set()
    assert "nfin-strict" in cls.signatures()


def test_classify_report_serializes(nat):
    rows = _classify(nat).to_list()
    assert all(set(r) == {"rule", "family", "verdict", "justification"} for r in rows)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_member_nfin_means_halting_bounded(seed):
    m = random_machine(random.Random(seed), instruction_acyclic=True)
    cls = _classify(m, steps=60)
    assert "NFIN" in cls.members()
    assert enumerate_generated_set(m, ExplorationBounds(len(m.instructions) + 1)).exact
