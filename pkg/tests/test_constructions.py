import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from virusmachines import (
    ExplorationBounds,
    ScriptedPolicy,
    SetSpec,
    brute_force_oracle,
    build_arith,
    build_comb_a,
    build_comb_b,
    build_finite_one_host,
    build_finite_one_virus,
    build_finite_set,
    build_lin_fin,
    build_singleton,
    build_union,
    enumerate_generated_set,
    ingredient_profile,
    predicted_set,
    run_trace,
    validate_machine,
)
from virusmachines.constructions import ConstructionError, build, comb_b_value
from virusmachines.reproduce import arith_horizon_set, comb_b_deviation, finite_exit_script


def gen(m, steps):
    return enumerate_generated_set(m, ExplorationBounds(steps))


# -- closed forms -------------------------------------------------------------

def test_predicted_examples():
    assert predicted_set(SetSpec.lin(1, 2, 3)) == (3, 5, 7)
    assert predicted_set(SetSpec.comb_a(1, 1, 1, 2, 2)) == (3, 4, 5)
    assert predicted_set(SetSpec.arith(2, 3), 12) == (5, 7, 9, 11)
    assert predicted_set(SetSpec.union((2, 3), (5, 1)), 12) == (5, 6, 7, 9, 11)
    assert predicted_set(SetSpec.nat(), 4) == (1, 2, 3, 4)


def test_predicted_infinite_needs_cap():
    with pytest.raises(ValueError):
        predicted_set(SetSpec.nat())


def test_comb_b_value_cases():
    assert comb_b_value(1, 1, 1, 2, 3, 1, 1) == 3
    assert comb_b_value(1, 1, 1, 2, 3, 2, 1) == 6
    assert comb_b_value(2, 3, 0, 3, 1, 1, 2) == 9
    assert comb_b_value(1, 1, 1, 2, 2, 2, 1) is None


# -- builders against closed forms -------------------------------------------

@pytest.mark.parametrize("v", [0, 1, 5, 12])
def test_singleton(v):
    rep = gen(build_singleton(v), 3)
    assert rep.numbers == (v,) and rep.exact


@settings(max_examples=40, deadline=None)
@given(st.sets(st.integers(1, 9), min_size=1, max_size=6))
def test_finite_set_machine(F):
    F = sorted(F)
    m = build_finite_set(F)
    rep = gen(m, 2 * max(F) + 2)
    assert list(rep.numbers) == F and rep.exact
    for m_i in F:
        t = run_trace(m, ScriptedPolicy(finite_exit_script(F, m_i)), 4 * max(F))
        assert t.emitted == m_i and t.steps == 2 * m_i + 1


@settings(max_examples=30, deadline=None)
@given(st.sets(st.integers(1, 7), min_size=1, max_size=4))
def test_finite_one_host(F):
    m = build_finite_one_host(F)
    assert gen(m, 4 * max(F) + 4).numbers == tuple(sorted(F))
    assert ingredient_profile(m).hosts_p == 1


@settings(max_examples=30, deadline=None)
@given(st.sets(st.integers(1, 7), min_size=1, max_size=4))
def test_finite_one_virus(F):
    m = build_finite_one_virus(F)
    rep = gen(m, 4 * max(F) + 4)
    assert rep.numbers == tuple(sorted(F))
    assert rep.observed_nvh == 1 and ingredient_profile(m).beta


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 6), st.integers(1, 4), st.integers(1, 6))
def test_lin_fin(x, n, N):
    assert gen(build_lin_fin(x, n, N), N + 3).numbers == predicted_set(SetSpec.lin(x, n, N))


comb_params = st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(0, 4), st.integers(1, 4), st.integers(1, 4))


@settings(max_examples=30, deadline=None)
@given(comb_params)
def test_comb_a(p):
    assert gen(build_comb_a(*p), 2 * (p[3] + p[4]) + 4).numbers == predicted_set(SetSpec.comb_a(*p))


@settings(max_examples=30, deadline=None)
@given(comb_params)
def test_comb_b_differs_only_at_boundary(p):
    w1, w2, r, N1, N2 = p
    rep = gen(build_comb_b(*p), 2 * (N1 + N2) + 4)
    extra, missing = comb_b_deviation(*p, rep.numbers)
    assert not missing
    assert extra <= {(w1 + w2) * min(N1, N2) + r}


def test_comb_b_oracle_agrees():
    m = build_comb_b(1, 1, 1, 2, 3)
    assert brute_force_oracle(m, 14).numbers == gen(m, 14).numbers == (3, 5, 6)


@pytest.mark.parametrize("n, r", [(1, 1), (2, 3), (3, 2)])
def test_arith_within_horizon(n, r):
    rep = gen(build_arith(n, r), 90)
    assert set(rep.numbers) == arith_horizon_set(n, r, 90)
    assert rep.observed_nvh == 2 and not rep.exact


def test_union_below_cap():
    rep = gen(build_union([(2, 3), (5, 1)]), 60)
    assert rep.numbers == predicted_set(SetSpec.union((2, 3), (5, 1)), 20)


@pytest.mark.parametrize(
    "spec",
    [SetSpec.singleton(3), SetSpec.finite([1, 4]), SetSpec.nat(), SetSpec.lin(0, 2, 2),
     SetSpec.comb_a(1, 2, 0, 2, 2), SetSpec.comb_b(1, 1, 1, 2, 3), SetSpec.arith(2, 1),
     SetSpec.union((2, 1), (3, 2))],
)
def test_build_dispatch_is_valid(spec):
    assert validate_machine(build(spec)).ok


# -- refusals -----------------------------------------------------------------

@pytest.mark.parametrize(
    "call",
    [
        lambda: build_singleton(-1),
        lambda: build_finite_set([]),
        lambda: build_finite_set([0, 2]),
        lambda: build_lin_fin(0, 0, 2),
        lambda: build_comb_a(0, 1, 1, 1, 1),
        lambda: build_comb_b(1, 1, -1, 1, 1),
        lambda: build_arith(0, 1),
        lambda: build_union([(2, 1)]),
        lambda: build(SetSpec("nope")),
    ],
)
def test_bad_parameters_refused(call):
    with pytest.raises(ConstructionError):
        call()
