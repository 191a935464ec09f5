import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smcchain.chain import MarkovChain, gen_fig1, gen_fig3, gen_fig4, gen_random
from smcchain.exact import (bscc_inventory, bsccs, exact_ltl, exact_mp, exact_reachability,
                            explicit_product, reach_vector, sim_termination_estimate,
                            sim_termination_sample)

from automata import always_eventually, empty, eventually, eventually_always, universal
from oracles import bsccs_by_closure, reach_by_iteration, stationary_by_power


def test_fig1_bsccs():
    assert bsccs(gen_fig1(5)) == [frozenset({6}), frozenset({7, 8})]
    assert bscc_inventory(gen_fig1(5)) == (2, 2)


@pytest.mark.parametrize("n", [1, 4, 16])
def test_fig3_bsccs(n):
    assert bsccs(gen_fig3(n)) == [frozenset({n})]


@pytest.mark.parametrize("N, M", [(1, 1), (3, 2), (50, 5)])
def test_fig4_bsccs(N, M):
    comps = bsccs(gen_fig4(N, M))
    assert len(comps) == 2 and all(len(c) == M for c in comps)


@given(st.integers(1, 9), st.integers(1, 3), st.integers(0, 10**6))
def test_bsccs_match_closure_oracle(n, d, seed):
    c = gen_random(n, d, seed)
    assert bsccs(c) == bsccs_by_closure(c.dense())
    P = c.dense()
    for comp in bsccs(c):
        idx = sorted(comp)
        assert P[np.ix_(idx, idx)].sum(axis=1) == pytest.approx(1.0)


def test_fig_reachability():
    assert exact_reachability(gen_fig1(5), "goal") == pytest.approx(0.5, abs=1e-12)
    assert exact_reachability(gen_fig3(10), "goal") == pytest.approx(1.0, abs=1e-9)
    assert exact_reachability(gen_fig4(20, 3), "goal") == pytest.approx(0.5, abs=1e-12)
    assert exact_reachability(gen_fig4(1500, 2), "goal") == pytest.approx(0.5, abs=1e-9)


def test_goal_everything():
    c = gen_random(7, 3, 2)
    assert exact_reachability(c, range(7)) == 1.0


@given(st.integers(1, 10), st.integers(1, 3), st.integers(0, 10**6))
def test_reachability_matches_value_iteration(n, d, seed):
    c = gen_random(n, d, seed)
    goal = c.states_with_label("goal")
    got = exact_reachability(c, "goal")
    assert 0.0 <= got <= 1.0
    assert got == pytest.approx(reach_by_iteration(c.dense(), goal, c.initial_vector()), abs=1e-9)
    bigger = exact_reachability(c, goal | {n - 1})
    assert bigger >= got - 1e-12


@pytest.mark.parametrize("seed", range(3))
def test_reachability_matches_bounded_simulation(seed):
    c = gen_random(10, 3, 40 + seed)
    P = c.dense()
    goal = c.label_mask("goal")
    cum = np.cumsum(P, axis=1)
    rng = np.random.default_rng(seed)
    n = 100_000
    state = np.zeros(n, dtype=np.int64)
    hit = goal[state].copy()
    for _ in range(1000):
        u = rng.random(n)
        state = (u[:, None] >= cum[state]).sum(axis=1).clip(max=c.n_states - 1)
        hit |= goal[state]
    truth = exact_reachability(c, "goal")
    assert abs(hit.mean() - truth) <= 3 * math.sqrt(max(truth * (1 - truth), 1e-12) / n) + 1e-12


def test_reach_vector_zero_off_goal():
    x = reach_vector(gen_fig1(3), "goal")
    assert x[1] == 1.0 and x[5] == 0.0 and x[0] == pytest.approx(0.5)


def test_exact_mp_examples():
    c = MarkovChain.from_rows([[(0, 0.5), (1, 0.5)], [(1, 0.3), (2, 0.7)], [(1, 1.0)]],
                              rewards=[1.0, 0.0, 1.0])
    P = np.array([[0.3, 0.7], [1.0, 0.0]])
    assert exact_mp(c) == pytest.approx(stationary_by_power(P) @ [0.0, 1.0], abs=1e-12)
    assert exact_mp(gen_fig4(5, 2)) == pytest.approx(0.5, abs=1e-12)


@given(st.integers(1, 6), st.integers(1, 3), st.integers(0, 10**6))
def test_exact_mp_matches_oracles(n, d, seed):
    c = gen_random(n, d, seed)
    P = c.dense()
    init = c.initial_vector()
    total = 0.0
    for comp in bsccs_by_closure(P):
        idx = sorted(comp)
        pi = stationary_by_power(P[np.ix_(idx, idx)])
        total += reach_by_iteration(P, comp, init) * (pi @ c.rewards[idx])
    assert exact_mp(c) == pytest.approx(total, abs=1e-9)


def test_exact_mp_matches_long_run_average():
    rows = [[(0, 0.25), (1, 0.75)], [(2, 1.0)], [(0, 0.5), (3, 0.5)], [(4, 1.0)], [(0, 0.5), (2, 0.5)]]
    c = MarkovChain.from_rows(rows, rewards=[0.0, 1.0, 0.5, 0.25, 0.75])
    rng = np.random.default_rng(1)
    cum = np.cumsum(c.dense(), axis=1)
    s, total, n = 0, 0.0, 300_000
    for u in rng.random(n):
        s = int(np.searchsorted(cum[s], u, side="right"))
        total += c.rewards[s]
    assert abs(total / n - exact_mp(c)) < 0.01


def test_exact_ltl_examples():
    c = gen_fig1(3)
    assert exact_ltl(c, universal()) == pytest.approx(1.0)
    assert exact_ltl(c, empty()) == 0.0
    assert exact_ltl(c, eventually()) == pytest.approx(0.5, abs=1e-12)


@given(st.integers(1, 8), st.integers(1, 3), st.integers(0, 10**6))
def test_eventually_agrees_with_reachability(n, d, seed):
    c = gen_random(n, d, seed)
    assert exact_ltl(c, eventually()) == pytest.approx(exact_reachability(c, "goal"), abs=1e-9)


@given(st.integers(1, 8), st.integers(1, 3), st.integers(0, 10**6))
def test_ltl_complements(n, d, seed):
    # ◇□a and □◇¬a partition the runs, and □◇a ≥ ◇□a
    c = gen_random(n, d, seed)
    fg = exact_ltl(c, eventually_always())
    gf = exact_ltl(c, always_eventually())
    assert gf >= fg - 1e-9
    assert 0.0 <= fg <= 1.0 and 0.0 <= gf <= 1.0


@given(st.integers(1, 8), st.integers(1, 3), st.integers(0, 10**6))
def test_universal_product_bscc_count(n, d, seed):
    c = gen_random(n, d, seed)
    prod, _ = explicit_product(c, universal())
    P = c.dense()
    reachable = {0}
    frontier = [0]
    while frontier:
        s = frontier.pop()
        for t in np.flatnonzero(P[s]):
            if t not in reachable:
                reachable.add(int(t))
                frontier.append(int(t))
    assert len(bsccs(prod)) == sum(1 for comp in bsccs(c) if comp <= reachable)


def test_sim_termination_examples():
    c = MarkovChain.from_rows([[(1, 1.0)], [(1, 1.0)]], labels={"goal": [0]})
    assert sim_termination_sample(c, "goal", 0.5, (0, 0))
    unreachable = MarkovChain.from_rows([[(0, 1.0)], [(1, 1.0)]], labels={"goal": [1]})
    assert sim_termination_estimate(unreachable, "goal", 0.01, 200, 0) == 0.0


def test_sim_termination_underestimates_deep_chain():
    assert sim_termination_estimate(gen_fig3(18), "goal", 1e-3, 300, 0) < 0.5
