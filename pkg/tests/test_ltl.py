import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smcchain.chain import gen_fig1, gen_random
from smcchain.exact import exact_ltl, explicit_product
from smcchain.hoa import eval_label_expr
from smcchain.ltl import (ProductState, is_accepting_set, ltl_sampler, product_step,
                          single_path_ltl, verify_ltl)
from smcchain.stats import HypothesisSpec

from oracles import worst_sigma
from automata import always_eventually, empty, eventually, eventually_always, universal


class FixedStream:
    def __init__(self, u):
        self.u = u

    def random(self):
        return self.u


def test_universal_lift_is_identity():
    c = gen_fig1(2)
    dra = universal()
    rng = np.random.default_rng(0)
    ps = product_step(c, dra, None, rng)
    for _ in range(100):
        ps = product_step(c, dra, ps, rng)
        assert ps.q == 0


def test_eventually_sink_after_goal():
    c = gen_fig1(3)
    dra = eventually()
    ps = product_step(c, dra, None, FixedStream(0.1))
    assert ps == ProductState(0, 0)
    ps = product_step(c, dra, ps, FixedStream(0.1))  # s -> r, r carries goal
    assert ps == ProductState(1, 1)
    for _ in range(5):
        ps = product_step(c, dra, ps, FixedStream(0.5))
        assert ps.q == 1


def _guard_target(dra, q, letter):
    hits = [dst for e, dst in dra.transitions[q] if eval_label_expr(e, letter)]
    assert len(hits) == 1
    return hits[0]


@pytest.mark.parametrize("make", [universal, eventually, always_eventually, eventually_always])
@pytest.mark.parametrize("seed", range(4))
def test_product_faithfulness(make, seed):
    c = gen_random(6, 3, seed)
    dra = make()
    goal_id = c.label_id("goal")
    for s in range(c.n_states):
        for q in range(dra.n_states):
            lo = c.indptr[s]
            for j, (t, _) in enumerate(c.row(s)):
                u = (c.cum[lo + j] + (c.cum[lo + j - 1] if j else 0.0)) / 2
                got = product_step(c, dra, ProductState(s, q), FixedStream(u))
                letter = {0} if goal_id in c.labels[t] else set()
                assert got == ProductState(t, _guard_target(dra, q, letter))
    prod, states = explicit_product(c, dra)
    for i, ps in enumerate(states):
        for j, p in prod.row(i):
            nxt = states[j]
            assert dict(c.row(ps.s))[nxt.s] == p
            letter = {0} if goal_id in c.labels[nxt.s] else set()
            assert nxt.q == _guard_target(dra, ps.q, letter)


def test_accepting_examples():
    ev = eventually()
    assert is_accepting_set([ProductState(3, 1)], ev)
    assert is_accepting_set([ProductState(5, 1), ProductState(6, 1)], ev)
    assert not is_accepting_set([ProductState(3, 0)], ev)
    ea = eventually_always()
    assert not is_accepting_set([ProductState(0, 0), ProductState(1, 1)], ea)


@given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 1)), min_size=1, max_size=6),
       st.integers(0, 50))
def test_acceptance_depends_only_on_automaton_states(members, shift):
    for make in (eventually, always_eventually, eventually_always):
        dra = make()
        a = is_accepting_set([ProductState(s, q) for s, q in members], dra)
        b = is_accepting_set([ProductState(s + shift, q) for s, q in members], dra)
        assert a == b


@pytest.mark.parametrize("make, bit", [(universal, True), (empty, False)])
def test_trivial_automata(make, bit):
    c = gen_random(7, 3, 1)
    task = ltl_sampler(c, make(), float(c.probs.min()), 0.05, 2)
    assert all(task(i).outcome == bit for i in range(100))


def test_fig1_eventually_sandwich():
    n, delta = 10_000, 0.001
    task = ltl_sampler(gen_fig1(3), eventually(), 0.01, delta, 5)
    mean = sum(task(i).outcome for i in range(n)) / n
    sigma = math.sqrt(0.25 / n)
    assert 0.5 - delta - 3 * sigma <= mean <= 0.5 + delta + 3 * sigma


@pytest.mark.parametrize("make", [eventually, always_eventually, eventually_always])
@pytest.mark.parametrize("seed", range(10))
def test_two_sided_sandwich_random_chains(make, seed):
    c = gen_random(6, 3, 300 + seed)
    dra = make()
    truth = exact_ltl(c, dra)
    delta, n = 0.02, 1500
    task = ltl_sampler(c, dra, float(c.probs.min()), delta, seed)
    mean = np.mean([task(i).outcome for i in range(n)])
    sigma = worst_sigma(truth - delta, truth + delta, n)
    assert truth - delta - 3 * sigma <= mean <= truth + delta + 3 * sigma


@pytest.mark.parametrize("p, expected", [(0.4, "H0"), (0.6, "H1")])
def test_verify_ltl(p, expected):
    spec = HypothesisSpec(p, 0.01, 0.01, 0.01, 0.001)
    a = verify_ltl(gen_fig1(3), eventually(), spec, 9)
    assert a.decision == expected
    assert verify_ltl(gen_fig1(3), eventually(), spec, 9).to_json() == a.to_json()


def test_unmatched_ap_is_an_error():
    with pytest.raises(KeyError):
        single_path_ltl(gen_fig1(1), eventually("missing"), 0.01, 0.1, (0, 0))
