import math

import numpy as np
import pytest

from smcchain.chain import MarkovChain, PathState, ValidationError, gen_fig1, gen_random, next_state
from smcchain.exact import exact_reachability
from smcchain.reach import (GoalUnknownLabel, Termination, reach_sampler, single_path_reach,
                            verify_reach)
from smcchain.sampling import DivergedError
from smcchain.stats import HypothesisSpec

from oracles import worst_sigma


def test_initial_goal_is_immediate_yes():
    c = MarkovChain.from_rows([[(1, 1.0)], [(1, 1.0)]], labels={"goal": [0]})
    s = single_path_reach(c, "goal", 1.0, 0.1, (0, 0))
    assert s.outcome and s.path_length == 1 and s.terminated_by is Termination.GOAL


def test_outcome_iff_goal_termination():
    task = reach_sampler(gen_fig1(2), "goal", 0.01, 0.01, 8)
    for i in range(200):
        s = task(i)
        assert s.outcome == (s.terminated_by is Termination.GOAL)


def test_fig1_rate():
    # truth 0.5, sampler bias at most delta downwards
    n, delta = 10_000, 0.001
    task = reach_sampler(gen_fig1(3), "goal", 0.01, delta, 17)
    mean = sum(task(i).outcome for i in range(n)) / n
    sigma = math.sqrt(0.25 / n)
    assert 0.5 - delta - 3 * sigma <= mean <= 0.5 + 3 * sigma


@pytest.mark.parametrize("seed", range(5))
def test_yes_paths_really_hit_goal(seed):
    c = gen_random(8, 3, seed)
    goal = c.states_with_label("goal")
    pmin = float(c.probs.min())
    for i in range(50):
        s = single_path_reach(c, "goal", pmin, 0.05, (seed, i))
        path = PathState.fresh(seed, i)
        states = [next_state(c, path) for _ in range(s.path_length)]
        assert (states[-1] in goal) == s.outcome
        assert not any(x in goal for x in states[:-1])


def test_unknown_goal_label():
    with pytest.raises(GoalUnknownLabel):
        single_path_reach(gen_fig1(1), "nope", 0.01, 0.1, (0, 0))


def test_diverged_is_loud():
    c = gen_fig1(1)
    task = reach_sampler(c, [], 0.01, 0.001, 0, max_steps=50)
    with pytest.raises(DivergedError) as info:
        task(3)
    assert info.value.path_index == 3


def test_pmin_overestimate_refused():
    spec = HypothesisSpec(0.4, 0.01, 0.01, 0.01, 0.001)
    with pytest.raises(ValidationError):
        verify_reach(gen_fig1(3), "goal", spec, 0, pmin=0.02)


@pytest.mark.parametrize("p, expected", [(0.4, "H0"), (0.6, "H1")])
def test_verify_decisions(p, expected):
    spec = HypothesisSpec(p, 0.01, 0.01, 0.01, 0.001)
    report = verify_reach(gen_fig1(3), "goal", spec, 21)
    assert report.decision == expected
    assert report.max_path_length >= report.mean_path_length > 0


def test_verify_replay_and_thread_independence():
    spec = HypothesisSpec(0.45, 0.02, 0.05, 0.05)
    a = verify_reach(gen_fig1(3), "goal", spec, 4).to_json()
    assert verify_reach(gen_fig1(3), "goal", spec, 4).to_json() == a
    assert verify_reach(gen_fig1(3), "goal", spec, 4, threads=3).to_json() == a


@pytest.mark.parametrize("seed", range(4))
def test_sandwich_on_random_chains(seed):
    c = gen_random(8, 3, 100 + seed)
    truth = exact_reachability(c, "goal")
    delta, n = 0.01, 4000
    task = reach_sampler(c, "goal", float(c.probs.min()), delta, seed)
    mean = np.mean([task(i).outcome for i in range(n)])
    sigma = worst_sigma(truth - delta, truth, n)
    assert truth - delta - 3 * sigma <= mean <= truth + 3 * sigma
