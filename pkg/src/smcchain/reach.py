"""Unbounded reachability: one Bernoulli sample per path and the SPRT loop."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .chain import MarkovChain, ValidationError, actual_pmin, make_stream
from .kernels import paths as _k
from .monitor import DEFAULT_CHECK_BOUND, CandidateTracker
from .sampling import (DEFAULT_MAX_STEPS, DivergedError, PathLengthStats, TrackerPool,
                       VerificationReport, ordered_results)
from .stats import Decision, HypothesisSpec, SprtSession


class GoalUnknownLabel(KeyError):
    pass


class Termination(str, Enum):
    GOAL = "goal"
    BSCC_DETECTED = "bscc"


@dataclass(frozen=True)
class ReachSample:
    outcome: bool
    path_length: int
    terminated_by: Termination


def goal_mask(chain: MarkovChain, goal: str | Iterable[int]) -> np.ndarray:
    """Boolean mask from a label name or an explicit collection of states."""
    if isinstance(goal, str):
        if goal not in chain.label_names:
            raise GoalUnknownLabel(f"label {goal!r} is not declared")
        return chain.label_mask(goal)
    mask = np.zeros(chain.n_states, dtype=np.bool_)
    for s in goal:
        if not 0 <= int(s) < chain.n_states:
            raise ValidationError(f"goal state {s} out of range")
        mask[int(s)] = True
    return mask


def check_pmin(chain: MarkovChain, pmin: float | None) -> float:
    """Default to the chain's own minimum; refuse overestimates."""
    true_min = actual_pmin(chain)
    if pmin is None:
        return chain.declared_pmin if chain.declared_pmin is not None else true_min
    if not 0.0 < pmin <= 1.0:
        raise ValidationError("pmin must lie in (0, 1]")
    if pmin > true_min:
        raise ValidationError(f"pmin {pmin} exceeds the chain's smallest probability {true_min}")
    return float(pmin)


def _stream(stream) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    seed, index = stream
    return make_stream(seed, index)


def single_path_reach(chain: MarkovChain, goal, pmin: float, delta: float, stream,
                      check_bound: int = DEFAULT_CHECK_BOUND, max_steps: int = DEFAULT_MAX_STEPS,
                      tracker: CandidateTracker | None = None, _mask=None, _tr=None) -> ReachSample:
    """Sample one path until it hits ``goal`` (YES) or its candidate is
    judged a BSCC (NO).

    ``stream`` is a ``numpy.random.Generator`` or a ``(master_seed, index)``
    pair. Pass ``tracker`` to inspect the final candidate afterwards.
    """
    if not 0.0 < delta <= 1.0:
        raise ValidationError("delta must lie in (0, 1]")
    mask = goal_mask(chain, goal) if _mask is None else _mask
    if tracker is not None:
        tracker.check_bound = int(check_bound)
        tracker.reserve(chain.n_states, chain.n_transitions)
        tr = tracker._state
    else:
        tr = _tr if _tr is not None else TrackerPool(chain.n_states, chain.n_transitions).get()
    status, length = _k.reach_path(
        _stream(stream), chain.indptr, chain.targets, chain.cum, chain.init_states,
        chain.init_cum, mask, tr, float(pmin), float(delta), int(check_bound), int(max_steps))
    if status == _k.DIVERGED:
        raise DivergedError(-1 if not isinstance(stream, tuple) else stream[1], max_steps)
    if status == _k.YES:
        return ReachSample(True, int(length), Termination.GOAL)
    return ReachSample(False, int(length), Termination.BSCC_DETECTED)


def reach_sampler(chain: MarkovChain, goal, pmin: float, delta: float, seed: int,
                  check_bound: int = DEFAULT_CHECK_BOUND, max_steps: int = DEFAULT_MAX_STEPS):
    """``task(i)`` computing the sample of path ``i`` under master ``seed``."""
    mask = goal_mask(chain, goal)
    pool = TrackerPool(chain.n_states, chain.n_transitions)

    def task(i: int) -> ReachSample:
        try:
            return single_path_reach(chain, goal, pmin, delta, (seed, i), check_bound,
                                     max_steps, _mask=mask, _tr=pool.get())
        except DivergedError:
            raise DivergedError(i, max_steps) from None
    return task


def run_sprt(task, session: SprtSession, threads: int = 1, limit: int | None = None):
    """Feed ``task(0), task(1), ...`` outcomes into ``session`` until it decides."""
    lengths = PathLengthStats()
    for i, sample in enumerate(ordered_results(task, threads)):
        lengths.add(sample.path_length)
        if session.feed(int(sample.outcome)) is not Decision.UNDECIDED:
            break
        if limit is not None and i + 1 >= limit:
            break
    return lengths


def verify_reach(chain: MarkovChain, goal, spec: HypothesisSpec, master_seed: int,
                 pmin: float | None = None, check_bound: int = DEFAULT_CHECK_BOUND,
                 max_steps: int = DEFAULT_MAX_STEPS, threads: int = 1) -> VerificationReport:
    """Decide ``P[reach goal] >= p + eps`` (H0) against ``<= p - eps`` (H1)."""
    pmin = check_pmin(chain, pmin)
    session = SprtSession.for_spec(spec, "reach")
    task = reach_sampler(chain, goal, pmin, spec.delta, master_seed, check_bound, max_steps)
    lengths = run_sprt(task, session, threads)
    return VerificationReport(
        kind="reach", seed=int(master_seed), n_samples=session.n_samples,
        mean_path_length=lengths.mean, max_path_length=lengths.maximum,
        decision=session.decision.value, n_positive=session.n_positive,
        parameters={"goal": goal if isinstance(goal, str) else sorted(int(s) for s in goal),
                    "p": spec.p, "epsilon": spec.epsilon, "alpha": spec.alpha,
                    "beta": spec.beta, "delta": spec.delta, "pmin": pmin,
                    "check_bound": check_bound, "max_steps": max_steps,
                    "p0": session.p0, "p1": session.p1},
    )
