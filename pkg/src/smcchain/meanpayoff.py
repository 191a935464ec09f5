"""Mean payoff: per-path BSCC detection plus in-BSCC estimation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .chain import MarkovChain, ValidationError
from .kernels import paths as _k
from .monitor import DEFAULT_CHECK_BOUND, CandidateTracker, birth_counts
from .reach import _stream, check_pmin
from .sampling import (DEFAULT_MAX_STEPS, DivergedError, PathLengthStats, TrackerPool,
                       VerificationReport, collect)
from .stats import hoeffding_ci, hoeffding_halfwidth


class SingularSystemError(ArithmeticError):
    pass


@dataclass(frozen=True)
class MpSample:
    value: float
    bscc_size: int
    path_length: int
    states: tuple[int, ...] = ()


def trerr_from_mperr(mperr: float, pmin: float, k_size: int) -> float:
    """Per-transition precision that keeps the mean-payoff error below ``mperr``."""
    if not mperr > 0.0:
        raise ValueError("mperr must be positive")
    if k_size < 1:
        raise ValueError("k_size must be >= 1")
    return pmin * math.expm1(math.log1p(mperr) / (2.0 * k_size))


def k_from_trerr(k_size: int, delta: float, trerr: float) -> float:
    """Observations per state so that all ``k_size**2`` estimates are
    ``trerr``-precise with probability ``1 - delta/2`` (Hoeffding + union bound)."""
    if not trerr > 0.0:
        raise ValueError("trerr must be positive")
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    return (math.log(2.0 * k_size * k_size) - math.log(delta / 2.0)) / (2.0 * trerr * trerr)


def estimate_transitions(counts) -> np.ndarray:
    """Row-normalised transition counts.

    ``counts`` is a square integer matrix, or a mapping ``(s, t) -> n`` over
    states ``0..m-1``.
    """
    if isinstance(counts, Mapping):
        m = 1 + max(max(s, t) for s, t in counts) if counts else 0
        mat = np.zeros((m, m), dtype=np.int64)
        for (s, t), n in counts.items():
            mat[s, t] += n
        counts = mat
    counts = np.asarray(counts)
    rows = counts.sum(axis=1)
    if (rows <= 0).any():
        raise ValueError(f"state {int(np.argmax(rows <= 0))} has no observed outgoing transition")
    return counts / rows[:, None]


def stationary(P: np.ndarray) -> np.ndarray:
    """Stationary distribution of an irreducible stochastic matrix."""
    m = P.shape[0]
    A = P.T - np.eye(m)
    A[-1, :] = 1.0
    b = np.zeros(m)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from None
    if not np.all(np.isfinite(pi)):
        raise SingularSystemError("non-finite stationary distribution")
    return pi


def mp_of_bscc(P: np.ndarray, rewards) -> float:
    """Long-run average reward of the irreducible chain ``P``."""
    pi = stationary(np.asarray(P, dtype=float))
    return float(min(1.0, max(0.0, pi @ np.asarray(rewards, dtype=float))))


def _rewards(chain: MarkovChain, rewards) -> np.ndarray:
    r = chain.rewards if rewards is None else np.asarray(rewards, dtype=float)
    if r.shape != (chain.n_states,):
        raise ValidationError("need one reward per state")
    if ((r < 0.0) | (r > 1.0)).any():
        raise ValidationError("rewards must lie in [0, 1]")
    return r


def single_path_mp(chain: MarkovChain, rewards, pmin: float, mperr: float, delta: float, stream,
                   check_bound: int = DEFAULT_CHECK_BOUND, max_steps: int = DEFAULT_MAX_STEPS,
                   tracker: CandidateTracker | None = None, _tr=None) -> MpSample:
    """Sample until the candidate passes both the BSCC test (at ``delta/2``)
    and the estimation threshold; return its estimated mean payoff."""
    if not 0.0 < delta <= 1.0:
        raise ValidationError("delta must lie in (0, 1]")
    if not mperr > 0.0:
        raise ValidationError("mperr must be positive")
    r = _rewards(chain, rewards)
    if tracker is not None:
        tracker.check_bound = int(check_bound)
        tracker.reserve(chain.n_states, chain.n_transitions)
        tr = tracker._state
    else:
        tr = _tr if _tr is not None else TrackerPool(chain.n_states, chain.n_transitions).get()
    status, length = _k.mp_path(
        _stream(stream), chain.indptr, chain.targets, chain.cum, chain.init_states,
        chain.init_cum, tr, float(pmin), float(mperr), float(delta), int(check_bound),
        int(max_steps))
    if status == _k.DIVERGED:
        raise DivergedError(-1 if not isinstance(stream, tuple) else stream[1], max_steps)
    states, counts = birth_counts(tr)
    value = mp_of_bscc(estimate_transitions(counts), r[states])
    return MpSample(value, len(states), int(length), tuple(int(s) for s in states))


def mp_sampler(chain: MarkovChain, rewards, pmin: float, mperr: float, delta: float, seed: int,
               check_bound: int = DEFAULT_CHECK_BOUND, max_steps: int = DEFAULT_MAX_STEPS):
    r = _rewards(chain, rewards)
    pool = TrackerPool(chain.n_states, chain.n_transitions)

    def task(i: int) -> MpSample:
        try:
            return single_path_mp(chain, r, pmin, mperr, delta, (seed, i), check_bound,
                                  max_steps, _tr=pool.get())
        except DivergedError:
            raise DivergedError(i, max_steps) from None
    return task


def widened_interval(values, alpha: float, mperr: float, delta: float) -> tuple[float, float]:
    lo, hi = hoeffding_ci(values, alpha)
    return max(0.0, lo - mperr - delta), min(1.0, hi + mperr + delta)


def estimate_mp(chain: MarkovChain, rewards, alpha: float, mperr: float, delta: float,
                n_samples: int, master_seed: int, pmin: float | None = None,
                check_bound: int = DEFAULT_CHECK_BOUND, max_steps: int = DEFAULT_MAX_STEPS,
                threads: int = 1) -> VerificationReport:
    """Interval containing the mean payoff with confidence ``1 - alpha``,
    widened by ``mperr + delta`` for the per-path estimation error."""
    if n_samples < 1:
        raise ValidationError("n_samples must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise ValidationError("alpha must lie in (0, 1)")
    pmin = check_pmin(chain, pmin)
    task = mp_sampler(chain, rewards, pmin, mperr, delta, master_seed, check_bound, max_steps)
    samples = collect(task, n_samples, threads)
    lengths = PathLengthStats()
    for s in samples:
        lengths.add(s.path_length)
    values = np.array([s.value for s in samples])
    lo, hi = widened_interval(values, alpha, mperr, delta)
    return VerificationReport(
        kind="mean-payoff", seed=int(master_seed), n_samples=n_samples,
        mean_path_length=lengths.mean, max_path_length=lengths.maximum,
        interval=(lo, hi),
        parameters={"alpha": alpha, "mperr": mperr, "delta": delta, "pmin": pmin,
                    "check_bound": check_bound, "max_steps": max_steps},
        extra={"sample_mean": float(values.mean()),
               "hoeffding_halfwidth": hoeffding_halfwidth(n_samples, alpha),
               "widening": mperr + delta,
               "interval_size": hi - lo,
               "max_bscc_size": max(s.bscc_size for s in samples)},
    )
