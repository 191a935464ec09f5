"""Per-path sampling loops.

Each kernel simulates one path from a fresh stream ``gen`` and feeds it to a
reset tracker ``tr``; the tracker is left in its final state so callers can
inspect the candidate. Status codes are shared by all kernels.
"""

import numpy as np

from .._jit import njit
from ..chain import draw_index
from .tracker import (
    M_CSIZE,
    M_INDEX,
    ceil_k_threshold,
    tracker_advance,
    tracker_reached,
    tracker_reset,
    tracker_set_threshold,
)

NO = 0
YES = 1
DIVERGED = 2


@njit(nrt=False, inline="always")
def _first_state(gen, init_states, init_cum):
    return init_states[draw_index(init_cum, 0, init_cum.shape[0], gen.random())]


@njit(nrt=False, inline="always")
def _step(gen, indptr, targets, cum, s):
    return targets[draw_index(cum, indptr[s], indptr[s + 1], gen.random())]


@njit(nrt=False)
def reach_path(gen, indptr, targets, cum, init_states, init_cum, goal,
               tr, pmin, delta, check_bound, max_steps):
    """Sample until a goal state is appended (YES) or the candidate is a
    strong ``ceil(k_i)``-candidate at a check step (NO).

    Returns ``(status, path_length)``. An all-false ``goal`` mask turns this
    into a pure BSCC-detection run.
    """
    tracker_reset(tr)
    s = -1
    length = 0
    while length < max_steps:
        if s < 0:
            s = _first_state(gen, init_states, init_cum)
        else:
            s = _step(gen, indptr, targets, cum, s)
        length += 1
        if goal[s]:
            return YES, length
        if tracker_advance(tr, s):
            tracker_set_threshold(tr, ceil_k_threshold(tr.meta[M_INDEX], delta, pmin))
        if length % check_bound == 0 and tracker_reached(tr):
            return NO, length
    return DIVERGED, length


@njit(nrt=False)
def ltl_path(gen, indptr, targets, cum, init_states, init_cum, dra_next, q0,
             acc_e, acc_f, tr, pmin, delta, check_bound, max_steps):
    """Sample the product with a DRA lazily; product state ``(s, q)`` is
    packed as ``s * n_q + q`` and ``dra_next[q, s]`` is the automaton move
    on the label of chain state ``s``.

    Returns ``(status, path_length)``; status YES iff the detected candidate
    is accepting for some Rabin pair ``(acc_e[i], acc_f[i])``.
    """
    tracker_reset(tr)
    nq = dra_next.shape[0]
    s = -1
    q = q0
    length = 0
    while length < max_steps:
        if s < 0:
            s = _first_state(gen, init_states, init_cum)
        else:
            s = _step(gen, indptr, targets, cum, s)
        q = dra_next[q, s]
        length += 1
        if tracker_advance(tr, s * nq + q):
            tracker_set_threshold(tr, ceil_k_threshold(tr.meta[M_INDEX], delta, pmin))
        if length % check_bound == 0 and tracker_reached(tr):
            if candidate_accepting(tr, nq, acc_e, acc_f):
                return YES, length
            return NO, length
    return DIVERGED, length


@njit(nrt=False)
def candidate_accepting(tr, nq, acc_e, acc_f):
    for i in range(acc_e.shape[0]):
        hits_e = False
        hits_f = False
        for j in range(tr.meta[M_CSIZE]):
            q = tr.glob[tr.members[j]] % nq
            if acc_e[i, q]:
                hits_e = True
                break
            if acc_f[i, q]:
                hits_f = True
        if hits_f and not hits_e:
            return True
    return False


@njit(nrt=False)
def trerr_from_mperr(mperr, pmin, k_size):
    return pmin * ((1.0 + mperr) ** (1.0 / (2.0 * k_size)) - 1.0)


@njit(nrt=False)
def k_from_trerr(k_size, delta, trerr):
    return (np.log(2.0 * k_size * k_size) - np.log(delta / 2.0)) / (2.0 * trerr * trerr)


@njit(nrt=False)
def mp_threshold(index, size, pmin, mperr, delta):
    """Strength demanded of a candidate: BSCC detection at ``delta/2`` and
    enough in-candidate transitions for ``mperr``-precise estimates at
    ``delta/2``."""
    k_bscc = ceil_k_threshold(index, delta / 2.0, pmin)
    k_est = int(np.ceil(k_from_trerr(size, delta, trerr_from_mperr(mperr, pmin, size))))
    return max(k_bscc, k_est)


@njit(nrt=False)
def mp_path(gen, indptr, targets, cum, init_states, init_cum,
            tr, pmin, mperr, delta, check_bound, max_steps):
    """Sample until the candidate satisfies :func:`mp_threshold`. The
    tracker's birth-segment edge counts then hold the transition counts used
    for the estimate. Returns ``(status, path_length)``."""
    tracker_reset(tr)
    s = -1
    length = 0
    while length < max_steps:
        if s < 0:
            s = _first_state(gen, init_states, init_cum)
        else:
            s = _step(gen, indptr, targets, cum, s)
        length += 1
        if tracker_advance(tr, s):
            tracker_set_threshold(
                tr, mp_threshold(tr.meta[M_INDEX], tr.meta[M_CSIZE], pmin, mperr, delta))
        if length % check_bound == 0 and tracker_reached(tr):
            return YES, length
    return DIVERGED, length


@njit(nrt=False)
def sim_termination_path(gen, indptr, targets, cum, init_states, init_cum, goal,
                         p_term, max_steps):
    """Baseline: kill the path with probability ``p_term`` before each step."""
    s = _first_state(gen, init_states, init_cum)
    length = 1
    while length < max_steps:
        if goal[s]:
            return YES, length
        if gen.random() < p_term:
            return NO, length
        s = _step(gen, indptr, targets, cum, s)
        length += 1
    if goal[s]:
        return YES, length
    return DIVERGED, length
