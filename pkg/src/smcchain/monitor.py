"""On-the-fly BSCC candidate detection along a single path."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .kernels import tracker as _t

DEFAULT_CHECK_BOUND = 1000


class NoCandidateError(RuntimeError):
    pass


class CandidateTracker:
    """Incremental record of the candidate sequence of a growing path.

    States are non-negative integers. The candidate is recomputed exactly on
    every :meth:`advance`; ``check_bound`` only throttles
    :func:`reached_bscc`, which answers on path lengths divisible by it.
    """

    def __init__(self, n_states: int = 16, check_bound: int = DEFAULT_CHECK_BOUND):
        if check_bound < 1:
            raise ValueError("check_bound must be >= 1")
        self.check_bound = int(check_bound)
        cap = max(int(n_states), 1)
        self._state = _t.new_tracker(cap, cap, 4 * cap)

    @classmethod
    def from_path(cls, path: Iterable[int], **kwargs) -> "CandidateTracker":
        tracker = cls(**kwargs)
        for s in path:
            tracker.advance(s)
        return tracker

    def _ensure_capacity(self, s: int) -> None:
        st = self._state
        n_global, cap_v, cap_e = len(st.local_of), len(st.glob), len(st.e_to)
        nv, ne = int(st.meta[_t.M_NV]), int(st.meta[_t.M_NE])
        if s >= n_global or nv >= cap_v or ne >= cap_e:
            self._state = _t.grown(
                st,
                max(n_global, 2 * (s + 1)),
                2 * cap_v if nv >= cap_v else cap_v,
                2 * cap_e if ne >= cap_e else cap_e,
            )

    def reserve(self, n_global: int, n_edges: int) -> None:
        """Make room for ``n_global`` states and ``n_edges`` edges so the
        sampling kernels can drive this tracker directly."""
        st = self._state
        if len(st.local_of) < n_global or len(st.glob) < n_global or len(st.e_to) < n_edges:
            self._state = _t.grown(st, max(len(st.local_of), n_global),
                                   max(len(st.glob), n_global), max(len(st.e_to), n_edges))

    def advance(self, s: int) -> bool:
        """Append state ``s``. Returns True iff a new candidate was born."""
        s = int(s)
        if s < 0:
            raise ValueError("states are non-negative integers")
        self._ensure_capacity(s)
        return bool(_t.tracker_advance(self._state, s))

    @property
    def steps(self) -> int:
        return int(self._state.meta[_t.M_STEPS])

    @property
    def candidate(self) -> frozenset[int] | None:
        st = self._state
        if st.meta[_t.M_CAND] < 0:
            return None
        size = int(st.meta[_t.M_CSIZE])
        return frozenset(int(st.glob[v]) for v in st.members[:size])

    @property
    def candidate_index(self) -> int:
        return int(self._state.meta[_t.M_INDEX])

    @property
    def birthday_pos(self) -> int | None:
        if self._state.meta[_t.M_CAND] < 0:
            return None
        return int(self._state.meta[_t.M_BIRTH])

    @property
    def last_state(self) -> int | None:
        last = self._state.meta[_t.M_LAST]
        return None if last < 0 else int(self._state.glob[last])

    @property
    def counts_since_birth(self) -> dict[int, int]:
        st = self._state
        if st.meta[_t.M_CAND] < 0:
            return {}
        size = int(st.meta[_t.M_CSIZE])
        return {int(st.glob[v]): int(st.birth[v]) for v in st.members[:size] if st.birth[v] > 0}

    @property
    def path_edges(self) -> frozenset[tuple[int, int]]:
        st = self._state
        ne = int(st.meta[_t.M_NE])
        return frozenset(
            (int(st.glob[st.e_from[e]]), int(st.glob[st.e_to[e]])) for e in range(ne)
        )

    @property
    def birth_transition_counts(self) -> dict[tuple[int, int], int]:
        """Transition counts within the segment starting at the birthday."""
        if self._state.meta[_t.M_CAND] < 0:
            return {}
        states, counts = birth_counts(self._state)
        return {(int(states[i]), int(states[j])): int(counts[i, j])
                for i, j in zip(*np.nonzero(counts))}

    def _require_candidate(self):
        if self._state.meta[_t.M_CAND] < 0:
            raise NoCandidateError("the path has no candidate")

    def is_k_candidate(self, k: int) -> bool:
        """Counts over the maximal suffix whose support is the candidate."""
        self._require_candidate()
        return bool(_t.tracker_is_k_candidate(self._state, int(k), False))

    def is_strong_k_candidate(self, k: int) -> bool:
        """Counts over the segment starting at the candidate's birthday."""
        self._require_candidate()
        return bool(_t.tracker_is_k_candidate(self._state, int(k), True))


def k_threshold(i: int, delta: float, pmin: float) -> float:
    """Strength required of the ``i``-th candidate: ``(i - log2 delta) / -log2(1 - pmin)``."""
    if i < 1:
        raise ValueError("candidate index starts at 1")
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    if not 0.0 < pmin <= 1.0:
        raise ValueError("pmin must lie in (0, 1]")
    if pmin == 1.0:
        return 0.0
    return (i - math.log2(delta)) / (-math.log2(1.0 - pmin))


def reached_bscc(tracker: CandidateTracker, pmin: float, delta: float) -> bool:
    """True iff the candidate is a strong ``ceil(k_i)``-candidate, ``i`` its index.

    Only evaluated on path lengths divisible by ``tracker.check_bound``;
    answers False in between.
    """
    if tracker.steps % tracker.check_bound != 0 or tracker.candidate is None:
        return False
    k = math.ceil(k_threshold(tracker.candidate_index, delta, pmin))
    return tracker.is_strong_k_candidate(k)


def birth_counts(state) -> tuple[np.ndarray, np.ndarray]:
    """``(states, counts)`` for a kernel tracker with a candidate: the
    candidate's global state ids and the matrix of transitions observed
    between them since its birthday."""
    meta = state.meta
    size = int(meta[_t.M_CSIZE])
    local = state.members[:size].copy()
    ne = int(meta[_t.M_NE])
    src, dst, cnt = state.e_from[:ne], state.e_to[:ne], state.e_birth[:ne]
    keep = (state.scc[src] == meta[_t.M_CAND]) & (cnt > 0)
    pos = np.full(int(meta[_t.M_NV]), -1, dtype=np.int64)
    pos[local] = np.arange(size)
    counts = np.zeros((size, size), dtype=np.int64)
    np.add.at(counts, (pos[src[keep]], pos[dst[keep]]), cnt[keep])
    return state.glob[local].copy(), counts
