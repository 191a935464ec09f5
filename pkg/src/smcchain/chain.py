"""Labelled, reward-annotated discrete-time Markov chains.

Rows are stored in CSR form together with per-row cumulative sums, so a
successor is drawn by inverse-CDF binary search in ``O(log d)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._jit import njit

ROW_SUM_TOL = 1e-6
RENORM_TOL = 1e-12
EMPTY = -1


class ValidationError(ValueError):
    """A structurally well-formed model violates a chain/automaton invariant."""


@njit(nrt=False, inline="always")
def draw_index(cum, lo, hi, u):
    """First index ``j`` in ``[lo, hi)`` with ``cum[j] > u``."""
    while lo < hi - 1:
        mid = (lo + hi) // 2
        if cum[mid - 1] > u:
            hi = mid
        else:
            lo = mid
    return lo


def _cumulative(probs: np.ndarray, indptr: np.ndarray) -> np.ndarray:
    cum = np.empty_like(probs)
    for s in range(len(indptr) - 1):
        lo, hi = indptr[s], indptr[s + 1]
        cum[lo:hi] = np.cumsum(probs[lo:hi])
        cum[hi - 1] = 1.0
    return cum


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """Immutable chain; build with :meth:`from_rows`.

    ``indptr``/``targets``/``probs`` form the CSR transition structure with
    targets sorted within each row. ``labels[s]`` is the set of label ids of
    state ``s``; ``label_names[i]`` is the name of label id ``i``.
    """

    n_states: int
    indptr: np.ndarray
    targets: np.ndarray
    probs: np.ndarray
    cum: np.ndarray
    init_states: np.ndarray
    init_probs: np.ndarray
    init_cum: np.ndarray
    label_names: tuple[str, ...]
    labels: tuple[frozenset[int], ...]
    rewards: np.ndarray
    declared_pmin: float

    def __post_init__(self):
        for arr in (self.indptr, self.targets, self.probs, self.cum,
                    self.init_states, self.init_probs, self.init_cum, self.rewards):
            arr.setflags(write=False)

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Iterable[tuple[int, float]]],
        initial: Mapping[int, float] | Iterable[tuple[int, float]] | None = None,
        labels: Mapping[str, Iterable[int]] | None = None,
        rewards: Sequence[float] | Mapping[int, float] | None = None,
        declared_pmin: float | None = None,
    ) -> "MarkovChain":
        """Validate and build a chain.

        ``rows[s]`` lists ``(target, probability)`` pairs. Row sums must lie
        within ``1e-6`` of one and are then renormalized. ``initial`` defaults
        to mass 1 on state 0, ``rewards`` to zero, ``declared_pmin`` to the
        actual minimum transition probability.
        """
        n = len(rows)
        if n < 1:
            raise ValidationError("chain must have at least one state")
        indptr = np.zeros(n + 1, dtype=np.int64)
        tgts: list[int] = []
        prbs: list[float] = []
        for s, row in enumerate(rows):
            entries = sorted((int(t), float(p)) for t, p in row)
            if not entries:
                raise ValidationError(f"state {s} has no outgoing transitions")
            seen = set()
            for t, p in entries:
                if not 0 <= t < n:
                    raise ValidationError(f"transition {s} -> {t}: target out of range")
                if t in seen:
                    raise ValidationError(f"duplicate transition {s} -> {t}")
                seen.add(t)
                if not (p > 0.0 and p <= 1.0 + ROW_SUM_TOL):
                    raise ValidationError(f"transition {s} -> {t}: probability {p!r} not in (0, 1]")
            total = sum(p for _, p in entries)
            if abs(total - 1.0) > ROW_SUM_TOL:
                raise ValidationError(f"row {s} sums to {total!r}, not 1")
            # values already within rounding of 1 are kept, so that reparsing a
            # serialized chain is bit-exact
            scale = total if abs(total - 1.0) > RENORM_TOL else 1.0
            tgts.extend(t for t, _ in entries)
            prbs.extend(p / scale for _, p in entries)
            indptr[s + 1] = len(tgts)
        targets = np.asarray(tgts, dtype=np.int64)
        probs = np.asarray(prbs, dtype=np.float64)

        if initial is None:
            initial = {0: 1.0}
        init_items = sorted((initial.items() if isinstance(initial, Mapping) else initial))
        init_states = np.asarray([int(s) for s, _ in init_items], dtype=np.int64)
        init_probs = np.asarray([float(p) for _, p in init_items], dtype=np.float64)
        if len(init_states) == 0:
            raise ValidationError("initial distribution is empty")
        if len(set(init_states.tolist())) != len(init_states):
            raise ValidationError("duplicate state in initial distribution")
        if np.any((init_states < 0) | (init_states >= n)):
            raise ValidationError("initial state out of range")
        if np.any(init_probs <= 0.0):
            raise ValidationError("initial probabilities must be positive")
        init_total = float(init_probs.sum())
        if abs(init_total - 1.0) > ROW_SUM_TOL:
            raise ValidationError(f"initial distribution sums to {init_total!r}, not 1")
        if abs(init_total - 1.0) > RENORM_TOL:
            init_probs = init_probs / init_total
        init_cum = np.cumsum(init_probs)
        init_cum[-1] = 1.0

        names: list[str] = []
        state_labels: list[set[int]] = [set() for _ in range(n)]
        for name, states in (labels or {}).items():
            lid = len(names)
            names.append(name)
            for s in states:
                if not 0 <= s < n:
                    raise ValidationError(f"label {name!r} on state {s}: out of range")
                state_labels[s].add(lid)

        rew = np.zeros(n, dtype=np.float64)
        if rewards is not None:
            items = rewards.items() if isinstance(rewards, Mapping) else enumerate(rewards)
            for s, r in items:
                if not 0 <= s < n:
                    raise ValidationError(f"reward on state {s}: out of range")
                if not 0.0 <= r <= 1.0:
                    raise ValidationError(f"reward {r!r} of state {s} outside [0, 1]")
                rew[s] = r

        pmin = float(probs.min())
        if declared_pmin is None:
            declared_pmin = pmin
        if not 0.0 < declared_pmin <= 1.0:
            raise ValidationError("declared pmin must lie in (0, 1]")
        if declared_pmin > pmin:
            raise ValidationError(
                f"declared pmin {declared_pmin!r} exceeds the actual minimum transition probability {pmin!r}"
            )

        return cls(
            n_states=n,
            indptr=indptr,
            targets=targets,
            probs=probs,
            cum=_cumulative(probs, indptr),
            init_states=init_states,
            init_probs=init_probs,
            init_cum=init_cum,
            label_names=tuple(names),
            labels=tuple(frozenset(x) for x in state_labels),
            rewards=rew,
            declared_pmin=float(declared_pmin),
        )

    @property
    def n_transitions(self) -> int:
        return int(len(self.targets))

    def row(self, s: int) -> list[tuple[int, float]]:
        lo, hi = self.indptr[s], self.indptr[s + 1]
        return list(zip(self.targets[lo:hi].tolist(), self.probs[lo:hi].tolist()))

    def successors(self, s: int) -> np.ndarray:
        return self.targets[self.indptr[s]:self.indptr[s + 1]]

    def label_id(self, name: str) -> int:
        try:
            return self.label_names.index(name)
        except ValueError:
            raise KeyError(f"unknown label {name!r}") from None

    def states_with_label(self, name: str) -> frozenset[int]:
        lid = self.label_id(name)
        return frozenset(s for s in range(self.n_states) if lid in self.labels[s])

    def label_mask(self, name: str) -> np.ndarray:
        mask = np.zeros(self.n_states, dtype=np.bool_)
        mask[list(self.states_with_label(name))] = True
        return mask

    def dense(self) -> np.ndarray:
        """Dense transition matrix (desk scale only)."""
        P = np.zeros((self.n_states, self.n_states))
        for s in range(self.n_states):
            lo, hi = self.indptr[s], self.indptr[s + 1]
            P[s, self.targets[lo:hi]] = self.probs[lo:hi]
        return P

    def initial_vector(self) -> np.ndarray:
        mu = np.zeros(self.n_states)
        mu[self.init_states] = self.init_probs
        return mu

    def structurally_equal(self, other: "MarkovChain") -> bool:
        return (
            self.n_states == other.n_states
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.targets, other.targets)
            and np.array_equal(self.probs, other.probs)
            and np.array_equal(self.init_states, other.init_states)
            and np.array_equal(self.init_probs, other.init_probs)
            and self.label_names == other.label_names
            and self.labels == other.labels
            and np.array_equal(self.rewards, other.rewards)
            and self.declared_pmin == other.declared_pmin
        )


def actual_pmin(chain: MarkovChain) -> float:
    """Smallest transition probability listed in the chain."""
    return float(chain.probs.min())


def make_stream(master_seed: int, path_index: int) -> np.random.Generator:
    """Independent reproducible random stream for one sampled path."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(path_index)]))


@dataclass
class PathState:
    """The sampled prefix as seen by :func:`next_state`: last state and length."""

    rng: np.random.Generator
    last_state: int = EMPTY
    length: int = 0

    @classmethod
    def fresh(cls, master_seed: int, path_index: int) -> "PathState":
        return cls(make_stream(master_seed, path_index))


def next_state(chain: MarkovChain, path: PathState) -> int:
    """Extend ``path`` by one state drawn from ``initial`` or the last state's row."""
    u = path.rng.random()
    if path.last_state == EMPTY:
        j = draw_index(chain.init_cum, 0, len(chain.init_cum), u)
        s = int(chain.init_states[j])
    else:
        lo, hi = chain.indptr[path.last_state], chain.indptr[path.last_state + 1]
        s = int(chain.targets[draw_index(chain.cum, lo, hi, u)])
    path.last_state = s
    path.length += 1
    return s


# --- generators ------------------------------------------------------------

def gen_fig1(m: int) -> MarkovChain:
    """Chain with a 0.5 branch from ``s`` to ``r`` (goal, followed by a
    deterministic line ``v_1 .. v_m`` ending in a self-loop) and to the
    closed pair ``{t, u}`` that swaps w.p. 0.99 and stays w.p. 0.01.

    State numbering: ``s=0, r=1, v_i=i+1, t=m+2, u=m+3``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    s, r, t, u = 0, 1, m + 2, m + 3
    rows: list[list[tuple[int, float]]] = [[] for _ in range(m + 4)]
    rows[s] = [(r, 0.5), (t, 0.5)]
    rows[r] = [(2, 1.0)]
    for i in range(1, m):
        rows[i + 1] = [(i + 2, 1.0)]
    rows[m + 1] = [(m + 1, 1.0)]
    rows[t] = [(t, 0.01), (u, 0.99)]
    rows[u] = [(t, 0.99), (u, 0.01)]
    return MarkovChain.from_rows(rows, labels={"goal": [r]}, rewards={r: 1.0})


def gen_fig3(n: int) -> MarkovChain:
    """Line ``s_0 .. s_n`` where every ``s_i`` (i < n) moves forward or falls
    back to ``s_0`` w.p. 0.5 each (``s_0`` falls back onto itself) and
    ``s_n`` is absorbing and labelled ``goal``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rows = [[(0, 0.5), (i + 1, 0.5)] for i in range(n)]
    rows.append([(n, 1.0)])
    return MarkovChain.from_rows(rows, labels={"goal": [n]}, rewards={n: 1.0})


def gen_fig4(N: int, M: int) -> MarkovChain:
    """Initial state branching into two arms of ``N`` self-looping states,
    each arm ending in a deterministic ``M``-cycle. Right-cycle states carry
    label ``goal`` and reward 1.

    Numbering: ``s=0``, left arm ``1..N``, right arm ``N+1..2N``, left cycle
    ``2N+1..2N+M``, right cycle ``2N+M+1..2N+2M``.
    """
    if N < 1 or M < 1:
        raise ValueError("N and M must be >= 1")
    n = 2 * N + 2 * M + 1
    rows: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    rows[0] = [(1, 0.5), (N + 1, 0.5)]
    right_cycle = []
    for arm, (first, cyc) in enumerate(((1, 2 * N + 1), (N + 1, 2 * N + M + 1))):
        for i in range(N):
            st = first + i
            nxt = st + 1 if i < N - 1 else cyc
            rows[st] = [(st, 0.5), (nxt, 0.5)]
        for j in range(M):
            rows[cyc + j] = [(cyc + (j + 1) % M, 1.0)]
            if arm == 1:
                right_cycle.append(cyc + j)
    return MarkovChain.from_rows(
        rows, labels={"goal": right_cycle}, rewards={s: 1.0 for s in right_cycle}
    )


RANDOM_RESOLUTION = 32


def gen_random(n_states: int, max_out_degree: int, seed: int) -> MarkovChain:
    """Random chain with dyadic probabilities (multiples of 1/32 or finer), so
    rows sum to exactly one in binary floating point.

    Each state gets between 1 and ``max_out_degree`` distinct successors.
    About a quarter of the states (at least one) carry ``goal``; rewards are
    multiples of 1/32 in ``[0, 1]``; the initial state is 0.
    """
    if n_states < 1 or max_out_degree < 1:
        raise ValueError("n_states and max_out_degree must be >= 1")
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n_states):
        deg = int(rng.integers(1, min(max_out_degree, n_states) + 1))
        targets = np.sort(rng.choice(n_states, size=deg, replace=False))
        res = RANDOM_RESOLUTION
        while res < deg:
            res *= 2
        cuts = np.sort(rng.choice(np.arange(1, res), size=deg - 1, replace=False))
        parts = np.diff(np.concatenate(([0], cuts, [res])))
        rows.append([(int(t), float(w) / res) for t, w in zip(targets, parts)])
    goal = [s for s in range(n_states) if rng.random() < 0.25]
    if not goal:
        goal = [n_states - 1]
    rewards = rng.integers(0, RANDOM_RESOLUTION + 1, size=n_states) / RANDOM_RESOLUTION
    return MarkovChain.from_rows(rows, labels={"goal": goal}, rewards=rewards.tolist())


def parse_family(spec: str, seed: int | None = None) -> MarkovChain:
    """Build a chain from ``fig1:m``, ``fig3:n``, ``fig4:N,M`` or ``random:n,d,seed``."""
    name, _, args = spec.partition(":")
    try:
        vals = [int(x) for x in args.split(",")] if args else []
    except ValueError:
        raise ValueError(f"bad generator arguments in {spec!r}") from None
    expected = {"fig1": 1, "fig3": 1, "fig4": 2, "random": 3}
    if name not in expected:
        raise ValueError(f"unknown chain family {name!r}")
    if len(vals) != expected[name]:
        raise ValueError(f"{name} expects {expected[name]} integer argument(s)")
    if name == "fig1":
        return gen_fig1(*vals)
    if name == "fig3":
        return gen_fig3(*vals)
    if name == "fig4":
        return gen_fig4(*vals)
    return gen_random(*vals)
