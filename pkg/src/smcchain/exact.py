"""Exact numerical answers for white-box chains, and the SimTermination baseline."""

from __future__ import annotations


import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve

from .chain import MarkovChain, ValidationError
from .hoa import RabinAutomaton
from .kernels import paths as _k
from .ltl import ProductState, is_accepting_set
from .meanpayoff import SingularSystemError, mp_of_bscc
from .reach import _stream, goal_mask
from .sampling import DEFAULT_MAX_STEPS, DivergedError

DENSE_LIMIT = 2000


def _matrix(chain: MarkovChain) -> sparse.csr_matrix:
    n = chain.n_states
    return sparse.csr_matrix((chain.probs, chain.targets, chain.indptr), shape=(n, n))


def bsccs(chain: MarkovChain) -> list[frozenset[int]]:
    """Bottom strongly connected components, ordered by smallest member."""
    P = _matrix(chain)
    n_comp, comp = connected_components(P, directed=True, connection="strong")
    src = np.repeat(np.arange(chain.n_states), np.diff(chain.indptr))
    leaves = comp[src] != comp[chain.targets]
    bottom = np.ones(n_comp, dtype=bool)
    bottom[comp[src[leaves]]] = False
    out = [frozenset(np.flatnonzero(comp == c).tolist()) for c in np.flatnonzero(bottom)]
    return sorted(out, key=min)


def bscc_inventory(chain: MarkovChain) -> tuple[int, int]:
    """``(number of BSCCs, size of the largest)``."""
    comps = bsccs(chain)
    return len(comps), max(len(c) for c in comps)


def _can_reach(chain: MarkovChain, target: np.ndarray) -> np.ndarray:
    """States with a path into ``target`` (a boolean mask)."""
    rev = _matrix(chain).T.tocsr()
    mask = target.copy()
    frontier = np.flatnonzero(target)
    while frontier.size:
        preds = np.unique(np.concatenate(
            [rev.indices[rev.indptr[v]:rev.indptr[v + 1]] for v in frontier]))
        frontier = preds[~mask[preds]]
        mask[frontier] = True
    return mask


def _solve(A, b: np.ndarray) -> np.ndarray:
    if A.shape[0] == 0:
        return np.zeros(0)
    if A.shape[0] <= DENSE_LIMIT:
        try:
            x = np.linalg.solve(A.toarray(), b)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(str(exc)) from None
    else:
        x = spsolve(A.tocsc(), b)
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("linear system has no finite solution")
    return x


def reach_vector(chain: MarkovChain, goal) -> np.ndarray:
    """Per-state probability of eventually visiting ``goal``."""
    target = goal_mask(chain, goal)
    maybe = _can_reach(chain, target) & ~target
    x = np.zeros(chain.n_states)
    x[target] = 1.0
    idx = np.flatnonzero(maybe)
    P = _matrix(chain)
    Pm = P[idx][:, idx]
    b = np.asarray(P[idx][:, np.flatnonzero(target)].sum(axis=1)).ravel()
    x[idx] = np.clip(_solve(sparse.identity(len(idx), format="csr") - Pm, b), 0.0, 1.0)
    return x


def exact_reachability(chain: MarkovChain, goal) -> float:
    """Probability, from the initial distribution, of eventually visiting ``goal``."""
    x = reach_vector(chain, goal)
    return float(min(1.0, np.dot(chain.init_probs, x[chain.init_states])))


def exact_mp(chain: MarkovChain, rewards=None) -> float:
    """Expected long-run average reward."""
    r = chain.rewards if rewards is None else np.asarray(rewards, dtype=float)
    P = chain.dense() if chain.n_states <= DENSE_LIMIT else None
    total = 0.0
    for comp in bsccs(chain):
        states = sorted(comp)
        sub = P[np.ix_(states, states)] if P is not None else \
            _matrix(chain)[states][:, states].toarray()
        total += exact_reachability(chain, states) * mp_of_bscc(sub, r[states])
    return float(min(1.0, max(0.0, total)))


def explicit_product(chain: MarkovChain, dra: RabinAutomaton) -> tuple[MarkovChain, list[ProductState]]:
    """The reachable part of ``chain x dra`` as a chain over indices into the
    returned list of product states."""
    nxt = dra.next_table(chain)
    index: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []

    def visit(s: int, q: int) -> int:
        key = (s, q)
        if key not in index:
            index[key] = len(order)
            order.append(key)
        return index[key]

    initial: dict[int, float] = {}
    for s, p in zip(chain.init_states.tolist(), chain.init_probs.tolist()):
        i = visit(s, int(nxt[dra.start, s]))
        initial[i] = initial.get(i, 0.0) + p
    rows = []
    k = 0
    while k < len(order):
        s, q = order[k]
        rows.append([(visit(t, int(nxt[q, t])), p) for t, p in chain.row(s)])
        k += 1
    prod = MarkovChain.from_rows(rows, initial=initial)
    return prod, [ProductState(s, q) for s, q in order]


def exact_ltl(chain: MarkovChain, dra: RabinAutomaton) -> float:
    """Probability that a run satisfies the automaton's acceptance condition."""
    prod, states = explicit_product(chain, dra)
    accepting = [s for comp in bsccs(prod)
                 if is_accepting_set([states[i] for i in comp], dra) for s in comp]
    if not accepting:
        return 0.0
    return exact_reachability(prod, accepting)


def sim_termination_sample(chain: MarkovChain, goal, p_term: float, stream,
                           max_steps: int = DEFAULT_MAX_STEPS, _mask=None) -> bool:
    """Baseline sampler: stop each step with probability ``p_term``."""
    if not 0.0 < p_term < 1.0:
        raise ValidationError("p_term must lie in (0, 1)")
    mask = goal_mask(chain, goal) if _mask is None else _mask
    status, _ = _k.sim_termination_path(
        _stream(stream), chain.indptr, chain.targets, chain.cum, chain.init_states,
        chain.init_cum, mask, float(p_term), int(max_steps))
    if status == _k.DIVERGED:
        raise DivergedError(-1 if not isinstance(stream, tuple) else stream[1], max_steps)
    return status == _k.YES


def sim_termination_estimate(chain: MarkovChain, goal, p_term: float, n_samples: int, seed: int,
                             max_steps: int = DEFAULT_MAX_STEPS) -> float:
    mask = goal_mask(chain, goal)
    hits = sum(sim_termination_sample(chain, goal, p_term, (seed, i), max_steps, _mask=mask)
               for i in range(n_samples))
    return hits / n_samples


__all__ = ["bsccs", "bscc_inventory", "reach_vector", "exact_reachability", "exact_mp",
           "explicit_product", "exact_ltl", "sim_termination_sample",
           "sim_termination_estimate", "SingularSystemError"]
