"""Reference implementations that share no code with the package."""

from __future__ import annotations


import numpy as np


def path_graph(path):
    return set(path), set(zip(path, path[1:]))


def _reach_closure(nodes, edges):
    """``reach[a]`` = nodes reachable from ``a`` by >= 1 edge."""
    reach = {a: {b for (x, b) in edges if x == a} for a in nodes}
    changed = True
    while changed:
        changed = False
        for a in nodes:
            new = set().union(*(reach[b] for b in reach[a])) if reach[a] else set()
            if not new <= reach[a]:
                reach[a] |= new
                changed = True
    return reach


def is_bscc_of_graph(support, nodes, edges) -> bool:
    reach = _reach_closure(nodes, edges)
    if any(b not in support for (a, b) in edges if a in support):
        return False
    return all(support <= reach[a] for a in support)


def brute_candidate(path):
    """The support of some suffix that is a BSCC of the path's graph, or None."""
    nodes, edges = path_graph(path)
    found = {frozenset(path[i:]) for i in range(len(path))
             if is_bscc_of_graph(set(path[i:]), nodes, edges)}
    assert len(found) <= 1, found
    return next(iter(found), None)


def brute_birthday(path):
    """First position from which every prefix has the final candidate."""
    final = brute_candidate(path)
    if final is None:
        return None
    pos = len(path) - 1
    while pos > 0 and brute_candidate(path[:pos]) == final:
        pos -= 1
    return pos


def brute_k_candidate(path, k, strong=False):
    cand = brute_candidate(path)
    if strong:
        seg = path[brute_birthday(path):]
    else:
        start = len(path)
        while start > 0 and path[start - 1] in cand:
            start -= 1
        seg = path[start:]
    counts = {s: seg.count(s) for s in cand}
    return all(c >= k for c in counts.values()) and counts[path[-1]] >= k + 1


def dense(rows, n):
    P = np.zeros((n, n))
    for s, row in enumerate(rows):
        for t, p in row:
            P[s, t] += p
    return P


def reach_by_iteration(P, goal, init, iters=200_000, tol=1e-15):
    """Least fixed point of ``x = 1_goal + 1_notgoal * P x`` by value iteration."""
    n = P.shape[0]
    g = np.zeros(n, dtype=bool)
    g[list(goal)] = True
    x = g.astype(float)
    for _ in range(iters):
        nx = np.where(g, 1.0, P @ x)
        if np.max(np.abs(nx - x)) < tol:
            x = nx
            break
        x = nx
    return float(init @ x)


def stationary_by_power(P, iters=1_000_000, tol=1e-14):
    n = P.shape[0]
    pi = np.full(n, 1.0 / n)
    lazy = 0.5 * (P + np.eye(n))
    for _ in range(iters):
        nxt = pi @ lazy
        if np.max(np.abs(nxt - pi)) < tol:
            return nxt
        pi = nxt
    return pi


def bsccs_by_closure(P):
    n = P.shape[0]
    nodes = set(range(n))
    edges = {(a, b) for a in range(n) for b in range(n) if P[a, b] > 0}
    reach = _reach_closure(nodes, edges)
    out = set()
    for a in nodes:
        comp = frozenset({a} | {b for b in reach[a] if a in reach[b]})
        if all(reach[b] <= comp for b in comp):
            out.add(comp)
    return sorted(out, key=min)


def all_paths(succ, init, length):
    """Every state sequence of the given length following ``succ``."""
    def rec(prefix):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        for t in succ[prefix[-1]]:
            yield from rec(prefix + [t])
    for s in init:
        yield from rec([s])




def worst_sigma(lo, hi, n):
    """Largest standard error of a Bernoulli mean over ``n`` samples when the
    parameter is only known to lie in ``[lo, hi]``."""
    lo, hi = max(lo, 0.0), min(hi, 1.0)
    var = 0.25 if lo <= 0.5 <= hi else max(lo * (1 - lo), hi * (1 - hi))
    return (var / n) ** 0.5
