"""Array-backed candidate tracker used inside the sampling kernels.

The path graph is kept as adjacency lists over *local* vertex ids (order
of first visit). Its SCC decomposition is maintained incrementally:

* a step along an already-known edge changes nothing;
* a step to a fresh vertex adds a singleton SCC and makes the source SCC
  non-bottom;
* a new edge inside one SCC can only turn a singleton cyclic;
* a new edge between two SCCs triggers a full iterative Tarjan pass.

Hence the candidate is exact after every step. Candidates never repeat
along a path (a set that stops being bottom never becomes bottom again), so
"candidate changed" is simply "the graph changed and the SCC of the new
state is bottom and cyclic", except for an internal edge of the current
candidate.
"""

from collections import namedtuple

import numpy as np

from .._jit import njit

M_NV = 0       # number of local vertices
M_NE = 1       # number of edges
M_LAST = 2     # local id of the last processed state, -1 on the empty path
M_CAND = 3     # SCC id of the candidate, -1 if none
M_INDEX = 4    # 1-based index of the candidate in the deduplicated sequence
M_BIRTH = 5    # 0-based path position at which the candidate was born
M_STEPS = 6    # path length processed so far
M_NSCC = 7     # number of SCC ids in use
M_CSIZE = 8    # candidate size
M_THR = 9      # strong-candidacy threshold the kernel is waiting for
M_NGE = 10     # candidate members whose birth count is >= threshold
M_TARJAN = 11  # full recomputations performed (diagnostic)
N_META = 12

TrackerState = namedtuple(
    "TrackerState",
    [
        "meta",
        "local_of",
        "glob", "total", "birth", "scc", "head", "members",
        "scc_size", "scc_bottom", "scc_cyclic",
        "e_next", "e_to", "e_from", "e_birth",
        "t_index", "t_low", "t_stack", "t_call", "t_iter", "t_on",
    ],
)

VERTEX_FIELDS = ("glob", "total", "birth", "scc", "head", "members", "scc_size",
                 "t_index", "t_low", "t_stack", "t_call", "t_iter")
VERTEX_BOOL_FIELDS = ("scc_bottom", "scc_cyclic", "t_on")
EDGE_FIELDS = ("e_next", "e_to", "e_from", "e_birth")


def new_tracker(n_global: int, cap_v: int, cap_e: int) -> TrackerState:
    cap_v = max(int(cap_v), 1)
    cap_e = max(int(cap_e), 1)
    arrays = {"meta": np.zeros(N_META, dtype=np.int64),
              "local_of": np.full(max(int(n_global), 1), -1, dtype=np.int64)}
    for name in VERTEX_FIELDS:
        arrays[name] = np.zeros(cap_v, dtype=np.int64)
    for name in VERTEX_BOOL_FIELDS:
        arrays[name] = np.zeros(cap_v, dtype=np.bool_)
    for name in EDGE_FIELDS:
        arrays[name] = np.zeros(cap_e, dtype=np.int64)
    tr = TrackerState(**arrays)
    tracker_reset(tr)
    return tr


def grown(tr: TrackerState, n_global: int, cap_v: int, cap_e: int) -> TrackerState:
    """Copy of ``tr`` with larger capacities (Python side only)."""
    def extend(arr, size, fill):
        if len(arr) >= size:
            return arr
        out = np.full(size, fill, dtype=arr.dtype)
        out[:len(arr)] = arr
        return out

    arrays = {"meta": tr.meta, "local_of": extend(tr.local_of, n_global, -1)}
    for name in VERTEX_FIELDS:
        arrays[name] = extend(getattr(tr, name), cap_v, 0)
    for name in VERTEX_BOOL_FIELDS:
        arrays[name] = extend(getattr(tr, name), cap_v, False)
    for name in EDGE_FIELDS:
        arrays[name] = extend(getattr(tr, name), cap_e, 0)
    return TrackerState(**arrays)


@njit(nrt=False)
def tracker_reset(tr):
    meta = tr.meta
    for v in range(meta[M_NV]):
        tr.local_of[tr.glob[v]] = -1
    for j in range(N_META):
        meta[j] = 0
    meta[M_LAST] = -1
    meta[M_CAND] = -1


@njit(nrt=False)
def _find_edge(tr, a, b):
    e = tr.head[a]
    while e != -1:
        if tr.e_to[e] == b:
            return e
        e = tr.e_next[e]
    return -1


@njit(nrt=False)
def _add_edge(tr, a, b):
    e = tr.meta[M_NE]
    tr.meta[M_NE] = e + 1
    tr.e_from[e] = a
    tr.e_to[e] = b
    tr.e_birth[e] = 0
    tr.e_next[e] = tr.head[a]
    tr.head[a] = e
    return e


@njit(nrt=False)
def _tarjan(tr):
    meta = tr.meta
    nv = meta[M_NV]
    idx = tr.t_index
    low = tr.t_low
    on = tr.t_on
    stk = tr.t_stack
    call = tr.t_call
    it = tr.t_iter
    for v in range(nv):
        idx[v] = -1
        on[v] = False
    counter = 0
    sp = 0
    nscc = 0
    for root in range(nv):
        if idx[root] != -1:
            continue
        idx[root] = counter
        low[root] = counter
        counter += 1
        stk[sp] = root
        sp += 1
        on[root] = True
        it[root] = tr.head[root]
        call[0] = root
        cp = 1
        while cp > 0:
            v = call[cp - 1]
            e = it[v]
            if e != -1:
                it[v] = tr.e_next[e]
                w = tr.e_to[e]
                if idx[w] == -1:
                    idx[w] = counter
                    low[w] = counter
                    counter += 1
                    stk[sp] = w
                    sp += 1
                    on[w] = True
                    it[w] = tr.head[w]
                    call[cp] = w
                    cp += 1
                elif on[w] and idx[w] < low[v]:
                    low[v] = idx[w]
            else:
                cp -= 1
                if low[v] == idx[v]:
                    size = 0
                    while True:
                        sp -= 1
                        w = stk[sp]
                        on[w] = False
                        tr.scc[w] = nscc
                        size += 1
                        if w == v:
                            break
                    tr.scc_size[nscc] = size
                    nscc += 1
                if cp > 0:
                    u = call[cp - 1]
                    if low[v] < low[u]:
                        low[u] = low[v]
    for c in range(nscc):
        tr.scc_bottom[c] = True
        tr.scc_cyclic[c] = tr.scc_size[c] > 1
    for e in range(meta[M_NE]):
        cu = tr.scc[tr.e_from[e]]
        cw = tr.scc[tr.e_to[e]]
        if cu != cw:
            tr.scc_bottom[cu] = False
        elif tr.e_from[e] == tr.e_to[e]:
            tr.scc_cyclic[cu] = True
    meta[M_NSCC] = nscc
    meta[M_TARJAN] += 1


@njit(nrt=False)
def _birth(tr, c, b, pos):
    meta = tr.meta
    meta[M_CAND] = c
    meta[M_INDEX] += 1
    meta[M_BIRTH] = pos
    size = 0
    if tr.scc_size[c] == 1:
        tr.members[0] = b
        size = 1
    else:
        for v in range(meta[M_NV]):
            if tr.scc[v] == c:
                tr.members[size] = v
                size += 1
    meta[M_CSIZE] = size
    for j in range(size):
        v = tr.members[j]
        tr.birth[v] = 0
        e = tr.head[v]
        while e != -1:
            tr.e_birth[e] = 0
            e = tr.e_next[e]
    tr.birth[b] = 1
    meta[M_THR] = 0
    meta[M_NGE] = size


@njit(nrt=False)
def _bump(tr, b, e):
    tr.birth[b] += 1
    tr.e_birth[e] += 1
    if tr.birth[b] == tr.meta[M_THR]:
        tr.meta[M_NGE] += 1


@njit(nrt=False, inline="always")
def tracker_advance(tr, g):
    """Append global state ``g``; return True iff a new candidate was born.

    Kept small so it inlines into the sampling loops; only steps along an
    already-known edge are handled here.
    """
    meta = tr.meta
    b = tr.local_of[g]
    if b >= 0:
        a = meta[M_LAST]
        e = tr.head[a] if a >= 0 else -1
        while e != -1 and tr.e_to[e] != b:
            e = tr.e_next[e]
        if e >= 0:
            meta[M_STEPS] += 1
            tr.total[b] += 1
            meta[M_LAST] = b
            if meta[M_CAND] >= 0:
                tr.birth[b] += 1
                tr.e_birth[e] += 1
                if tr.birth[b] == meta[M_THR]:
                    meta[M_NGE] += 1
            return False
    return _advance_slow(tr, g)


@njit(nrt=False)
def _advance_slow(tr, g):
    meta = tr.meta
    a = meta[M_LAST]
    pos = meta[M_STEPS]
    meta[M_STEPS] = pos + 1
    b = tr.local_of[g]
    if b < 0:
        b = meta[M_NV]
        meta[M_NV] = b + 1
        tr.local_of[g] = b
        tr.glob[b] = g
        tr.total[b] = 1
        tr.birth[b] = 0
        tr.head[b] = -1
        c = meta[M_NSCC]
        meta[M_NSCC] = c + 1
        tr.scc[b] = c
        tr.scc_size[c] = 1
        tr.scc_bottom[c] = True
        tr.scc_cyclic[c] = False
        if a >= 0:
            _add_edge(tr, a, b)
            tr.scc_bottom[tr.scc[a]] = False
        meta[M_LAST] = b
        meta[M_CAND] = -1
        meta[M_CSIZE] = 0
        return False
    tr.total[b] += 1
    meta[M_LAST] = b
    e = _find_edge(tr, a, b)
    if e >= 0:
        if meta[M_CAND] >= 0:
            _bump(tr, b, e)
        return False
    e = _add_edge(tr, a, b)
    ca = tr.scc[a]
    if ca == tr.scc[b]:
        if a == b and not tr.scc_cyclic[ca]:
            tr.scc_cyclic[ca] = True
            if tr.scc_bottom[ca]:
                _birth(tr, ca, b, pos)
                return True
            return False
        if meta[M_CAND] >= 0:
            _bump(tr, b, e)
        return False
    tr.scc_bottom[ca] = False
    _tarjan(tr)
    cb = tr.scc[b]
    if tr.scc_bottom[cb] and tr.scc_cyclic[cb]:
        _birth(tr, cb, b, pos)
        return True
    meta[M_CAND] = -1
    meta[M_CSIZE] = 0
    return False


@njit(nrt=False)
def tracker_set_threshold(tr, thr):
    meta = tr.meta
    meta[M_THR] = thr
    n = 0
    for j in range(meta[M_CSIZE]):
        if tr.birth[tr.members[j]] >= thr:
            n += 1
    meta[M_NGE] = n


@njit(nrt=False)
def tracker_reached(tr):
    """Strong candidacy at the threshold set by :func:`tracker_set_threshold`."""
    meta = tr.meta
    return (meta[M_CAND] >= 0 and meta[M_NGE] == meta[M_CSIZE]
            and tr.birth[meta[M_LAST]] >= meta[M_THR] + 1)


@njit(nrt=False)
def tracker_is_k_candidate(tr, k, strong):
    meta = tr.meta
    counts = tr.birth if strong else tr.total
    for j in range(meta[M_CSIZE]):
        if counts[tr.members[j]] < k:
            return False
    return counts[meta[M_LAST]] >= k + 1


@njit(nrt=False)
def ceil_k_threshold(i, delta, pmin):
    """``ceil((i - log2 delta) / -log2(1 - pmin))``; 0 when ``pmin == 1``."""
    if pmin >= 1.0:
        return 0
    k = (i - np.log2(delta)) / (-np.log2(1.0 - pmin))
    return int(np.ceil(k))
