"""Hot integer kernels over packed GF(2) columns.

Every kernel has a numba implementation (``*_nb``) and a pure-numpy one
(``*_np``). The public names are bound to one of them at import time according
to :data:`pirac._accel.USE_NUMBA`; both variants stay importable so tests and
the benchmark can compare them directly.

Conventions shared by all kernels:

* a parity-check column is an ``int64`` whose bit ``i`` is row ``i``;
* an error pattern over ``n`` columns is an ``int64`` mask whose bit ``j``
  selects column ``j`` (so ``n <= MAX_MASK_BITS``);
* a syndrome is used directly as an index into tables of size ``2**r``.
"""

from itertools import combinations, islice

import numpy as np

from ._accel import USE_NUMBA, njit

MAX_MASK_BITS = 62
_CHUNK = 1 << 16
_INT64_MAX = np.iinfo(np.int64).max


# ---------------------------------------------------------------------------
# coset-leader table (weight classes in increasing order, smallest mask wins)
# ---------------------------------------------------------------------------


@njit(cache=True)
def leader_table_nb(cols, r):
    n = cols.shape[0]
    size = 1 << r
    leaders = np.full(size, -1, np.int64)
    weights = np.full(size, -1, np.int8)
    leaders[0] = 0
    weights[0] = 0
    found = 1
    limit = np.int64(1) << n
    for w in range(1, n + 1):
        if found == size:
            break
        x = (np.int64(1) << w) - 1
        while x < limit:
            s = 0
            m = x
            j = 0
            while m:
                if m & 1:
                    s ^= cols[j]
                m >>= 1
                j += 1
            if weights[s] < 0:
                weights[s] = w
                leaders[s] = x
                found += 1
                if found == size:
                    break
            # Gosper's hack: next larger integer with the same popcount
            c = x & -x
            rr = x + c
            x = (((rr ^ x) >> 2) // c) | rr
    return leaders, weights


def leader_table_np(cols, r):
    cols = np.asarray(cols, dtype=np.int64)
    n = cols.shape[0]
    size = 1 << r
    leaders = np.full(size, -1, np.int64)
    weights = np.full(size, -1, np.int8)
    leaders[0] = 0
    weights[0] = 0
    found = 1
    for w in range(1, n + 1):
        if found == size:
            break
        best = np.full(size, _INT64_MAX, np.int64)
        it = combinations(range(n), w)
        while True:
            chunk = list(islice(it, _CHUNK))
            if not chunk:
                break
            idx = np.array(chunk, dtype=np.int64)
            masks = np.bitwise_or.reduce(np.left_shift(np.int64(1), idx), axis=1)
            synd = np.bitwise_xor.reduce(cols[idx], axis=1)
            np.minimum.at(best, synd, masks)
        new = (weights < 0) & (best != _INT64_MAX)
        leaders[new] = best[new]
        weights[new] = w
        found += int(new.sum())
    return leaders, weights


# ---------------------------------------------------------------------------
# syndrome-graph BFS: true coset weights without leader tie-breaking
# ---------------------------------------------------------------------------


@njit(cache=True)
def coset_weights_nb(cols, r, max_depth):
    size = 1 << r
    dist = np.full(size, -1, np.int8)
    dist[0] = 0
    frontier = np.zeros(size, np.int64)
    nxt = np.zeros(size, np.int64)
    nf = 1
    depth = 0
    while nf > 0 and depth < max_depth:
        depth += 1
        nn = 0
        for a in range(nf):
            s = frontier[a]
            for c in cols:
                t = s ^ c
                if dist[t] < 0:
                    dist[t] = depth
                    nxt[nn] = t
                    nn += 1
        for a in range(nn):
            frontier[a] = nxt[a]
        nf = nn
    return dist


def coset_weights_np(cols, r, max_depth):
    cols = np.asarray(cols, dtype=np.int64)
    dist = np.full(1 << r, -1, np.int8)
    dist[0] = 0
    frontier = np.zeros(1, np.int64)
    depth = 0
    while frontier.size and depth < max_depth:
        depth += 1
        cand = np.unique((frontier[:, None] ^ cols[None, :]).ravel())
        cand = cand[dist[cand] < 0]
        dist[cand] = depth
        frontier = cand
    return dist


# ---------------------------------------------------------------------------
# batched random search over systematic matrices [I_r | A]
# ---------------------------------------------------------------------------


@njit(cache=True)
def first_covering_nb(extra, r, radius):
    """Index of the first row of ``extra`` giving covering radius <= radius, or -1."""
    batch, k = extra.shape
    size = 1 << r
    n = r + k
    cols = np.empty(n, np.int64)
    for i in range(r):
        cols[i] = np.int64(1) << i
    dist = np.empty(size, np.int8)
    frontier = np.zeros(size, np.int64)
    nxt = np.zeros(size, np.int64)
    for b in range(batch):
        for j in range(k):
            cols[r + j] = extra[b, j]
        dist[:] = -1
        dist[0] = 0
        frontier[0] = 0
        nf = 1
        reached = 1
        depth = 0
        while nf > 0 and depth < radius and reached < size:
            depth += 1
            nn = 0
            for a in range(nf):
                s = frontier[a]
                for c in cols:
                    t = s ^ c
                    if dist[t] < 0:
                        dist[t] = depth
                        nxt[nn] = t
                        nn += 1
            for a in range(nn):
                frontier[a] = nxt[a]
            nf = nn
            reached += nn
        if reached == size:
            return b
    return -1


def first_covering_np(extra, r, radius):
    identity = np.left_shift(np.int64(1), np.arange(r, dtype=np.int64))
    for b in range(extra.shape[0]):
        cols = np.concatenate([identity, extra[b]])
        if (coset_weights_np(cols, r, radius) >= 0).all():
            return b
    return -1


# ---------------------------------------------------------------------------
# maximum tau-coset weight over all tau-sets of distinct syndromes
# ---------------------------------------------------------------------------


@njit(cache=True)
def max_tau_nb(member, span_k, tau):
    """``member[i, s]`` says syndrome ``s`` lies in span ``i``; spans sorted by ``span_k``."""
    n_spans, n_syn = member.shape
    idx = np.arange(tau)
    best = 0
    while True:
        for sp in range(n_spans):
            ok = True
            for i in range(tau):
                if not member[sp, idx[i]]:
                    ok = False
                    break
            if ok:
                if span_k[sp] > best:
                    best = span_k[sp]
                break
        i = tau - 1
        while i >= 0 and idx[i] == n_syn - tau + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, tau):
            idx[j] = idx[j - 1] + 1
    return best


def max_tau_np(member, span_k, tau):
    member = np.asarray(member, dtype=bool)
    n_spans, n_syn = member.shape
    step = max(1, (1 << 22) // max(1, n_spans * tau))
    it = combinations(range(n_syn), tau)
    best = 0
    while True:
        chunk = list(islice(it, step))
        if not chunk:
            break
        idx = np.array(chunk, dtype=np.int64)
        contained = member[:, idx].all(axis=2)
        first = contained.argmax(axis=0)
        best = max(best, int(span_k[first].max()))
    return best


if USE_NUMBA:
    leader_table = leader_table_nb
    coset_weights = coset_weights_nb
    first_covering = first_covering_nb
    max_tau = max_tau_nb
else:
    leader_table = leader_table_np
    coset_weights = coset_weights_np
    first_covering = first_covering_np
    max_tau = max_tau_np
