"""JIT-compiled primitives shared by the graph, the generators and the replayer.

Graph state is a tuple of eight int64 arrays::

    (deg, hdeg, head, bag, nxt, hbag, table, counts)

``bag`` holds edge endpoints in insertion order (edge ``k`` sits at slots
``2k`` and ``2k + 1``), so a uniform slot is a degree-proportional node and
``bag[j ^ 1]`` is the neighbour across slot ``j``. ``head``/``nxt`` thread
each node's slots into a linked list. ``table`` is an open-addressing hash
set of undirected edge keys, 0 marking an empty bucket. ``counts`` holds
``n, e, e_h, nz``.
"""
import numpy as np
from numba import njit

N, E, EH, NZ = 0, 1, 2, 3

TAG_Z, TAG_R, TAG_I, TAG_H = 0, 1, 2, 3

_MIX = np.uint64(0xFF51AFD7ED558CCD)
_SHIFT = np.uint64(33)


def new_state(node_capacity=16, edge_capacity=16):
    node_capacity = max(int(node_capacity), 1)
    edge_capacity = max(int(edge_capacity), 1)
    table_size = 1 << max(4, int(4 * edge_capacity - 1).bit_length())
    return (
        np.zeros(node_capacity, np.int64),
        np.zeros(node_capacity, np.int64),
        np.full(node_capacity, -1, np.int64),
        np.full(2 * edge_capacity, -1, np.int64),
        np.full(2 * edge_capacity, -1, np.int64),
        np.full(2 * edge_capacity, -1, np.int64),
        np.zeros(table_size, np.int64),
        np.zeros(4, np.int64),
    )


@njit(cache=True, inline="always")
def edge_key(u, v):
    if u > v:
        u, v = v, u
    return (u << 32) | v


@njit(cache=True, inline="always")
def _bucket(key, mask):
    x = np.uint64(key)
    x ^= x >> _SHIFT
    x *= _MIX
    x ^= x >> _SHIFT
    return np.int64(x & np.uint64(mask))


@njit(cache=True)
def table_contains(table, key):
    mask = table.shape[0] - 1
    i = _bucket(key, mask)
    while True:
        k = table[i]
        if k == key:
            return True
        if k == 0:
            return False
        i = (i + 1) & mask


@njit(cache=True)
def table_insert(table, key):
    mask = table.shape[0] - 1
    i = _bucket(key, mask)
    while True:
        k = table[i]
        if k == key:
            return False
        if k == 0:
            table[i] = key
            return True
        i = (i + 1) & mask


@njit(cache=True)
def _rehash(table, size):
    out = np.zeros(size, np.int64)
    for k in table:
        if k != 0:
            table_insert(out, k)
    return out


@njit(cache=True)
def _grow(a, size, fill):
    if size <= a.shape[0]:
        return a
    cap = max(size, 2 * a.shape[0])
    out = np.full(cap, fill, np.int64)
    out[: a.shape[0]] = a
    return out


@njit(cache=True)
def reserve(g, extra_nodes, extra_edges):
    """Return a state with room for ``extra_nodes`` nodes and ``extra_edges`` edges."""
    deg, hdeg, head, bag, nxt, hbag, table, counts = g
    n_need = counts[N] + extra_nodes
    e_need = counts[E] + extra_edges
    deg = _grow(deg, n_need, 0)
    hdeg = _grow(hdeg, n_need, 0)
    head = _grow(head, n_need, -1)
    bag = _grow(bag, 2 * e_need, -1)
    nxt = _grow(nxt, 2 * e_need, -1)
    hbag = _grow(hbag, 2 * (counts[EH] + extra_edges), -1)
    # load factor <= 1/2
    if 2 * e_need > table.shape[0]:
        size = table.shape[0]
        while 2 * e_need > size:
            size *= 2
        table = _rehash(table, size)
    return (deg, hdeg, head, bag, nxt, hbag, table, counts)


@njit(cache=True)
def add_node(g):
    counts = g[7]
    u = counts[N]
    counts[N] = u + 1
    return u


@njit(cache=True, inline="always")
def has_edge_in(table, u, v):
    if u == v:
        return False
    return table_contains(table, edge_key(u, v))


@njit(cache=True)
def has_edge(g, u, v):
    return has_edge_in(g[6], u, v)


@njit(cache=True, inline="always")
def insert_edge(deg, hdeg, head, bag, nxt, hbag, table, counts, u, v, homophily):
    """Array-level :func:`add_edge`; hot loops call this on unpacked state
    because passing the state tuple costs a reference count per array."""
    if u == v:
        return False
    if not table_insert(table, edge_key(u, v)):
        return False
    e = counts[E]
    j = 2 * e
    bag[j] = u
    bag[j + 1] = v
    nxt[j] = head[u]
    head[u] = j
    nxt[j + 1] = head[v]
    head[v] = j + 1
    if deg[u] == 0:
        counts[NZ] += 1
    if deg[v] == 0:
        counts[NZ] += 1
    deg[u] += 1
    deg[v] += 1
    counts[E] = e + 1
    if homophily:
        h = 2 * counts[EH]
        hbag[h] = u
        hbag[h + 1] = v
        hdeg[u] += 1
        hdeg[v] += 1
        counts[EH] += 1
    return True


@njit(cache=True)
def add_edge(g, u, v, homophily):
    """Insert ``{u, v}``; capacity must already be reserved."""
    deg, hdeg, head, bag, nxt, hbag, table, counts = g
    return insert_edge(deg, hdeg, head, bag, nxt, hbag, table, counts, u, v, homophily)


@njit(cache=True, inline="always")
def has_room(deg, bag, hbag, table, counts, extra_nodes, extra_edges):
    """True when ``reserve(g, extra_nodes, extra_edges)`` would be a no-op."""
    e2 = 2 * (counts[E] + extra_edges)
    return (
        counts[N] + extra_nodes <= deg.shape[0]
        and e2 <= bag.shape[0]
        and 2 * (counts[EH] + extra_edges) <= hbag.shape[0]
        and e2 <= table.shape[0]
    )


@njit(cache=True)
def neighbor_at(g, u, k):
    """The ``k``-th most recent neighbour of ``u`` (O(k) walk)."""
    head, bag, nxt = g[2], g[3], g[4]
    j = head[u]
    while k > 0:
        j = nxt[j]
        k -= 1
    return bag[j ^ 1]


@njit(cache=True)
def neighbors(g, u):
    out = np.empty(g[0][u], np.int64)
    head, bag, nxt = g[2], g[3], g[4]
    j = head[u]
    i = 0
    while j >= 0:
        out[i] = bag[j ^ 1]
        j = nxt[j]
        i += 1
    return out


# ---------------------------------------------------------------------------
# event buffers


@njit(cache=True)
def grow_events(t, u, v, tag, size):
    if size <= t.shape[0]:
        return t, u, v, tag
    cap = max(size, 2 * t.shape[0])
    t2 = np.empty(cap, np.float64)
    u2 = np.empty(cap, np.int64)
    v2 = np.empty(cap, np.int64)
    tag2 = np.empty(cap, np.int8)
    m = t.shape[0]
    t2[:m] = t
    u2[:m] = u
    v2[:m] = v
    tag2[:m] = tag
    return t2, u2, v2, tag2


def new_events(capacity=1024):
    capacity = max(int(capacity), 1)
    return (
        np.empty(capacity, np.float64),
        np.empty(capacity, np.int64),
        np.empty(capacity, np.int64),
        np.empty(capacity, np.int8),
    )


# ---------------------------------------------------------------------------
# replay


@njit(cache=True)
def _replay_chunk(deg, hdeg, head, bag, nxt, hbag, table, counts, u, v, i, stop_n, raw, applied, skipped):
    m = u.shape[0]
    while i < m and counts[N] < stop_n and has_room(deg, bag, hbag, table, counts, 2, 1):
        a = u[i]
        b = v[i]
        n = counts[N]
        if b < 0:
            raw[TAG_Z] += 1
            if a == n:
                counts[N] = n + 1
                applied[TAG_Z] += 1
        else:
            new_a = a >= n
            new_b = b >= n
            if new_a and new_b:
                kind = TAG_R
            elif new_a or new_b:
                kind = TAG_I
            else:
                kind = TAG_H
            raw[kind] += 1
            top = max(a, b) + 1
            if top > n:
                counts[N] = top
            if a == b:
                skipped[0] += 1
            elif insert_edge(deg, hdeg, head, bag, nxt, hbag, table, counts, a, b, False):
                applied[kind] += 1
            else:
                skipped[1] += 1
        i += 1
    return i


@njit(cache=True)
def replay_until(g, u, v, start, stop_n, raw, applied, skipped):
    """Apply dense-id events from ``start`` until ``n >= stop_n`` or the end.

    Ids must be dense in first-appearance order, so an endpoint is new exactly
    when it is at least the current node count. ``raw``/``applied`` accumulate
    Z/R/I/H counts; ``skipped`` accumulates (self-loops, duplicates).
    Returns ``(g, next_index)``.
    """
    m = u.shape[0]
    i = start
    while True:
        deg, hdeg, head, bag, nxt, hbag, table, counts = g
        i = _replay_chunk(deg, hdeg, head, bag, nxt, hbag, table, counts, u, v, i, stop_n,
                          raw, applied, skipped)
        if i >= m or counts[N] >= stop_n:
            return g, i
        g = reserve(g, 2, 1)


@njit(cache=True)
def classify_dense(u, v):
    """Z/R/I/H tag for every event of a dense first-appearance id stream."""
    m = u.shape[0]
    out = np.empty(m, np.int8)
    seen = 0
    for i in range(m):
        a = u[i]
        b = v[i]
        if b < 0:
            out[i] = TAG_Z
            if a >= seen:
                seen = a + 1
        else:
            new_a = a >= seen
            new_b = b >= seen
            if new_a and new_b:
                out[i] = TAG_R
            elif new_a or new_b:
                out[i] = TAG_I
            else:
                out[i] = TAG_H
            top = max(a, b) + 1
            if top > seen:
                seen = top
    return out


@njit(cache=True)
def is_dense(u, v):
    """True when ids already follow first-appearance order 0, 1, 2, ..."""
    seen = 0
    for i in range(u.shape[0]):
        a = u[i]
        b = v[i]
        if a > seen or a < 0:
            return False
        if a == seen:
            seen += 1
        if b >= 0:
            if b > seen:
                return False
            if b == seen:
                seen += 1
    return True
