"""Reference generators whose degree exponent stays fixed while they grow.

Each generator advances in integer steps; every event of step ``k`` carries
timestamp ``k`` and the seed graph is built at step 0. Tags follow node
novelty, so the first edge of a newcomer is ``I`` and later ones are ``H``.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .. import _kernels as K
from ..events import EventLog
from .params import BaselineParams, InvalidParameters

#: retry budget for rejected edges and unusable length-2 paths
MAX_TRIES = 100


@njit(cache=True)
def _log(ev, n_ev, t, a, b, tag):
    t_buf, u_buf, v_buf, tag_buf = ev
    if n_ev + 1 > t_buf.shape[0]:
        t_buf, u_buf, v_buf, tag_buf = K.grow_events(t_buf, u_buf, v_buf, tag_buf, n_ev + 1)
    t_buf[n_ev] = t
    u_buf[n_ev] = a
    v_buf[n_ev] = b
    tag_buf[n_ev] = tag
    return (t_buf, u_buf, v_buf, tag_buf), n_ev + 1


@njit(cache=True)
def _seed_clique(g, size, ev, n_ev):
    g = K.reserve(g, size, size * size)
    for i in range(size):
        K.add_node(g)
        if i == 0:
            if size == 1:
                ev, n_ev = _log(ev, n_ev, 0.0, 0, -1, K.TAG_Z)
            continue
        for j in range(i):
            K.add_edge(g, i, j, False)
            if i == 1:
                tag = K.TAG_R
            elif j == 0:
                tag = K.TAG_I
            else:
                tag = K.TAG_H
            ev, n_ev = _log(ev, n_ev, 0.0, i, j, tag)
    return g, ev, n_ev


@njit(cache=True)
def _preferential_step(g, rng, m, step, ev, n_ev, targets):
    """New node with ``m`` edges to distinct degree-proportional targets."""
    e2 = 2 * g[7][K.E]
    k = 0
    while k < m:
        cand = g[3][rng.integers(0, e2)]
        dup = False
        for j in range(k):
            if targets[j] == cand:
                dup = True
                break
        if not dup:
            targets[k] = cand
            k += 1
    x = K.add_node(g)
    for j in range(m):
        K.add_edge(g, x, targets[j], False)
        ev, n_ev = _log(ev, n_ev, float(step), x, targets[j], K.TAG_I if j == 0 else K.TAG_H)
    return ev, n_ev


@njit(cache=True)
def _barabasi_albert(rng, m, target_n, g, ev, n_ev):
    g, ev, n_ev = _seed_clique(g, m + 1, ev, n_ev)
    targets = np.empty(m, np.int64)
    step = 0
    while g[7][K.N] < target_n:
        step += 1
        g = K.reserve(g, 1, m)
        ev, n_ev = _preferential_step(g, rng, m, step, ev, n_ev, targets)
    return g, ev, n_ev


@njit(cache=True)
def _dorogovtsev(rng, c, target_n, g, ev, n_ev, max_tries):
    g, ev, n_ev = _seed_clique(g, c + 1, ev, n_ev)
    targets = np.empty(c, np.int64)
    step = 0
    rejected = 0
    while g[7][K.N] < target_n:
        step += 1
        g = K.reserve(g, 1, 2 * c)
        ev, n_ev = _preferential_step(g, rng, c, step, ev, n_ev, targets)
        for _ in range(c):
            placed = False
            for _try in range(max_tries):
                e2 = 2 * g[7][K.E]
                a = g[3][rng.integers(0, e2)]
                b = g[3][rng.integers(0, e2)]
                if K.add_edge(g, a, b, False):
                    ev, n_ev = _log(ev, n_ev, float(step), a, b, K.TAG_H)
                    placed = True
                    break
            if not placed:
                rejected += 1
    return g, ev, n_ev, rejected


@njit(cache=True)
def _fenwick_add(tree, i, delta):
    i += 1
    size = tree.shape[0]
    while i < size:
        tree[i] += delta
        i += i & (-i)


@njit(cache=True)
def _fenwick_find(tree, x):
    """Smallest index whose prefix sum exceeds ``x``."""
    pos = 0
    size = tree.shape[0]
    step = 1
    while step * 2 < size:
        step *= 2
    while step > 0:
        nxt = pos + step
        if nxt < size and tree[nxt] <= x:
            pos = nxt
            x -= tree[nxt]
        step //= 2
    return pos


@njit(cache=True)
def _bump_degree_weight(tree, deg, u):
    # weight d(d-1) -> (d+1)d after deg[u] became d+1
    d = deg[u] - 1
    _fenwick_add(tree, u, 2 * d)


@njit(cache=True)
def _vazquez(rng, u_prob, steps, g, ev, n_ev, max_tries):
    g = K.reserve(g, steps + 2, steps + 1)
    tree = np.zeros(steps + 4, np.int64)
    K.add_node(g)
    K.add_node(g)
    K.add_edge(g, 0, 1, False)
    ev, n_ev = _log(ev, n_ev, 0.0, 0, 1, K.TAG_R)
    deg = g[0]
    closed = 0
    fallbacks = 0
    for step in range(1, steps + 1):
        done = False
        if rng.random() < u_prob:
            for _ in range(max_tries):
                total = 0
                # total weight is the prefix sum over all nodes
                i = g[7][K.N]
                while i > 0:
                    total += tree[i]
                    i -= i & (-i)
                if total == 0:
                    break
                w = _fenwick_find(tree, rng.integers(0, total))
                dw = deg[w]
                k1 = rng.integers(0, dw)
                k2 = rng.integers(0, dw - 1)
                if k2 >= k1:
                    k2 += 1
                a = K.neighbor_at(g, w, k1)
                b = K.neighbor_at(g, w, k2)
                if K.add_edge(g, a, b, False):
                    _bump_degree_weight(tree, deg, a)
                    _bump_degree_weight(tree, deg, b)
                    ev, n_ev = _log(ev, n_ev, float(step), a, b, K.TAG_H)
                    closed += 1
                    done = True
                    break
            if not done:
                fallbacks += 1
        if not done:
            target = rng.integers(0, g[7][K.N])
            x = K.add_node(g)
            K.add_edge(g, x, target, False)
            _bump_degree_weight(tree, deg, x)
            _bump_degree_weight(tree, deg, target)
            ev, n_ev = _log(ev, n_ev, float(step), x, target, K.TAG_I)
    return g, ev, n_ev, closed, fallbacks


@njit(cache=True)
def _copying(rng, q_copy, m, target_n, g, ev, n_ev, max_tries):
    # out[k*m:(k+1)*m] are the links node k created; seed nodes own their clique
    out = np.empty(target_n * m + m * (m + 1), np.int64)
    g, ev, n_ev = _seed_clique(g, m + 1, ev, n_ev)
    for i in range(m + 1):
        k = 0
        for j in range(m + 1):
            if j != i:
                out[i * m + k] = j
                k += 1
    step = 0
    rejected = 0
    while g[7][K.N] < target_n:
        step += 1
        n = g[7][K.N]
        amb = rng.integers(0, n)
        g = K.reserve(g, 1, m)
        x = K.add_node(g)
        made = 0
        for j in range(m):
            placed = False
            for attempt in range(max_tries):
                target = -1
                if attempt == 0 and rng.random() < q_copy:
                    target = out[amb * m + j]
                if target < 0:
                    target = rng.integers(0, n)
                if K.add_edge(g, x, target, False):
                    placed = True
                    break
            if not placed:
                rejected += 1
                target = -1
            out[x * m + j] = target
            if placed:
                ev, n_ev = _log(ev, n_ev, float(step), x, target, K.TAG_I if made == 0 else K.TAG_H)
                made += 1
        if made == 0:
            ev, n_ev = _log(ev, n_ev, float(step), x, -1, K.TAG_Z)
    return g, ev, n_ev, rejected


def _finish(ev, n_ev, header):
    return EventLog(ev[0][:n_ev], ev[1][:n_ev], ev[2][:n_ev], ev[3][:n_ev], header)


def simulate_barabasi_albert(m: int, target_n: int, seed=None) -> EventLog:
    """Preferential attachment: each step adds one node with ``m`` edges.

    Starts from a clique on ``m + 1`` nodes.
    """
    BaselineParams("barabasi_albert", m)
    if target_n <= m + 1:
        raise InvalidParameters(f"target_n must exceed m + 1 = {m + 1}")
    rng = np.random.default_rng(seed)
    ev = K.new_events(int(target_n) * (m + 1))
    g, ev, n_ev = _barabasi_albert(rng, int(m), int(target_n), K.new_state(target_n, target_n * m), ev, 0)
    return _finish(ev, n_ev, {"model": "barabasi_albert", "params": {"m": int(m)},
                              "seed": seed, "target_n": int(target_n)})


def simulate_dorogovtsev(c_rate: int, target_n: int, seed=None,
                         max_tries: int = MAX_TRIES) -> EventLog:
    """Each step: a new node with ``c_rate`` preferential edges, then
    ``c_rate`` edges between pairs drawn independently by degree.

    Starts from a clique on ``c_rate + 1`` nodes.
    """
    BaselineParams("dorogovtsev", c_rate)
    if target_n <= c_rate + 1:
        raise InvalidParameters(f"target_n must exceed c_rate + 1 = {c_rate + 1}")
    rng = np.random.default_rng(seed)
    ev = K.new_events(int(target_n) * (2 * c_rate + 1))
    g, ev, n_ev, rejected = _dorogovtsev(
        rng, int(c_rate), int(target_n), K.new_state(target_n, 2 * target_n * c_rate), ev, 0, max_tries
    )
    return _finish(ev, n_ev, {"model": "dorogovtsev", "params": {"c_rate": int(c_rate)},
                              "seed": seed, "target_n": int(target_n),
                              "rejected_edges": int(rejected)})


def simulate_vazquez(u: float, target_steps: int, seed=None, max_tries: int = MAX_TRIES) -> EventLog:
    """Triangle closing: with probability ``1 - u`` a new node joins a uniform
    existing node; with probability ``u`` a uniformly chosen open length-2
    path is closed. After ``max_tries`` unusable paths the step falls back to
    adding a node. Starts from a single edge.
    """
    BaselineParams("vazquez", u)
    if target_steps < 1:
        raise InvalidParameters("target_steps must be positive")
    rng = np.random.default_rng(seed)
    ev = K.new_events(int(target_steps) + 2)
    g, ev, n_ev, closed, fallbacks = _vazquez(
        rng, float(u), int(target_steps), K.new_state(16, 16), ev, 0, max_tries
    )
    return _finish(ev, n_ev, {"model": "vazquez", "params": {"u": float(u)}, "seed": seed,
                              "target_steps": int(target_steps), "closed": int(closed),
                              "fallbacks": int(fallbacks)})


def simulate_vertex_copying(q_copy: float, target_n: int, seed=None, out_degree: int = 2,
                            max_tries: int = MAX_TRIES) -> EventLog:
    """Copying growth in the out-link form of Kumar et al.

    Every node owns ``out_degree`` links. A newcomer picks a uniform
    ambassador and, for each of the ambassador's own links, copies its target
    with probability ``q_copy`` or links to a uniform existing node instead;
    a rejected (duplicate) link is redrawn uniformly. Starts from a clique on
    ``out_degree + 1`` nodes, each owning its links to the rest of the clique.
    """
    BaselineParams("copying", q_copy)
    if out_degree < 1:
        raise InvalidParameters("out_degree must be >= 1")
    if target_n <= out_degree + 1:
        raise InvalidParameters(f"target_n must exceed the {out_degree + 1}-node seed")
    rng = np.random.default_rng(seed)
    m = int(out_degree)
    ev = K.new_events((m + 1) * int(target_n))
    g, ev, n_ev, rejected = _copying(
        rng, float(q_copy), m, int(target_n), K.new_state(target_n, m * target_n + m * m), ev, 0, max_tries
    )
    return _finish(ev, n_ev, {"model": "copying", "params": {"q_copy": float(q_copy), "out_degree": m},
                              "seed": seed, "target_n": int(target_n), "rejected_edges": int(rejected)})
