"""Continuous-time simulation of Model I and Model II.

Four event channels race with instantaneous rates

* R: ``r * n``   -- two new nodes joined by a random edge,
* H: ``2 s e_h`` -- a homophily edge, source drawn by homophily degree and
  target by degree,
* I: ``p * n``   -- a new node attached to a uniformly chosen existing node,
* Z: ``q * n``   -- a new isolated node.

The waiting time to the next event is exponential with the total rate and
the channel is picked proportionally to its rate.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .. import _kernels as K
from ..events import EventLog
from ..graph import DynamicGraph
from .params import InvalidParameters, ModelIIParams, ModelIParams

#: resampling budget for a homophily target before the event is dropped
MAX_TARGET_TRIES = 100

INIT_MODES = ("mean_field", "isolated")


@njit(cache=True)
def _run_chunk(deg, hdeg, head, bag, nxt, hbag, table, counts, t_buf, u_buf, v_buf, tag_buf,
               rng, p, q, r, s, target_n, t, n_ev, max_tries, stats):
    # runs until the target size or until the graph or event buffers are full
    cap = t_buf.shape[0]
    while counts[K.N] < target_n and n_ev < cap and K.has_room(deg, bag, hbag, table, counts, 2, 1):
        n = counts[K.N]
        lam_r = r * n
        lam_h = 2.0 * s * counts[K.EH]
        lam_i = p * n
        lam_z = q * n
        total = lam_r + lam_h + lam_i + lam_z
        t += rng.exponential(1.0 / total)
        x = rng.random() * total
        if x < lam_r:
            a = n
            b = n + 1
            counts[K.N] = n + 2
            K.insert_edge(deg, hdeg, head, bag, nxt, hbag, table, counts, a, b, False)
            tag = K.TAG_R
        elif x < lam_r + lam_h:
            a = hbag[rng.integers(0, 2 * counts[K.EH])]
            e2 = 2 * counts[K.E]
            b = -1
            for _ in range(max_tries):
                cand = bag[rng.integers(0, e2)]
                if cand != a and not K.has_edge_in(table, a, cand):
                    b = cand
                    break
            if b < 0:
                stats[0] += 1
                continue
            K.insert_edge(deg, hdeg, head, bag, nxt, hbag, table, counts, a, b, True)
            tag = K.TAG_H
        elif x < lam_r + lam_h + lam_i:
            b = rng.integers(0, n)
            a = n
            counts[K.N] = n + 1
            K.insert_edge(deg, hdeg, head, bag, nxt, hbag, table, counts, a, b, False)
            tag = K.TAG_I
        else:
            a = n
            b = -1
            counts[K.N] = n + 1
            tag = K.TAG_Z
        t_buf[n_ev] = t
        u_buf[n_ev] = a
        v_buf[n_ev] = b
        tag_buf[n_ev] = tag
        n_ev += 1
    return t, n_ev


@njit(cache=True)
def _run(g, rng, p, q, r, s, target_n, t0, ev, n_ev, max_tries):
    t = t0
    stats = np.zeros(1, np.int64)
    while True:
        deg, hdeg, head, bag, nxt, hbag, table, counts = g
        t_buf, u_buf, v_buf, tag_buf = ev
        t, n_ev = _run_chunk(deg, hdeg, head, bag, nxt, hbag, table, counts, t_buf, u_buf, v_buf,
                             tag_buf, rng, p, q, r, s, target_n, t, n_ev, max_tries, stats)
        if counts[K.N] >= target_n:
            return g, ev, n_ev, stats[0]
        g = K.reserve(g, 2, 1)
        ev = K.grow_events(t_buf, u_buf, v_buf, tag_buf, n_ev + 1)


def initial_composition(params: ModelIIParams, init: str = "mean_field") -> tuple[int, int, int]:
    """Split ``N0`` into (random pairs, influenced nodes, root nodes).

    ``mean_field`` matches the rate equations at ``t = 0``: a share ``2r/D``
    of the nodes sits on random edges, ``p/D`` hangs off an influencer and
    ``q/D`` is isolated. ``isolated`` starts from ``N0`` bare nodes.
    """
    n0 = params.N0
    if init == "isolated":
        return 0, 0, n0
    if init != "mean_field":
        raise InvalidParameters(f"unknown init mode {init!r}; expected one of {INIT_MODES}")
    d = params.node_rate
    pairs = min(int(round(params.r / d * n0)), n0 // 2)
    influenced = min(int(round(params.p / d * n0)), n0 - 2 * pairs)
    roots = n0 - 2 * pairs - influenced
    return pairs, influenced, roots


def _initialize(params: ModelIIParams, rng, init: str):
    """Seed graph plus its construction events, all at time 0."""
    pairs, influenced, roots = initial_composition(params, init)
    available = params.N0 * (params.N0 - 1) // 2 - pairs - influenced
    if params.H0 > available:
        raise InvalidParameters(
            f"H0={params.H0} does not fit among N0={params.N0} initial nodes ({available} free pairs)"
        )
    g = DynamicGraph(node_capacity=4 * params.N0, edge_capacity=4 * (params.N0 + params.H0))
    events = []
    for _ in range(pairs):
        a, b = g.add_node(), g.add_node()
        g.add_edge(a, b)
        events.append((a, b, K.TAG_R))
    for _ in range(influenced):
        if g.n == 0:
            a = g.add_node()
            events.append((a, -1, K.TAG_Z))
            continue
        b = int(rng.integers(0, g.n))
        a = g.add_node()
        g.add_edge(a, b)
        events.append((a, b, K.TAG_I))
    for _ in range(roots):
        events.append((g.add_node(), -1, K.TAG_Z))
    placed = 0
    while placed < params.H0:
        a, b = rng.choice(params.N0, size=2, replace=False)
        if g.add_edge(int(a), int(b), homophily=True):
            events.append((int(a), int(b), K.TAG_H))
            placed += 1
    return g, events


def simulate_model_ii(params, target_n: int, seed=None, *, init: str = "mean_field",
                      max_target_tries: int = MAX_TARGET_TRIES,
                      return_graph: bool = False):
    """Grow a Model II network until it has at least ``target_n`` nodes.

    ``params`` may also be :class:`ModelIParams` (``p = q = 0``). The log
    starts with the seed graph's construction events at ``t = 0`` and the
    header records the model, parameters, seed and the number of dropped
    homophily events.
    """
    model = "model1" if isinstance(params, ModelIParams) else "model2"
    pr = params.as_model_ii() if isinstance(params, ModelIParams) else params
    target_n = int(target_n)
    if target_n <= pr.N0:
        raise InvalidParameters(f"target_n={target_n} must exceed N0={pr.N0}")
    rng = np.random.default_rng(seed)
    graph, init_events = _initialize(pr, rng, init)
    expected_events = min(int(target_n * (1 + _expected_avg_degree(pr, target_n))), 1 << 24)
    ev = K.new_events(len(init_events) + expected_events)
    for k, (a, b, tag) in enumerate(init_events):
        ev[0][k] = 0.0
        ev[1][k] = a
        ev[2][k] = b
        ev[3][k] = tag
    g, ev, n_ev, skipped = _run(
        graph._g, rng, float(pr.p), float(pr.q), float(pr.r), float(pr.s),
        target_n, 0.0, ev, len(init_events), int(max_target_tries),
    )
    graph._g = g
    header = {
        "model": model,
        "params": params.to_dict(),
        "seed": seed,
        "target_n": target_n,
        "init": init,
        "init_events": len(init_events),
        "skipped_homophily": int(skipped),
    }
    log = EventLog(ev[0][:n_ev], ev[1][:n_ev], ev[2][:n_ev], ev[3][:n_ev], header)
    return (log, graph) if return_graph else log


def simulate_model_i(params: ModelIParams, target_n: int, seed=None, **kwargs):
    """Model I: random and homophily edges only."""
    if not isinstance(params, ModelIParams):
        raise TypeError("simulate_model_i expects ModelIParams")
    return simulate_model_ii(params, target_n, seed, **kwargs)


def _expected_avg_degree(params: ModelIIParams, n) -> float:
    # pre-sizes the event buffer only
    d = params.node_rate
    growth = 2.0 * params.s / d
    return 2.0 * (params.r + params.p) / d + 2.0 * params.H0 / params.N0 ** growth * n ** (growth - 1.0)
