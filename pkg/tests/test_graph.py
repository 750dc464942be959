import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from netgrowth import DynamicGraph, EmptyGraphError


def make(n):
    g = DynamicGraph()
    g.add_nodes(n)
    return g


def test_ids_are_dense_and_sequential():
    g = DynamicGraph()
    assert g.add_node() == 0
    assert g.n == 1
    for _ in range(4):
        g.add_node()
    assert g.add_node() == 5
    assert list(g.add_nodes(3)) == [6, 7, 8]


def test_add_edge_updates_counts():
    g = make(2)
    assert g.add_edge(0, 1)
    assert (g.e, g.degree(0), g.degree(1), g.nz) == (1, 1, 1, 2)
    assert g.e_h == 0


def test_rejects_self_loop_and_parallel_edge():
    g = make(3)
    assert not g.add_edge(0, 0)
    assert g.e == 0 and g.nz == 0
    g.add_edge(0, 1)
    assert not g.add_edge(0, 1)
    assert not g.add_edge(1, 0)
    assert g.e == 1
    assert list(g.endpoint_bag) == [0, 1]


def test_missing_node_raises():
    g = make(2)
    with pytest.raises(IndexError):
        g.add_edge(0, 2)
    with pytest.raises(IndexError):
        g.degree(-1)


def test_homophily_flag_tracks_second_bag():
    g = make(4)
    g.add_edge(0, 1, homophily=True)
    g.add_edge(1, 2)
    g.add_edge(2, 3)
    assert g.e_h == 1
    assert g.homophily_degree(1) == 1 and g.homophily_degree(2) == 0
    assert sorted(g.homophily_endpoint_bag) == [0, 1]


def test_sampling_needs_mass():
    g = make(3)
    rng = np.random.default_rng(0)
    with pytest.raises(EmptyGraphError):
        g.preferential_sample(rng)
    g.add_edge(0, 1)
    with pytest.raises(EmptyGraphError):
        g.homophily_sample(rng)


def test_single_edge_is_symmetric():
    g = make(2)
    g.add_edge(0, 1)
    rng = np.random.default_rng(1)
    draws = [g.preferential_sample(rng) for _ in range(20000)]
    assert abs(np.mean(draws) - 0.5) < 0.02


def test_star_centre_gets_half_the_mass():
    g = make(4)
    for leaf in (1, 2, 3):
        g.add_edge(0, leaf)
    rng = np.random.default_rng(2)
    draws = np.array([g.preferential_sample(rng) for _ in range(20000)])
    assert abs(np.mean(draws == 0) - 0.5) < 0.02


def _random_graph(n, m, seed, homophily_share=0.3):
    rng = np.random.default_rng(seed)
    g = make(n)
    while g.e < m:
        u, v = rng.integers(0, n, 2)
        g.add_edge(int(u), int(v), homophily=bool(rng.random() < homophily_share))
    return g


def _chi2_pvalue(draws, weights):
    n = weights.size
    observed = np.bincount(draws, minlength=n)
    keep = weights > 0
    assert observed[~keep].sum() == 0
    expected = weights[keep] / weights.sum() * draws.size
    return chisquare(observed[keep], expected).pvalue


def test_preferential_frequencies_match_degree():
    g = _random_graph(100, 400, seed=3)
    rng = np.random.default_rng(4)
    draws = g.endpoint_bag[rng.integers(0, 2 * g.e, 10**6)]
    # the public sampler draws the same way; check both agree in law
    sample = np.array([g.preferential_sample(rng) for _ in range(20000)])
    assert _chi2_pvalue(draws, g.degrees.astype(float)) > 1e-3
    assert _chi2_pvalue(sample, g.degrees.astype(float)) > 1e-3


def test_homophily_frequencies_match_homophily_degree():
    g = _random_graph(100, 400, seed=5)
    rng = np.random.default_rng(6)
    sample = np.array([g.homophily_sample(rng) for _ in range(50000)])
    assert _chi2_pvalue(sample, g.homophily_degrees.astype(float)) > 1e-3


def test_homophily_degree_two_of_four():
    g = make(4)
    g.add_edge(0, 1, homophily=True)
    g.add_edge(0, 2, homophily=True)
    g.add_edge(2, 3)
    rng = np.random.default_rng(7)
    draws = np.array([g.homophily_sample(rng) for _ in range(20000)])
    assert abs(np.mean(draws == 0) - 0.5) < 0.02
    assert not np.any(draws == 3)


def test_snapshot_fields():
    g = make(5)
    g.add_edge(0, 1)
    g.add_edge(0, 2)
    snap = g.take_snapshot()
    assert snap.n == 5 and snap.e == 2
    assert snap.avg_degree == pytest.approx(0.8)
    assert snap.nz_fraction == pytest.approx(0.6)
    assert snap.degree_histogram == {1: 2, 2: 1}
    assert sum(snap.degree_histogram.values()) == snap.nz
    assert list(snap.degrees()) == [1, 1, 2]
    g.add_edge(3, 4)
    assert snap.e == 2  # snapshots do not follow later changes


def test_empty_snapshot_raises():
    with pytest.raises(EmptyGraphError):
        DynamicGraph().take_snapshot()


def test_degree_views_are_read_only():
    g = make(2)
    g.add_edge(0, 1)
    with pytest.raises(ValueError):
        g.degrees[0] = 5


def test_growth_past_initial_capacity():
    g = DynamicGraph(node_capacity=2, edge_capacity=2)
    g.add_nodes(300)
    for i in range(299):
        assert g.add_edge(i, i + 1)
    assert g.e == 299 and g.nz == 300
    assert g.has_edge(150, 151) and not g.has_edge(0, 2)
    assert sorted(g.neighbors(10)) == [9, 11]


ops = st.lists(
    st.tuples(st.integers(0, 11), st.integers(0, 11), st.booleans()), max_size=80
)


@settings(max_examples=150, deadline=None)
@given(ops)
def test_matches_reference_set_model(sequence):
    g = make(12)
    ref: dict[frozenset, bool] = {}
    for u, v, h in sequence:
        key = frozenset((u, v))
        expected = u != v and key not in ref
        assert g.add_edge(u, v, homophily=h) == expected
        if expected:
            ref[key] = h
    deg = np.zeros(12, int)
    hdeg = np.zeros(12, int)
    for key, h in ref.items():
        for x in key:
            deg[x] += 1
            hdeg[x] += h
    assert g.e == len(ref)
    assert g.e_h == sum(ref.values())
    assert np.array_equal(g.degrees, deg)
    assert np.array_equal(g.homophily_degrees, hdeg)
    assert np.all(g.homophily_degrees <= g.degrees)
    assert g.nz == int(np.sum(deg > 0))
    assert np.array_equal(np.bincount(g.endpoint_bag, minlength=12), deg)
    assert np.array_equal(np.bincount(g.homophily_endpoint_bag, minlength=12), hdeg)
    for key in ref:
        u, v = tuple(key)
        assert g.has_edge(u, v) and g.has_edge(v, u)
