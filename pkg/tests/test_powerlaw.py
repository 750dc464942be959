import math

import numpy as np
import pytest
from scipy.integrate import quad

from netgrowth import (
    FitError,
    avg_degree_from_alpha,
    delta_from_avg_degree,
    fit_exponent,
    ks_statistic,
    log_binned_distribution,
    mle_alpha,
)
from netgrowth.models import simulate_barabasi_albert
from netgrowth.stream import replay


def pareto(alpha, size, seed):
    return np.random.default_rng(seed).pareto(alpha - 1.0, size) + 1.0


def test_mle_hand_value():
    assert mle_alpha([100, 272], 100) == pytest.approx(1 + 2 / math.log(2.72), rel=1e-12)
    assert mle_alpha([100, 272], 100) == pytest.approx(2.999, abs=1e-3)


def test_mle_ignores_values_below_xmin():
    assert mle_alpha([1, 2, 100, 272], 100) == mle_alpha([100, 272], 100)


def test_mle_errors():
    with pytest.raises(FitError, match="infinite"):
        mle_alpha([5, 5, 5], 5)
    with pytest.raises(FitError):
        mle_alpha([1, 2], 10)
    with pytest.raises(FitError):
        mle_alpha([1, 2, 3], 1, min_tail=5)


@pytest.mark.xfail(strict=True, reason="continuous estimator is biased upward by ~0.07 on floored "
                                        "integers at the KS-selected threshold")
def test_mle_recovers_integer_pareto():
    x = np.floor(pareto(2.5, 100_000, 1))
    assert fit_exponent(x).alpha_opt == pytest.approx(2.5, abs=0.05)


def test_integer_bias_is_a_resolution_effect():
    # flooring shortens every log ratio; a half-unit shift at the same threshold removes most of it
    raw, shifted = [], []
    for seed in range(10):
        x = np.floor(pareto(2.5, 100_000, seed))
        rep = fit_exponent(x)
        raw.append(rep.alpha_opt)
        shifted.append(mle_alpha(x + 0.5, rep.x_opt))
    assert 0.03 < np.mean(raw) - 2.5 < 0.12
    assert abs(np.mean(shifted) - 2.5) < 0.04


def test_ks_two_point_tail():
    # ECDF below each value: 0 at xmin, 1/3 at 2 xmin; model 0 and 1/2
    assert ks_statistic([1, 2, 2], 1, 2.0) == pytest.approx(1 / 6)
    assert ks_statistic([3, 6], 3, 2.0) == pytest.approx(0.0, abs=1e-15)


def test_ks_at_quantile_midpoints():
    m, alpha = 500, 2.5
    u = (np.arange(1, m + 1) - 0.5) / m
    x = (1 - u) ** (-1 / (alpha - 1))
    assert ks_statistic(x, 1.0, alpha) < 1 / m + 1e-12


def test_ks_large_for_wrong_alpha():
    assert ks_statistic(pareto(2.5, 10_000, 2), 1.0, 10.0) > 0.2


def test_ks_matches_brute_force():
    rng = np.random.default_rng(3)
    x = np.floor(pareto(2.3, 2000, 4))
    xmin, alpha = 3.0, 2.4
    tail = np.sort(x[x >= xmin])
    gaps = [abs(np.mean(tail < v) - (1 - (v / xmin) ** (1 - alpha))) for v in np.unique(tail)]
    assert ks_statistic(x, xmin, alpha) == pytest.approx(max(gaps), abs=1e-12)
    assert rng is not None


def test_ks_errors():
    with pytest.raises(FitError):
        ks_statistic([1, 2], 5, 2.0)
    with pytest.raises(FitError):
        ks_statistic([1, 2], 1, 1.0)


def test_fit_scan_matches_direct_estimates():
    x = np.floor(pareto(2.5, 5000, 5))
    rep = fit_exponent(x, max_candidates=None)
    for cand in rep.candidates[::7]:
        assert cand.alpha_hat == pytest.approx(mle_alpha(x, cand.xmin), rel=1e-10)
        assert cand.ks == pytest.approx(ks_statistic(x, cand.xmin, cand.alpha_hat), abs=1e-10)
    assert rep.opt.ks == min(c.ks for c in rep.candidates)
    assert rep.alpha_all.alpha_hat == pytest.approx(mle_alpha(x, 1.0))


def test_fit_report_set_contains_truth():
    rep = fit_exponent(pareto(2.5, 100_000, 6))
    assert rep.alpha_opt == pytest.approx(2.5, abs=0.05)
    assert rep.alpha_set_min <= 2.5 <= rep.alpha_set_max
    assert all(abs(t.ks - rep.opt.ks) < 0.05 for t in rep.alpha_set)
    d = rep.to_dict()
    assert d["opt"]["alpha_hat"] == rep.alpha_opt


def test_fit_barabasi_albert_degrees():
    log = simulate_barabasi_albert(2, 100_000, seed=7)
    deg = replay(log).final.degrees()
    assert 2.7 <= fit_exponent(deg).alpha_opt <= 3.3


def test_fit_rejects_degenerate_input():
    with pytest.raises(FitError):
        fit_exponent([4] * 100)
    with pytest.raises(FitError):
        fit_exponent([])
    with pytest.raises(FitError):
        fit_exponent([1.0, np.inf])


def test_binned_hand_counts():
    dist = log_binned_distribution([1, 1, 2, 3], 2)
    assert dist.rows() == [(1.0, 2.0, 2 / 4), (2.0, 4.0, 2 / (2 * 4))]


def test_binned_single_value():
    dist = log_binned_distribution([5, 5, 5], 2)
    assert len(dist) == 1
    assert dist.density[0] == pytest.approx(1 / dist.width[0])


def test_binned_normalized_and_slope():
    x = pareto(2.5, 200_000, 8)
    dist = log_binned_distribution(x, 2)
    assert np.sum(dist.density * dist.width) == pytest.approx(1.0)
    full = dist.count >= 100
    slope = np.polyfit(np.log(dist.center[full]), np.log(dist.density[full]), 1)[0]
    assert slope == pytest.approx(-2.5, abs=0.1)


def test_binned_errors():
    with pytest.raises(FitError):
        log_binned_distribution([], 2)
    with pytest.raises(FitError):
        log_binned_distribution([1, 2], 1.0)


def test_avg_degree_hand_values():
    assert avg_degree_from_alpha(3, 1) == pytest.approx(2)
    assert avg_degree_from_alpha(2.5, 0.5) == pytest.approx(1.5)


def test_avg_degree_quadrature():
    alpha = 2.2
    value, _ = quad(lambda k: (alpha - 1) * k ** (-alpha) * k, 1, np.inf, limit=500)
    assert avg_degree_from_alpha(alpha, 1.0) == pytest.approx(value, abs=1e-6)


def test_avg_degree_errors():
    with pytest.raises(FitError):
        avg_degree_from_alpha(2.0, 1.0)
    with pytest.raises(FitError):
        avg_degree_from_alpha(3.0, 0.0)


def test_delta_hand_values_and_errors():
    assert delta_from_avg_degree(2, 1) == pytest.approx(1)
    with pytest.raises(FitError):
        delta_from_avg_degree(1, 1)
    with pytest.raises(FitError):
        delta_from_avg_degree(2, 1.5)


@pytest.mark.parametrize("alpha", [2.01, 2.3, 3.0, 4.5])
@pytest.mark.parametrize("nz", [0.1, 0.7, 1.0])
def test_delta_round_trip(alpha, nz):
    assert delta_from_avg_degree(avg_degree_from_alpha(alpha, nz), nz) == pytest.approx(alpha - 2, abs=1e-12)
