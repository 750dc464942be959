import numpy as np
import pytest

from netgrowth import AvgDegreeCurve, CurvePoint, evaluate_curve, fit_avg_degree_curve, rmse
from netgrowth.curvefit import (
    MIN_COEFFICIENT,
    ConvergenceError,
    CurveFitError,
    objective,
    objective_gradient,
)

N = 2.0 ** np.arange(5, 19)


def curve(a, b, c):
    return AvgDegreeCurve(a=a, b=b, c=c, rmse=0.0)


@pytest.mark.parametrize("a, b, c", [
    (0.8, 0.29, 0.132), (0.72, 0.21, 0.284), (0.3, 0.24, 0.33),
    (1.1, 0.93, 0.00075), (1.1, 0.41, 0.02), (1.4, 0.6, 0.00452),
])
def test_noiseless_rows_recovered(a, b, c):
    fit = fit_avg_degree_curve([CurvePoint(n, a + c * n**b) for n in N])
    assert fit.a == pytest.approx(a, abs=1e-3)
    assert fit.b == pytest.approx(b, abs=1e-3)
    assert fit.c == pytest.approx(c, rel=1e-3)
    assert fit.rmse < 1e-8
    assert not fit.b_unconstrained


def test_accepts_pairs_and_arrays():
    y = 0.8 + 0.132 * N**0.29
    a = fit_avg_degree_curve(list(zip(N, y)))
    b = fit_avg_degree_curve((N, y))
    assert a.theta == pytest.approx(b.theta)


def test_flat_series_flags_b():
    fit = fit_avg_degree_curve((N, np.full(N.size, 1.5)))
    assert fit.a == pytest.approx(1.5)
    assert fit.c == MIN_COEFFICIENT
    assert fit.b_unconstrained


def test_power_only_variant():
    fit = fit_avg_degree_curve((N, 0.05 * N**0.6), with_constant=False)
    assert fit.a == 0.0 and not fit.with_constant
    assert fit.b == pytest.approx(0.6, abs=1e-6)
    assert fit.c == pytest.approx(0.05, rel=1e-6)


def test_noisy_rmse_matches_noise_level():
    rng = np.random.default_rng(0)
    n = np.geomspace(32, 2**18, 60)
    y = 0.8 + 0.132 * n**0.29 + rng.normal(0, 0.05, n.size)
    fit = fit_avg_degree_curve((n, y))
    assert fit.rmse == pytest.approx(0.05, abs=0.02)
    assert fit.rmse == pytest.approx(rmse((n, y), fit))


@pytest.mark.parametrize("theta", [[0.8, 0.29, np.log(0.132)], [0.2, 0.7, -4.0], [2.0, 0.05, 0.3]])
@pytest.mark.parametrize("with_constant", [True, False])
def test_gradient_matches_finite_differences(theta, with_constant):
    pts = (N, 0.7 + 0.1 * N**0.33 + 0.02 * np.cos(N))
    theta = np.array(theta if with_constant else theta[1:])
    g = objective_gradient(pts, theta, with_constant)
    for k in range(theta.size):
        h = 1e-6 * max(1.0, abs(theta[k]))
        up, dn = theta.copy(), theta.copy()
        up[k] += h
        dn[k] -= h
        fd = (objective(pts, up, with_constant) - objective(pts, dn, with_constant)) / (2 * h)
        assert g[k] == pytest.approx(fd, rel=1e-4)


@pytest.mark.parametrize("points", [
    (N[:3], N[:3]),
    (np.array([1, 2, 3, 4.0]), np.ones(4)),
    (np.array([0, 10, 100, 1000.0]), np.ones(4)),
    (np.array([10, 10, 10, 10, 1000.0]), np.arange(5.0)),
])
def test_insufficient_data(points):
    with pytest.raises(CurveFitError):
        fit_avg_degree_curve(points)


def test_iteration_budget():
    with pytest.raises(ConvergenceError):
        fit_avg_degree_curve((N, 0.8 + 0.132 * N**0.29 + 0.01 * np.sin(N)), max_iter=1)


def test_evaluate_hand_values():
    assert evaluate_curve(curve(0.8, 0.29, 0.132), 1) == pytest.approx(0.932)
    assert evaluate_curve(curve(1.3, 0.5, 0.0), 1e6) == pytest.approx(1.3)
    n = 364_649
    expected = 0.8 + 0.132 * np.exp(0.29 * np.log(n))
    assert evaluate_curve(curve(0.8, 0.29, 0.132), n) == pytest.approx(expected, rel=1e-12)


def test_rmse_hand_values():
    c = curve(0.8, 0.29, 0.132)
    on = [(n, 0.8 + 0.132 * n**0.29) for n in (1, 10, 100)]
    assert rmse(on, c) == pytest.approx(0.0, abs=1e-15)
    assert rmse([(10, c(10) + 0.1)], c) == pytest.approx(0.1)
    with pytest.raises(CurveFitError):
        rmse([], c)


def test_to_dict_round_values():
    d = curve(0.8, 0.29, 0.132).to_dict()
    assert d["a"] == 0.8 and d["b"] == 0.29 and d["c"] == 0.132
    assert d["ln_c"] == pytest.approx(np.log(0.132))
