"""Least-squares fit of the average-degree growth law ``d(n) = a + c * n**b``.

The fit works in ``theta = (a, b, ln c)``, so ``c > 0`` holds by
construction, and refines with Levenberg-Marquardt damping.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

MAX_ITER = 200
GRAD_TOL = 1e-10
#: reported in place of c when the input carries no growth
MIN_COEFFICIENT = 1e-12
_B_STARTS = (-0.5, 0.05, 0.25, 0.5, 0.75, 1.0, 1.5)


class CurveFitError(ValueError):
    pass


class ConvergenceError(CurveFitError):
    pass


class CurvePoint(NamedTuple):
    n: float
    avg_degree: float


@dataclass(frozen=True)
class AvgDegreeCurve:
    a: float
    b: float
    c: float
    rmse: float = 0.0
    b_unconstrained: bool = False
    with_constant: bool = True
    iterations: int = 0

    @property
    def ln_c(self) -> float:
        return float(np.log(self.c))

    @property
    def theta(self) -> np.ndarray:
        return np.array([self.a, self.b, self.ln_c])

    def __call__(self, n):
        return evaluate_curve(self, n)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "ln_c": self.ln_c, "rmse": self.rmse,
                "b_unconstrained": self.b_unconstrained, "with_constant": self.with_constant}


def _arrays(points) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(points, tuple) and len(points) == 2 and np.ndim(points[0]) == 1:
        n, y = points
    else:
        pts = list(points)
        if not pts:
            return np.empty(0), np.empty(0)
        n, y = zip(*pts)
    return np.asarray(n, dtype=float), np.asarray(y, dtype=float)


def evaluate_curve(curve: AvgDegreeCurve, n):
    out = curve.a + curve.c * np.power(np.asarray(n, dtype=float), curve.b)
    return float(out) if np.ndim(out) == 0 else out


def rmse(points, curve: AvgDegreeCurve) -> float:
    n, y = _arrays(points)
    if n.size == 0:
        raise CurveFitError("rmse needs at least one point")
    return float(np.sqrt(np.mean((y - evaluate_curve(curve, n)) ** 2)))


def _model(theta, log_n, with_constant):
    power = np.exp(theta[1] * log_n + theta[2])
    a = theta[0] if with_constant else 0.0
    return a + power, power


def _jacobian(power, log_n, with_constant):
    cols = [log_n * power, power]
    if with_constant:
        cols.insert(0, np.ones_like(power))
    return np.column_stack(cols)


def objective_gradient(points, theta, with_constant: bool = True) -> np.ndarray:
    """Gradient of the sum of squared residuals with respect to ``(a, b, ln c)``
    (``(b, ln c)`` when ``with_constant`` is False)."""
    n, y = _arrays(points)
    theta = _full_theta(theta, with_constant)
    log_n = np.log(n)
    f, power = _model(theta, log_n, with_constant)
    return -2.0 * _jacobian(power, log_n, with_constant).T @ (y - f)


def objective(points, theta, with_constant: bool = True) -> float:
    n, y = _arrays(points)
    theta = _full_theta(theta, with_constant)
    f, _ = _model(theta, np.log(n), with_constant)
    return float(np.sum((y - f) ** 2))


def _full_theta(theta, with_constant):
    theta = np.asarray(theta, dtype=float)
    if not with_constant and theta.size == 2:
        return np.concatenate([[0.0], theta])
    return theta


def _projected_start(log_n, y, b, with_constant):
    """Best ``(a, ln c)`` for a fixed ``b`` by linear least squares."""
    x = np.exp(b * log_n)
    if with_constant:
        design = np.column_stack([np.ones_like(x), x])
        (a, c), *_ = np.linalg.lstsq(design, y, rcond=None)
    else:
        a, c = 0.0, float(x @ y / (x @ x))
    if not np.isfinite(c) or c <= 0:
        return None
    return np.array([a, b, np.log(c)])


def _initial_guess(log_n, y, with_constant):
    a0 = float(y.min()) if with_constant else 0.0
    eps = 1e-3 * max(float(np.ptp(y)), 1e-12)
    slope, intercept = np.polyfit(log_n, np.log(y - a0 + eps), 1)
    return np.array([a0, slope, intercept])


def _levenberg_marquardt(theta, log_n, y, with_constant, max_iter, gtol):
    free = slice(None) if with_constant else slice(1, None)
    lam = 1e-3
    f, power = _model(theta, log_n, with_constant)
    r = y - f
    sse = float(r @ r)
    for it in range(1, max_iter + 1):
        jac = _jacobian(power, log_n, with_constant)
        grad = jac.T @ r
        grad_norm = 2.0 * float(np.linalg.norm(grad))
        if grad_norm < gtol:
            return theta, sse, it, True
        hess = jac.T @ jac
        diag = np.diag(np.diag(hess))
        improved = False
        while lam < 1e20:
            try:
                step = np.linalg.solve(hess + lam * diag, grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = theta.copy()
            trial[free] += step
            f_t, power_t = _model(trial, log_n, with_constant)
            r_t = y - f_t
            sse_t = float(r_t @ r_t)
            if np.isfinite(sse_t) and sse_t < sse:
                theta, f, power, r, sse = trial, f_t, power_t, r_t, sse_t
                lam = max(lam / 10.0, 1e-12)
                improved = True
                break
            lam *= 10.0
        if not improved:
            # no decrease possible: accept only if the gradient is at the
            # rounding floor of its own terms
            floor = 64 * np.finfo(float).eps * float(np.abs(jac).T @ np.abs(r) @ np.ones(jac.shape[1]))
            return theta, sse, it, grad_norm <= max(gtol, 2.0 * floor)
    return theta, sse, max_iter, False


def fit_avg_degree_curve(points: Iterable, with_constant: bool = True,
                         max_iter: int = MAX_ITER, gtol: float = GRAD_TOL) -> AvgDegreeCurve:
    """Least-squares ``a + c * n**b`` through equally weighted points.

    Parameters
    ----------
    points
        ``CurvePoint``s, ``(n, avg_degree)`` pairs, or a tuple of two arrays.
    with_constant
        Fit ``a``; with False the pure power law ``c * n**b`` is fitted.

    Raises
    ------
    CurveFitError
        Fewer than 4 distinct sizes, or sizes spanning less than two decades.
    ConvergenceError
        No start reaches the gradient tolerance within ``max_iter`` steps.
    """
    n, y = _arrays(points)
    if n.size < 4 or np.unique(n).size < 4:
        raise CurveFitError("need at least 4 points with distinct n")
    if np.any(n < 1):
        raise CurveFitError("n must be >= 1")
    if n.max() / n.min() < 100:
        raise CurveFitError("points must span at least two decades of n")
    order = np.lexsort((y, n))
    n, y = n[order], y[order]
    log_n = np.log(n)

    scale = max(1.0, float(np.abs(y).max()))
    if with_constant and np.ptp(y) <= 1e-12 * scale:
        a = float(y.mean())
        return AvgDegreeCurve(a=a, b=0.0, c=MIN_COEFFICIENT, rmse=float(np.sqrt(np.mean((y - a) ** 2))),
                              b_unconstrained=True, with_constant=True)

    starts = []
    if np.all(y - (y.min() if with_constant else 0.0) + 1e-3 * max(float(np.ptp(y)), 1e-12) > 0):
        starts.append(_initial_guess(log_n, y, with_constant))
    for b0 in _B_STARTS:
        s = _projected_start(log_n, y, b0, with_constant)
        if s is not None:
            starts.append(s)

    best = None
    for theta0 in starts:
        with np.errstate(over="ignore", invalid="ignore"):
            theta, sse, iters, ok = _levenberg_marquardt(theta0.copy(), log_n, y, with_constant,
                                                         max_iter, gtol)
        if ok and np.all(np.isfinite(theta)) and (best is None or sse < best[1]):
            best = (theta, sse, iters)
    if best is None:
        raise ConvergenceError(f"no start converged within {max_iter} iterations")
    theta, sse, iters = best
    return AvgDegreeCurve(
        a=float(theta[0]) if with_constant else 0.0,
        b=float(theta[1]),
        c=float(np.exp(theta[2])),
        rmse=float(np.sqrt(sse / n.size)),
        with_constant=with_constant,
        iterations=iters,
    )
