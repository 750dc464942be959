"""Mean-field trajectories of Model I and Model II and their inversion."""
from __future__ import annotations

import numpy as np
from scipy.special import expit

from .params import InvalidParameters, ModelIIParams, ModelIParams

# tolerance for clamping rounding noise in the inversion to zero
_ZERO_TOL = 1e-12


def _as_ii(params) -> ModelIIParams:
    return params.as_model_ii() if isinstance(params, ModelIParams) else params


def model_ii_curve_params(params) -> tuple[float, float, float]:
    """``(a, b, c)`` of the average-degree law ``a + c * n**b`` implied by the rates.

    With ``D = p + q + 2r``: ``a = 2(r + p)/D``, ``b = 2s/D - 1`` and
    ``c = 2 H0 / N0**(2s/D)``.
    """
    pr = _as_ii(params)
    d = pr.node_rate
    a = 2.0 * (pr.r + pr.p) / d
    growth = 2.0 * pr.s / d
    return a, growth - 1.0, 2.0 * pr.H0 / pr.N0 ** growth


def predicted_avg_degree(params, n):
    """Mean-field average degree at size ``n`` (Model I or Model II)."""
    a, b, c = model_ii_curve_params(params)
    return a + c * np.power(np.asarray(n, dtype=float), b)


def predicted_avg_degree_model_i(params: ModelIParams, n):
    """``1 + 2 H0 / N0**(s/r) * n**(s/r - 1)``; valid for ``n >= N0``."""
    n_arr = np.asarray(n, dtype=float)
    if np.any(n_arr < params.N0):
        raise ValueError(f"n must be at least N0={params.N0}")
    ratio = params.s / params.r
    out = 1.0 + 2.0 * params.H0 / params.N0 ** ratio * n_arr ** (ratio - 1.0)
    return float(out) if out.ndim == 0 else out


def nodes_at_time(params, t):
    pr = _as_ii(params)
    return pr.N0 * np.exp(pr.node_rate * np.asarray(t, dtype=float))


def time_at_nodes(params, n):
    pr = _as_ii(params)
    return np.log(np.asarray(n, dtype=float) / pr.N0) / pr.node_rate


def predicted_edge_fractions(params: ModelIParams, t):
    """Fractions of random and homophily edges among all edges at time ``t``.

    ``e_r(t) = N0/2 * exp(2rt)`` and ``e_h(t) = H0 * exp(2st)``, so the random
    share is the sigmoid ``1 / (1 + 2H0/N0 * exp(2(s - r)t))``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    logit = np.log(2.0 * params.H0 / params.N0) + 2.0 * (params.s - params.r) * t
    random = expit(-logit)
    homophily = expit(logit)
    if random.ndim == 0:
        return float(random), float(homophily)
    return random, homophily


def predicted_edge_fractions_model_ii(params, t):
    """Shares of R, I and H edges at time ``t`` under Model II."""
    pr = _as_ii(params)
    t = np.asarray(t, dtype=float)
    d = pr.node_rate
    # log of each edge count; e_r = r/D N0 e^{Dt}, e_i = p/D N0 e^{Dt}
    with np.errstate(divide="ignore"):
        logs = np.stack(np.broadcast_arrays(
            np.log(pr.r / d * pr.N0) + d * t,
            np.log(pr.p / d * pr.N0) + d * t if pr.p > 0 else np.full_like(t, -np.inf),
            np.log(pr.H0) + 2.0 * pr.s * t,
        ))
    top = logs.max(axis=0)
    w = np.exp(logs - top)
    w /= w.sum(axis=0)
    return tuple(float(x) if x.ndim == 0 else x for x in w)


def predicted_nz_fraction(params) -> float:
    """Mean-field fraction of nonzero-degree nodes, ``1 - q/(p + q + 2r)``."""
    pr = _as_ii(params)
    return 1.0 - pr.q / pr.node_rate


def invert_model_ii(a: float, b: float, c: float, *, r: float,
                    node_rate: float = 0.1, H0: int = 2) -> ModelIIParams:
    """Rates and initial state that reproduce the curve ``a + c * n**b``.

    Three curve parameters cannot pin six unknowns, so the total node rate
    ``D = p + q + 2r``, ``H0`` and ``r`` are fixed by the caller.

    Raises
    ------
    InvalidParameters
        If the conventions make ``p`` or ``q`` negative or ``N0 < 2``.
    """
    if not 0 < a < 2:
        raise InvalidParameters(f"a must lie in (0, 2), got {a}")
    if b <= 0:
        raise InvalidParameters(f"b must be positive, got {b}")
    if c <= 0:
        raise InvalidParameters(f"c must be positive, got {c}")
    if node_rate <= 0:
        raise InvalidParameters(f"node_rate must be positive, got {node_rate}")
    if r <= 0:
        raise InvalidParameters(f"r must be positive, got {r}")
    d = node_rate
    s = (b + 1.0) * d / 2.0
    p = a * d / 2.0 - r
    q = d - p - 2.0 * r
    if abs(p) < _ZERO_TOL:
        p = 0.0
    if abs(q) < _ZERO_TOL:
        q = 0.0
    if p < 0:
        raise InvalidParameters(f"r={r} exceeds a*D/2={a * d / 2}; p would be negative")
    if q < 0:
        raise InvalidParameters(f"q would be negative ({q:.6g}); lower r or raise D")
    n0 = int(round((2.0 * H0 / c) ** (1.0 / (b + 1.0))))
    if n0 < 2:
        raise InvalidParameters(f"N0 = {n0} < 2; c={c} is too large for H0={H0}")
    return ModelIIParams(p=p, q=q, r=r, s=s, N0=n0, H0=H0)
