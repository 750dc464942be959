"""Power-law exponent estimation for degree sequences.

The exponent of the tail ``x >= xmin`` is estimated by the continuous
maximum-likelihood formula and each candidate ``xmin`` is scored by the
Kolmogorov-Smirnov distance between the tail and the fitted model CDF
``P(x) = 1 - (x / xmin) ** (1 - alpha)``.

The empirical CDF at a tail value ``x`` is the fraction of the tail strictly
below ``x``. On integer data this is the quantity the continuous model
approximates (``P(X >= k) ~ (k / xmin) ** (1 - alpha)``); using the fraction
at or below ``x`` instead would charge every candidate the mass of the atom
at ``xmin``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

#: smallest tail that is scored when scanning xmin candidates
MIN_TAIL = 10
#: width of the KS window around the optimum that forms the estimate set
KS_WINDOW = 0.05


class FitError(ValueError):
    """The data cannot support the requested estimate."""


@dataclass(frozen=True)
class TailEstimate:
    xmin: float
    alpha_hat: float
    tail_count: int
    ks: float


@dataclass(frozen=True)
class ExponentFitReport:
    """Exponent estimates of one degree sequence.

    ``alpha_all`` uses every value >= 1, ``opt`` the KS-optimal threshold and
    ``alpha_set`` every candidate whose KS lies within ``KS_WINDOW`` of the
    optimum.
    """

    alpha_all: TailEstimate | None
    opt: TailEstimate
    alpha_set: list[TailEstimate] = field(repr=False)
    candidates: list[TailEstimate] = field(repr=False)

    @property
    def alpha_opt(self) -> float:
        return self.opt.alpha_hat

    @property
    def x_opt(self) -> float:
        return self.opt.xmin

    @property
    def alpha_set_min(self) -> float:
        return min(t.alpha_hat for t in self.alpha_set)

    @property
    def alpha_set_max(self) -> float:
        return max(t.alpha_hat for t in self.alpha_set)

    def to_dict(self) -> dict:
        def row(t):
            return None if t is None else {
                "xmin": t.xmin, "alpha_hat": t.alpha_hat, "tail_count": t.tail_count, "ks": t.ks,
            }
        return {
            "alpha_all": row(self.alpha_all),
            "opt": row(self.opt),
            "alpha_set_min": self.alpha_set_min,
            "alpha_set_max": self.alpha_set_max,
            "alpha_set": [row(t) for t in self.alpha_set],
            "candidates": [row(t) for t in self.candidates],
        }


def _positive(values) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size and not np.all(np.isfinite(x)):
        raise FitError("values must be finite")
    return x[x > 0]


def mle_alpha(values, xmin: float, min_tail: int = 1) -> float:
    """``1 + m / sum(ln(x_i / xmin))`` over the ``m`` values ``x_i >= xmin``."""
    if xmin <= 0:
        raise FitError("xmin must be positive")
    x = _positive(values)
    tail = x[x >= xmin]
    if tail.size < max(min_tail, 1):
        raise FitError(f"tail above xmin={xmin} has {tail.size} values, need {max(min_tail, 1)}")
    log_sum = float(np.sum(np.log(tail / xmin)))
    if log_sum <= 0:
        raise FitError("all tail values equal xmin; the estimate is infinite")
    return 1.0 + tail.size / log_sum


def ks_statistic(values, xmin: float, alpha: float) -> float:
    """Largest gap between the tail's empirical CDF and the fitted power law."""
    if alpha <= 1:
        raise FitError("alpha must exceed 1")
    x = _positive(values)
    tail = np.sort(x[x >= xmin])
    if tail.size == 0:
        raise FitError(f"no values at or above xmin={xmin}")
    uniq, first = np.unique(tail, return_index=True)
    below = first / tail.size
    model = -np.expm1((1.0 - alpha) * np.log(uniq / xmin))
    return float(np.max(np.abs(below - model)))


@njit(cache=True)
def _scan(logs, counts, suffix_n, suffix_log, starts, log_xmins, out_alpha, out_ks):
    """Exponent and KS for tails starting at ``starts[k]`` with threshold
    ``exp(log_xmins[k])``; NaN where the log-sum vanishes."""
    nu = logs.shape[0]
    for k in range(starts.shape[0]):
        i0 = starts[k]
        lx = log_xmins[k]
        m = suffix_n[i0]
        denom = suffix_log[i0] - m * lx
        if m == 0 or denom <= 0.0:
            out_alpha[k] = np.nan
            out_ks[k] = np.nan
            continue
        alpha = 1.0 + m / denom
        cum = 0
        worst = 0.0
        for j in range(i0, nu):
            model = -np.expm1((1.0 - alpha) * (logs[j] - lx))
            gap = abs(cum / m - model)
            if gap > worst:
                worst = gap
            cum += counts[j]
        out_alpha[k] = alpha
        out_ks[k] = worst


def _compress(values):
    x = _positive(values)
    if x.size == 0:
        raise FitError("no positive values")
    uniq, counts = np.unique(x, return_counts=True)
    logs = np.log(uniq)
    suffix_n = np.cumsum(counts[::-1])[::-1].astype(np.int64)
    suffix_log = np.cumsum((counts * logs)[::-1])[::-1]
    return uniq, counts.astype(np.int64), logs, suffix_n, suffix_log


def _thin(eligible: np.ndarray, suffix_n: np.ndarray, limit: int) -> np.ndarray:
    # keep candidates at geometrically spaced tail sizes
    sizes = suffix_n[eligible]
    wanted = np.geomspace(sizes[-1], sizes[0], limit)
    # sizes decrease along eligible; search on the reversed (increasing) array
    pos = np.searchsorted(sizes[::-1], wanted, side="left")
    pos = np.clip(pos, 0, sizes.size - 1)
    picked = np.unique(eligible[::-1][pos])
    return picked


def fit_exponent(values, min_tail: int = MIN_TAIL, max_candidates: int | None = 500,
                 window: float = KS_WINDOW) -> ExponentFitReport:
    """Fit the tail exponent with KS-selected ``xmin``.

    Every distinct value whose tail holds at least ``min_tail`` values is a
    candidate threshold. When there are more than ``max_candidates`` of them
    (continuous data), candidates are taken at geometrically spaced tail sizes.
    """
    uniq, counts, logs, suffix_n, suffix_log = _compress(values)
    eligible = np.flatnonzero(suffix_n >= min_tail)
    # a tail consisting of a single distinct value has an infinite estimate
    eligible = eligible[eligible < uniq.size - 1]
    if eligible.size == 0:
        raise FitError(f"no xmin leaves a tail of {min_tail} values with more than one distinct value")
    if max_candidates is not None and eligible.size > max_candidates:
        eligible = _thin(eligible, suffix_n, max_candidates)

    alpha = np.empty(eligible.size)
    ks = np.empty(eligible.size)
    _scan(logs, counts, suffix_n, suffix_log, eligible.astype(np.int64), logs[eligible], alpha, ks)
    valid = np.isfinite(alpha)
    if not valid.any():
        raise FitError("no candidate xmin gives a finite estimate")
    candidates = [
        TailEstimate(float(uniq[i]), float(a), int(suffix_n[i]), float(d))
        for i, a, d in zip(eligible[valid], alpha[valid], ks[valid])
    ]
    ks_valid = ks[valid]
    best = int(np.argmin(ks_valid))  # first minimum = smallest xmin
    opt = candidates[best]
    alpha_set = [c for c in candidates if abs(c.ks - opt.ks) < window]
    return ExponentFitReport(_estimate_at(uniq, counts, logs, suffix_n, suffix_log, 1.0),
                             opt, alpha_set, candidates)


def _estimate_at(uniq, counts, logs, suffix_n, suffix_log, xmin) -> TailEstimate | None:
    i0 = int(np.searchsorted(uniq, xmin, side="left"))
    if i0 >= uniq.size:
        return None
    a = np.empty(1)
    d = np.empty(1)
    _scan(logs, counts, suffix_n, suffix_log, np.array([i0], np.int64), np.array([np.log(xmin)]), a, d)
    if not np.isfinite(a[0]):
        return None
    return TailEstimate(float(xmin), float(a[0]), int(suffix_n[i0]), float(d[0]))


@dataclass(frozen=True)
class BinnedDistribution:
    """Exponentially binned density of nonzero degrees.

    ``density = count / (width * total)`` so that ``sum(density * width) == 1``.
    Only nonempty bins are kept.
    """

    lower: np.ndarray
    upper: np.ndarray
    density: np.ndarray
    count: np.ndarray

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def center(self) -> np.ndarray:
        """Geometric bin centres."""
        return np.sqrt(self.lower * self.upper)

    def __len__(self):
        return self.lower.size

    def rows(self):
        return list(zip(self.lower.tolist(), self.upper.tolist(), self.density.tolist()))


def log_binned_distribution(degrees, base: float = 2.0) -> BinnedDistribution:
    """Bins ``[base**j, base**(j+1))`` covering the nonzero degrees."""
    if base <= 1:
        raise FitError("base must exceed 1")
    x = _positive(degrees)
    if x.size == 0:
        raise FitError("no nonzero degrees to bin")
    lo = int(np.floor(np.log(x.min()) / np.log(base))) - 1
    hi = int(np.ceil(np.log(x.max()) / np.log(base))) + 1
    edges = np.power(float(base), np.arange(lo, hi + 1))
    idx = np.searchsorted(edges, x, side="right") - 1
    counts = np.bincount(idx, minlength=edges.size - 1)[: edges.size - 1]
    keep = np.flatnonzero(counts)
    lower = edges[keep]
    upper = edges[keep + 1]
    count = counts[keep]
    density = count / ((upper - lower) * x.size)
    return BinnedDistribution(lower, upper, density, count)


def avg_degree_from_alpha(alpha: float, nz_fraction: float) -> float:
    """Mean degree of a power law on ``[1, inf)`` scaled by the nonzero share:
    ``NZ * (alpha - 1) / (alpha - 2)``."""
    if alpha <= 2:
        raise FitError("the mean degree diverges for alpha <= 2")
    if not 0 < nz_fraction <= 1:
        raise FitError("nz_fraction must lie in (0, 1]")
    return nz_fraction * (1.0 + 1.0 / (alpha - 2.0))


def delta_from_avg_degree(avg_degree: float, nz_fraction: float) -> float:
    """Inverse of :func:`avg_degree_from_alpha`: ``alpha - 2 = 1 / (d/NZ - 1)``."""
    if not 0 < nz_fraction <= 1:
        raise FitError("nz_fraction must lie in (0, 1]")
    ratio = avg_degree / nz_fraction
    if ratio <= 1:
        raise FitError("average degree must exceed the nonzero fraction")
    return 1.0 / (ratio - 1.0)
