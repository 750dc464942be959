"""Replay of event streams into size-indexed snapshots.

Snapshots are taken the first time the node count reaches ``2**i`` (from
``2**5`` on). Every event is also classified by node novelty:

=====  ==========================  =======
 tag   event                        dn, de
=====  ==========================  =======
 Z     node without an edge          1, 0
 R     edge between two new nodes    2, 1
 I     edge from a new node          1, 1
 H     edge between known nodes      0, 1
=====  ==========================  =======
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .events import TAGS, EdgeEvent, EventLog
from .graph import DynamicGraph, Snapshot
from .powerlaw import ExponentFitReport, FitError, fit_exponent, log_binned_distribution

FIRST_EXPONENT = 5

TRAJECTORY_COLUMNS = (
    "n", "e", "avg_degree", "nz", "alpha_all", "alpha_opt", "x_opt",
    "alpha_set_min", "alpha_set_max", "ratio_R", "ratio_I", "ratio_H", "ratio_Z",
)
EXTRA_COLUMNS = ("n_actual", "t", "ratio_R_all", "ratio_I_all", "ratio_H_all")
DISTRIBUTION_COLUMNS = ("snapshot_n", "bin_low", "bin_high", "density")


def classify_event(known, event: EdgeEvent) -> str:
    """Z, R, I or H for ``event`` given the ids seen before it.

    ``known`` is anything supporting ``in``: a set of ids, or a
    :class:`DynamicGraph` whose dense ids are the stream ids.
    """
    if event.v is None:
        return "Z"
    new_u = event.u not in known
    new_v = event.v not in known
    if new_u and new_v:
        return "R"
    if new_u or new_v:
        return "I"
    return "H"


@dataclass(frozen=True)
class EventTypeCounts:
    z: int
    r: int
    i: int
    h: int
    window: tuple[int, int]

    @classmethod
    def from_array(cls, counts, window) -> "EventTypeCounts":
        z, r, i, h = (int(x) for x in counts)
        return cls(z, r, i, h, (int(window[0]), int(window[1])))

    @property
    def total(self) -> int:
        return self.z + self.r + self.i + self.h

    @property
    def edges(self) -> int:
        return self.r + self.i + self.h

    def ratios(self, denominator: str = "edges") -> dict[str, float]:
        """Shares of each type.

        With ``denominator="edges"`` R, I and H are divided by the edge events
        and Z by all events; with ``"all"`` every type is divided by all events.
        """
        if denominator not in ("edges", "all"):
            raise ValueError("denominator must be 'edges' or 'all'")
        total = self.total
        base = self.edges if denominator == "edges" else total
        out = {k: (getattr(self, k.lower()) / base if base else float("nan")) for k in ("R", "I", "H")}
        out["Z"] = self.z / total if total else float("nan")
        return out


@dataclass
class TrajectorySeries:
    """Snapshots on a size schedule with per-window event counts.

    ``targets[k]`` is the scheduled size of ``snapshots[k]``; the actual node
    count can overshoot by one when an R event crosses the threshold.
    ``raw_counts`` classify every event of the window, ``applied_counts``
    only those that changed the graph (self-loops and repeated edges are
    skipped).
    """

    targets: list[int]
    snapshots: list[Snapshot]
    raw_counts: list[EventTypeCounts]
    applied_counts: list[EventTypeCounts]
    final: Snapshot
    skipped: dict[str, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.snapshots)

    @property
    def n(self) -> np.ndarray:
        return np.array(self.targets, dtype=np.int64)

    @property
    def avg_degree(self) -> np.ndarray:
        return np.array([s.avg_degree for s in self.snapshots])

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    def curve_points(self, min_n: int = 1) -> list[tuple[int, float]]:
        return [(n, s.avg_degree) for n, s in zip(self.targets, self.snapshots) if n >= min_n]


def power_schedule(max_n: int, first: int = FIRST_EXPONENT) -> list[int]:
    out = []
    i = first
    while 2**i <= max_n:
        out.append(2**i)
        i += 1
    return out


def replay(events: EventLog, schedule: Sequence[int] | None = None) -> TrajectorySeries:
    """Apply ``events`` in order to an empty graph and snapshot it.

    Node ids are relabelled densely by first appearance. With no
    ``schedule`` the snapshots are at ``2**5, 2**6, ...`` up to the final size.
    """
    if len(events) == 0:
        raise ValueError("cannot replay an empty event stream")
    u, v, original = events.dense_ids()
    n_total = original.size
    targets = power_schedule(n_total) if schedule is None else sorted(int(x) for x in schedule)
    if any(b <= a for a, b in zip(targets, targets[1:])):
        raise ValueError("schedule must be strictly increasing")

    g = K.new_state(max(n_total, 16), max(len(events), 16))
    raw = np.zeros(4, np.int64)
    applied = np.zeros(4, np.int64)
    skipped = np.zeros(2, np.int64)
    prev_raw, prev_applied = raw.copy(), applied.copy()
    snaps, raw_w, applied_w, hit = [], [], [], []
    i = 0
    low = 0
    for target in targets:
        g, i = K.replay_until(g, u, v, i, target, raw, applied, skipped)
        if g[7][K.N] < target:
            break
        graph = DynamicGraph._from_state(g)
        snaps.append(graph.take_snapshot(float(events.t[i - 1])))
        raw_w.append(EventTypeCounts.from_array(raw - prev_raw, (low, target)))
        applied_w.append(EventTypeCounts.from_array(applied - prev_applied, (low, target)))
        prev_raw, prev_applied = raw.copy(), applied.copy()
        hit.append(target)
        low = target
    g, i = K.replay_until(g, u, v, i, np.iinfo(np.int64).max, raw, applied, skipped)
    final = DynamicGraph._from_state(g).take_snapshot(float(events.t[-1]))
    return TrajectorySeries(
        targets=hit,
        snapshots=snaps,
        raw_counts=raw_w,
        applied_counts=applied_w,
        final=final,
        skipped={"self_loops": int(skipped[0]), "duplicates": int(skipped[1])},
    )


def total_counts(events: EventLog) -> dict[str, int]:
    """Z/R/I/H counts of the whole stream by node novelty."""
    codes = events.classified()
    return dict(zip(TAGS, np.bincount(codes, minlength=4).tolist()))


def tag_agreement(events: EventLog) -> float:
    """Share of tagged events whose tag equals the novelty classification."""
    tagged = events.tag >= 0
    if not tagged.any():
        raise ValueError("the log carries no type tags")
    codes = events.classified()
    return float(np.mean(codes[tagged] == events.tag[tagged]))


def nz_series(trajectory: TrajectorySeries) -> list[tuple[int, float]]:
    if not trajectory.snapshots:
        raise ValueError("trajectory has no snapshots")
    return [(n, s.nz_fraction) for n, s in zip(trajectory.targets, trajectory.snapshots)]


def shuffle_events(events: EventLog, seed=None, edges_only: bool = False) -> EventLog:
    """Uniformly permute the events and reassign the sorted original times.

    With ``edges_only`` the node-only events keep their positions and only
    edge events are permuted among themselves. Type tags are dropped because
    the novelty of an event depends on its position.
    """
    if len(events) == 0:
        raise ValueError("cannot shuffle an empty event stream")
    rng = np.random.default_rng(seed)
    if edges_only:
        order = np.arange(len(events))
        pos = np.flatnonzero(events.is_edge)
        order[pos] = pos[rng.permutation(pos.size)]
    else:
        order = rng.permutation(len(events))
    header = dict(events.header)
    header["shuffled"] = {"seed": seed, "edges_only": bool(edges_only)}
    return EventLog(np.sort(events.t, kind="stable"), events.u[order], events.v[order], None, header)


def fit_snapshots(trajectory: TrajectorySeries, **kwargs) -> list[ExponentFitReport | None]:
    """Exponent fit of every snapshot's nonzero degrees; None where it fails."""
    out = []
    for snap in trajectory.snapshots:
        try:
            out.append(fit_exponent(snap.degrees(), **kwargs))
        except FitError:
            out.append(None)
    return out


def trajectory_rows(trajectory: TrajectorySeries, fits=None, applied: bool = False) -> list[dict]:
    counts = trajectory.applied_counts if applied else trajectory.raw_counts
    fits = fits if fits is not None else [None] * len(trajectory)
    nan = float("nan")
    rows = []
    for n, snap, cnt, fit in zip(trajectory.targets, trajectory.snapshots, counts, fits):
        edge_r = cnt.ratios("edges")
        all_r = cnt.ratios("all")
        rows.append({
            "n": n, "e": snap.e, "avg_degree": snap.avg_degree, "nz": snap.nz_fraction,
            "alpha_all": fit.alpha_all.alpha_hat if fit is not None and fit.alpha_all else nan,
            "alpha_opt": fit.alpha_opt if fit is not None else nan,
            "x_opt": fit.x_opt if fit is not None else nan,
            "alpha_set_min": fit.alpha_set_min if fit is not None else nan,
            "alpha_set_max": fit.alpha_set_max if fit is not None else nan,
            "ratio_R": edge_r["R"], "ratio_I": edge_r["I"], "ratio_H": edge_r["H"], "ratio_Z": edge_r["Z"],
            "n_actual": snap.n, "t": snap.t,
            "ratio_R_all": all_r["R"], "ratio_I_all": all_r["I"], "ratio_H_all": all_r["H"],
        })
    return rows


def _comment(fh, provenance):
    if provenance:
        for line in provenance.splitlines():
            fh.write(f"# {line}\n")


def _fmt(x):
    if isinstance(x, float):
        return repr(x) if np.isfinite(x) else "nan"
    return str(x)


def write_trajectory_csv(fh, rows: Iterable[dict], provenance: str | None = None) -> None:
    _comment(fh, provenance)
    w = csv.writer(fh, lineterminator="\n")
    cols = TRAJECTORY_COLUMNS + EXTRA_COLUMNS
    w.writerow(cols)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in cols])


def write_distribution_csv(fh, trajectory: TrajectorySeries, base: float = 2.0,
                           provenance: str | None = None) -> None:
    _comment(fh, provenance)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(DISTRIBUTION_COLUMNS)
    for n, snap in zip(trajectory.targets, trajectory.snapshots):
        try:
            dist = log_binned_distribution(snap.degrees(), base)
        except FitError:
            continue
        for lo, hi, dens in dist.rows():
            w.writerow([n, _fmt(lo), _fmt(hi), _fmt(dens)])
