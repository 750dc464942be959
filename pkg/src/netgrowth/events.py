"""Timestamped growth events and their TSV serialization.

A line is ``t<TAB>u`` for a node-only event or ``t<TAB>u<TAB>v`` for an edge.
Lines starting with ``#`` are comments; generator logs append an inline
``#type=<Z|R|I|H>`` comment to every event line.
"""
from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from . import _kernels as K

TAGS = ("Z", "R", "I", "H")
TAG_CODE = {t: i for i, t in enumerate(TAGS)}
NO_TAG = -1

_HEADER_PREFIX = "# netgrowth-log "
_TAG_RE = re.compile(r"type=([ZRIH])\b")


class EventParseError(ValueError):
    def __init__(self, lineno: int, line: str, reason: str):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line.rstrip()!r}")


@dataclass(frozen=True, slots=True)
class EdgeEvent:
    timestamp: float
    u: int
    v: int | None = None
    type_tag: str | None = None

    @property
    def is_edge(self) -> bool:
        return self.v is not None


class EventLog:
    """Ordered growth events stored column-wise.

    ``v`` is -1 for node-only events and ``tag`` is -1 where no generator tag
    is known. ``header`` records the producing model, parameters and seed.
    Indexing with an int gives an :class:`EdgeEvent`; with a slice or index
    array, another ``EventLog``.
    """

    __slots__ = ("t", "u", "v", "tag", "header")

    def __init__(self, t, u, v, tag=None, header=None):
        self.t = np.ascontiguousarray(t, dtype=np.float64)
        self.u = np.ascontiguousarray(u, dtype=np.int64)
        self.v = np.ascontiguousarray(v, dtype=np.int64)
        if tag is None:
            tag = np.full(self.t.shape, NO_TAG, np.int8)
        self.tag = np.ascontiguousarray(tag, dtype=np.int8)
        self.header = dict(header or {})
        if not (self.t.shape == self.u.shape == self.v.shape == self.tag.shape):
            raise ValueError("event columns differ in length")

    @classmethod
    def from_events(cls, events: Iterable[EdgeEvent], header=None) -> "EventLog":
        events = list(events)
        return cls(
            [e.timestamp for e in events],
            [e.u for e in events],
            [-1 if e.v is None else e.v for e in events],
            [NO_TAG if e.type_tag is None else TAG_CODE[e.type_tag] for e in events],
            header,
        )

    def __len__(self) -> int:
        return self.t.shape[0]

    def __getitem__(self, idx):
        if isinstance(idx, (int, np.integer)):
            v = int(self.v[idx])
            tag = int(self.tag[idx])
            return EdgeEvent(
                float(self.t[idx]), int(self.u[idx]),
                None if v < 0 else v, None if tag < 0 else TAGS[tag],
            )
        return EventLog(self.t[idx], self.u[idx], self.v[idx], self.tag[idx], self.header)

    def __iter__(self) -> Iterator[EdgeEvent]:
        tags = [None if x < 0 else TAGS[x] for x in self.tag.tolist()]
        for t, u, v, tag in zip(self.t.tolist(), self.u.tolist(), self.v.tolist(), tags):
            yield EdgeEvent(t, u, None if v < 0 else v, tag)

    def __eq__(self, other):
        if not isinstance(other, EventLog):
            return NotImplemented
        return (
            np.array_equal(self.t, other.t)
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.tag, other.tag)
        )

    def __repr__(self):
        return f"EventLog({len(self)} events, header={self.header!r})"

    @property
    def is_edge(self) -> np.ndarray:
        return self.v >= 0

    def tag_counts(self) -> dict[str, int]:
        counts = np.bincount(self.tag[self.tag >= 0], minlength=4)
        return dict(zip(TAGS, counts.tolist()))

    def dense_ids(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Relabel node ids by first appearance.

        Returns ``(u, v, original)`` where ``original[k]`` is the input id of
        dense node ``k``; ``v`` stays -1 on node-only events.
        """
        m = len(self)
        if K.is_dense(self.u, self.v):
            top = int(max(self.u.max(initial=-1), self.v.max(initial=-1))) + 1
            return self.u.copy(), self.v.copy(), np.arange(top, dtype=np.int64)
        flat = np.empty(2 * m, np.int64)
        flat[0::2] = self.u
        flat[1::2] = self.v
        valid = flat >= 0
        if not valid.any():
            return self.u.copy(), self.v.copy(), np.empty(0, np.int64)
        uniq, first, inverse = np.unique(flat[valid], return_index=True, return_inverse=True)
        order = np.argsort(first, kind="stable")
        rank = np.empty_like(order)
        rank[order] = np.arange(order.size)
        out = np.full(2 * m, -1, np.int64)
        out[valid] = rank[inverse]
        return out[0::2].copy(), out[1::2].copy(), uniq[order]

    def classified(self) -> np.ndarray:
        """Z/R/I/H code of every event from node novelty alone."""
        u, v, _ = self.dense_ids()
        return K.classify_dense(u, v)

    # -- serialization ------------------------------------------------------
    def write_tsv(self, fh, provenance: str | None = None) -> None:
        if provenance:
            for line in provenance.splitlines():
                fh.write(f"# {line}\n")
        if self.header:
            fh.write(_HEADER_PREFIX + json.dumps(self.header, sort_keys=True) + "\n")
        tags = ["" if x < 0 else f"\t#type={TAGS[x]}" for x in self.tag.tolist()]
        ts = [_fmt_time(x) for x in self.t.tolist()]
        buf = []
        for t, u, v, tag in zip(ts, self.u.tolist(), self.v.tolist(), tags):
            if v < 0:
                buf.append(f"{t}\t{u}{tag}\n")
            else:
                buf.append(f"{t}\t{u}\t{v}{tag}\n")
            if len(buf) >= 65536:
                fh.write("".join(buf))
                buf.clear()
        fh.write("".join(buf))

    def to_tsv(self, provenance: str | None = None) -> str:
        out = io.StringIO()
        self.write_tsv(out, provenance)
        return out.getvalue()

    def save(self, path: str | Path, provenance: str | None = None) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            self.write_tsv(fh, provenance)


def _fmt_time(t: float) -> str:
    if t.is_integer() and abs(t) < 2**53:
        return str(int(t))
    return repr(t)


def parse_events(lines: Iterable[str], strict: bool = False) -> EventLog:
    """Parse TSV event lines into an :class:`EventLog`.

    Parameters
    ----------
    lines : iterable of str
        ``t<TAB>u`` or ``t<TAB>u<TAB>v``; ``#`` starts a comment.
    strict : bool
        Reject timestamps that decrease.

    Raises
    ------
    EventParseError
        On the first malformed line, with its 1-based line number.
    """
    ts: list[float] = []
    us: list[int] = []
    vs: list[int] = []
    tags: list[int] = []
    header: dict = {}
    last = -np.inf
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            if line.startswith(_HEADER_PREFIX):
                try:
                    header = json.loads(line[len(_HEADER_PREFIX):])
                except json.JSONDecodeError as exc:
                    raise EventParseError(lineno, raw, "bad log header") from exc
            continue
        body, _, comment = line.partition("#")
        fields = body.split()
        if len(fields) not in (2, 3):
            raise EventParseError(lineno, raw, f"expected 2 or 3 fields, got {len(fields)}")
        try:
            t = float(fields[0])
            ids = [int(f) for f in fields[1:]]
        except ValueError:
            raise EventParseError(lineno, raw, "non-numeric field") from None
        if not np.isfinite(t) or t < 0:
            raise EventParseError(lineno, raw, "timestamp must be finite and non-negative")
        if any(i < 0 for i in ids):
            raise EventParseError(lineno, raw, "node ids must be non-negative")
        if strict and t < last:
            raise EventParseError(lineno, raw, f"timestamp decreases from {last}")
        last = max(last, t)
        m = _TAG_RE.search(comment)
        ts.append(t)
        us.append(ids[0])
        vs.append(ids[1] if len(ids) == 2 else -1)
        tags.append(TAG_CODE[m.group(1)] if m else NO_TAG)
    return EventLog(
        np.array(ts, np.float64), np.array(us, np.int64),
        np.array(vs, np.int64), np.array(tags, np.int8), header,
    )


def read_events(path: str | Path, strict: bool = False) -> EventLog:
    with open(path, encoding="utf-8") as fh:
        return parse_events(fh, strict=strict)
