"""Build dependency graphs from streams of typed categorical event records.

Each event carries an epoch-millisecond timestamp and a mapping from entity
type to entity id. Every event contributes +1 weight to each unordered pair
of its entities (clique expansion), so edge weights count co-occurrences.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import GraftError
from .hetgraph import HeteroGraph

log = logging.getLogger(__name__)


@dataclass
class Event:
    """One event record: epoch-ms timestamp and a type -> id attribute map.

    Events with fewer than two attributes carry no pair information and are
    skipped (with a warning) during accumulation.
    """

    ts: int
    attrs: dict[str, str]


def parse_events(lines: Iterable[str]) -> list[Event]:
    """Parse JSON-lines event records; malformed records report their index."""
    events: list[Event] = []
    rec = 0
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        rec += 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise GraftError(f"record {rec}: invalid JSON: {exc}") from None
        if not isinstance(obj, dict) or set(obj) != {"ts", "attrs"}:
            raise GraftError(f"record {rec}: expected an object with exactly the keys 'ts' and 'attrs'")
        ts = obj["ts"]
        if isinstance(ts, bool) or not isinstance(ts, int):
            raise GraftError(f"record {rec}: 'ts' must be an integer epoch-millisecond timestamp")
        attrs = obj["attrs"]
        if not isinstance(attrs, dict):
            raise GraftError(f"record {rec}: 'attrs' must be an object mapping type to id")
        for k, v in attrs.items():
            if not isinstance(k, str) or not isinstance(v, str) or not k or not v:
                raise GraftError(f"record {rec}: attribute keys and values must be non-empty strings")
            if any(ch.isspace() for ch in k) or any(ch.isspace() for ch in v):
                raise GraftError(f"record {rec}: whitespace is not allowed in types or ids")
        events.append(Event(ts, dict(attrs)))
    return events


def read_events(path: str | Path) -> list[Event]:
    with open(path, encoding="utf-8") as fh:
        return parse_events(fh)


def _add_event(ev: Event, ents: dict[str, str], counts: dict[tuple[str, str], float]) -> int:
    """Fold one event into entity/pair-count state; returns 1 if skipped."""
    items = sorted(ev.attrs.items())
    if len(items) < 2:
        return 1
    for etype, eid in items:
        prev = ents.get(eid)
        if prev is None:
            ents[eid] = etype
        elif prev != etype:
            raise GraftError(f"entity {eid!r} appears with conflicting types {prev!r} and {etype!r}")
    ids = sorted(eid for _, eid in items)
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            key = (ids[i], ids[j])
            counts[key] = counts.get(key, 0.0) + 1.0
    return 0


def _build(ents: dict[str, str], counts: dict[tuple[str, str], float]) -> HeteroGraph:
    return HeteroGraph(ents.items(), ((a, b, w) for (a, b), w in counts.items()))


def accumulate(events: Iterable[Event]) -> HeteroGraph:
    """Aggregate all events into one graph; order of events does not matter."""
    ents: dict[str, str] = {}
    counts: dict[tuple[str, str], float] = {}
    skipped = 0
    for ev in events:
        skipped += _add_event(ev, ents, counts)
    if skipped:
        log.warning("skipped %d event(s) with fewer than two attributes", skipped)
    return _build(ents, counts)


def snapshot_series(events: Iterable[Event], window: int) -> list[HeteroGraph]:
    """Cumulative snapshots over half-open windows of ``window`` milliseconds.

    Snapshot k aggregates every event with ts < start + k * window, where
    start is the earliest timestamp. An empty stream yields one empty graph.
    """
    if not isinstance(window, int) or window <= 0:
        raise GraftError(f"window must be a positive integer of milliseconds, got {window!r}")
    evs = sorted(events, key=lambda e: e.ts)
    if not evs:
        return [HeteroGraph()]
    start = evs[0].ts
    n_windows = (evs[-1].ts - start) // window + 1
    ents: dict[str, str] = {}
    counts: dict[tuple[str, str], float] = {}
    skipped = 0
    snaps: list[HeteroGraph] = []
    idx = 0
    for k in range(1, n_windows + 1):
        boundary = start + k * window
        while idx < len(evs) and evs[idx].ts < boundary:
            skipped += _add_event(evs[idx], ents, counts)
            idx += 1
        snaps.append(_build(ents, counts))
    if skipped:
        log.warning("skipped %d event(s) with fewer than two attributes", skipped)
    return snaps
