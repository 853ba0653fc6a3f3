"""Typed dependency-graph data model, subgraph algebra, and text serialization.

Entities are identified by opaque string ids and carry a type label. Graphs
are undirected, weighted, and forbid self-loops and duplicate edges. The
entity order is always the lexicographic order of the ids, which fixes every
matrix index convention in the package and makes serialization deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import GraftError, GraphFormatError

FORMAT_HEADER = "graphfmt 1"


def _check_token(tok: str, what: str) -> str:
    if not isinstance(tok, str) or not tok or any(ch.isspace() for ch in tok):
        raise GraftError(f"{what} must be a non-empty string without whitespace, got {tok!r}")
    return tok


@dataclass(frozen=True, eq=False)
class AdjacencyView:
    """Dense symmetric adjacency matrix over an explicit, sorted entity index.

    ``binary`` states that weights were clamped to {0, 1}. The diagonal is
    always zero because self-loops are forbidden.
    """

    ids: tuple[str, ...]
    matrix: np.ndarray
    binary: bool

    def __post_init__(self):
        n = len(self.ids)
        m = self.matrix
        if m.shape != (n, n):
            raise GraftError(f"adjacency matrix shape {m.shape} does not match {n} entities")
        if n and (not np.array_equal(m, m.T) or np.diagonal(m).any()):
            raise GraftError("adjacency matrix must be symmetric with a zero diagonal")

    @property
    def n(self) -> int:
        return len(self.ids)


class HeteroGraph:
    """Immutable undirected weighted graph over typed entities.

    Parameters
    ----------
    entities : iterable of (id, type) pairs
        Ids must be unique. Order does not matter; entities are stored sorted
        lexicographically by id.
    edges : iterable of (id1, id2, weight) or (id1, id2) tuples
        Weights must be positive and finite; omitted weights default to 1.0.
        Self-loops and duplicate (unordered) edges are rejected.
    """

    __slots__ = ("_ids", "_types", "_index", "_weights", "_edge_list")

    def __init__(self, entities: Iterable[tuple[str, str]] = (), edges: Iterable[tuple] = ()):
        pairs = []
        for ent in entities:
            eid, etype = ent
            pairs.append((_check_token(eid, "entity id"), _check_token(etype, "entity type")))
        pairs.sort(key=lambda p: p[0])
        for k in range(1, len(pairs)):
            if pairs[k][0] == pairs[k - 1][0]:
                raise GraftError(f"duplicate entity id {pairs[k][0]!r}")
        self._ids = tuple(p[0] for p in pairs)
        self._types = tuple(p[1] for p in pairs)
        self._index = {eid: i for i, eid in enumerate(self._ids)}

        weights: dict[tuple[int, int], float] = {}
        for edge in edges:
            if len(edge) == 2:
                a, b = edge
                w = 1.0
            elif len(edge) == 3:
                a, b, w = edge
            else:
                raise GraftError(f"edge must be (id1, id2[, weight]), got {edge!r}")
            try:
                i, j = self._index[a], self._index[b]
            except KeyError as exc:
                raise GraftError(f"edge endpoint {exc.args[0]!r} is not a declared entity") from None
            if i == j:
                raise GraftError(f"self-loop on entity {a!r} is not allowed")
            w = float(w)
            if not math.isfinite(w) or w <= 0.0:
                raise GraftError(f"edge ({a!r}, {b!r}) weight must be positive and finite, got {w}")
            key = (i, j) if i < j else (j, i)
            if key in weights:
                raise GraftError(f"duplicate edge between {a!r} and {b!r}")
            weights[key] = w
        self._weights = weights
        self._edge_list = tuple(
            (self._ids[i], self._ids[j], w)
            for (i, j), w in sorted(weights.items())
        )

    @property
    def n(self) -> int:
        return len(self._ids)

    @property
    def entity_ids(self) -> tuple[str, ...]:
        return self._ids

    @property
    def entity_types(self) -> tuple[str, ...]:
        return self._types

    def entity_items(self) -> tuple[tuple[str, str], ...]:
        return tuple(zip(self._ids, self._types))

    def has_entity(self, eid: str) -> bool:
        return eid in self._index

    def index_of(self, eid: str) -> int:
        try:
            return self._index[eid]
        except KeyError:
            raise GraftError(f"unknown entity id {eid!r}") from None

    def type_of(self, eid: str) -> str:
        return self._types[self.index_of(eid)]

    def type_labels(self) -> frozenset[str]:
        return frozenset(self._types)

    def edges(self) -> tuple[tuple[str, str, float], ...]:
        """All edges as (id1, id2, weight) with id1 < id2, sorted."""
        return self._edge_list

    @property
    def edge_count(self) -> int:
        return len(self._weights)

    def edge_weight(self, a: str, b: str) -> float | None:
        i, j = self.index_of(a), self.index_of(b)
        key = (i, j) if i < j else (j, i)
        return self._weights.get(key)

    def adjacency(self, binary: bool = False) -> AdjacencyView:
        m = np.zeros((self.n, self.n))
        for (i, j), w in self._weights.items():
            v = 1.0 if binary else w
            m[i, j] = v
            m[j, i] = v
        return AdjacencyView(self._ids, m, binary)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HeteroGraph):
            return NotImplemented
        return (
            self._ids == other._ids
            and self._types == other._types
            and self._edge_list == other._edge_list
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"HeteroGraph(n={self.n}, edges={self.edge_count})"


def induced_subgraph(g: HeteroGraph, keep: Iterable[str]) -> HeteroGraph:
    """Subgraph over ``keep`` with every edge whose endpoints both survive."""
    keep_set = set(keep)
    for eid in keep_set:
        if not g.has_entity(eid):
            raise GraftError(f"unknown entity id {eid!r}")
    entities = [(eid, etype) for eid, etype in g.entity_items() if eid in keep_set]
    edges = [(a, b, w) for a, b, w in g.edges() if a in keep_set and b in keep_set]
    return HeteroGraph(entities, edges)


def align_union_entities(
    a: HeteroGraph, b: HeteroGraph, binary: bool = True
) -> tuple[AdjacencyView, AdjacencyView]:
    """Adjacency views for both graphs over the sorted union of their entity ids.

    Entities absent from one graph contribute zero rows and columns to its
    view. An id present in both graphs with different types is an error.
    """
    for eid in set(a.entity_ids) & set(b.entity_ids):
        if a.type_of(eid) != b.type_of(eid):
            raise GraftError(
                f"entity {eid!r} has conflicting types {a.type_of(eid)!r} and {b.type_of(eid)!r}"
            )
    ids = tuple(sorted(set(a.entity_ids) | set(b.entity_ids)))
    index = {eid: i for i, eid in enumerate(ids)}
    n = len(ids)

    def fill(g: HeteroGraph) -> np.ndarray:
        m = np.zeros((n, n))
        for x, y, w in g.edges():
            i, j = index[x], index[y]
            v = 1.0 if binary else w
            m[i, j] = v
            m[j, i] = v
        return m

    return AdjacencyView(ids, fill(a), binary), AdjacencyView(ids, fill(b), binary)


def dynamic_factor(a: AdjacencyView, b: AdjacencyView) -> float:
    """Discrepancy between two aligned adjacency views.

    Defined as the entrywise sum of squared differences divided by n(n-1).
    For binary views this is the fraction of entity pairs whose edge status
    differs, counting each unordered pair once.
    """
    if a.ids != b.ids:
        raise GraftError("adjacency views are over different entity index spaces")
    n = a.n
    if n < 2:
        raise GraftError(f"dynamic factor needs at least 2 entities, got {n}")
    diff = a.matrix - b.matrix
    return float((diff * diff).sum()) / (n * (n - 1))


def format_graph(g: HeteroGraph) -> str:
    """Canonical text form: header, sorted v-lines, sorted e-lines."""
    lines = [FORMAT_HEADER]
    for eid, etype in g.entity_items():
        lines.append(f"v {eid} {etype}")
    for a, b, w in g.edges():
        lines.append(f"e {a} {b} {w!r}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> HeteroGraph:
    """Parse the graph text format, reporting errors with 1-based line numbers."""
    header_seen = False
    entities: list[tuple[str, str]] = []
    seen_ids: dict[str, int] = {}
    raw_edges: list[tuple[int, str, str, float]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != FORMAT_HEADER:
                raise GraphFormatError(f"expected header {FORMAT_HEADER!r}, got {line!r}", lineno)
            header_seen = True
            continue
        tokens = line.split()
        if tokens[0] == "v":
            if len(tokens) != 3:
                raise GraphFormatError("v-line must be 'v <id> <type>'", lineno)
            _, eid, etype = tokens
            if eid in seen_ids:
                raise GraphFormatError(
                    f"duplicate entity id {eid!r} (first declared on line {seen_ids[eid]})", lineno
                )
            seen_ids[eid] = lineno
            entities.append((eid, etype))
        elif tokens[0] == "e":
            if len(tokens) != 4:
                raise GraphFormatError("e-line must be 'e <id1> <id2> <weight>'", lineno)
            _, a, b, wtok = tokens
            try:
                w = float(wtok)
            except ValueError:
                raise GraphFormatError(f"invalid edge weight {wtok!r}", lineno) from None
            if not math.isfinite(w) or w <= 0.0:
                raise GraphFormatError(f"edge weight must be positive and finite, got {wtok}", lineno)
            raw_edges.append((lineno, a, b, w))
        else:
            raise GraphFormatError(f"unknown record type {tokens[0]!r}", lineno)
    if not header_seen:
        raise GraphFormatError(f"missing header {FORMAT_HEADER!r}")

    pair_lines: dict[tuple[str, str], int] = {}
    edges = []
    for lineno, a, b, w in raw_edges:
        for endpoint in (a, b):
            if endpoint not in seen_ids:
                raise GraphFormatError(f"edge endpoint {endpoint!r} is not a declared entity", lineno)
        if a == b:
            raise GraphFormatError(f"self-loop on entity {a!r} is not allowed", lineno)
        key = (a, b) if a < b else (b, a)
        if key in pair_lines:
            raise GraphFormatError(
                f"duplicate edge between {a!r} and {b!r} (first on line {pair_lines[key]})", lineno
            )
        pair_lines[key] = lineno
        edges.append((a, b, w))
    try:
        return HeteroGraph(entities, edges)
    except GraftError as exc:
        raise GraphFormatError(str(exc)) from exc


def read_graph(path: str | Path) -> HeteroGraph:
    path = Path(path)
    try:
        return parse_graph(path.read_text(encoding="utf-8"))
    except GraphFormatError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc


def write_graph(g: HeteroGraph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g), encoding="utf-8")
