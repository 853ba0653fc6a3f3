"""Meta-path enumeration, projection graphs, and hop-count distance matrices.

A meta-path is a sequence of entity types. Projecting a graph along a
meta-path yields a homogeneous graph whose edge weights count the walks that
realize the type sequence between two distinct endpoints. Distance matrices
are hop counts on the projection, with unreachable pairs set to a cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

from .errors import GraftError
from .hetgraph import HeteroGraph


@dataclass(frozen=True, order=True)
class MetaPath:
    """Type sequence of length >= 2, stored in canonical orientation.

    A meta-path and its reversal denote the same object; the canonical
    orientation is the lexicographically smaller of the two sequences.
    """

    types: tuple[str, ...]

    def __post_init__(self):
        seq = tuple(self.types)
        if len(seq) < 2:
            raise GraftError(f"meta-path needs at least 2 types, got {seq!r}")
        if not all(isinstance(t, str) and t for t in seq):
            raise GraftError(f"meta-path types must be non-empty strings, got {seq!r}")
        rev = seq[::-1]
        object.__setattr__(self, "types", min(seq, rev))

    @property
    def length(self) -> int:
        return len(self.types)

    def is_palindrome(self) -> bool:
        return self.types == self.types[::-1]

    def label(self) -> str:
        return "-".join(self.types)


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Symmetric nonnegative dissimilarity matrix with optional meta-path provenance."""

    matrix: np.ndarray
    provenance: MetaPath | None = None

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise GraftError(f"similarity matrix must be square, got shape {m.shape}")
        if m.size:
            if not np.isfinite(m).all():
                raise GraftError("similarity matrix must be finite")
            if not np.array_equal(m, m.T):
                raise GraftError("similarity matrix must be symmetric")
            if np.diagonal(m).any():
                raise GraftError("similarity matrix must have a zero diagonal")
            if (m < 0).any():
                raise GraftError("similarity matrix entries must be nonnegative")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def enumerate_metapaths(g: HeteroGraph, max_len: int = 3) -> list[MetaPath]:
    """All meta-paths of length 2..max_len whose consecutive type pairs occur on some edge.

    Reversals are deduplicated; the result is sorted lexicographically.
    """
    if max_len < 2:
        raise GraftError(f"max_len must be at least 2, got {max_len}")
    succ: dict[str, set[str]] = {}
    for a, b, _ in g.edges():
        ta, tb = g.type_of(a), g.type_of(b)
        succ.setdefault(ta, set()).add(tb)
        succ.setdefault(tb, set()).add(ta)
    found: set[MetaPath] = set()

    def walk(seq: tuple[str, ...]) -> None:
        if len(seq) >= 2:
            found.add(MetaPath(seq))
        if len(seq) >= max_len:
            return
        for t in sorted(succ.get(seq[-1], ())):
            walk(seq + (t,))

    for t in sorted(succ):
        walk((t,))
    return sorted(found)


def _sparse_binary_adjacency(g: HeteroGraph) -> sp.csr_matrix:
    n = g.n
    rows, cols = [], []
    for a, b, _ in g.edges():
        i, j = g.index_of(a), g.index_of(b)
        rows += [i, j]
        cols += [j, i]
    data = np.ones(len(rows))
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n))


def project(g: HeteroGraph, p: MetaPath) -> HeteroGraph:
    """Homogeneous projection of ``g`` along ``p`` over the same entity set.

    The weight of edge (u, v) counts the walk instances whose type sequence
    matches ``p`` (in either orientation) with endpoints u != v. Entities
    whose type matches neither endpoint of ``p`` are isolated. Weights of the
    original graph are ignored; counting is over binary adjacency.
    """
    if g.n == 0:
        return HeteroGraph()
    types = np.array(g.entity_types)
    adj = _sparse_binary_adjacency(g)

    def mask(t: str) -> sp.dia_matrix:
        return sp.diags((types == t).astype(float))

    m = mask(p.types[0]) @ adj @ mask(p.types[1])
    for t in p.types[2:]:
        m = m @ adj @ mask(t)
    w = m if p.is_palindrome() else m + m.T
    upper = sp.triu(w, k=1).tocoo()
    ids = g.entity_ids
    edges = [
        (ids[i], ids[j], float(v))
        for i, j, v in zip(upper.row, upper.col, upper.data)
        if v > 0
    ]
    return HeteroGraph(g.entity_items(), edges)


def path_distance_matrix(
    gp: HeteroGraph, cap: float | None = None, provenance: MetaPath | None = None
) -> SimilarityMatrix:
    """Pairwise hop-count distances on a projection graph.

    Unreachable pairs (including isolated entities) get ``cap``; when cap is
    None it defaults to the longest finite shortest path plus one. Edge
    weights are ignored: distance is the number of hops.
    """
    if cap is not None and not cap > 0:
        raise GraftError(f"distance cap must be positive, got {cap}")
    n = gp.n
    if n == 0:
        return SimilarityMatrix(np.zeros((0, 0)), provenance)
    dist = shortest_path(_sparse_binary_adjacency(gp), method="D", directed=False, unweighted=True)
    np.fill_diagonal(dist, 0.0)
    finite = np.isfinite(dist)
    if cap is None:
        cap = float(dist[finite].max()) + 1.0
    dist[~finite] = cap
    return SimilarityMatrix(dist, provenance)


def blend(mats: Sequence[SimilarityMatrix], weights: Iterable[float]) -> SimilarityMatrix:
    """Weighted sum of similarity matrices; weights must be nonnegative."""
    w = np.asarray(list(weights), dtype=float)
    if len(mats) == 0:
        raise GraftError("blend needs at least one matrix")
    if len(mats) != w.size:
        raise GraftError(f"got {len(mats)} matrices but {w.size} weights")
    if not np.isfinite(w).all() or (w < 0).any():
        raise GraftError("blend weights must be finite and nonnegative")
    shape = mats[0].matrix.shape
    for m in mats[1:]:
        if m.matrix.shape != shape:
            raise GraftError(f"matrix shape mismatch: {m.matrix.shape} vs {shape}")
    out = np.zeros(shape)
    for wi, m in zip(w, mats):
        out += wi * m.matrix
    return SimilarityMatrix(out, None)
