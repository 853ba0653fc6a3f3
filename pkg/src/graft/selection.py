"""Source-entity embedding, distance-blend weight fitting, and transfer selection.

The selection model embeds the source graph from a weighted blend of
meta-path distance matrices, refits the blend weights to the embedding's
pairwise squared distances, and alternates the two steps. Relevance between
entities is the inner product of their embeddings; source-only entities are
selected when their relevance z-score against some shared entity clears a
threshold.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import TransferConfig
from .errors import GraftError
from .hetgraph import HeteroGraph
from .metapath import MetaPath, SimilarityMatrix, blend, enumerate_metapaths, path_distance_matrix, project
from .numerics import ols_nonneg, sym_eig_topk

log = logging.getLogger(__name__)


def mds_embed(distances: SimilarityMatrix | np.ndarray, d1: int) -> np.ndarray:
    """Classical multidimensional scaling of a squared-dissimilarity matrix.

    Double-centers the matrix, takes the top ``d1`` eigenpairs, clips negative
    eigenvalues to zero (non-Euclidean input loses those directions), and
    scales eigenvectors by the square roots of the eigenvalues.

    Returns an (n, d1) embedding whose pairwise squared distances approximate
    the input.
    """
    m = distances.matrix if isinstance(distances, SimilarityMatrix) else np.asarray(distances, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise GraftError(f"distance matrix must be square, got shape {m.shape}")
    n = m.shape[0]
    if n == 0:
        raise GraftError("cannot embed an empty distance matrix")
    if not (1 <= d1 <= n):
        raise GraftError(f"d1 must be in [1, {n}], got {d1}")
    if not np.isfinite(m).all():
        raise GraftError("distance matrix must be finite")
    centering = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * (centering @ m @ centering)
    b = (b + b.T) / 2.0
    values, vectors = sym_eig_topk(b, d1)
    values = np.clip(values, 0.0, None)
    return vectors * np.sqrt(values)[None, :]


def squared_row_distances(embedding: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances between embedding rows."""
    g = embedding @ embedding.T
    sq = np.diagonal(g)[:, None] + np.diagonal(g)[None, :] - 2.0 * g
    np.fill_diagonal(sq, 0.0)
    return np.clip(sq, 0.0, None)


def fit_weights(embedding: np.ndarray, mats: Sequence[SimilarityMatrix], ridge: float) -> np.ndarray:
    """Nonnegative blend weights regressing the matrices onto embedding distances.

    The design columns are the vectorized strict upper triangles of the
    distance matrices; the target is the upper triangle of the embedding's
    pairwise squared distances. Negative coefficients are clamped to zero.
    """
    if len(mats) == 0:
        raise GraftError("fit_weights needs at least one matrix")
    n = embedding.shape[0]
    for m in mats:
        if m.matrix.shape != (n, n):
            raise GraftError(f"matrix shape {m.matrix.shape} does not match embedding rows {n}")
    iu = np.triu_indices(n, k=1)
    design = np.column_stack([m.matrix[iu] for m in mats])
    target = squared_row_distances(embedding)[iu]
    return ols_nonneg(design, target, ridge)


def selection_objective(
    embedding: np.ndarray,
    mats: Sequence[SimilarityMatrix],
    weights: np.ndarray,
    theta: int,
    lam: float,
) -> float:
    """Fit error between embedding distances and the weighted blend, plus regularization.

    theta = 2 sums squared differences; theta = 1 sums absolute differences.
    """
    blended = np.zeros_like(mats[0].matrix)
    for wi, m in zip(weights, mats):
        blended += wi * m.matrix
    diff = squared_row_distances(embedding) - blended
    fit = float((diff * diff).sum()) if theta == 2 else float(np.abs(diff).sum())
    reg = lam * (float((embedding * embedding).sum()) + float((np.asarray(weights) ** 2).sum()))
    return fit + reg


@dataclass
class SelectionState:
    """Fitted selection model: meta-paths, blend weights, embedding, objective trace."""

    metapaths: list[MetaPath]
    weights: np.ndarray
    embedding: np.ndarray
    objective_trace: list[float]


def _rel_change(prev: float, cur: float) -> float:
    return abs(cur - prev) / max(abs(prev), 1e-30)


def _normalize(weights: np.ndarray) -> np.ndarray:
    total = float(weights.sum())
    if total <= 0.0:
        return weights
    return weights / total


def metapath_distance_matrices(gs: HeteroGraph, config: TransferConfig) -> list[SimilarityMatrix]:
    """Enumerate meta-paths on ``gs`` and compute one distance matrix per path."""
    paths = enumerate_metapaths(gs, config.max_path_len)
    if not paths:
        raise GraftError(
            "no meta-paths can be enumerated from the source graph; raise max_path_len "
            "or check that the graph has edges"
        )
    return [
        path_distance_matrix(project(gs, p), cap=config.distance_cap, provenance=p)
        for p in paths
    ]


def fit_selection_model(gs: HeteroGraph, config: TransferConfig | None = None) -> SelectionState:
    """Alternate embedding and weight fitting until the objective stabilizes.

    Blend weights are normalized to sum to one before each embedding step
    (the objective is scale-degenerate between weights and embedding), while
    the reported weights keep the raw fitted scale. A sweep that would
    increase the objective is discarded and treated as convergence, so the
    trace is non-increasing by construction.
    """
    config = config or TransferConfig()
    if gs.n == 0:
        raise GraftError("source graph has no entities")
    mats = metapath_distance_matrices(gs, config)
    paths = [m.provenance for m in mats]
    lam = config.selection_lam_effective
    d_eff = min(config.d1, gs.n)
    weights = np.full(len(mats), 1.0 / len(mats))
    embedding_cur: np.ndarray | None = None
    weights_cur: np.ndarray | None = None
    trace: list[float] = []
    for sweep in range(1, config.selection_max_iters + 1):
        blended = blend(mats, _normalize(weights))
        embedding = mds_embed(blended, d_eff)
        new_weights = fit_weights(embedding, mats, config.ridge)
        obj = selection_objective(embedding, mats, new_weights, config.theta, lam)
        if trace and obj > trace[-1] + 1e-9 * max(1.0, abs(trace[-1])):
            log.debug("selection sweep %d would increase the objective; stopping", sweep)
            break
        embedding_cur, weights_cur = embedding, new_weights
        trace.append(obj)
        if len(trace) >= 2 and _rel_change(trace[-2], trace[-1]) < config.selection_tol:
            break
        weights = new_weights
    assert embedding_cur is not None and weights_cur is not None
    log.info("selection model converged in %d sweep(s) over %d meta-path(s)", len(trace), len(paths))
    return SelectionState(paths, weights_cur, embedding_cur, trace)


def relevance_matrix(embedding: np.ndarray) -> np.ndarray:
    """Entity-to-entity relevance: inner products of embedding rows."""
    return embedding @ embedding.T


def relevance_scores(state: SelectionState, gs: HeteroGraph, gt_hat: HeteroGraph) -> dict[str, float]:
    """Max relevance z-score of each source-only entity against the shared entities.

    Each shared entity's relevance row over all source entities is
    standardized (population std); a source-only entity's score is its best
    standardized relevance over the shared rows. Rows with zero variance are
    skipped. No shared entities is an error.
    """
    r = relevance_matrix(state.embedding)
    if r.shape[0] != gs.n:
        raise GraftError(f"embedding rows {r.shape[0]} do not match source entities {gs.n}")
    hat_ids = set(gt_hat.entity_ids)
    shared_idx = [i for i, eid in enumerate(gs.entity_ids) if eid in hat_ids]
    only = [(i, eid) for i, eid in enumerate(gs.entity_ids) if eid not in hat_ids]
    if not shared_idx:
        raise GraftError("no overlap between domains: the source and target graphs share no entity")
    if not only:
        return {}
    rows = r[shared_idx]
    means = rows.mean(axis=1, keepdims=True)
    stds = rows.std(axis=1, keepdims=True)
    valid = stds[:, 0] > 0.0
    if not valid.any():
        return {}
    z = (rows[valid] - means[valid]) / stds[valid]
    only_idx = [i for i, _ in only]
    best = z[:, only_idx].max(axis=0)
    return {eid: float(s) for (_, eid), s in zip(only, best)}


def select_entities(state: SelectionState, gs: HeteroGraph, gt_hat: HeteroGraph, z: float) -> set[str]:
    """Source-only entities whose best relevance z-score reaches ``z``."""
    return {eid for eid, s in relevance_scores(state, gs, gt_hat).items() if s >= z}


def merge_transferred_entities(
    gt_hat: HeteroGraph, gs: HeteroGraph, selected: Iterable[str]
) -> HeteroGraph:
    """Target graph extended with the selected source entities, keeping only target edges.

    Selected entities arrive isolated, with their types taken from the source
    graph; the construction stage is responsible for proposing their edges.
    """
    selected = set(selected)
    overlap = selected & set(gt_hat.entity_ids)
    if overlap:
        raise GraftError(f"selected entities already present in the target graph: {sorted(overlap)}")
    for eid in sorted(selected):
        if not gs.has_entity(eid):
            raise GraftError(f"selected entity {eid!r} is not in the source graph")
    for eid in set(gs.entity_ids) & set(gt_hat.entity_ids):
        if gs.type_of(eid) != gt_hat.type_of(eid):
            raise GraftError(
                f"entity {eid!r} has conflicting types {gs.type_of(eid)!r} and {gt_hat.type_of(eid)!r}"
            )
    entities = list(gt_hat.entity_items()) + [(eid, gs.type_of(eid)) for eid in sorted(selected)]
    return HeteroGraph(entities, gt_hat.edges())
