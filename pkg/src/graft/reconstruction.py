"""Low-rank reconstruction of the target adjacency under a smoothness term and
a cross-domain consistency term.

The reconstruction factors ``u`` (n x rank) score entity pairs by ``u @ u.T``.
The objective balances fitting the observed target adjacency against keeping
the discrepancy to the source adjacency at its observed level, plus ridge
regularization. It is minimized by full-batch gradient descent with
backtracking line search from a spectral initialization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .config import TransferConfig
from .errors import GraftError
from .hetgraph import AdjacencyView, HeteroGraph
from .numerics import sym_eig_topk

log = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e12
INIT_NOISE = 1e-3
MAX_BACKTRACKS = 60


@dataclass(frozen=True, eq=False)
class ReconstructionProblem:
    """Inputs of the construction stage.

    ``target_adj`` and ``source_adj`` are binary adjacency views over the same
    entity index (the extended target graph). ``observed_gap`` is the dynamic
    factor measured between the domains on the original target entity set;
    the consistency term holds the reconstruction at that discrepancy level.
    """

    target_adj: AdjacencyView
    source_adj: AdjacencyView
    observed_gap: float
    mu: float
    reg: float
    rank: int

    def __post_init__(self):
        if self.target_adj.ids != self.source_adj.ids:
            raise GraftError("target and source adjacency views must share one entity index")
        if self.target_adj.n < 2:
            raise GraftError(f"reconstruction needs at least 2 entities, got {self.target_adj.n}")
        if not (self.target_adj.binary and self.source_adj.binary):
            raise GraftError("reconstruction expects binary adjacency views")
        if not 0.0 <= self.observed_gap <= 1.0:
            raise GraftError(f"observed_gap must be in [0, 1], got {self.observed_gap}")
        if not 0.0 <= self.mu <= 1.0:
            raise GraftError(f"mu must be in [0, 1], got {self.mu}")
        if self.reg < 0:
            raise GraftError(f"reg must be nonnegative, got {self.reg}")
        if not (isinstance(self.rank, int) and self.rank >= 1):
            raise GraftError(f"rank must be a positive integer, got {self.rank!r}")

    @property
    def n(self) -> int:
        return self.target_adj.n


def soft_dynamic_factor(u: np.ndarray, adj: np.ndarray) -> float:
    """Differentiable counterpart of the dynamic factor: ||u u^T - adj||_F^2 / (n (n-1))."""
    n = adj.shape[0]
    diff = u @ u.T - adj
    return float((diff * diff).sum()) / (n * (n - 1))


def reconstruction_objective(u: np.ndarray, prob: ReconstructionProblem) -> float:
    """mu * ||u u^T - A_T||_F^2 + (1 - mu) * (gap(u) - observed_gap)^2 + reg * ||u||_F^2."""
    u = np.asarray(u, dtype=float)
    n = prob.n
    if u.shape[0] != n:
        raise GraftError(f"u has {u.shape[0]} rows but the problem has {n} entities")
    m = u @ u.T
    smooth = float(((m - prob.target_adj.matrix) ** 2).sum())
    gap = float(((m - prob.source_adj.matrix) ** 2).sum()) / (n * (n - 1))
    value = (
        prob.mu * smooth
        + (1.0 - prob.mu) * (gap - prob.observed_gap) ** 2
        + prob.reg * float((u * u).sum())
    )
    if not np.isfinite(value):
        raise GraftError("reconstruction objective is not finite")
    return value


def reconstruction_gradient(u: np.ndarray, prob: ReconstructionProblem) -> np.ndarray:
    """Analytic gradient of ``reconstruction_objective`` with respect to ``u``."""
    u = np.asarray(u, dtype=float)
    n = prob.n
    if u.shape[0] != n:
        raise GraftError(f"u has {u.shape[0]} rows but the problem has {n} entities")
    m = u @ u.T
    resid_t = m - prob.target_adj.matrix
    resid_s = m - prob.source_adj.matrix
    pairs = n * (n - 1)
    gap = float((resid_s * resid_s).sum()) / pairs
    grad = (
        4.0 * prob.mu * (resid_t @ u)
        + (1.0 - prob.mu) * 2.0 * (gap - prob.observed_gap) * (4.0 / pairs) * (resid_s @ u)
        + 2.0 * prob.reg * u
    )
    if not np.isfinite(grad).all():
        raise GraftError("reconstruction gradient is not finite")
    return grad


@dataclass
class ReconstructionSolution:
    """Optimized factors plus the accepted-objective trace (entry 0 is the start)."""

    factors: np.ndarray
    objective_trace: list[float]
    iterations: int


def _check_diverged(value: float) -> float:
    if not np.isfinite(value) or value > DIVERGENCE_LIMIT:
        raise GraftError(
            f"reconstruction objective diverged (> {DIVERGENCE_LIMIT:.0e}); "
            "reduce the step size eta0"
        )
    return value


def solve_reconstruction(
    prob: ReconstructionProblem, seed: int, config: TransferConfig | None = None
) -> ReconstructionSolution:
    """Gradient descent with backtracking from a spectral start.

    The start point takes the top-rank eigenpairs of
    ``mu * A_T + (1 - mu) * A_S`` scaled by the square roots of the clipped
    eigenvalues, plus a small seeded perturbation to break symmetry. Each
    iteration resets the step to ``eta0`` and halves it until the objective
    does not increase; the run stops when the relative objective change drops
    below ``construction_tol`` or the iteration cap is reached.
    """
    config = config or TransferConfig()
    n = prob.n
    rank = min(prob.rank, n)
    blended = prob.mu * prob.target_adj.matrix + (1.0 - prob.mu) * prob.source_adj.matrix
    values, vectors = sym_eig_topk(blended, rank)
    u = vectors * np.sqrt(np.clip(values, 0.0, None))[None, :]
    rng = np.random.default_rng(seed)
    u = u + INIT_NOISE * rng.standard_normal(u.shape)
    obj = _check_diverged(reconstruction_objective(u, prob))
    trace = [obj]
    for _ in range(config.construction_max_iters):
        grad = reconstruction_gradient(u, prob)
        eta = config.eta0
        candidate = None
        cand_obj = None
        for _ in range(MAX_BACKTRACKS):
            trial = u - eta * grad
            try:
                trial_obj = reconstruction_objective(trial, prob)
            except GraftError:
                trial_obj = np.inf
            if trial_obj <= obj:
                candidate, cand_obj = trial, trial_obj
                break
            eta *= 0.5
        if candidate is None:
            break
        prev, u, obj = obj, candidate, _check_diverged(cand_obj)
        trace.append(obj)
        if abs(obj - prev) / max(abs(prev), 1e-30) < config.construction_tol:
            break
    log.info("reconstruction finished after %d iteration(s), objective %.6g", len(trace) - 1, obj)
    return ReconstructionSolution(u, trace, iterations=len(trace) - 1)


def finalize_edges(solution: ReconstructionSolution, merged: HeteroGraph, z: float) -> HeteroGraph:
    """Threshold the reconstruction scores into edges, keeping all original edges.

    The score matrix ``u @ u.T`` is standardized per row; pair (i, j) becomes
    an edge when the larger of its two directed z-scores reaches ``z``. Edges
    already present keep their original weights; new edges get the raw score,
    clipped below at machine epsilon so weights stay positive. Rows with zero
    variance propose nothing.
    """
    n = merged.n
    u = solution.factors
    if u.shape[0] != n:
        raise GraftError(f"solution has {u.shape[0]} rows but the graph has {n} entities")
    scores = u @ u.T
    means = scores.mean(axis=1, keepdims=True)
    stds = scores.std(axis=1, keepdims=True)
    z_rows = np.full_like(scores, -np.inf)
    valid = stds[:, 0] > 0.0
    if valid.any():
        z_rows[valid] = (scores[valid] - means[valid]) / stds[valid]
    decision = np.maximum(z_rows, z_rows.T) >= z
    np.fill_diagonal(decision, False)

    ids = merged.entity_ids
    eps = float(np.finfo(float).eps)
    edges = {(a, b): w for a, b, w in merged.edges()}
    for i, j in zip(*np.nonzero(np.triu(decision, k=1))):
        key = (ids[i], ids[j])
        if key not in edges:
            edges[key] = max(float(scores[i, j]), eps)
    return HeteroGraph(merged.entity_items(), ((a, b, w) for (a, b), w in edges.items()))
