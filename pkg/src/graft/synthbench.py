"""Seeded synthetic benchmark instances: a source graph, a ground-truth target
derived from it by entity deletion plus edge perturbation, and an immature
partial observation of that target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraftError
from .hetgraph import HeteroGraph, align_union_entities, dynamic_factor, induced_subgraph


@dataclass(frozen=True)
class SynthSpec:
    """Benchmark knobs.

    ``dynamic_factor`` is the requested pair-normalized structural gap between
    the source graph and the target truth; the generator realizes it by
    toggling the nearest integer number of entity pairs, so the measured value
    lands within one toggle quantum (2 / (n (n - 1))) of the request.
    ``maturity`` is the fraction of target-truth entities (and then surviving
    edges) retained in the partial observation.
    """

    n_source: int
    n_target: int
    dynamic_factor: float = 0.1
    maturity: float = 0.5
    n_types: int = 3
    edge_prob: float | None = None
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.n_source, int) or isinstance(self.n_source, bool) or self.n_source < 2:
            raise GraftError("n_source must be an integer >= 2")
        if not isinstance(self.n_target, int) or isinstance(self.n_target, bool) or self.n_target < 2:
            raise GraftError("n_target must be an integer >= 2")
        if self.n_target > self.n_source:
            raise GraftError("n_target must not exceed n_source")
        if not 0.0 <= self.dynamic_factor < 1.0:
            raise GraftError("dynamic_factor must be in [0, 1)")
        if not 0.0 < self.maturity <= 1.0:
            raise GraftError("maturity must be in (0, 1]")
        if not isinstance(self.n_types, int) or isinstance(self.n_types, bool) or self.n_types < 1:
            raise GraftError("n_types must be a positive integer")
        if self.edge_prob is not None and not 0.0 < self.edge_prob <= 1.0:
            raise GraftError("edge_prob must be in (0, 1]")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise GraftError("seed must be an integer")

    @property
    def edge_prob_effective(self) -> float:
        if self.edge_prob is not None:
            return self.edge_prob
        # default aims for mean degree about 8
        return min(1.0, 8.0 / (self.n_source - 1))

    def to_dict(self) -> dict:
        return {
            "n_source": self.n_source,
            "n_target": self.n_target,
            "dynamic_factor": self.dynamic_factor,
            "maturity": self.maturity,
            "n_types": self.n_types,
            "edge_prob": self.edge_prob_effective,
            "seed": self.seed,
        }


def _entity_id(i: int) -> str:
    return f"e{i:05d}"


def generate(spec: SynthSpec) -> tuple[HeteroGraph, HeteroGraph, HeteroGraph]:
    """Generate (source, target_truth, target_partial) for one spec.

    Draw order is fixed (types, source edges, entity deletion, pair toggles,
    kept entities, kept edges) so outputs are reproducible per seed.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n_source
    ids = [_entity_id(i) for i in range(n)]
    type_idx = rng.integers(0, spec.n_types, size=n)
    entities = [(ids[i], f"t{type_idx[i]}") for i in range(n)]

    rows, cols = np.triu_indices(n, k=1)
    mask = rng.random(rows.shape[0]) < spec.edge_prob_effective
    edges = [(ids[i], ids[j]) for i, j in zip(rows[mask], cols[mask])]
    gs = HeteroGraph(entities, edges)

    survivors = np.sort(rng.choice(n, size=spec.n_target, replace=False))
    keep_ids = [ids[i] for i in survivors]
    trimmed = induced_subgraph(gs, keep_ids)

    m = spec.n_target
    n_pairs = m * (m - 1) // 2
    k = int(round(spec.dynamic_factor * n_pairs))
    if k > n_pairs:
        raise GraftError(
            f"requested dynamic factor {spec.dynamic_factor} needs {k} toggles "
            f"but only {n_pairs} entity pairs exist"
        )
    pair_set = {(a, b) for a, b, _ in trimmed.edges()}
    t_rows, t_cols = np.triu_indices(m, k=1)
    toggles = rng.choice(n_pairs, size=k, replace=False)
    t_ids = trimmed.entity_ids
    for idx in toggles:
        pair = (t_ids[t_rows[idx]], t_ids[t_cols[idx]])
        if pair in pair_set:
            pair_set.remove(pair)
        else:
            pair_set.add(pair)
    gt_truth = HeteroGraph(list(trimmed.entity_items()), sorted(pair_set))

    n_keep = max(1, int(round(spec.maturity * gt_truth.n)))
    kept = np.sort(rng.choice(gt_truth.n, size=n_keep, replace=False))
    hat_entities = induced_subgraph(gt_truth, [gt_truth.entity_ids[i] for i in kept])
    hat_edges = hat_entities.edges()
    n_edges_keep = int(round(spec.maturity * len(hat_edges)))
    if n_edges_keep < len(hat_edges):
        chosen = np.sort(rng.choice(len(hat_edges), size=n_edges_keep, replace=False))
        hat_edges = tuple(hat_edges[i] for i in chosen)
    gt_hat = HeteroGraph(list(hat_entities.entity_items()), list(hat_edges))
    return gs, gt_truth, gt_hat


def measured_stats(gs: HeteroGraph, gt_truth: HeteroGraph, gt_hat: HeteroGraph) -> dict:
    """Measured counterparts of the requested spec knobs, for metadata files."""
    truth_view, source_view = align_union_entities(
        gt_truth, induced_subgraph(gs, list(gt_truth.entity_ids)), binary=True
    )
    truth_on_hat = induced_subgraph(gt_truth, list(gt_hat.entity_ids))
    return {
        "measured_dynamic_factor": dynamic_factor(source_view, truth_view),
        "measured_entity_maturity": gt_hat.n / gt_truth.n,
        "measured_edge_maturity": (
            gt_hat.edge_count / truth_on_hat.edge_count if truth_on_hat.edge_count else 1.0
        ),
        "n_source_edges": gs.edge_count,
        "n_truth_edges": gt_truth.edge_count,
        "n_partial_edges": gt_hat.edge_count,
    }
