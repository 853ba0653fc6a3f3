"""End-to-end transfer pipeline: select transferable source entities, extend the
target graph with them, and reconstruct the target dependencies.

Given the same inputs, configuration, and seed the pipeline is fully
deterministic, including the serialized report.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from .config import TransferConfig
from .errors import GraftError
from .hetgraph import HeteroGraph, align_union_entities, dynamic_factor, induced_subgraph
from .reconstruction import (
    ReconstructionProblem,
    ReconstructionSolution,
    finalize_edges,
    solve_reconstruction,
)
from .selection import (
    SelectionState,
    fit_selection_model,
    merge_transferred_entities,
    relevance_scores,
)

log = logging.getLogger(__name__)

REPORT_SCHEMA = "report_v1"


@dataclass
class TransferReport:
    """Diagnostics of one pipeline run.

    ``timings`` (seconds per stage) is kept in memory and logged but excluded
    from the serialized form, which must be byte-identical across reruns.
    """

    metapaths: list[list[str]] = field(default_factory=list)
    metapath_weights: list[float] = field(default_factory=list)
    transferred_entities: list[str] = field(default_factory=list)
    transferred_scores: dict[str, float] = field(default_factory=dict)
    mu_used: float = 0.0
    observed_gap: float = 0.0
    selection_objective_trace: list[float] = field(default_factory=list)
    construction_objective_trace: list[float] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "metapaths": self.metapaths,
            "metapath_weights": self.metapath_weights,
            "transferred_entities": self.transferred_entities,
            "transferred_scores": self.transferred_scores,
            "mu_used": self.mu_used,
            "observed_gap": self.observed_gap,
            "selection_objective_trace": [[i + 1, v] for i, v in enumerate(self.selection_objective_trace)],
            "construction_objective_trace": [[i, v] for i, v in enumerate(self.construction_objective_trace)],
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def write_report(report: TransferReport, path: str | Path) -> None:
    Path(path).write_text(report.to_json(), encoding="utf-8")


def auto_mu(merged: HeteroGraph, gt_hat: HeteroGraph) -> float:
    """Smoothness weight from entity counts: (|merged| - |observed|) / |merged|.

    The more entities arrived by transfer, the more the construction stage
    trusts the observed target structure over the source consistency level.
    """
    if merged.n == 0:
        raise GraftError("merged target graph has no entities")
    missing = [eid for eid in gt_hat.entity_ids if not merged.has_entity(eid)]
    if missing:
        raise GraftError(f"target entities missing from the merged graph: {missing[:5]!r}")
    return (merged.n - gt_hat.n) / merged.n


@contextmanager
def _stage(name: str, timings: dict[str, float]):
    start = time.perf_counter()
    try:
        yield
    except GraftError as exc:
        raise GraftError(f"{name}: {exc}") from exc
    finally:
        timings[name] = time.perf_counter() - start


def construct_dependencies(
    source: HeteroGraph,
    target_partial: HeteroGraph,
    merged: HeteroGraph,
    mu: float,
    config: TransferConfig,
    seed: int | None = None,
) -> tuple[HeteroGraph, ReconstructionSolution, ReconstructionProblem]:
    """Run the construction stage against a merged target graph.

    Both adjacency views live on the merged graph's entity index; the source
    view is the source subgraph induced on the shared entities. The observed
    gap is the dynamic factor measured on the original target entity set.
    """
    source_ids = set(source.entity_ids)
    shared_merged = [eid for eid in merged.entity_ids if eid in source_ids]
    target_view, source_view = align_union_entities(
        merged, induced_subgraph(source, shared_merged), binary=True
    )
    shared_hat = [eid for eid in target_partial.entity_ids if eid in source_ids]
    hat_view, hat_source_view = align_union_entities(
        target_partial, induced_subgraph(source, shared_hat), binary=True
    )
    observed_gap = dynamic_factor(hat_source_view, hat_view)
    prob = ReconstructionProblem(
        target_adj=target_view,
        source_adj=source_view,
        observed_gap=observed_gap,
        mu=mu,
        reg=config.construction_lam_effective,
        rank=config.d2,
    )
    solution = solve_reconstruction(prob, config.seed if seed is None else seed, config)
    graph = finalize_edges(solution, merged, config.z_edge)
    return graph, solution, prob


def run_transfer(
    source: HeteroGraph, target_partial: HeteroGraph, config: TransferConfig | None = None
) -> tuple[HeteroGraph, TransferReport]:
    """Full transfer pipeline from a source graph to a partial target graph.

    Returns the estimated target graph and a report with the fitted meta-path
    weights, the transferred entities and their scores, the mix weight
    actually used, and both objective traces.
    """
    config = config or TransferConfig()
    timings: dict[str, float] = {}
    report = TransferReport(config=config.to_dict())

    with _stage("validate", timings):
        if source.n == 0:
            raise GraftError("source graph has no entities")
        if target_partial.n < 2:
            raise GraftError("target graph needs at least 2 entities")
        shared = set(source.entity_ids) & set(target_partial.entity_ids)
        if not shared:
            raise GraftError("no overlap between domains: the source and target graphs share no entity")
        if source.n < len(shared):
            raise GraftError("source graph must be at least as large as the shared entity set")
        for eid in sorted(shared):
            if source.type_of(eid) != target_partial.type_of(eid):
                raise GraftError(
                    f"entity {eid!r} has conflicting types "
                    f"{source.type_of(eid)!r} and {target_partial.type_of(eid)!r}"
                )

    with _stage("selection-model", timings):
        state = fit_selection_model(source, config)
        report.metapaths = [list(p.types) for p in state.metapaths]
        report.metapath_weights = [float(w) for w in state.weights]
        report.selection_objective_trace = [float(v) for v in state.objective_trace]

    with _stage("entity-selection", timings):
        scores = relevance_scores(state, source, target_partial)
        selected = sorted(eid for eid, s in scores.items() if s >= config.z_entity)
        report.transferred_entities = selected
        report.transferred_scores = {eid: scores[eid] for eid in selected}

    with _stage("merge", timings):
        merged = merge_transferred_entities(target_partial, source, selected)

    with _stage("mix", timings):
        mu = auto_mu(merged, target_partial) if config.mu is None else config.mu
        report.mu_used = float(mu)

    with _stage("construction", timings):
        graph, solution, prob = construct_dependencies(source, target_partial, merged, mu, config)
        report.observed_gap = float(prob.observed_gap)
        report.construction_objective_trace = [float(v) for v in solution.objective_trace]

    report.timings = timings
    for name, seconds in timings.items():
        log.info("stage %-16s %8.3f s", name, seconds)
    return graph, report
