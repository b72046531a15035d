"""One trial: the two-phase pipeline or the direct solver."""

from typing import Dict, Optional

import numpy as np
from qibo.config import log

from palettelab.decomposition import decompose
from palettelab.densephase import cluster_context, color_cluster
from palettelab.graphcore import Graph, regularize
from palettelab.harness.config import ExperimentConfig
from palettelab.harness.records import Mode, Outcome, Stage, TrialRecord
from palettelab.harness.solver import solve_direct, validate_coloring
from palettelab.palette import ListSample, PaletteSystem, sample_lists
from palettelab.rng import derive_seed
from palettelab.search import SearchStatus
from palettelab.sparsephase import (
    RetainedColoring,
    TargetStatus,
    check_targets,
    complete_sparse,
    diagnose_sparse,
    retained_set,
    tentative_assign,
)

LISTS, TENTATIVE, COMPLETION, CLUSTER, PADDING = range(5)
"""Stage indices mixed into the trial seed."""


def draw_lists(P: PaletteSystem, ell: int, seed: int) -> ListSample:
    return sample_lists(P, ell, derive_seed(seed, LISTS))


def _pad_lists(lists: ListSample, P: PaletteSystem, seed: int) -> ListSample:
    """Lists of the vertices added by regularization, from a separate stream."""
    if P.n == lists.n:
        return lists
    extra = sample_lists(P, lists.ell, derive_seed(seed, PADDING))
    return ListSample(lists.L + extra.L[lists.n :], lists.ell, lists.seed)


def _restrict(rc: RetainedColoring, vertices) -> RetainedColoring:
    kept = {v: rc.sigma[v] for v in sorted(rc.T & vertices)}
    return RetainedColoring(frozenset(kept), kept)


def _record(config: Optional[ExperimentConfig], **fields) -> TrialRecord:
    graph = config.graph.label if config is not None else ""
    return TrialRecord(graph=graph, **fields)


def run_pipeline(
    G: Graph,
    P: PaletteSystem,
    ell: int,
    seed: int,
    config: ExperimentConfig,
    trial: int = 0,
    c: Optional[float] = None,
) -> TrialRecord:
    """Color ``G`` from lists of size ``ell`` through the sparse and dense phases.

    ``G`` is regularized to degree ``P.D`` when needed; added vertices get
    lists from their own stream so that the lists of the original vertices
    match :func:`run_solver` with the same seed. The coloring in the record
    covers the original vertices only.
    """
    params = config.params
    common = dict(
        trial=trial,
        master_seed=config.seed,
        seed=seed,
        palette_mode=P.mode.value,
        ell=ell,
        mode=Mode.PIPELINE,
        c=c,
    )
    n0 = G.n
    base = draw_lists(P, ell, seed)
    if G.D != P.D or not G.is_regular(P.D):
        G = regularize(G, P.D)
        P = P.extend(G.n)
    lists = _pad_lists(base, P, seed)

    dec = decompose(G, params.eps, params.friend_slack)
    diagnostics: Dict = {"params": params.to_dict(), "vertices": G.n}
    if dec.audit is not None:
        diagnostics["audit"] = dec.audit.summary()

    retries, completion, rc = 0, None, None
    for attempt in range(config.retries + 1):
        retries = attempt
        ta = tentative_assign(
            G,
            P,
            derive_seed(seed, TENTATIVE, attempt),
            use_xi=config.use_xi,
            lists=lists,
        )
        rc = _restrict(retained_set(G, ta), dec.sparse)
        completion = complete_sparse(
            G,
            P,
            dec,
            rc,
            lists,
            config.sparse_strategy,
            ta,
            config.budget,
            config.restarts,
            derive_seed(seed, COMPLETION, attempt),
        )
        if completion.success:
            break
        log.debug("Sparse completion failed on attempt %d", attempt + 1)

    sparse = sorted(dec.sparse)
    retained_mean = None
    if sparse:
        counts = [sum(1 for w in G.adjacency[v] if w in rc.T) for v in sparse]
        retained_mean = float(np.mean(counts))
        diag = diagnose_sparse(G, P, dec.sparse, ta, rc, params)
        status = check_targets(diag, params)
        diagnostics["targets_passed"] = sum(
            1 for s in status.values() if s is TargetStatus.PASS
        )
        diagnostics["targets_failed"] = sum(
            1 for s in status.values() if s is TargetStatus.FAIL
        )

    if not completion.success:
        outcome = (
            Outcome.INCONCLUSIVE
            if completion.search.status is SearchStatus.INCONCLUSIVE
            else Outcome.STAGE_FAILURE
        )
        return _record(
            config,
            outcome=outcome,
            stage=Stage.SPARSE,
            detail=f"vertex {completion.failed_vertex} residual {completion.residual_size}",
            retries=retries,
            retained_mean=retained_mean,
            nodes=completion.search.nodes,
            diagnostics=diagnostics,
            **common,
        )

    sigma = dict(completion.coloring)
    routes, fallbacks, reports = [], 0, []
    for index, cluster in enumerate(dec.clusters):
        ctx = cluster_context(G, P, sigma, cluster)
        outcome = color_cluster(
            ctx,
            {v: lists.L[v] for v in cluster},
            params,
            derive_seed(seed, CLUSTER, index),
            ell,
        )
        routes.append(outcome.route.value)
        fallbacks += int(outcome.fallback_used)
        reports.append(outcome.report.to_dict())
        if not outcome.success:
            diagnostics["regimes"] = reports
            deficiency = outcome.hall.deficiency if outcome.hall is not None else 0
            return _record(
                config,
                outcome=Outcome.STAGE_FAILURE,
                stage=Stage.DENSE,
                detail=f"cluster {index} route {outcome.route.value} "
                f"deficiency {deficiency}",
                retries=retries,
                retained_mean=retained_mean,
                routes=tuple(routes),
                fallbacks=fallbacks,
                nodes=completion.search.nodes,
                diagnostics=diagnostics,
                **common,
            )
        sigma.update(outcome.coloring)
    diagnostics["regimes"] = reports

    assert validate_coloring(G, lists.L, sigma)
    return _record(
        config,
        outcome=Outcome.SUCCESS,
        retries=retries,
        retained_mean=retained_mean,
        routes=tuple(routes),
        fallbacks=fallbacks,
        nodes=completion.search.nodes,
        coloring={v: sigma[v] for v in range(n0)},
        diagnostics=diagnostics,
        **common,
    )


def run_solver(
    G: Graph,
    P: PaletteSystem,
    ell: int,
    seed: int,
    config: ExperimentConfig,
    trial: int = 0,
    c: Optional[float] = None,
) -> TrialRecord:
    """Sample the same lists as :func:`run_pipeline` and search directly."""
    lists = draw_lists(P, ell, seed)
    result = solve_direct(
        G, lists.L, config.budget, config.restarts, derive_seed(seed, COMPLETION)
    )
    common = dict(
        trial=trial,
        master_seed=config.seed,
        seed=seed,
        palette_mode=P.mode.value,
        ell=ell,
        mode=Mode.SOLVER,
        c=c,
        nodes=result.nodes,
    )
    if result.success:
        return _record(
            config, outcome=Outcome.SUCCESS, coloring=dict(result.coloring), **common
        )
    outcome = (
        Outcome.INCONCLUSIVE
        if result.status is SearchStatus.INCONCLUSIVE
        else Outcome.STAGE_FAILURE
    )
    return _record(
        config,
        outcome=outcome,
        stage=Stage.SOLVER,
        detail=f"vertex {result.failed_vertex} list {result.residual_size}",
        **common,
    )


RUNNERS = {Mode.PIPELINE: run_pipeline, Mode.SOLVER: run_solver}


def run_trial(
    G: Graph,
    P: PaletteSystem,
    ell: int,
    seed: int,
    config: ExperimentConfig,
    trial: int = 0,
    c: Optional[float] = None,
) -> TrialRecord:
    return RUNNERS[config.mode](G, P, ell, seed, config, trial, c)
