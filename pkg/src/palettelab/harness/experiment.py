"""Monte Carlo experiments over the list-size grid and threshold search."""

import json
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache
from multiprocessing import Pool
from pathlib import Path
from typing import Iterable, List, Tuple

import pandas as pd
from qibo.config import log, raise_error

from palettelab.errors import ParameterError
from palettelab.graphcore import GeneratorSpec, Graph
from palettelab.harness.config import ExperimentConfig
from palettelab.harness.pipeline import run_trial
from palettelab.harness.records import TrialRecord, columns
from palettelab.harness.sweep import SweepType
from palettelab.palette import PaletteMode, PaletteSystem, make_palette, wilson_interval
from palettelab.rng import derive_seed

AGGREGATE_COLUMNS = ("trials", "successes", "success_rate", "ci_low", "ci_high")
THRESHOLD_RESOLUTION = 0.05

Task = Tuple[ExperimentConfig, int, float, int]
"""Configuration, point index, grid value and trial index."""


@lru_cache(maxsize=8)
def cached_graph(spec: GeneratorSpec) -> Graph:
    """Graphs are built once per process and configuration."""
    return spec.build()


@lru_cache(maxsize=8)
def cached_palette(
    spec: GeneratorSpec, mode: PaletteMode, gamma_size: int, seed: int
) -> PaletteSystem:
    return make_palette(cached_graph(spec), mode, gamma_size, derive_seed(seed))


def instance(config: ExperimentConfig) -> Tuple[Graph, PaletteSystem]:
    G = cached_graph(config.graph)
    return G, cached_palette(
        config.graph, config.palette_mode, config.universe(G.D), config.seed
    )


def run_task(task: Task) -> TrialRecord:
    """One trial, seeded by the master seed, trial and point indices."""
    config, point, value, trial = task
    G, P = instance(config)
    ell = config.grid.ell(value, G.n, P.D)
    seed = derive_seed(config.seed, trial, point)
    start = time.perf_counter()
    record = run_trial(G, P, ell, seed, config, trial, config.grid.factor(value))
    return replace(record, wall_time=time.perf_counter() - start)


def _execute(config: ExperimentConfig, tasks: List[Task]) -> List[TrialRecord]:
    if config.jobs == 1 or len(tasks) == 1:
        return [run_task(task) for task in tasks]
    with Pool(config.jobs) as pool:
        return list(pool.imap(run_task, tasks))


def evaluate(
    config: ExperimentConfig, points: Iterable[Tuple[int, float]]
) -> List[TrialRecord]:
    """All trials of the given ``(point, value)`` pairs, in task order."""
    tasks = [
        (config, point, value, trial)
        for point, value in points
        for trial in range(config.trials)
    ]
    return _execute(config, tasks)


@dataclass(frozen=True)
class Aggregate:
    """Success statistics of one grid value."""

    value: float
    ell: int
    trials: int
    successes: int

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    @property
    def interval(self) -> Tuple[float, float]:
        return wilson_interval(self.successes, self.trials)


def aggregate(value: float, records: List[TrialRecord]) -> Aggregate:
    return Aggregate(
        value, records[0].ell, len(records), sum(1 for r in records if r.success)
    )


def _frame(
    config: ExperimentConfig,
    records: List[TrialRecord],
    aggregates: List[Aggregate],
) -> pd.DataFrame:
    header = ("row",) + columns(config.timing) + AGGREGATE_COLUMNS
    rows = [{"row": "trial", **record.row(config.timing)} for record in records]
    for agg in aggregates:
        low, high = agg.interval
        rows.append(
            {
                "row": "aggregate",
                "master_seed": config.seed,
                "graph": config.graph.label,
                "palette_mode": config.palette_mode.value,
                "ell": agg.ell,
                "mode": config.mode.value,
                "c": config.grid.factor(agg.value),
                "trials": agg.trials,
                "successes": agg.successes,
                "success_rate": agg.rate,
                "ci_low": low,
                "ci_high": high,
            }
        )
    return pd.DataFrame(rows, columns=list(header))


def write_results(frame: pd.DataFrame, records: List[TrialRecord], out: Path):
    """CSV at ``out`` and its JSON twin next to it."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out, index=False, float_format="%.10g")
    twin = {
        "trials": [r.to_dict() for r in records],
        "aggregates": frame[frame["row"] == "aggregate"].to_dict(orient="records"),
    }
    out.with_suffix(".json").write_text(json.dumps(twin, indent=4, default=str))
    log.info("Results written to %s", out)


def run_experiment(config: ExperimentConfig) -> pd.DataFrame:
    """Run ``config.trials`` trials at every grid value.

    Returns one row per trial followed by one aggregate row per grid value
    with its success rate and 95% Wilson interval; the CSV is written when
    ``config.out`` is set.
    """
    points = list(enumerate(config.grid.values))
    log.info(
        "Experiment on %s: %d grid values x %d trials",
        config.graph.label,
        len(points),
        config.trials,
    )
    records = evaluate(config, points)
    aggregates = [
        aggregate(value, records[i * config.trials : (i + 1) * config.trials])
        for i, value in enumerate(config.grid.values)
    ]
    for agg in aggregates:
        log.info("ell=%d: success %d/%d", agg.ell, agg.successes, agg.trials)
    frame = _frame(config, records, aggregates)
    if config.out is not None:
        write_results(frame, records, config.out)
    return frame


@dataclass(frozen=True)
class ThresholdEstimate:
    c_star: float
    evaluations: Tuple[Tuple[float, float], ...] = field(repr=False)
    """``(c, success rate)`` in probing order."""
    non_monotone: bool = False


def estimate_threshold(config: ExperimentConfig, target_rate: float) -> ThresholdEstimate:
    """Smallest ``c`` reaching ``target_rate``, by bisection to width 0.05.

    The grid must bracket the target: some grid value has to reach it.
    Evaluations whose rate contradicts a smaller ``c`` are recorded as
    non-monotone and the bisection continues.
    """
    if config.grid.type is not SweepType.FACTOR:
        raise_error(ParameterError, "Threshold search needs a grid of ell factors.")
    values = config.grid.values
    if target_rate <= 0:
        return ThresholdEstimate(values[0], ())

    evaluations: List[Tuple[float, float]] = []
    non_monotone = False

    def rate(point: int, c: float) -> float:
        nonlocal non_monotone
        agg = aggregate(c, evaluate(config, [(point, c)]))
        if any(
            (c2 < c and r2 > agg.rate) or (c2 > c and r2 < agg.rate)
            for c2, r2 in evaluations
        ):
            non_monotone = True
            log.warning("Non-monotone success rate %.3f at c=%.4f", agg.rate, c)
        evaluations.append((c, agg.rate))
        log.info("Threshold evaluation c=%.4f (ell=%d): rate %.3f", c, agg.ell, agg.rate)
        return agg.rate

    hit = None
    for point, c in enumerate(values):
        if rate(point, c) >= target_rate:
            hit = point
            break
    if hit is None:
        raise_error(
            ParameterError,
            f"No grid value reaches success rate {target_rate}, widen the grid.",
        )
    if hit == 0:
        return ThresholdEstimate(values[0], tuple(evaluations), non_monotone)

    low, high = values[hit - 1], values[hit]
    point = len(values)
    while high - low > THRESHOLD_RESOLUTION:
        middle = (low + high) / 2
        if rate(point, middle) >= target_rate:
            high = middle
        else:
            low = middle
        point += 1
    return ThresholdEstimate(high, tuple(evaluations), non_monotone)
