from palettelab.harness.config import ExperimentConfig, load_config, parse_config
from palettelab.harness.experiment import (
    Aggregate,
    ThresholdEstimate,
    estimate_threshold,
    run_experiment,
)
from palettelab.harness.pipeline import run_pipeline, run_solver, run_trial
from palettelab.harness.records import Mode, Outcome, Stage, TrialRecord
from palettelab.harness.solver import (
    exact_list_colorable,
    solve_direct,
    validate_coloring,
)
from palettelab.harness.sweep import Sweeper, SweepType, ell_from_factor
