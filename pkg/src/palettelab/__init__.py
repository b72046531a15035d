import importlib.metadata as im

from palettelab.decomposition import Decomposition, decompose, verify_decomposition
from palettelab.errors import PaletteLabError
from palettelab.graphcore import (
    Family,
    GeneratorSpec,
    Graph,
    build_graph,
    gen_disjoint_cliques,
    gen_hybrid,
    gen_random_regular,
    regularize,
)
from palettelab.harness import (
    ExperimentConfig,
    TrialRecord,
    estimate_threshold,
    exact_list_colorable,
    run_experiment,
    run_pipeline,
    run_solver,
    validate_coloring,
)
from palettelab.palette import Params, PaletteMode, make_palette, sample_lists

__version__ = im.version(__package__)
