from palettelab.densephase.bigraph import (
    Bigraph,
    HallReport,
    Matching,
    canonicalize_nested,
    hall_check,
    matching_probability,
    max_matching,
    switch,
)
from palettelab.densephase.cluster import (
    ClusterBigraph,
    RegimeReport,
    Route,
    TrimResult,
    classify_regime,
    cluster_context,
    pairing_janson_bound,
    trim_flag_probability,
    trim_lists,
)
from palettelab.densephase.process import (
    Action,
    ProcessState,
    StepRecord,
    run_process,
    step_colors,
)
from palettelab.densephase.routes import ClusterOutcome, color_cluster, match_into
