from palettelab.sparsephase.completion import (
    SparseCompletion,
    complete_sparse,
    residual_lists,
)
from palettelab.sparsephase.slack import (
    Branch,
    SparseDiagnostics,
    TargetStatus,
    VertexDiagnostics,
    alien_pairs,
    alien_size,
    check_targets,
    diagnose_sparse,
    expected_fraternal_events,
    fraternal_pairs,
    fraternal_size,
    realized_events,
    slack,
    sparse_dichotomy,
)
from palettelab.sparsephase.tentative import (
    RetainedColoring,
    RetentionStatistics,
    TentativeAssignment,
    color_degree_L,
    color_degree_S,
    exact_retention_probability,
    retained_mask,
    retained_neighbors,
    retained_set,
    retention_statistics,
    tentative_assign,
    two_step_assign,
    two_step_ell,
    zeta_hat,
)
