from palettelab.palette.bounds import (
    DiscreteDistribution,
    TailBound,
    binomial_lower_tail,
    binomial_sf,
    binomial_tail,
    chernoff_lower,
    chernoff_upper,
    cvx_extremal_Z,
    hypergeometric_tail,
    janson_bound,
    janson_terms,
    large_dev_bound,
    lll_check,
    no_event_probability,
    phi,
    wilson_interval,
)
from palettelab.palette.lists import (
    ListSample,
    PaletteMode,
    PaletteSystem,
    make_palette,
    sample_lists,
)
from palettelab.palette.params import Params, ProcessParameters, resolve_process
