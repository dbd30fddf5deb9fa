"""Latin bitrades and multi-fold MDS codes in the k-ary hypercube."""

from .core import (
    CellSet,
    Face,
    Line,
    Params,
    ValidationError,
    cartesian_product,
    faces,
    hamming_distance,
    induced_adjacency,
    intersect,
    line_cells,
    lines,
    rank,
    symdiff,
    union,
    unrank,
)
from .construct import (
    ALPHA,
    BETA,
    PAIRS,
    Pair,
    PairFunction,
    b_s,
    lift_pair_function,
    linear_mds_q3,
    moebius_bitrade,
    pair_g,
    pair_g_prime,
    pair_h,
    quasigroup_graph,
)
from .search import (
    PartialQuasigroup,
    SearchRefused,
    SearchReport,
    brute_force_bitrades,
    complete_partial_quasigroup,
    embedding_search,
    enumerate_bitrades_q3,
    enumerate_mds,
    pairwise_symdiff_spectrum,
    split_check,
)
from .verify import (
    Certificate,
    bipartition,
    component_of,
    is_embedded,
    is_latin_bitrade,
    is_t_fold_mds,
    minimal_bitrade_check,
)

__version__ = "0.1.0"
