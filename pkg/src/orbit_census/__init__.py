"""Exact counting and asymptotic validation for clusters of close periodic
orbits of the binary baker's map.

A length-``n`` binary word encodes a periodic orbit; two orbits are *p-close*
when their cyclic length-``p`` window multisets coincide, which happens
exactly when they trace the same edge-count vector on the order-``p`` binary
de Bruijn graph.  This package counts those degeneracy clusters exactly (by
brute enumeration, by an Eulerian-circuit product formula, or by discrete
Fourier inversion of a transfer-matrix trace), validates the matrix identities
behind the transfer-operator picture, and compares exact statistics against
their large-``n`` asymptotic forms.

Hot kernels are JIT-compiled with numba when available; set
``ORBIT_CENSUS_BACKEND=numpy`` to force the pure-numpy lane (or ``numba`` to
require the compiled one).  The ``orbit-census`` command line exposes the
same functionality as plot-ready CSV/JSON artifacts.
"""

from __future__ import annotations

from .asymptotics import (
    AsymptoticEstimate,
    P_theory,
    RatioPoint,
    asymptotic_Pk,
    asymptotic_Zk,
    asymptotic_max_cluster,
    exact_log2,
    ratio_series,
    rho,
    rho_moment,
)
from .baker import (
    MatchReport,
    OrbitPoints,
    baker_step,
    orbit_points,
    p_neighborhood_check,
    sup_distance,
)
from .census import (
    CensusRecord,
    CensusTable,
    best_census,
    best_cluster_size,
    brute_census,
    empirical_distribution,
    max_cluster,
    mean_edge_visits,
    moments,
    prob_k,
    thresholded_edge_visits,
)
from .errors import (
    CapacityError,
    NumericalError,
    OrbitCensusError,
    ParameterError,
    StateError,
    ValidationFailure,
)
from .graph import (
    DeBruijnGraph,
    FlowBasis,
    balance_rank,
    build_debruijn,
    complete_vector,
    count_admissible,
    enumerate_admissible_vectors,
    flow_basis,
    is_balanced,
    support_connected,
    word_to_path,
)
from .kernels import HAS_NUMBA, backend, set_workers
from .spectral import (
    CheckResult,
    SaddleReport,
    SpectrumReport,
    build_B,
    build_F_G,
    build_M,
    build_M_tilde,
    build_Q,
    build_Q0_Q1,
    build_Qp,
    build_R_S,
    det_b_check,
    fg_det_check,
    fourier_cluster_size,
    fourier_moment,
    gauge_check,
    generating_trace,
    jacobian_check,
    matrix_relations_check,
    block_matrix_check,
    proposition1_check,
    reduced_generating_trace,
    saddle_check,
    spectrum_check,
    trace_reduction_check,
    validation_suite,
)
from .words import (
    EdgeCountVector,
    Necklace,
    Word,
    canonical_rotation,
    cluster_tree,
    cyclic_pword_counts,
    enumerate_necklaces,
    enumerate_words,
    is_prime_orbit,
    p_close,
    ultrametric_distance,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # words / clusters
    "Word",
    "Necklace",
    "EdgeCountVector",
    "cyclic_pword_counts",
    "p_close",
    "ultrametric_distance",
    "canonical_rotation",
    "enumerate_words",
    "enumerate_necklaces",
    "is_prime_orbit",
    "cluster_tree",
    # baker's map geometry
    "OrbitPoints",
    "MatchReport",
    "baker_step",
    "orbit_points",
    "sup_distance",
    "p_neighborhood_check",
    # de Bruijn graph
    "DeBruijnGraph",
    "FlowBasis",
    "build_debruijn",
    "word_to_path",
    "is_balanced",
    "support_connected",
    "flow_basis",
    "balance_rank",
    "complete_vector",
    "enumerate_admissible_vectors",
    "count_admissible",
    # censuses and statistics
    "CensusRecord",
    "CensusTable",
    "brute_census",
    "best_cluster_size",
    "best_census",
    "moments",
    "prob_k",
    "max_cluster",
    "empirical_distribution",
    "mean_edge_visits",
    "thresholded_edge_visits",
    # transfer matrices and validation
    "CheckResult",
    "SpectrumReport",
    "SaddleReport",
    "build_Q",
    "build_Q0_Q1",
    "build_R_S",
    "build_Qp",
    "build_F_G",
    "build_B",
    "build_M",
    "build_M_tilde",
    "generating_trace",
    "reduced_generating_trace",
    "fourier_cluster_size",
    "fourier_moment",
    "proposition1_check",
    "fg_det_check",
    "det_b_check",
    "spectrum_check",
    "block_matrix_check",
    "matrix_relations_check",
    "trace_reduction_check",
    "gauge_check",
    "jacobian_check",
    "saddle_check",
    "validation_suite",
    # asymptotics
    "AsymptoticEstimate",
    "RatioPoint",
    "exact_log2",
    "asymptotic_Zk",
    "asymptotic_Pk",
    "asymptotic_max_cluster",
    "rho",
    "P_theory",
    "rho_moment",
    "ratio_series",
    # kernel lanes
    "HAS_NUMBA",
    "backend",
    "set_workers",
    # errors
    "OrbitCensusError",
    "ParameterError",
    "CapacityError",
    "StateError",
    "ValidationFailure",
    "NumericalError",
]
