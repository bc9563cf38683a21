"""Fourier analysis on truncated bounded Vilenkin groups.

Fast mixed-radix transforms, Dirichlet/Fejer kernels with their closed forms
and inequality verifiers, Fejer means and maximal operators, martingale
Hardy and weak-Lebesgue quasi-norms, and the boundedness/sharpness
experiment pipelines, with a CLI in :mod:`vilenkin.cli`.
"""

from .backend import available_backends, backend_name, set_backend
from .digits import IndexProfile, expand, in_bounded_set
from .experiments import (
    ExperimentReport,
    InfeasibleAtDepth,
    PhiFunction,
    SharpnessPlan,
    build_counterexample,
    corollary_rate_table,
    counterexample_atoms,
    counterexample_spectrum,
    measure_divergence,
    select_alpha_subsequence,
    verify_8aafn,
    verify_theorem1a,
)
from .group import (
    CellSet,
    GroupConfig,
    GroupPoint,
    annulus_cell,
    annulus_cells,
    group_add,
    group_sub,
    haar_measure,
    index_from_point,
    interval,
    point_from_index,
    unit_point,
    verify_partition,
    walsh_config,
)
from .hardy import (
    Atom,
    Martingale,
    hardy_quasinorm,
    lp_quasinorm,
    martingale_from_function,
    maximal_function,
    random_atom,
    validate_atom,
    weak_lp_quasinorm,
)
from .kernels import (
    dirichlet,
    dirichlet_Mn_closed,
    dirichlet_sMn_closed,
    fejer_Mn_closed,
    fejer_kernel,
    fejer_kernel_direct,
    kernel_l1_norm,
    kernel_sweep,
    set_kernel_cache_budget,
    shift_identity_residual,
    verify_lemma5b,
    verify_lower_9k,
    verify_upper_10k,
)
from .means import (
    fejer_mean,
    fejer_mean_convolution,
    fejer_mean_definitional,
    index_preset,
    partial_sum,
    restricted_maximal,
    weighted_sigma,
)
from .transform import (
    GridFunction,
    Spectrum,
    character,
    convolve,
    forward,
    inverse,
    naive_convolve,
    naive_forward,
    naive_inverse,
    rademacher,
)

__version__ = "0.1.0"
