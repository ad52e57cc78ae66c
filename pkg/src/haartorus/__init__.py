"""Dyadic Haar shifts, torus Riesz multipliers, and the coding between them.

The package has three layers: dyadic analysis on [0, 1) (haar, shifts), trig
polynomial calculus on products of tori (torus), and the sign-toss coding
that carries martingale increments onto square waves (coding). experiments
turns their structural identities into finite certified checks; serialize
and cli expose everything as files and subcommands.
"""

from .errors import (
    GoldenMismatchError,
    InvalidInputError,
    ParseError,
    ResourceLimitError,
)
from .haar import (
    DyadicNode,
    HaarCoeffs,
    basis_position,
    coeff_inner,
    cube_haar_eval,
    haar_analyze,
    haar_basis_function,
    haar_synthesize,
    interval_cube_bijection,
    slice_of,
)
from .shifts import (
    ShiftOperator,
    apply_riesz_vector,
    apply_s0,
    apply_sj,
    operator_matrix,
)
from .torus import (
    ARC_NS,
    ArcBundle,
    TrigPoly,
    arc_average,
    arc_exp_integral,
    arc_of_angle,
    bundle_combine,
    bundle_inner,
    bundle_norm,
    bundle_poly_inner,
    cos_poly,
    directional_hilbert,
    embed_variable,
    inner_product,
    make_poly,
    poly_norm,
    quarter_arc_project,
    riesz_apply,
    sin_poly,
    square_wave,
    square_wave_arc_values,
    square_wave_exact,
)
from .coding import (
    EkSpaceElement,
    EkTerm,
    MartingaleBlock,
    ModulatedSpectrum,
    ScaledFrequency,
    SignTossPath,
    block_depth,
    blocks_to_haar,
    check_ek_membership,
    coded_shift_blocks,
    duality_transfer_check,
    ek_to_trig_poly,
    encode_path,
    evaluate_blocks_at_path,
    index_of_prefix,
    make_ek_element,
    martingale_decompose,
    modulate,
    modulated_riesz_multiplier,
    modulation_difference,
    path_outcomes,
    prefix_of_index,
    random_ek_element,
    random_paths,
    sliced_multiplier_apply,
)
from .experiments import (
    DualityReport,
    LemmaReport,
    NormEstimate,
    dimension_free_check,
    duality_chain_check,
    hilbert_multiplier_operator,
    hilbert_norm_sweep,
    identity_operator,
    lp_norm_estimate,
    matrix_operator,
    modulation_decay_experiment,
    riesz_vector_operator,
    run_duality_experiment,
    verify_lemma_hvs,
)
from .valuespace import ValueVec, vec_norm

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
