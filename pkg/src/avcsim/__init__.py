"""Simulation of sign-binarized Gaussian signaling over jammed optical channels."""

__version__ = "0.1.0"

from .gaussian import (
    GaussianState,
    JammerGaussian,
    apply_beamsplitter,
    beamsplitter_symplectic,
    coherent_state,
    is_physical,
    mean_photon_number,
    mix_tmsv_with_jammer,
    partial_trace,
    symplectic_eigenvalues,
    tensor,
    thermal_state,
    tmsv_state,
)
from .bivariate import (
    BinaryJointDist,
    BivariateGaussian,
    arcsine_law,
    binarized_correlation,
    bivariate_normal_cdf,
    bivariate_normal_pdf,
    correlation_coefficient,
    homodyne_xx,
    mutual_information_bits,
    quadrant_distribution,
    std_normal_cdf,
)
from .channels import (
    BscParam,
    ChannelTable,
    LpNumericalError,
    avc_kernel,
    average_crossover,
    binary_entropy,
    bsc_capacity,
    bsc_table,
    compose_bsc,
    crossover_probs,
    effective_channel,
    is_bsc,
    max_crossover_bounds,
    mutual_information_uniform,
    pinsker_bound,
    symmetrizability_lp,
    symmetrization_residual,
    w0_table,
)
from .geometry import (
    EnergyBudget,
    SimplexCoords,
    SweepPoint,
    barycentric,
    compute_delta_star,
    correlation_set_sweep,
    default_squeezing,
    from_barycentric,
    in_delta_delta,
    jammer_grid,
    sweep_records,
    sweep_to_csv,
    vertices,
)
from .protocol import (
    JammerStrategy,
    SimConfig,
    SimReport,
    canonical_schedules,
    evaluate_code_error_exact,
    hamming_decoder,
    jammer_state_for_symbol,
    random_codebook,
    run_correlation_phase,
    run_cr_phase,
    run_data_phase,
    sample_round,
    schedule_set_decoder,
    simulate,
    symmetrizing_attack_error,
)
