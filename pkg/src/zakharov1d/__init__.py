"""Pseudo-spectral simulation and verification toolkit for the 1D Zakharov
system.

The package builds counterexample-style initial data (two-box wave packets,
same-velocity soliton pairs, smooth compact-coefficient profiles), evolves
them with exact linear flows plus integrating-factor time steppers, measures
Sobolev / Bourgain-type norms, and fits the growth exponents that exhibit
three ill-posedness phenomena: wave norm inflation, soliton phase
decoherence, and failure of twice-differentiable dependence on data.

Every experiment is reproducible: reports exclude wall-clock data and can be
re-verified offline with `recompute_verdicts`.
"""

from .spectral import (
    ComplexField,
    FieldError,
    FourierGrid,
    GridError,
    RealField,
    band_fractions,
    bump,
    dealias_spectrum,
    derivative,
    l2_inner,
    make_grid,
    next_pow2,
    smooth_step,
    sobolev_weight,
    spectrum_sobolev_norm,
    translate,
)
from .data_families import (
    BilinearData,
    CCTIngredients,
    CCTSchedule,
    DataError,
    DecoherencePair,
    SolitonParams,
    bilinear_experiment_grid,
    box_experiment_grid,
    cct_ingredients,
    cct_schedule,
    decoherence_pair,
    ground_state,
    make_bilinear_data,
    make_box_data,
    soliton_fields,
)
from .propagators import (
    WaveData,
    box_inverse_forcing,
    duhamel_schrodinger,
    duhamel_wave,
    first_iterate_closed_form,
    first_iterate_triangle,
    forced_density_parts,
    g_factor,
    phase_integral,
    schrodinger_group,
    second_derivative_n,
    second_derivative_u,
    second_derivative_u_closed_form,
    simpson_weights,
    wave_group,
)
from .solver import (
    BlowupError,
    ModifiedParams,
    ModifiedResult,
    ModifiedState,
    SolveResult,
    StepControl,
    ZakharovState,
    lifted_residual,
    load_trajectory,
    modified_regime_flags,
    save_trajectory,
    scale_lift,
    small_dispersion_exact,
    solve_full,
    solve_modified,
    state_from_wave_data,
    step_full,
    step_modified,
)
from .norms import (
    BourgainParams,
    ExponentRow,
    SpaceTimeField,
    TimeCutoff,
    bourgain_norm,
    dual_norm_y,
    modulation_exponents,
)
from .experiments import (
    InflationSchedule,
    fit_exponent,
    recompute_verdicts,
    run_decoherence_cct,
    run_decoherence_exact,
    run_inflation,
    run_invariants,
    run_non_c2,
    run_norms,
    run_selftest,
)
from .reporting import (
    ExperimentReport,
    load_report,
    report_json_text,
    sample_row,
    samples_csv_text,
    verdicts_text,
    write_report,
)
from .config import (
    SCHEMA_VERSION,
    ConfigError,
    format_config,
    load_config,
    parse_config,
    save_config,
)

__version__ = "0.1.0"
