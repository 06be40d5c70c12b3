"""Behavioral modeling of RF power amplifiers whose Rapp parameters
depend on supply voltage and carrier frequency.

The workflow: simulate or load a measurement campaign over a
(vsup, freq) grid, fit scalar Rapp parameters per grid point, fit
parameter surfaces over the grid, optionally prune surface terms by
greedy elimination, and score model variants by amplitude-domain NRMSE.
"""

from .amplifiers import ZX60_2534_FREQ_GRID, ZX60_2534_VSUP_GRID, synth_2534
from .errors import (
    DegenerateDataError,
    DegenerateGridError,
    EmptyFrameError,
    FitStageError,
    FormatError,
    InsufficientDataError,
    MissingRecordError,
    NonConvergenceError,
    RankDeficientError,
    RappfitError,
    ZeroFrameError,
)
from .fitting import (
    AmAmPoint,
    ExtendedModelFit,
    FitOptions,
    FitReport,
    FormSpec,
    LogProductForm,
    PolyForm,
    canonical_form_spec,
    design_matrix,
    fit_extended_model,
    fit_log_product,
    fit_log_vsup,
    fit_rapp_point,
    fit_surface_linear,
    scalar_residual_jacobian,
)
from .metrics import (
    BasicVariant,
    ComparisonReport,
    SurfaceVariant,
    compare_variants,
    default_ref_freq,
    export_heatmap,
    fit_all_variants,
    fit_no_freq_model,
    nrmse_amam,
    rmse,
)
from .rapp import (
    OperatingPoint,
    RappParams,
    am_am_curve,
    apply_to_frame,
    compression_factor,
    rapp_eval,
)
from .selection import (
    EliminationStep,
    EliminationTrace,
    choose_initial_degree,
    eliminate,
    export_trace,
)
from .signals import (
    DEFAULT_OCCUPIED_BINS,
    Campaign,
    ImpairmentSpec,
    MeasurementRecord,
    OfdmConfig,
    align,
    generate_ofdm,
    papr,
    scale_record,
    scaled_occupied_bins,
    simulate_measurement,
    synth_campaign,
)
from .store import (
    ModelFileData,
    campaign_hash,
    load_campaign,
    read_heatmap_csv,
    read_model_file,
    read_trace_csv,
    save_campaign,
    write_amam_csv,
    write_heatmap_csv,
    write_model_file,
    write_trace_csv,
)
from .surfaces import (
    ExtendedRappModel,
    LogProductSurface,
    Monomial,
    PolynomialSurface,
    canonical_p_basis,
    canonical_vsat_basis,
    extended_eval,
    extended_params,
    full_basis,
    monomial_sort_key,
    parse_monomial,
    surface_eval,
)

__version__ = "0.1.0"

__all__ = [
    "AmAmPoint",
    "BasicVariant",
    "Campaign",
    "ComparisonReport",
    "DEFAULT_OCCUPIED_BINS",
    "DegenerateDataError",
    "DegenerateGridError",
    "EliminationStep",
    "EliminationTrace",
    "EmptyFrameError",
    "ExtendedModelFit",
    "ExtendedRappModel",
    "FitOptions",
    "FitReport",
    "FitStageError",
    "FormSpec",
    "FormatError",
    "ImpairmentSpec",
    "InsufficientDataError",
    "LogProductForm",
    "LogProductSurface",
    "MeasurementRecord",
    "MissingRecordError",
    "ModelFileData",
    "Monomial",
    "NonConvergenceError",
    "OfdmConfig",
    "OperatingPoint",
    "PolyForm",
    "PolynomialSurface",
    "RankDeficientError",
    "RappParams",
    "RappfitError",
    "SurfaceVariant",
    "ZX60_2534_FREQ_GRID",
    "ZX60_2534_VSUP_GRID",
    "ZeroFrameError",
    "align",
    "am_am_curve",
    "apply_to_frame",
    "campaign_hash",
    "canonical_form_spec",
    "canonical_p_basis",
    "canonical_vsat_basis",
    "choose_initial_degree",
    "compare_variants",
    "compression_factor",
    "default_ref_freq",
    "design_matrix",
    "eliminate",
    "export_heatmap",
    "export_trace",
    "extended_eval",
    "extended_params",
    "fit_all_variants",
    "fit_extended_model",
    "fit_log_product",
    "fit_log_vsup",
    "fit_no_freq_model",
    "fit_rapp_point",
    "fit_surface_linear",
    "full_basis",
    "generate_ofdm",
    "load_campaign",
    "monomial_sort_key",
    "nrmse_amam",
    "papr",
    "parse_monomial",
    "rapp_eval",
    "read_heatmap_csv",
    "read_model_file",
    "read_trace_csv",
    "rmse",
    "save_campaign",
    "scalar_residual_jacobian",
    "scale_record",
    "scaled_occupied_bins",
    "simulate_measurement",
    "surface_eval",
    "synth_2534",
    "synth_campaign",
    "write_amam_csv",
    "write_heatmap_csv",
    "write_model_file",
    "write_trace_csv",
]
