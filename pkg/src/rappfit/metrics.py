"""Model-quality metrics and the three-way variant comparison.

NRMSE here is amplitude-domain: RMSE between predicted and measured
output amplitudes, normalized by the RMS of the measured amplitudes.
Three model variants are compared on the same campaign:

* ``basic``: an independent scalar parameter set per operating point
  (per-point fit quality, no interpolation);
* ``extended``: the full supply- and frequency-dependent surface model;
* ``extended_no_freq``: surfaces refit against a single reference
  frequency slice, quantifying what ignoring frequency costs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroFrameError
from .fitting import (
    ExtendedModelFit,
    FitOptions,
    fit_extended_model,
    fit_log_vsup,
    fit_surface_linear,
)
from .rapp import OperatingPoint, apply_to_frame
from .signals import Campaign, align
from .surfaces import ExtendedRappModel, Monomial

VARIANT_NAMES = ("basic", "extended", "extended_no_freq")


def rmse(predicted, actual) -> float:
    """Root-mean-square error between two equal-length real vectors."""
    p = np.asarray(predicted, dtype=float)
    a = np.asarray(actual, dtype=float)
    if p.shape != a.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {a.shape}")
    if p.size == 0:
        raise ValueError("cannot compute rmse of empty vectors")
    return float(np.sqrt(np.mean((p - a) ** 2)))


def nrmse_amam(predicted_amps, measured_amps) -> float:
    """Amplitude-domain RMSE normalized by the measured RMS."""
    measured = np.asarray(measured_amps, dtype=float)
    err = rmse(predicted_amps, measured)
    norm = float(np.sqrt(np.mean(measured**2)))
    if norm == 0.0:
        raise ZeroFrameError("measured amplitudes are all zero")
    return err / norm


@dataclass
class BasicVariant:
    """Per-operating-point scalar parameters, no surface interpolation."""

    params_by_op: dict
    name: str = "basic"

    def predict_amplitudes(self, op: OperatingPoint, frame) -> np.ndarray:
        return np.abs(apply_to_frame(self.params_by_op[op], frame))


@dataclass
class SurfaceVariant:
    """Any variant backed by an extended Rapp model."""

    model: ExtendedRappModel
    name: str = "extended"

    def predict_amplitudes(self, op: OperatingPoint, frame) -> np.ndarray:
        return np.abs(self.model.distort(op, frame))


def default_ref_freq(freq_grid) -> float:
    """Median grid frequency (lower middle for even-sized grids)."""
    ordered = sorted(freq_grid)
    return float(ordered[(len(ordered) - 1) // 2])


def fit_no_freq_model(
    fit: ExtendedModelFit,
    freq_grid,
    ref_freq: float | None = None,
    clamp_floor: float = 1e-3,
) -> ExtendedRappModel:
    """Refit all three surfaces against a single frequency slice.

    Uses the stage-1 scalar parameters of ``fit`` at ``ref_freq`` only,
    with supply-only surface forms: affine vsat, quadratic smoothness,
    and a pure log law for gain.  The result still evaluates at any
    frequency (it just never varies with it).
    """
    ref = default_ref_freq(freq_grid) if ref_freq is None else float(ref_freq)
    if ref not in {float(f) for f in freq_grid}:
        raise ValueError(f"ref_freq {ref} is not a grid frequency")
    slice_ops = [op for op in fit.scalar_params if op.freq == ref]
    if not slice_ops:
        raise ValueError(f"no scalar fits at freq={ref}")
    slice_ops.sort()

    def samples(name):
        return [(op, getattr(fit.scalar_params[op], name)) for op in slice_ops]

    vsat = fit_surface_linear(
        samples("vsat"), [Monomial(0, 0), Monomial(1, 0)]
    ).result
    smoothness = fit_surface_linear(
        samples("smoothness"), [Monomial(0, 0), Monomial(1, 0), Monomial(2, 0)]
    ).result
    gain = fit_log_vsup(samples("gain")).result
    return ExtendedRappModel(
        gain_surface=gain,
        smoothness_surface=smoothness,
        vsat_surface=vsat,
        clamp_floor=clamp_floor,
    )


def fit_all_variants(
    campaign: Campaign,
    ref_freq: float | None = None,
    options: FitOptions | None = None,
    fit: ExtendedModelFit | None = None,
):
    """Build the three comparison variants from one stage-1 fit pass.

    Returns (variants dict, ExtendedModelFit).  Pass a precomputed
    ``fit`` to skip refitting.
    """
    if fit is None:
        fit = fit_extended_model(campaign, options=options)
    no_freq = fit_no_freq_model(
        fit,
        campaign.freq_grid,
        ref_freq=ref_freq,
        clamp_floor=fit.model.clamp_floor,
    )
    variants = {
        "basic": BasicVariant(params_by_op=dict(fit.scalar_params)),
        "extended": SurfaceVariant(model=fit.model, name="extended"),
        "extended_no_freq": SurfaceVariant(model=no_freq, name="extended_no_freq"),
    }
    return variants, fit


@dataclass
class ComparisonReport:
    """Per-point and aggregate NRMSE for each model variant.

    ``per_point[name]`` maps operating point to NRMSE; ``mean`` is the
    unweighted average over all grid points.
    """

    per_point: dict
    mean: dict
    metadata: dict = field(default_factory=dict)

    def rows(self):
        """(vsup, freq, nrmse...) rows, one per grid point, row-major."""
        names = list(self.per_point)
        ops = sorted(next(iter(self.per_point.values())))
        out = []
        for op in ops:
            out.append(
                (op.vsup, op.freq) + tuple(self.per_point[n][op] for n in names)
            )
        return names, out


def compare_variants(
    campaign: Campaign,
    variants: dict | None = None,
    ref_freq: float | None = None,
    options: FitOptions | None = None,
) -> ComparisonReport:
    """NRMSE of each variant at every grid point plus grid means.

    Records are aligned before scoring.  With ``variants`` omitted the
    standard three are fit from the campaign first.
    """
    used_ref = (
        default_ref_freq(campaign.freq_grid) if ref_freq is None else float(ref_freq)
    )
    if variants is None:
        variants, _ = fit_all_variants(campaign, ref_freq=used_ref, options=options)
    per_point = {name: {} for name in variants}
    for op in campaign.sorted_ops():
        record = align(campaign.records[op])
        measured = np.abs(record.output)
        for name, variant in variants.items():
            predicted = variant.predict_amplitudes(op, record.input)
            per_point[name][op] = nrmse_amam(predicted, measured)
    mean = {
        name: float(np.mean(list(values.values())))
        for name, values in per_point.items()
    }
    return ComparisonReport(
        per_point=per_point,
        mean=mean,
        metadata={
            "normalization": "measured-rms",
            "aggregation": "unweighted-mean",
            "ref_freq": used_ref,
        },
    )


def export_heatmap(values_by_op, vsup_grid, freq_grid):
    """(vsup, freq, value) rows, row-major in vsup then freq.

    Raises KeyError naming the first missing grid point.
    """
    rows = []
    for vsup in vsup_grid:
        for freq in freq_grid:
            op = OperatingPoint(float(vsup), float(freq))
            if op not in values_by_op:
                raise KeyError(
                    f"no value at vsup={op.vsup} V, freq={op.freq} GHz"
                )
            rows.append((op.vsup, op.freq, float(values_by_op[op])))
    return rows
