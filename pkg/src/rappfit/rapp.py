"""Memoryless Rapp nonlinearity: parameter container and sample-wise evaluation.

The amplifier output for a complex baseband sample x is

    y = G * x * (1 + (|x| / V_sat)^(2p))^(-1 / (2p))

with linear voltage gain G, smoothness factor p and input saturation
voltage V_sat.  The model acts on the amplitude only, so the output phase
always equals the input phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RappParams:
    """Scalar Rapp model parameters.

    Attributes
    ----------
    gain : float
        Linear voltage gain G (> 0, dimensionless).
    smoothness : float
        Smoothness factor p (> 0).  Large p approaches a hard limiter.
    vsat : float
        Input saturation voltage V_sat in volts (> 0).  The output
        amplitude supremum is gain * vsat.
    """

    gain: float
    smoothness: float
    vsat: float

    def __post_init__(self):
        for name in ("gain", "smoothness", "vsat"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0.0:
                raise ValueError(f"RappParams.{name} must be finite and > 0, got {v!r}")


@dataclass(frozen=True, order=True)
class OperatingPoint:
    """Supply voltage (V) and carrier frequency (GHz) of one measurement."""

    vsup: float
    freq: float

    def __post_init__(self):
        if not (np.isfinite(self.vsup) and self.vsup > 0.0):
            raise ValueError(f"vsup must be finite and > 0, got {self.vsup!r}")
        if not (np.isfinite(self.freq) and self.freq > 0.0):
            raise ValueError(f"freq must be finite and > 0, got {self.freq!r}")


def compression_factor(amplitudes, params: RappParams) -> np.ndarray:
    """Real gain factor (1 + (a/V_sat)^(2p))^(-1/(2p)) for amplitudes a >= 0.

    Evaluated in the log domain, so arbitrarily large smoothness or
    amplitude/saturation ratios cannot overflow.  Zero amplitude maps to
    factor 1 without touching the power term.
    """
    a = np.asarray(amplitudes, dtype=float)
    out = np.ones_like(a)
    pos = a > 0.0
    if np.any(pos):
        two_p = 2.0 * params.smoothness
        log_ratio = np.log(a[pos]) - np.log(params.vsat)
        log_s = np.logaddexp(0.0, two_p * log_ratio)
        out[pos] = np.exp(-log_s / two_p)
    return out


def _check_finite_frame(frame: np.ndarray):
    if frame.size and not np.all(np.isfinite(frame.real) & np.isfinite(frame.imag)):
        raise ValueError("frame contains non-finite samples")


def rapp_eval(params: RappParams, x):
    """Apply the Rapp nonlinearity to a complex sample or array of samples.

    Output phase equals input phase; |output| < gain * vsat for finite x.
    """
    arr = np.asarray(x, dtype=complex)
    _check_finite_frame(arr)
    y = params.gain * arr * compression_factor(np.abs(arr), params)
    if arr.ndim == 0:
        return complex(y)
    return y


def apply_to_frame(params: RappParams, frame) -> np.ndarray:
    """Sample-wise Rapp evaluation of a frame; length is preserved."""
    arr = np.asarray(frame, dtype=complex)
    _check_finite_frame(arr)
    return params.gain * arr * compression_factor(np.abs(arr), params)


def am_am_curve(params: RappParams, amplitudes) -> np.ndarray:
    """Output amplitude for each nonnegative input amplitude.

    Strictly increasing for strictly increasing input amplitudes.
    """
    a = np.asarray(amplitudes, dtype=float)
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError("amplitudes must be finite")
    if a.size and np.any(a < 0.0):
        raise ValueError("amplitudes must be nonnegative")
    return params.gain * a * compression_factor(a, params)
