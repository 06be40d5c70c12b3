"""Stimulus generation, synthetic measurements, and record conditioning.

The stimulus is a multi-symbol OFDM frame: QPSK on a fixed set of
occupied subcarriers, IFFT per symbol, symbols concatenated, and the
whole frame scaled to a target RMS.  Synthetic measurements push the
frame through an amplifier model and add the impairments a real capture
has: a circular delay, a constant phase rotation, and complex white
noise.  :func:`align` undoes delay and phase from the data alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import EmptyFrameError, MissingRecordError, ZeroFrameError
from .rapp import OperatingPoint

# Occupied subcarriers: a contiguous negative block and a positive block
# offset from DC, 590 bins total out of 4096.
DEFAULT_OCCUPIED_BINS = tuple(range(-300, 0)) + tuple(range(10, 300))


def scaled_occupied_bins(fft_size: int) -> tuple:
    """The default occupied band scaled to another FFT size.

    Keeps the same fractional bandwidth and DC offset as the standard
    4096-point layout; returns exactly :data:`DEFAULT_OCCUPIED_BINS` at
    4096.
    """
    if fft_size == 4096:
        return DEFAULT_OCCUPIED_BINS
    factor = fft_size / 4096.0
    edge = max(2, round(300 * factor))
    gap = max(1, round(10 * factor))
    if gap >= edge:
        gap = 1
    return tuple(range(-edge, 0)) + tuple(range(gap, edge))


@dataclass(frozen=True)
class OfdmConfig:
    """Deterministic OFDM stimulus description.

    ``occupied_bins`` are signed subcarrier indices (negative = upper
    half of the FFT); unit-magnitude QPSK symbols are drawn per bin from
    a generator seeded with ``seed``.
    """

    fft_size: int = 4096
    occupied_bins: tuple = DEFAULT_OCCUPIED_BINS
    n_symbols: int = 10
    target_rms: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.fft_size < 2:
            raise ValueError("fft_size must be >= 2")
        if self.n_symbols < 1:
            raise ValueError("n_symbols must be >= 1")
        if not (np.isfinite(self.target_rms) and self.target_rms > 0):
            raise ValueError("target_rms must be finite and > 0")
        bins = tuple(self.occupied_bins)
        if not bins:
            raise ValueError("occupied_bins must be nonempty")
        if len(set(bins)) != len(bins):
            raise ValueError("occupied_bins must be distinct")
        half = self.fft_size // 2
        if any(not (-half <= b < half) for b in bins):
            raise ValueError("occupied_bins must lie within +-fft_size/2")
        object.__setattr__(self, "occupied_bins", bins)

    @property
    def n_samples(self) -> int:
        return self.fft_size * self.n_symbols


def generate_ofdm(config: OfdmConfig | None = None) -> np.ndarray:
    """Complex baseband OFDM frame per ``config`` (deterministic in seed)."""
    cfg = config or OfdmConfig()
    rng = np.random.default_rng(cfg.seed)
    bins = np.asarray(cfg.occupied_bins, dtype=int) % cfg.fft_size
    symbols = []
    for _ in range(cfg.n_symbols):
        quadrant = rng.integers(0, 4, size=bins.size)
        spectrum = np.zeros(cfg.fft_size, dtype=complex)
        spectrum[bins] = np.exp(1j * (np.pi / 4 + np.pi / 2 * quadrant))
        symbols.append(np.fft.ifft(spectrum))
    frame = np.concatenate(symbols)
    rms = np.sqrt(np.mean(np.abs(frame) ** 2))
    return frame * (cfg.target_rms / rms)


def papr(frame) -> float:
    """Peak-to-average power ratio of a complex frame, in dB."""
    arr = np.asarray(frame, dtype=complex)
    if arr.size == 0:
        raise EmptyFrameError("cannot compute PAPR of an empty frame")
    power = np.abs(arr) ** 2
    mean = float(np.mean(power))
    if mean == 0.0:
        raise ZeroFrameError("cannot compute PAPR of an all-zero frame")
    return float(10.0 * np.log10(float(np.max(power)) / mean))


@dataclass
class MeasurementRecord:
    """One captured stimulus/response pair at an operating point."""

    op: OperatingPoint
    input: np.ndarray
    output: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.input = np.asarray(self.input, dtype=complex)
        self.output = np.asarray(self.output, dtype=complex)
        if self.input.ndim != 1 or self.output.ndim != 1:
            raise ValueError("input and output must be 1-D complex arrays")
        if self.input.size != self.output.size:
            raise ValueError(
                f"input ({self.input.size}) and output ({self.output.size}) "
                "lengths differ"
            )


def simulate_measurement(
    truth,
    op: OperatingPoint,
    frame,
    noise_db: float = -np.inf,
    delay: int = 0,
    phase: float = 0.0,
    rng=None,
) -> MeasurementRecord:
    """Push ``frame`` through ``truth`` at ``op`` and impair the output.

    The clean output is circularly shifted by ``delay`` samples, rotated
    by ``phase`` radians, and overlaid with complex white noise at
    ``noise_db`` dB relative to the clean output RMS (-inf disables it).
    """
    frame = np.asarray(frame, dtype=complex)
    if frame.size == 0:
        raise EmptyFrameError("cannot measure an empty frame")
    if abs(int(delay)) >= frame.size:
        raise ValueError("delay magnitude must be below the frame length")
    if not np.isfinite(phase):
        raise ValueError("phase must be finite")
    if np.isnan(noise_db) or noise_db == np.inf:
        raise ValueError("noise_db must be finite or -inf")

    clean = truth.distort(op, frame)
    out = np.roll(clean, int(delay)) * np.exp(1j * float(phase))
    if noise_db > -np.inf:
        if rng is None or isinstance(rng, (int, np.integer)):
            rng = np.random.default_rng(0 if rng is None else int(rng))
        out_rms = np.sqrt(np.mean(np.abs(out) ** 2))
        sigma = out_rms * 10.0 ** (noise_db / 20.0)
        noise = (sigma / np.sqrt(2.0)) * (
            rng.standard_normal(out.size) + 1j * rng.standard_normal(out.size)
        )
        out = out + noise
    meta = {
        "applied_delay": int(delay),
        "applied_phase": float(phase),
        "noise_db": float(noise_db),
    }
    return MeasurementRecord(op=op, input=frame.copy(), output=out, meta=meta)


def align(record: MeasurementRecord) -> MeasurementRecord:
    """Remove circular delay and constant phase from a record.

    Delay is the peak of the cyclic cross-correlation of the amplitude
    envelopes; phase is the angle of the complex inner product after the
    shift.  Applying align to an already aligned record changes samples
    by at most rounding noise.
    """
    x, y = record.input, record.output
    ax, ay = np.abs(x), np.abs(y)
    if not np.any(ax > 0.0):
        raise ZeroFrameError("input frame is all zero; cannot align")
    if not np.any(ay > 0.0):
        raise ZeroFrameError("output frame is all zero; cannot align")
    corr = np.fft.ifft(np.fft.fft(ay) * np.conj(np.fft.fft(ax))).real
    shift = int(np.argmax(corr))
    if shift > x.size // 2:
        shift -= x.size
    y_shifted = np.roll(y, -shift)
    phase = float(np.angle(np.vdot(x, y_shifted)))
    y_aligned = y_shifted * np.exp(-1j * phase)
    meta = dict(record.meta)
    meta["removed_delay"] = shift
    meta["removed_phase"] = phase
    return MeasurementRecord(op=record.op, input=x, output=y_aligned, meta=meta)


def scale_record(
    record: MeasurementRecord,
    cable_loss_in_db: float = 0.0,
    cable_loss_out_db: float = 0.0,
    virtual_gain_db: float = 0.0,
) -> MeasurementRecord:
    """Refer a record to the amplifier's own ports.

    The stored input is what the generator emitted: actual drive at the
    device is input minus the input cable loss plus any virtual gain.
    The stored output went through the output cable: the device emitted
    more by that loss.  All values in dB, applied as amplitude factors.
    """
    for name, value in (
        ("cable_loss_in_db", cable_loss_in_db),
        ("cable_loss_out_db", cable_loss_out_db),
        ("virtual_gain_db", virtual_gain_db),
    ):
        if not np.isfinite(value):
            raise ValueError(f"{name} must be finite")
    gain_in = 10.0 ** ((virtual_gain_db - cable_loss_in_db) / 20.0)
    gain_out = 10.0 ** (cable_loss_out_db / 20.0)
    meta = dict(record.meta)
    meta["input_scale"] = float(gain_in)
    meta["output_scale"] = float(gain_out)
    return MeasurementRecord(
        op=record.op,
        input=record.input * gain_in,
        output=record.output * gain_out,
        meta=meta,
    )


@dataclass
class Campaign:
    """A full measurement campaign over a supply/frequency grid.

    ``records`` must hold exactly one record per grid cross-product
    point, keyed by operating point.
    """

    amplifier_id: str
    vsup_grid: tuple
    freq_grid: tuple
    records: dict

    def __post_init__(self):
        self.vsup_grid = tuple(float(v) for v in self.vsup_grid)
        self.freq_grid = tuple(float(f) for f in self.freq_grid)
        if not self.vsup_grid or not self.freq_grid:
            raise ValueError("vsup_grid and freq_grid must be nonempty")
        if len(set(self.vsup_grid)) != len(self.vsup_grid):
            raise ValueError("vsup_grid values must be distinct")
        if len(set(self.freq_grid)) != len(self.freq_grid):
            raise ValueError("freq_grid values must be distinct")
        expected = {
            OperatingPoint(v, f) for v in self.vsup_grid for f in self.freq_grid
        }
        present = set(self.records)
        for op in sorted(expected - present):
            raise MissingRecordError(
                f"missing record at vsup={op.vsup} V, freq={op.freq} GHz"
            )
        extras = present - expected
        if extras:
            op = sorted(extras)[0]
            raise ValueError(
                f"record at vsup={op.vsup} V, freq={op.freq} GHz is off-grid"
            )
        for op, record in self.records.items():
            if record.op != op:
                raise ValueError(f"record keyed at {op} reports {record.op}")

    def sorted_ops(self):
        """Operating points row-major: vsup outer, freq inner."""
        return [
            OperatingPoint(v, f) for v in self.vsup_grid for f in self.freq_grid
        ]


@dataclass(frozen=True)
class ImpairmentSpec:
    """Impairment draw ranges for synthetic campaigns.

    Delays are uniform integers in [-delay_span, delay_span], phases
    uniform in [-phase_span, phase_span].
    """

    noise_db: float = -50.0
    delay_span: int = 100
    phase_span: float = np.pi

    def __post_init__(self):
        if self.delay_span < 0:
            raise ValueError("delay_span must be >= 0")
        if not (0.0 <= self.phase_span <= np.pi):
            raise ValueError("phase_span must be in [0, pi]")


def synth_campaign(
    truth,
    vsup_grid,
    freq_grid,
    config: OfdmConfig | None = None,
    impairments: ImpairmentSpec | None = None,
    amplifier_id: str = "SYNTH",
) -> Campaign:
    """Simulate a full campaign of ``truth`` over the grid.

    Per-record randomness (QPSK symbols, impairment draws, noise) is
    derived from the config seed and the record's grid index, so a rerun
    with the same arguments reproduces every sample exactly.
    """
    cfg = config or OfdmConfig()
    imp = impairments or ImpairmentSpec()
    vsup_grid = tuple(float(v) for v in vsup_grid)
    freq_grid = tuple(float(f) for f in freq_grid)
    if not vsup_grid or not freq_grid:
        raise ValueError("grids must be nonempty")

    records = {}
    index = 0
    for vsup in vsup_grid:
        for freq in freq_grid:
            op = OperatingPoint(vsup, freq)
            seeds = np.random.SeedSequence(
                entropy=cfg.seed, spawn_key=(index,)
            ).generate_state(2)
            frame = generate_ofdm(replace(cfg, seed=int(seeds[0])))
            rng = np.random.default_rng(int(seeds[1]))
            delay = (
                int(rng.integers(-imp.delay_span, imp.delay_span + 1))
                if imp.delay_span
                else 0
            )
            phase = (
                float(rng.uniform(-imp.phase_span, imp.phase_span))
                if imp.phase_span
                else 0.0
            )
            records[op] = simulate_measurement(
                truth, op, frame, imp.noise_db, delay, phase, rng=rng
            )
            index += 1
    return Campaign(
        amplifier_id=amplifier_id,
        vsup_grid=vsup_grid,
        freq_grid=freq_grid,
        records=records,
    )
