"""Persistence: model files, campaign directories, and CSV artifacts.

All writes are atomic (temp file then rename) and deterministic: floats
are serialized with Python's shortest exact round-trip repr, keys are
sorted, and nothing time-dependent lands in campaign record files, so
saving the same campaign twice produces byte-identical directories.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import FormatError, MissingRecordError
from .rapp import OperatingPoint
from .signals import Campaign, MeasurementRecord
from .surfaces import (
    ExtendedRappModel,
    LogProductSurface,
    PolynomialSurface,
    parse_monomial,
)

MODEL_FORMAT_VERSION = 1
CAMPAIGN_FORMAT_VERSION = 1
TOOL_ID = "rappfit 0.1.0"

RECORD_HEADER = "index,in_re,in_im,out_re,out_im"
HEATMAP_HEADER = "vsup,freq,value"
TRACE_HEADER = "terms_count,rmse,removed_monomial"


def _fmt(value) -> str:
    # Shortest repr that round-trips exactly through float().
    return repr(float(value))


def write_text_atomic(path, text: str) -> Path:
    """Write ``text`` to ``path`` via a temp file and atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)
    return path


# -- model files -------------------------------------------------------------


def surface_to_dict(surface) -> dict:
    if isinstance(surface, PolynomialSurface):
        return {
            "form": "polynomial",
            "terms": [[m.label(), float(c)] for m, c in surface.terms],
        }
    if isinstance(surface, LogProductSurface):
        return {
            "form": "log-product",
            "offset": float(surface.offset),
            "freq_coeffs": [float(c) for c in surface.freq_coeffs],
        }
    raise TypeError(f"cannot serialize surface {surface!r}")


def surface_from_dict(data: dict):
    try:
        form = data["form"]
        if form == "polynomial":
            return PolynomialSurface(
                (parse_monomial(label), float(c)) for label, c in data["terms"]
            )
        if form == "log-product":
            return LogProductSurface(
                float(data["offset"]), [float(c) for c in data["freq_coeffs"]]
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed surface entry: {exc}") from exc
    raise FormatError(f"unknown surface form {form!r}")


@dataclass
class ModelFileData:
    """A parsed model file: the model plus fit and provenance metadata."""

    model: ExtendedRappModel
    surface_rmse: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)


def write_model_file(
    path,
    model: ExtendedRappModel,
    surface_rmse: dict | None = None,
    amplifier_id: str = "",
    campaign_hash: str = "",
    created: str | None = None,
) -> Path:
    """Serialize a fitted model to JSON.

    ``created`` defaults to the current UTC time; pass a fixed string for
    reproducible files.
    """
    rmse_map = surface_rmse or {}
    surfaces = {}
    for name, surface in (
        ("gain", model.gain_surface),
        ("smoothness", model.smoothness_surface),
        ("vsat", model.vsat_surface),
    ):
        entry = surface_to_dict(surface)
        if name in rmse_map:
            entry["rmse"] = float(rmse_map[name])
        surfaces[name] = entry
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": "extended-rapp-model",
        "units": {"vsup": "V", "freq": "GHz", "log": "natural"},
        "clamp_floor": float(model.clamp_floor),
        "surfaces": surfaces,
        "provenance": {
            "amplifier_id": amplifier_id,
            "campaign_hash": campaign_hash,
            "created": (
                datetime.now(timezone.utc).isoformat() if created is None else created
            ),
            "tool": TOOL_ID,
        },
    }
    return write_text_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_model_file(path) -> ModelFileData:
    """Parse a model file, rejecting unsupported versions."""
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read model file {path}: {exc}") from exc
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise FormatError(
            f"unsupported model file version {version!r}; "
            f"supported: {MODEL_FORMAT_VERSION}"
        )
    try:
        surfaces = payload["surfaces"]
        model = ExtendedRappModel(
            gain_surface=surface_from_dict(surfaces["gain"]),
            smoothness_surface=surface_from_dict(surfaces["smoothness"]),
            vsat_surface=surface_from_dict(surfaces["vsat"]),
            clamp_floor=float(payload.get("clamp_floor", 1e-3)),
        )
    except KeyError as exc:
        raise FormatError(f"model file missing key {exc}") from exc
    rmse_map = {
        name: float(entry["rmse"])
        for name, entry in surfaces.items()
        if "rmse" in entry
    }
    return ModelFileData(
        model=model,
        surface_rmse=rmse_map,
        provenance=dict(payload.get("provenance", {})),
    )


# -- campaign directories ----------------------------------------------------


def _record_filename(vsup_index: int, freq_index: int) -> str:
    return f"records/v{vsup_index:02d}_f{freq_index:02d}.csv"


def _record_text(record: MeasurementRecord) -> str:
    lines = [RECORD_HEADER]
    x, y = record.input, record.output
    for i in range(x.size):
        lines.append(
            f"{i},{_fmt(x[i].real)},{_fmt(x[i].imag)},"
            f"{_fmt(y[i].real)},{_fmt(y[i].imag)}"
        )
    return "\n".join(lines) + "\n"


def _meta_jsonable(meta: dict) -> dict:
    out = {}
    for key, value in meta.items():
        if isinstance(value, (np.integer,)):
            value = int(value)
        elif isinstance(value, (np.floating,)):
            value = float(value)
        out[str(key)] = value
    return out


def campaign_hash(campaign: Campaign) -> str:
    """SHA-256 over grids, amplifier id, and every record's CSV text."""
    digest = hashlib.sha256()
    digest.update(campaign.amplifier_id.encode())
    digest.update(",".join(_fmt(v) for v in campaign.vsup_grid).encode())
    digest.update(",".join(_fmt(f) for f in campaign.freq_grid).encode())
    for op in campaign.sorted_ops():
        digest.update(_record_text(campaign.records[op]).encode())
    return digest.hexdigest()


def save_campaign(campaign: Campaign, root) -> Path:
    """Write manifest.json plus one CSV per record under ``root``.

    Rerunning with an identical campaign reproduces every byte.
    """
    root = Path(root)
    entries = []
    for iv, vsup in enumerate(campaign.vsup_grid):
        for jf, freq in enumerate(campaign.freq_grid):
            op = OperatingPoint(vsup, freq)
            record = campaign.records[op]
            rel = _record_filename(iv, jf)
            write_text_atomic(root / rel, _record_text(record))
            entries.append(
                {
                    "vsup": vsup,
                    "freq": freq,
                    "file": rel,
                    "meta": _meta_jsonable(record.meta),
                }
            )
    manifest = {
        "format_version": CAMPAIGN_FORMAT_VERSION,
        "amplifier_id": campaign.amplifier_id,
        "vsup_grid": list(campaign.vsup_grid),
        "freq_grid": list(campaign.freq_grid),
        "records": entries,
    }
    write_text_atomic(
        root / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    return root


def _parse_record_csv(path) -> tuple[np.ndarray, np.ndarray]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MissingRecordError(f"cannot read record file {path}: {exc}") from exc
    lines = text.strip().split("\n")
    if not lines or lines[0] != RECORD_HEADER:
        raise FormatError(f"record file {path} has a bad header")
    try:
        data = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
    except ValueError as exc:
        raise FormatError(f"record file {path} is malformed: {exc}") from exc
    if data.shape[1] != 5:
        raise FormatError(f"record file {path} must have 5 columns")
    return data[:, 1] + 1j * data[:, 2], data[:, 3] + 1j * data[:, 4]


def load_campaign(root) -> Campaign:
    """Rebuild a campaign from a directory written by save_campaign."""
    root = Path(root)
    try:
        manifest = json.loads((root / "manifest.json").read_text())
    except OSError as exc:
        raise MissingRecordError(f"no manifest in {root}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"manifest in {root} is malformed: {exc}") from exc
    version = manifest.get("format_version")
    if version != CAMPAIGN_FORMAT_VERSION:
        raise FormatError(
            f"unsupported campaign version {version!r}; "
            f"supported: {CAMPAIGN_FORMAT_VERSION}"
        )
    try:
        vsup_grid = tuple(float(v) for v in manifest["vsup_grid"])
        freq_grid = tuple(float(f) for f in manifest["freq_grid"])
        entries = manifest["records"]
        amplifier_id = manifest["amplifier_id"]
    except KeyError as exc:
        raise FormatError(f"manifest missing key {exc}") from exc
    records = {}
    for entry in entries:
        op = OperatingPoint(float(entry["vsup"]), float(entry["freq"]))
        if op in records:
            raise FormatError(f"duplicate manifest entry for {op}")
        x, y = _parse_record_csv(root / entry["file"])
        records[op] = MeasurementRecord(
            op=op, input=x, output=y, meta=dict(entry.get("meta", {}))
        )
    return Campaign(
        amplifier_id=amplifier_id,
        vsup_grid=vsup_grid,
        freq_grid=freq_grid,
        records=records,
    )


# -- flat CSV artifacts ------------------------------------------------------


def write_heatmap_csv(path, rows) -> Path:
    """Rows of (vsup, freq, value), row-major, under a fixed header."""
    lines = [HEATMAP_HEADER]
    for vsup, freq, value in rows:
        lines.append(f"{_fmt(vsup)},{_fmt(freq)},{_fmt(value)}")
    return write_text_atomic(path, "\n".join(lines) + "\n")


def read_heatmap_csv(path):
    """Load a heatmap CSV as [(OperatingPoint, value), ...]."""
    lines = Path(path).read_text().strip().split("\n")
    if not lines or lines[0] != HEATMAP_HEADER:
        raise FormatError(f"heatmap file {path} has a bad header")
    out = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 3:
            raise FormatError(f"heatmap file {path} has a malformed row: {line!r}")
        vsup, freq, value = (float(p) for p in parts)
        out.append((OperatingPoint(vsup, freq), value))
    return out


def write_trace_csv(path, rows) -> Path:
    """Elimination-trace rows (terms_count, rmse, removed_monomial)."""
    lines = [TRACE_HEADER]
    for count, rmse, label in rows:
        lines.append(f"{int(count)},{_fmt(rmse)},{label}")
    return write_text_atomic(path, "\n".join(lines) + "\n")


def read_trace_csv(path):
    lines = Path(path).read_text().strip().split("\n")
    if not lines or lines[0] != TRACE_HEADER:
        raise FormatError(f"trace file {path} has a bad header")
    out = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 3:
            raise FormatError(f"trace file {path} has a malformed row: {line!r}")
        out.append((int(parts[0]), float(parts[1]), parts[2]))
    return out


def write_comparison_csv(path, names, rows) -> Path:
    """Per-point NRMSE table: vsup, freq, then one column per variant."""
    lines = ["vsup,freq," + ",".join(names)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return write_text_atomic(path, "\n".join(lines) + "\n")


def write_amam_csv(path, names, rows) -> Path:
    """AM/AM overlay table: measured samples plus one curve per variant.

    ``rows`` yields (input_amp, measured_amp, *variant_amps) sorted by
    input amplitude, so the file plots directly.
    """
    lines = ["input_amp,measured," + ",".join(names)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return write_text_atomic(path, "\n".join(lines) + "\n")
