"""Command-line front end.

Subcommands cover the full workflow: ``synth`` writes a simulated
measurement campaign, ``fit`` fits the extended model and exports
parameter heatmaps, ``select`` runs greedy monomial elimination for one
parameter surface, ``compare`` scores the model variants, and
``export-heatmap`` dumps a single parameter map.

Report commands render PNG figures next to the CSV artifacts unless
``--no-figures`` is given.  All file writes are atomic; on failure the
command removes whatever it already wrote and exits nonzero, so exit
code 0 means every requested artifact is in place.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import plots
from .amplifiers import ZX60_2534_FREQ_GRID, ZX60_2534_VSUP_GRID, synth_2534
from .errors import MissingRecordError, RappfitError
from .fitting import fit_extended_model
from .metrics import (
    compare_variants,
    default_ref_freq,
    export_heatmap,
    fit_all_variants,
)
from .rapp import OperatingPoint, am_am_curve
from .selection import choose_initial_degree, eliminate, export_trace
from .signals import (
    ImpairmentSpec,
    OfdmConfig,
    align,
    scaled_occupied_bins,
    synth_campaign,
)
from .store import (
    campaign_hash,
    load_campaign,
    save_campaign,
    write_amam_csv,
    write_comparison_csv,
    write_heatmap_csv,
    write_model_file,
    write_text_atomic,
    write_trace_csv,
)
from .surfaces import full_basis

OUT_ENV_VAR = "RAPPFIT_OUT"
PARAM_NAMES = ("gain", "smoothness", "vsat")


def _parse_grid(text: str):
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from exc
    if not values:
        raise argparse.ArgumentTypeError("grid must be nonempty")
    return values


def _parse_op(text: str) -> OperatingPoint:
    try:
        vsup, freq = text.split(":")
        return OperatingPoint(float(vsup), float(freq))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"bad operating point {text!r}; expected VSUP:FREQ"
        ) from exc


def _resolve_out(args, parser) -> Path:
    out = args.out or os.environ.get(OUT_ENV_VAR)
    if not out:
        parser.error(f"--out is required (or set {OUT_ENV_VAR})")
    return Path(out)


def _track(tracker, path) -> Path:
    tracker.append(Path(path))
    return Path(path)


def _stage1_param_maps(fit):
    return {name: fit.param_map(name) for name in PARAM_NAMES}


def cmd_synth(args, tracker, out: Path) -> None:
    config = OfdmConfig(
        fft_size=args.fft_size,
        occupied_bins=scaled_occupied_bins(args.fft_size),
        n_symbols=args.symbols,
        target_rms=args.target_rms,
        seed=args.seed,
    )
    impairments = ImpairmentSpec(
        noise_db=args.noise_db,
        delay_span=args.delay_span,
        phase_span=args.phase_span,
    )
    truth = synth_2534()
    campaign = synth_campaign(
        truth,
        args.vsup_grid,
        args.freq_grid,
        config=config,
        impairments=impairments,
        amplifier_id=args.amplifier_id,
    )
    for iv in range(len(campaign.vsup_grid)):
        for jf in range(len(campaign.freq_grid)):
            tracker.append(out / f"records/v{iv:02d}_f{jf:02d}.csv")
    tracker.append(out / "manifest.json")
    save_campaign(campaign, out)
    n = len(campaign.records)
    print(f"wrote campaign {campaign.amplifier_id}: {n} records under {out}")


def cmd_fit(args, tracker, out: Path) -> None:
    campaign = load_campaign(args.campaign)
    fit = fit_extended_model(campaign, clamp_floor=args.clamp_floor)
    maps = _stage1_param_maps(fit)
    model_path = _track(tracker, out / "model.json")
    write_model_file(
        model_path,
        fit.model,
        surface_rmse=fit.surface_rmse(),
        amplifier_id=campaign.amplifier_id,
        campaign_hash=campaign_hash(campaign),
    )
    for name in PARAM_NAMES:
        rows = export_heatmap(maps[name], campaign.vsup_grid, campaign.freq_grid)
        write_heatmap_csv(_track(tracker, out / f"params_{name}.csv"), rows)
        if not args.no_figures:
            plots.save_heatmap_png(
                _track(tracker, out / f"params_{name}.png"),
                campaign.vsup_grid,
                campaign.freq_grid,
                maps[name],
                title=f"{campaign.amplifier_id}: per-point {name}",
                cbar_label=name,
            )
    for name in PARAM_NAMES:
        print(f"{name} surface rmse: {fit.surface_reports[name].rmse:.6g}")
    print(f"wrote model and heatmaps under {out}")


def cmd_select(args, tracker, out: Path) -> None:
    campaign = load_campaign(args.campaign)
    fit = fit_extended_model(campaign)
    samples = sorted(fit.param_map(args.param).items())
    degree = choose_initial_degree(samples, max_degree_cap=args.max_degree)
    trace = eliminate(
        samples,
        full_basis(degree),
        plateau_factor=args.plateau,
        min_terms=args.min_terms,
    )
    write_trace_csv(_track(tracker, out / f"trace_{args.param}.csv"), export_trace(trace))
    final = {
        "param": args.param,
        "initial_degree": degree,
        "stop_reason": trace.stop_reason,
        "selected_terms": [m.label() for m in trace.selected_basis],
        "initial_rmse": trace.initial_rmse,
        "final_rmse": trace.steps[-1].rmse_after if trace.steps else trace.initial_rmse,
    }
    write_text_atomic(
        _track(tracker, out / f"selected_{args.param}.json"),
        json.dumps(final, indent=2, sort_keys=True) + "\n",
    )
    if not args.no_figures:
        plots.save_trace_png(
            _track(tracker, out / f"trace_{args.param}.png"),
            export_trace(trace),
            title=f"{campaign.amplifier_id}: {args.param} term elimination",
        )
    kept = ", ".join(final["selected_terms"])
    print(f"initial degree {degree}, kept {len(trace.selected_basis)} terms: {kept}")
    print(f"stop reason: {trace.stop_reason}")


def cmd_compare(args, tracker, out: Path) -> None:
    campaign = load_campaign(args.campaign)
    ref_freq = (
        args.ref_freq if args.ref_freq is not None else default_ref_freq(campaign.freq_grid)
    )
    variants, _ = fit_all_variants(campaign, ref_freq=ref_freq)
    if args.basic:
        variants = {"basic": variants["basic"]}
    report = compare_variants(campaign, variants=variants, ref_freq=ref_freq)
    names, rows = report.rows()
    write_comparison_csv(_track(tracker, out / "comparison.csv"), names, rows)
    write_text_atomic(
        _track(tracker, out / "summary.json"),
        json.dumps(
            {"mean_nrmse": report.mean, "metadata": report.metadata},
            indent=2,
            sort_keys=True,
        )
        + "\n",
    )
    if not args.no_figures:
        plots.save_nrmse_bars_png(
            _track(tracker, out / "nrmse_mean.png"),
            report.mean,
            title=f"{campaign.amplifier_id}: mean AM/AM NRMSE",
        )
        for name in names:
            plots.save_heatmap_png(
                _track(tracker, out / f"nrmse_{name}.png"),
                campaign.vsup_grid,
                campaign.freq_grid,
                report.per_point[name],
                title=f"{campaign.amplifier_id}: {name} NRMSE",
                cbar_label="NRMSE",
            )
    for op in args.amam or _default_amam_ops(campaign):
        _export_amam(tracker, out, campaign, variants, op, figures=not args.no_figures)
    for name, value in report.mean.items():
        print(f"mean nrmse [{name}]: {value:.6f}")
    print(f"wrote comparison artifacts under {out}")


def _default_amam_ops(campaign):
    vsup = campaign.vsup_grid[len(campaign.vsup_grid) // 2]
    freq = campaign.freq_grid[len(campaign.freq_grid) // 2]
    return [OperatingPoint(vsup, freq)]


def _variant_params(variant, op):
    if hasattr(variant, "params_by_op"):
        return variant.params_by_op[op]
    params, _ = variant.model.params_at(op)
    return params


def _export_amam(tracker, out, campaign, variants, op, figures: bool) -> None:
    if op not in campaign.records:
        raise MissingRecordError(
            f"no record at vsup={op.vsup:g} V, freq={op.freq:g} GHz; "
            "overlay points must lie on the campaign grid"
        )
    record = align(campaign.records[op])
    order = np.argsort(np.abs(record.input), kind="stable")
    amps = np.abs(record.input)[order]
    measured = np.abs(record.output)[order]
    names = list(variants)
    curves = {name: am_am_curve(_variant_params(variants[name], op), amps) for name in names}

    vsup_tag = f"{op.vsup:g}".replace(".", "p")
    freq_tag = f"{op.freq:g}".replace(".", "p")
    columns = [amps, measured] + [curves[name] for name in names]
    write_amam_csv(
        _track(tracker, out / f"amam_v{vsup_tag}_f{freq_tag}.csv"),
        names,
        zip(*columns),
    )
    if figures:
        plots.save_amam_png(
            _track(tracker, out / f"amam_v{vsup_tag}_f{freq_tag}.png"),
            amps,
            measured,
            {name: (amps, curves[name]) for name in names},
            title=f"{campaign.amplifier_id}: AM/AM at {op.vsup} V, {op.freq} GHz",
        )


def cmd_export_heatmap(args, tracker, out: Path) -> None:
    campaign = load_campaign(args.campaign)
    fit = fit_extended_model(campaign)
    values = fit.param_map(args.param)
    rows = export_heatmap(values, campaign.vsup_grid, campaign.freq_grid)
    write_heatmap_csv(_track(tracker, out / f"heatmap_{args.param}.csv"), rows)
    if not args.no_figures:
        plots.save_heatmap_png(
            _track(tracker, out / f"heatmap_{args.param}.png"),
            campaign.vsup_grid,
            campaign.freq_grid,
            values,
            title=f"{campaign.amplifier_id}: per-point {args.param}",
            cbar_label=args.param,
        )
    print(f"wrote {args.param} heatmap under {out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rappfit",
        description="Supply- and frequency-dependent Rapp modeling of RF amplifiers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p):
        p.add_argument(
            "--out",
            "-o",
            default=None,
            help=f"output directory (default: ${OUT_ENV_VAR})",
        )

    p = sub.add_parser("synth", help="simulate a measurement campaign")
    add_out(p)
    p.add_argument("--seed", type=int, default=0, help="master random seed")
    p.add_argument("--noise-db", type=float, default=-50.0)
    p.add_argument("--delay-span", type=int, default=100)
    p.add_argument("--phase-span", type=float, default=np.pi)
    p.add_argument("--symbols", type=int, default=10)
    p.add_argument("--fft-size", type=int, default=4096)
    p.add_argument("--target-rms", type=float, default=0.5)
    p.add_argument("--vsup-grid", type=_parse_grid, default=ZX60_2534_VSUP_GRID)
    p.add_argument("--freq-grid", type=_parse_grid, default=ZX60_2534_FREQ_GRID)
    p.add_argument("--amplifier-id", default="SYNTH-2534")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="fit the extended model to a campaign")
    add_out(p)
    p.add_argument("--campaign", required=True, help="campaign directory")
    p.add_argument("--clamp-floor", type=float, default=1e-3)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select", help="greedy monomial elimination for one surface")
    add_out(p)
    p.add_argument("--campaign", required=True)
    p.add_argument("--param", choices=PARAM_NAMES, required=True)
    p.add_argument("--max-degree", type=int, default=6)
    p.add_argument("--plateau", type=float, default=1.1)
    p.add_argument("--min-terms", type=int, default=1)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("compare", help="score model variants against a campaign")
    add_out(p)
    p.add_argument("--campaign", required=True)
    p.add_argument("--ref-freq", type=float, default=None)
    p.add_argument("--basic", action="store_true", help="score only the per-point fits")
    p.add_argument(
        "--amam",
        type=_parse_op,
        action="append",
        help="render an AM/AM overlay at VSUP:FREQ (repeatable)",
    )
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export-heatmap", help="dump one per-point parameter map")
    add_out(p)
    p.add_argument("--campaign", required=True)
    p.add_argument("--param", choices=PARAM_NAMES, required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_export_heatmap)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = _resolve_out(args, parser)
    tracker: list[Path] = []
    try:
        args.func(args, tracker, out)
    except (RappfitError, OSError, KeyError, ValueError) as exc:
        for path in tracker:
            try:
                path.unlink(missing_ok=True)
            except OSError:
                pass
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
