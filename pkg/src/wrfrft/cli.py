"""Command-line front end: scenario orchestration and result export.

Verbs
-----
synth    synthesize an echo file from a config/preset
search   run the windowed grid search and write the peak record (+slices)
rmse     Monte-Carlo estimation-accuracy table
pd       Monte-Carlo detection-probability table
profile  window-endpoint amplitude profiles around a base hypothesis
ingest   pulse-compress a raw echo file

Exit codes: 0 ok, 2 validation error, 3 budget refusal, 4 I/O or format error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import detection as det
from .config import ScenarioConfig, load_preset, parse_config, serialize_config
from .echofile import (load_echo_file, save_echo_file, save_matrix_file)
from .errors import BudgetError, EchoFileError, ValidationError, WrfrftError
from .search import (Hypothesis, amplitude_slice, build_grid, peak_profile,
                     wrfrft_search, wrfrft_single)
from .signal_model import NoiseSpec, pulse_compress, synthesize_compressed_echo

CSV_COLUMNS = ("method", "snr_db", "metric", "value", "ci_halfwidth", "trials", "seed0")


def write_rows_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow({k: r.get(k, "") for k in CSV_COLUMNS})


def write_curve_csv(path, xname, xs, yname, ys):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([xname, yname])
        for x, y in zip(xs, ys):
            w.writerow([repr(float(x)), repr(float(y))])


def _load_config(args) -> ScenarioConfig:
    if args.preset:
        cfg = load_preset(args.preset)
    elif args.config:
        cfg = parse_config(Path(args.config).read_text())
    else:
        raise ValidationError("need --preset or --config")
    if getattr(args, "snr", None) is not None:
        cfg.snr_db = args.snr
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "trials", None) is not None:
        cfg.trials = args.trials
    if getattr(args, "coarsen", None):
        for part in args.coarsen.split(","):
            name, _, val = part.partition("=")
            if not val:
                raise ValidationError(f"bad --coarsen entry {part!r} (want axis=factor)")
            cfg.coarsen[name.strip()] = float(val)
    if getattr(args, "outdir", None):
        cfg.outdir = args.outdir
    cfg.__post_init__()
    return cfg


def _outdir(cfg: ScenarioConfig) -> Path:
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _synth_echo(cfg: ScenarioConfig):
    noise = NoiseSpec(cfg.snr_db, seed=cfg.seed) if cfg.snr_db is not None else None
    return synthesize_compressed_echo(cfg.radar, cfg.targets, noise,
                                      num_cells=cfg.num_cells)


def cmd_synth(args):
    cfg = _load_config(args)
    out = _outdir(cfg)
    echo = _synth_echo(cfg)
    path = out / "echo.bin"
    save_echo_file(echo, path)
    (out / "scenario.toml").write_text(serialize_config(cfg))
    print(f"synth: wrote {path} [{echo.num_cells} cells x {echo.num_pulses} pulses]")
    return 0


def cmd_search(args):
    cfg = _load_config(args)
    out = _outdir(cfg)
    echo = load_echo_file(args.echo) if args.echo else _synth_echo(cfg)
    grid = build_grid(cfg.bounds, cfg.radar, cfg.coarsen, budget=cfg.budget)
    rec = wrfrft_search(echo, grid, workers=args.workers)
    (out / "peak.json").write_text(json.dumps(rec.to_dict(), indent=2) + "\n")
    if args.slices:
        r0s = grid.r0.values()
        vs = grid.v.values()
        amp = amplitude_slice(echo, rec.a, rec.eta0, rec.eta1, r0s, vs)
        save_matrix_file(amp, out / "slice_rv.bin",
                         axes={"r0_m": r0s, "v_mps": vs},
                         labels={"a_mps2": rec.a, "eta0_s": rec.eta0, "eta1_s": rec.eta1})
    # adaptive threshold from the winning spectrum's reference cells
    single = wrfrft_single(echo, Hypothesis(rec.eta0, rec.eta1, rec.r0, rec.v, rec.a))
    amps = np.abs(single.spectrum)
    sigma_u = det.noise_scale_from_reference(amps)
    gamma = det.threshold_from_reference(amps, cfg.pfa)
    decision = det.detect(rec.amplitude, gamma)
    (out / "detection.json").write_text(json.dumps(
        {"peak": rec.amplitude, "gamma": gamma, "detected": decision,
         "pfa": cfg.pfa, "sigma_u": sigma_u,
         "reference_cells": int(amps.size - 11)}, indent=2) + "\n")
    print("search: peak "
          f"amp={rec.amplitude:.3f} eta0={rec.eta0:.3f}s eta1={rec.eta1:.3f}s "
          f"r0={rec.r0:.1f}m v={rec.v:.2f}m/s a={rec.a:.2f}m/s2 "
          f"detect={decision} (gamma={gamma:.3f}, pfa={cfg.pfa:g})")
    return 0


def cmd_rmse(args):
    cfg = _load_config(args)
    out = _outdir(cfg)
    scen = det.Scenario(cfg.radar, tuple(cfg.targets), cfg.bounds, cfg.coarsen,
                        num_cells=cfg.num_cells,
                        rfrft_alpha_count=cfg.rfrft_alpha_count,
                        grid_offset=tuple(cfg.grid_offset.items()))
    snrs = cfg.snr_db_list or (cfg.snr_db,)
    rows = det.monte_carlo_rmse(scen, snrs, cfg.trials, seed=cfg.seed,
                                compare_rfrft="rfrft" in cfg.methods)
    path = out / "rmse.csv"
    write_rows_csv(rows, path)
    print(f"rmse: wrote {path} ({len(rows)} rows)")
    return 0


def cmd_pd(args):
    cfg = _load_config(args)
    out = _outdir(cfg)
    scen = det.Scenario(cfg.radar, tuple(cfg.targets), cfg.bounds, cfg.coarsen,
                        num_cells=cfg.num_cells,
                        rfrft_alpha_count=cfg.rfrft_alpha_count,
                        grid_offset=tuple(cfg.grid_offset.items()))
    snrs = cfg.snr_db_list or (cfg.snr_db,)
    rows = det.detection_curve(scen, snrs, cfg.trials, cfg.pfa,
                               methods=cfg.methods, seed=cfg.seed)
    path = out / "pd.csv"
    write_rows_csv(rows, path)
    print(f"pd: wrote {path} ({len(rows)} rows)")
    return 0


def cmd_profile(args):
    cfg = _load_config(args)
    out = _outdir(cfg)
    echo = load_echo_file(args.echo) if args.echo else _synth_echo(cfg)
    tgt = cfg.targets[0]
    base = Hypothesis(eta0=tgt.tb, eta1=tgt.te, r0=tgt.r0, v=tgt.v, a=tgt.a)
    prt = cfg.radar.prt
    halfspan = args.span * prt
    for axis, anchor in (("eta0", tgt.tb), ("eta1", tgt.te)):
        values = anchor + np.arange(-args.span, args.span + 1) * prt
        values = values[(values >= cfg.radar.t0) & (values <= cfg.radar.t1)]
        curve = peak_profile(echo, base, axis, values)
        path = out / f"profile_{axis}.csv"
        write_curve_csv(path, f"{axis}_s", values, "amplitude", curve)
        print(f"profile: wrote {path} (max at {axis}={values[np.argmax(curve)]:.3f}s)")
    return 0


def cmd_ingest(args):
    raw = load_echo_file(args.raw)
    comp = pulse_compress(raw, raw.radar)
    save_echo_file(comp, args.out)
    print(f"ingest: wrote {args.out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="wrfrft",
                                description="windowed fractional-transform radar search toolkit")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, echo=False):
        sp.add_argument("--preset", help="named scenario preset")
        sp.add_argument("--config", help="path to a scenario TOML file")
        sp.add_argument("--snr", type=float, help="override SNR after compression, dB")
        sp.add_argument("--seed", type=int, help="override RNG seed")
        sp.add_argument("--trials", type=int, help="override Monte-Carlo trial count")
        sp.add_argument("--coarsen", help="per-axis factors, e.g. eta0=8,v=240")
        sp.add_argument("--outdir", help="output directory")
        if echo:
            sp.add_argument("--echo", help="read this echo file instead of synthesizing")

    sp = sub.add_parser("synth", help="synthesize and save an echo file")
    common(sp)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("search", help="run the windowed grid search")
    common(sp, echo=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--slices", action="store_true", help="export the (r0, v) peak slice")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("rmse", help="Monte-Carlo estimation accuracy table")
    common(sp)
    sp.set_defaults(func=cmd_rmse)

    sp = sub.add_parser("pd", help="Monte-Carlo detection probability table")
    common(sp)
    sp.set_defaults(func=cmd_pd)

    sp = sub.add_parser("profile", help="window-endpoint amplitude profiles")
    common(sp, echo=True)
    sp.add_argument("--span", type=int, default=10, help="sweep half-span in pulses")
    sp.set_defaults(func=cmd_profile)

    sp = sub.add_parser("ingest", help="pulse-compress a raw echo file")
    sp.add_argument("--raw", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_ingest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (EchoFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValidationError, WrfrftError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
