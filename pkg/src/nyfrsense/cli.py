"""Command line front end.

Subcommands
-----------
simulate    scenario config -> per-channel measurement binaries + manifest
recover     manifest + binaries -> recovered spectrum JSON
certify     grid/channel config -> Gram report, lag profile CSV, block report
gram        grid/channel config -> lag profile CSV (optionally dense export)
experiment  experiment config -> sweep CSV + JSON summary (--check gates)
schema      print the config file schema

Exit codes: 0 success, 1 failed --check gate, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import fileio
from .coherence import block_coherence, gram_report, lag_profile, modulation_difference_rows
from .errors import CapacityError, ConfigError, NyfrError
from .evaluation import experiment_checks, planted_bins, run_experiment, simulate_measurements
from .recovery import RecoveryConfig, RecoveryMode, bomp, omp
from .scene import ComplexSignal
from .sensing import BlockPartition, assemble_multi

SCHEMA_TEXT = """\
Scenario config (TOML), used by `simulate`, `certify`, and `gram`:

  seed = 7                 # integer, default 0
  snr_db = 0.0             # omit for noise-free

  [grid]                   # required
  f_s_hz = 4e9             # ADC rate
  zones = 4                # Nyquist zones covered
  n_measure = 800          # measurements per channel
  f_start_hz = 2e9         # lower edge of the span

  [geometry]               # optional; default single element at 0 m
  positions_m = [0.0, 0.075, 0.15]
  beta_rad = 0.0

  [ris]                    # optional; presence selects the reflecting topology
  amplitudes = [1.0, 1.0]  # explicit weights ...
  phases_rad = [0.0, 3.141592653589793]
  # one_bit_seed = 3       # ... or seeded one-bit {0, pi} phases

  [[channel]]              # one table per receiver channel
  a_theta = 1.0            # LO phase modulation amplitude (rad)
  f_theta_hz = 5e6         # LO phase modulation rate
  drift_s = 0.0            # LO/ADC misalignment (simulation only)

  [[emitter]]              # one table per signal
  kind = "monopulse"       # cw | monopulse | bpsk | lfm
  carrier_hz = 9.0e9
  amplitude = 1.0
  phase0_rad = 0.0
  pulse_start_s = 0.0
  pulse_len_s = 1.5e-7     # omit for cw
  chirp_bw_hz = 2e7        # lfm only
  chip_rate_hz = 1e7       # bpsk only
  code_seed = 5            # bpsk only
  azimuth_rad = 0.0

Experiment config (TOML), used by `experiment`:

  name = "pulse-length"    # pulse-length | snr | sparsity | alias |
                           # multi-signal | bandwidth | drift
  sweep = [5e-8, 1e-7, 1.5e-7, 2e-7]
  trials = 20
  base_seed = 2024
  snr_db = 0.0
  pulse_len_s = 2e-7
  # [grid] as above (defaults to the 2-18 GHz, 4-zone, 800-sample grid)
  # [channel_sets] label = [[a_theta, f_theta_hz], ...]
  # [options] max_support = 24, block_len = 40, ...
"""


def _out_path(out_dir: Path, name: str, overwrite: bool) -> Path:
    path = out_dir / name
    if path.exists() and not overwrite:
        raise ConfigError(str(path), "exists; pass --overwrite to replace it")
    return path


def cmd_simulate(args) -> int:
    scenario = fileio.parse_scenario(fileio.load_toml(args.config))
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    y, op, x_true, floor = simulate_measurements(scenario, scenario.seed)
    n = scenario.grid.n_measure
    files = []
    for p in range(len(scenario.channels)):
        name = f"measurement_ch{p}.bin"
        path = _out_path(out, name, args.overwrite)
        seg = y[p * n:(p + 1) * n]
        fileio.write_signal(path, ComplexSignal(seg, scenario.grid.f_s_hz, 0.0))
        files.append(name)
    manifest = fileio.scenario_manifest(
        scenario,
        extras={
            "measurement_files": files,
            "noise_floor": floor,
            "truth_bins": sorted(planted_bins(scenario.emitters, scenario.grid)),
        },
    )
    fileio.write_json(_out_path(out, "manifest.json", args.overwrite), manifest)
    print(f"wrote {len(files)} measurement file(s) and manifest.json to {out}")
    return 0


def cmd_recover(args) -> int:
    import json

    manifest = json.loads(Path(args.manifest).read_text())
    scenario = fileio.scenario_from_manifest(manifest)
    base = Path(args.manifest).parent
    parts = [fileio.read_signal(base / name).samples for name in manifest["measurement_files"]]
    y = np.concatenate(parts)

    op = assemble_multi(scenario.grid, [lo.nominal() for lo in scenario.channels])
    tol = manifest.get("noise_floor", 0.0)
    tol = tol if 0.0 < tol < 1.0 else 1e-8
    if args.mode == "block":
        cfg = RecoveryConfig(
            mode=RecoveryMode.BLOCK,
            max_support=args.max_support,
            residual_tol=tol,
            partition=BlockPartition.uniform(scenario.grid.n_nyquist, args.block_len),
        )
        result = bomp(y, op, cfg)
    else:
        cfg = RecoveryConfig(max_support=args.max_support, residual_tol=tol)
        result = omp(y, op, cfg)

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = result.to_json()
    doc["frequencies_hz"] = [result.spectrum.frequency_of(i) for i in result.support]
    fileio.write_json(_out_path(out, "recovery.json", args.overwrite), doc)
    print(f"recovered {len(result.support)} atoms, relative residual {result.residual_norm:.3g}")
    return 0


def _certify_operator(args):
    doc = fileio.load_toml(args.config)
    grid = fileio.parse_grid(doc["grid"]) if "grid" in doc else None
    if grid is None:
        raise ConfigError("grid", "certify/gram configs need a [grid] table")
    chans = doc.get("channel", [])
    if not chans:
        raise ConfigError("channel", "at least one [[channel]] table required")
    los = [fileio.parse_channel(t, grid.f_s_hz, f"channel[{i}]").nominal() for i, t in enumerate(chans)]
    return assemble_multi(grid, los)


def _write_profile_csv(path: Path, op) -> None:
    rows = modulation_difference_rows(op, normalized=True)
    prof = lag_profile(rows, op.grid)
    lines = ["lag,max_abs,mean_abs"]
    for lag, mx, mean in zip(prof.lags, prof.max_abs, prof.mean_abs):
        lines.append(f"{int(lag)},{mx!r},{mean!r}")
    path.write_text("\n".join(lines) + "\n")


def cmd_certify(args) -> int:
    op = _certify_operator(args)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    report = gram_report(op, normalized=True)
    fileio.write_json(_out_path(out, "gram_report.json", args.overwrite), report.to_json())
    _write_profile_csv(_out_path(out, "lag_profile.csv", args.overwrite), op)

    partition = BlockPartition.zones(op.grid)
    block = block_coherence(op, partition, normalized=True)
    fileio.write_json(_out_path(out, "block_report.json", args.overwrite), block.to_json())
    print(
        f"offdiag max {report.offdiag_max:.4f}, certified order {report.rip_order}, "
        f"d*mu {block.d * block.mu:.6f}"
    )
    return 0


def cmd_gram(args) -> int:
    op = _certify_operator(args)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_profile_csv(_out_path(out, "lag_profile.csv", args.overwrite), op)
    if args.dense:
        try:
            h = op.dense()
        except CapacityError as e:
            print(f"dense export unavailable: {e}", file=sys.stderr)
            return 2
        fileio.write_matrix(_out_path(out, "operator.bin", args.overwrite), h)
    print(f"wrote lag_profile.csv to {out}")
    return 0


def cmd_experiment(args) -> int:
    spec = fileio.parse_experiment(fileio.load_toml(args.config))
    if args.seed is not None:
        spec = replace(spec, base_seed=args.seed)
    table = run_experiment(spec)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _out_path(out, f"{table.name}.csv", args.overwrite).write_text(table.to_csv())
    summary = {"config": table.config, "rows": table.rows}
    if args.check:
        failures = experiment_checks(table)
        summary["check_failures"] = failures
    fileio.write_json(_out_path(out, f"{table.name}_summary.json", args.overwrite), summary)
    print(table.to_csv(), end="")
    if args.check:
        for f in summary["check_failures"]:
            print(f"CHECK FAILED: {f}", file=sys.stderr)
        return 1 if summary["check_failures"] else 0
    return 0


def cmd_schema(_args) -> int:
    print(SCHEMA_TEXT, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nyfrsense", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeded=False):
        p.add_argument("config", type=Path, help="TOML config file")
        p.add_argument("-o", "--output-dir", type=Path, default=Path("out"))
        p.add_argument("--overwrite", action="store_true", help="replace existing outputs")
        if seeded:
            p.add_argument("--seed", type=int, default=None, help="override the config seed")

    p = sub.add_parser("simulate", help="synthesize and fold a scenario to measurement files")
    common(p, seeded=True)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("recover", help="recover a spectrum from simulate outputs")
    p.add_argument("manifest", type=Path, help="manifest.json written by simulate")
    p.add_argument("-o", "--output-dir", type=Path, default=Path("out"))
    p.add_argument("--overwrite", action="store_true")
    p.add_argument("--mode", choices=["sparse", "block"], default="sparse")
    p.add_argument("--max-support", type=int, default=24)
    p.add_argument("--block-len", type=int, default=40)
    p.set_defaults(fn=cmd_recover)

    p = sub.add_parser("certify", help="Gram structure, isometry order, block coherence")
    common(p)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("gram", help="off-diagonal lag profile (and optional dense export)")
    common(p)
    p.add_argument("--dense", action="store_true", help="also export the dense operator")
    p.set_defaults(fn=cmd_gram)

    p = sub.add_parser("experiment", help="run a named sweep and write its table")
    common(p, seeded=True)
    p.add_argument("--check", action="store_true", help="gate on the attached trend checks")
    p.set_defaults(fn=cmd_experiment)

    p = sub.add_parser("schema", help="print the config schema")
    p.set_defaults(fn=cmd_schema)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NyfrError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
