"""On-disk formats: interleaved complex binaries, TOML configs, JSON reports.

Binary layout (little endian): a 32-byte header followed by float64
(re, im) pairs.  Signals use magic ``NYFSIG01`` with fields
{count: u64, rate_hz: f64, t0_s: f64}; matrices use magic ``NYFMAT01``
with {rows: u64, cols: u64, reserved: u64} and row-major data.
"""

from __future__ import annotations

import json
import math
import struct
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .evaluation import DEFAULT_GRID, ExperimentSpec
from .nyfr import GridSpec, LoPattern
from .scene import (
    ArrayGeometry,
    ComplexSignal,
    EmitterKind,
    EmitterSpec,
    RisWeights,
    Scenario,
)

SIG_MAGIC = b"NYFSIG01"
MAT_MAGIC = b"NYFMAT01"


def write_signal(path: Path, signal: ComplexSignal) -> None:
    data = np.ascontiguousarray(signal.samples, dtype=np.complex128)
    header = SIG_MAGIC + struct.pack("<Qdd", data.shape[0], signal.rate_hz, signal.t0_s)
    with open(path, "wb") as f:
        f.write(header)
        f.write(data.astype("<c16").tobytes())


def read_signal(path: Path) -> ComplexSignal:
    raw = Path(path).read_bytes()
    if raw[:8] != SIG_MAGIC:
        raise ConfigError(str(path), "not a signal file (bad magic)")
    count, rate, t0 = struct.unpack("<Qdd", raw[8:32])
    data = np.frombuffer(raw[32:], dtype="<c16", count=count)
    return ComplexSignal(data.astype(np.complex128), rate, t0)


def write_matrix(path: Path, matrix: np.ndarray) -> None:
    m = np.ascontiguousarray(matrix, dtype=np.complex128)
    if m.ndim != 2:
        raise ConfigError(str(path), "matrix export expects a 2-D array")
    header = MAT_MAGIC + struct.pack("<QQQ", m.shape[0], m.shape[1], 0)
    with open(path, "wb") as f:
        f.write(header)
        f.write(m.astype("<c16").tobytes())


def read_matrix(path: Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:8] != MAT_MAGIC:
        raise ConfigError(str(path), "not a matrix file (bad magic)")
    rows, cols, _ = struct.unpack("<QQQ", raw[8:32])
    data = np.frombuffer(raw[32:], dtype="<c16", count=rows * cols)
    return data.reshape(rows, cols).astype(np.complex128)


def write_json(path: Path, obj) -> None:
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def load_toml(path: Path) -> dict:
    with open(path, "rb") as f:
        try:
            return tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(str(path), f"not valid TOML: {e}")


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigError(f"{where}.{key}" if where else key, "missing required field")
    return table[key]


def parse_grid(table: dict, where: str = "grid") -> GridSpec:
    try:
        return GridSpec(
            f_s_hz=float(_require(table, "f_s_hz", where)),
            zones=int(_require(table, "zones", where)),
            n_measure=int(_require(table, "n_measure", where)),
            f_start_hz=float(_require(table, "f_start_hz", where)),
        )
    except ConfigError as e:
        raise ConfigError(f"{where}.{e.field}" if "." not in e.field else e.field, str(e).split(": ", 1)[-1])


def parse_channel(table: dict, f_s_hz: float, where: str) -> LoPattern:
    return LoPattern(
        f_s_hz=f_s_hz,
        a_theta=float(_require(table, "a_theta", where)),
        f_theta_hz=float(_require(table, "f_theta_hz", where)),
        drift_s=float(table.get("drift_s", 0.0)),
    )


def parse_emitter(table: dict, where: str) -> EmitterSpec:
    kind_name = str(_require(table, "kind", where)).lower()
    try:
        kind = EmitterKind(kind_name)
    except ValueError:
        raise ConfigError(f"{where}.kind", f"unknown kind {kind_name!r}")
    pulse_len = table.get("pulse_len_s", math.inf if kind is EmitterKind.CW else None)
    if pulse_len is None:
        raise ConfigError(f"{where}.pulse_len_s", "missing required field")
    try:
        return EmitterSpec(
            kind=kind,
            carrier_hz=float(_require(table, "carrier_hz", where)),
            amplitude=float(table.get("amplitude", 1.0)),
            phase0_rad=float(table.get("phase0_rad", 0.0)),
            pulse_start_s=float(table.get("pulse_start_s", 0.0)),
            pulse_len_s=float(pulse_len),
            chirp_bw_hz=float(table.get("chirp_bw_hz", 0.0)),
            chip_rate_hz=float(table.get("chip_rate_hz", 0.0)),
            code_seed=int(table.get("code_seed", 0)),
            azimuth_rad=float(table.get("azimuth_rad", 0.0)),
        )
    except ConfigError as e:
        raise ConfigError(f"{where}.{e.field}", str(e).split(": ", 1)[-1])


def parse_scenario(doc: dict) -> Scenario:
    grid = parse_grid(_require(doc, "grid", ""))
    chan_tables = doc.get("channel", [])
    if not chan_tables:
        raise ConfigError("channel", "at least one [[channel]] table required")
    channels = tuple(
        parse_channel(t, grid.f_s_hz, f"channel[{i}]") for i, t in enumerate(chan_tables)
    )
    emit_tables = doc.get("emitter", [])
    if not emit_tables:
        raise ConfigError("emitter", "at least one [[emitter]] table required")
    emitters = tuple(parse_emitter(t, f"emitter[{i}]") for i, t in enumerate(emit_tables))
    for i, e in enumerate(emitters):
        if e.kind is EmitterKind.LFM:
            ok = (
                e.carrier_hz - e.chirp_bw_hz / 2 >= grid.span_hz[0]
                and e.carrier_hz + e.chirp_bw_hz / 2 <= grid.span_hz[1]
            )
        else:
            ok = grid.contains(e.carrier_hz)
        if not ok:
            raise ConfigError(f"emitter[{i}].carrier_hz", "outside the covered span")

    geo_table = doc.get("geometry")
    if geo_table is not None:
        geometry = ArrayGeometry(
            tuple(float(p) for p in _require(geo_table, "positions_m", "geometry")),
            float(geo_table.get("beta_rad", 0.0)),
        )
    else:
        geometry = ArrayGeometry((0.0,))

    ris = None
    ris_table = doc.get("ris")
    if ris_table is not None:
        if "one_bit_seed" in ris_table:
            ris = RisWeights.one_bit(len(geometry.positions_m), int(ris_table["one_bit_seed"]))
        else:
            ris = RisWeights(
                tuple(float(a) for a in _require(ris_table, "amplitudes", "ris")),
                tuple(float(p) for p in _require(ris_table, "phases_rad", "ris")),
            )

    snr = doc.get("snr_db", math.inf)
    snr = math.inf if snr in ("inf", None) else float(snr)
    try:
        return Scenario(
            emitters=emitters,
            geometry=geometry,
            channels=channels,
            grid=grid,
            ris=ris,
            snr_db=snr,
            seed=int(doc.get("seed", 0)),
        )
    except ConfigError:
        raise


def parse_channel_sets(table: dict, f_s_hz: float) -> dict:
    out = {}
    for label, rows in table.items():
        los = []
        for i, row in enumerate(rows):
            if len(row) < 2:
                raise ConfigError(
                    f"channel_sets.{label}[{i}]", "expected [a_theta, f_theta_hz, drift_s?]"
                )
            drift = float(row[2]) if len(row) > 2 else 0.0
            los.append(LoPattern(f_s_hz, float(row[0]), float(row[1]), drift))
        out[label] = tuple(los)
    return out


def parse_experiment(doc: dict) -> ExperimentSpec:
    grid = parse_grid(doc["grid"]) if "grid" in doc else DEFAULT_GRID
    sets = (
        parse_channel_sets(doc["channel_sets"], grid.f_s_hz)
        if "channel_sets" in doc
        else {}
    )
    return ExperimentSpec(
        name=str(_require(doc, "name", "")),
        sweep=tuple(float(v) for v in _require(doc, "sweep", "")),
        trials=int(doc.get("trials", 20)),
        base_seed=int(doc.get("base_seed", 2024)),
        grid=grid,
        snr_db=float(doc.get("snr_db", 0.0)),
        pulse_len_s=float(doc.get("pulse_len_s", 200e-9)),
        channel_sets=sets,
        options=dict(doc.get("options", {})),
    )


def scenario_manifest(scenario: Scenario, extras: Optional[dict] = None) -> dict:
    """Complete effective configuration, defaults materialized."""
    doc = {
        "seed": scenario.seed,
        "snr_db": scenario.snr_db,
        "grid": {
            "f_s_hz": scenario.grid.f_s_hz,
            "zones": scenario.grid.zones,
            "n_measure": scenario.grid.n_measure,
            "f_start_hz": scenario.grid.f_start_hz,
        },
        "geometry": {
            "positions_m": list(scenario.geometry.positions_m),
            "beta_rad": scenario.geometry.beta_rad,
        },
        "channel": [
            {"a_theta": lo.a_theta, "f_theta_hz": lo.f_theta_hz, "drift_s": lo.drift_s}
            for lo in scenario.channels
        ],
        "emitter": [
            {
                "kind": e.kind.value,
                "carrier_hz": e.carrier_hz,
                "amplitude": e.amplitude,
                "phase0_rad": e.phase0_rad,
                "pulse_start_s": e.pulse_start_s,
                "pulse_len_s": e.pulse_len_s,
                "chirp_bw_hz": e.chirp_bw_hz,
                "chip_rate_hz": e.chip_rate_hz,
                "code_seed": e.code_seed,
                "azimuth_rad": e.azimuth_rad,
            }
            for e in scenario.emitters
        ],
    }
    if scenario.ris is not None:
        doc["ris"] = {
            "amplitudes": list(scenario.ris.amplitudes),
            "phases_rad": list(scenario.ris.phases_rad),
        }
    if extras:
        doc.update(extras)
    return doc


def scenario_from_manifest(doc: dict) -> Scenario:
    """Rebuild a scenario from a manifest produced by scenario_manifest."""
    snr = doc.get("snr_db", math.inf)
    doc = dict(doc)
    doc["snr_db"] = snr if not isinstance(snr, str) else math.inf
    return parse_scenario(doc)
