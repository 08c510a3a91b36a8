import json
import math

import numpy as np
import pytest

from nyfrsense import fileio
from nyfrsense.errors import ConfigError
from nyfrsense.scene import ComplexSignal, EmitterKind

SCENARIO_TOML = """
seed = 7
snr_db = 0.0

[grid]
f_s_hz = 4e9
zones = 4
n_measure = 800
f_start_hz = 2e9

[geometry]
positions_m = [0.0, 0.075, 0.15]
beta_rad = 0.1

[[channel]]
a_theta = 1.0
f_theta_hz = 5e6

[[channel]]
a_theta = 10.0
f_theta_hz = 10e6
drift_s = 0.0

[[emitter]]
kind = "cw"
carrier_hz = 9.0e9

[[emitter]]
kind = "lfm"
carrier_hz = 10.0e9
pulse_len_s = 2e-7
chirp_bw_hz = 2e7
phase0_rad = 0.5
"""


class TestBinaryFormats:
    def test_signal_roundtrip(self, tmp_path):
        rng = np.random.default_rng(0)
        sig = ComplexSignal(rng.normal(size=257) + 1j * rng.normal(size=257), 4e9, 1e-9)
        path = tmp_path / "sig.bin"
        fileio.write_signal(path, sig)
        assert path.stat().st_size == 32 + 257 * 16
        back = fileio.read_signal(path)
        assert np.array_equal(back.samples, sig.samples)
        assert back.rate_hz == sig.rate_hz
        assert back.t0_s == sig.t0_s

    def test_matrix_roundtrip(self, tmp_path):
        rng = np.random.default_rng(1)
        m = rng.normal(size=(5, 9)) + 1j * rng.normal(size=(5, 9))
        path = tmp_path / "mat.bin"
        fileio.write_matrix(path, m)
        assert path.stat().st_size == 32 + 5 * 9 * 16
        assert np.array_equal(fileio.read_matrix(path), m)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"NOTMAGIC" + b"\0" * 40)
        with pytest.raises(ConfigError):
            fileio.read_signal(path)
        with pytest.raises(ConfigError):
            fileio.read_matrix(path)


class TestScenarioConfig:
    def test_full_parse(self, tmp_path):
        path = tmp_path / "sc.toml"
        path.write_text(SCENARIO_TOML)
        sc = fileio.parse_scenario(fileio.load_toml(path))
        assert sc.seed == 7
        assert sc.snr_db == 0.0
        assert len(sc.channels) == 2
        assert sc.channels[1].a_theta == 10.0
        assert sc.emitters[0].kind is EmitterKind.CW
        assert math.isinf(sc.emitters[0].pulse_len_s)
        assert sc.emitters[1].chirp_bw_hz == 2e7
        assert sc.ris is None

    def test_default_snr_is_noise_free(self):
        sc = fileio.parse_scenario(
            {
                "grid": {"f_s_hz": 4e9, "zones": 4, "n_measure": 64, "f_start_hz": 2e9},
                "channel": [{"a_theta": 1.0, "f_theta_hz": 5e6}],
                "emitter": [{"kind": "cw", "carrier_hz": 9e9}],
            }
        )
        assert math.isinf(sc.snr_db)

    def test_invalid_f_start_names_field(self):
        with pytest.raises(ConfigError) as err:
            fileio.parse_scenario(
                {
                    "grid": {"f_s_hz": 4e9, "zones": 4, "n_measure": 64, "f_start_hz": 2.7e9},
                    "channel": [{"a_theta": 1.0, "f_theta_hz": 5e6}],
                    "emitter": [{"kind": "cw", "carrier_hz": 9e9}],
                }
            )
        assert "f_start" in str(err.value)

    def test_out_of_span_emitter_names_field(self):
        with pytest.raises(ConfigError) as err:
            fileio.parse_scenario(
                {
                    "grid": {"f_s_hz": 4e9, "zones": 4, "n_measure": 64, "f_start_hz": 2e9},
                    "channel": [{"a_theta": 1.0, "f_theta_hz": 5e6}],
                    "emitter": [
                        {"kind": "cw", "carrier_hz": 9e9},
                        {"kind": "cw", "carrier_hz": 99e9},
                    ],
                }
            )
        assert "emitter[1].carrier_hz" in str(err.value)

    def test_unknown_kind(self):
        with pytest.raises(ConfigError) as err:
            fileio.parse_emitter({"kind": "qam", "carrier_hz": 9e9}, "emitter[0]")
        assert "kind" in str(err.value)

    def test_missing_pulse_len(self):
        with pytest.raises(ConfigError) as err:
            fileio.parse_emitter({"kind": "monopulse", "carrier_hz": 9e9}, "emitter[0]")
        assert "pulse_len_s" in str(err.value)

    def test_one_bit_weights(self):
        sc = fileio.parse_scenario(
            {
                "grid": {"f_s_hz": 4e9, "zones": 4, "n_measure": 64, "f_start_hz": 2e9},
                "geometry": {"positions_m": [0.0, 0.075]},
                "ris": {"one_bit_seed": 3},
                "channel": [{"a_theta": 1.0, "f_theta_hz": 5e6}],
                "emitter": [{"kind": "cw", "carrier_hz": 9e9}],
            }
        )
        assert set(sc.ris.phases_rad) <= {0.0, math.pi}
        assert sc.ris.amplitudes == (1.0, 1.0)

    def test_manifest_roundtrip(self, tmp_path):
        path = tmp_path / "sc.toml"
        path.write_text(SCENARIO_TOML)
        sc = fileio.parse_scenario(fileio.load_toml(path))
        manifest = fileio.scenario_manifest(sc, extras={"noise_floor": 0.5})
        back = fileio.scenario_from_manifest(manifest)
        assert back == sc

    def test_manifest_json_handles_infinity(self, tmp_path):
        sc = fileio.parse_scenario(
            {
                "grid": {"f_s_hz": 4e9, "zones": 4, "n_measure": 64, "f_start_hz": 2e9},
                "channel": [{"a_theta": 1.0, "f_theta_hz": 5e6}],
                "emitter": [{"kind": "cw", "carrier_hz": 9e9}],
            }
        )
        out = tmp_path / "manifest.json"
        fileio.write_json(out, fileio.scenario_manifest(sc))
        doc = json.loads(out.read_text())
        assert doc["snr_db"] == "inf"
        back = fileio.scenario_from_manifest(doc)
        assert math.isinf(back.snr_db)


class TestExperimentConfig:
    def test_parse(self):
        spec = fileio.parse_experiment(
            {
                "name": "pulse-length",
                "sweep": [1e-7, 2e-7],
                "trials": 3,
                "base_seed": 5,
                "channel_sets": {"combined": [[1.0, 5e6], [10.0, 10e6]]},
                "options": {"max_support": 12},
            }
        )
        assert spec.name == "pulse-length"
        assert spec.trials == 3
        assert len(spec.sets()["combined"]) == 2
        assert spec.options["max_support"] == 12

    def test_defaults(self):
        spec = fileio.parse_experiment({"name": "snr", "sweep": [0.0, 5.0]})
        assert spec.grid.n_measure == 800
        assert "combined" in spec.sets()
