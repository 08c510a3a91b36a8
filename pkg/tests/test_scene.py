import math

import numpy as np
import pytest

from nyfrsense.errors import ConfigError, MetricError, ShapeError, SpanError
from nyfrsense.nyfr import GridSpec, LoPattern
from nyfrsense.scene import (
    ArrayGeometry,
    ComplexSignal,
    EmitterKind,
    EmitterSpec,
    RisWeights,
    Scenario,
    add_awgn,
    delay_combine,
    delay_signal,
    nyquist_times,
    propagation_delays,
    ris_combine,
    steering_phase,
    synth_emitter,
)

FULL_GRID = GridSpec(4e9, 4, 800, 2e9)
# window long enough that a 150 ns pulse starting late is not clipped
LONG = GridSpec(4e9, 4, 1600, 2e9)


class TestSynthEmitter:
    def test_cw_sample_at_origin(self):
        s = synth_emitter(EmitterSpec(EmitterKind.CW, 9e9), FULL_GRID)
        assert s.samples[0] == pytest.approx(1.0 + 0.0j)
        assert np.all(np.abs(np.abs(s.samples) - 1.0) < 1e-12)

    def test_monopulse_support(self):
        # 100 ns start, 150 ns length: support is [100 ns, 250 ns) on the grid
        e = EmitterSpec(EmitterKind.MONOPULSE, 9e9, pulse_start_s=100e-9, pulse_len_s=150e-9)
        s = synth_emitter(e, LONG)
        nz = np.flatnonzero(np.abs(s.samples))
        rate = LONG.nyquist_rate_hz
        assert nz[0] == int(100e-9 * rate)
        assert nz[-1] == int(250e-9 * rate) - 1
        assert nz.shape[0] == int(150e-9 * rate)

    def test_lfm_instantaneous_frequency(self):
        # finite difference of the sampled phase recovers the sweep; the
        # estimate aliases at the complex sampling rate so it is unwrapped
        # back into the covered span
        e = EmitterSpec(
            EmitterKind.LFM, 10e9, pulse_start_s=0.0, pulse_len_s=200e-9, chirp_bw_hz=20e6
        )
        s = synth_emitter(e, FULL_GRID)
        t = nyquist_times(FULL_GRID)
        dt = t[1] - t[0]
        phase = np.unwrap(np.angle(s.samples))

        def inst_freq(idx):
            raw = (phase[idx + 1] - phase[idx - 1]) / (2 * dt) / (2 * np.pi)
            lo = FULL_GRID.span_hz[0]
            return lo + (raw - lo) % FULL_GRID.nyquist_rate_hz

        mid = s.samples.shape[0] // 2
        assert abs(inst_freq(mid) - 10e9) < FULL_GRID.nyquist_rate_hz / s.samples.shape[0]
        quarter = s.samples.shape[0] // 4
        assert abs(inst_freq(quarter) - (10e9 - 5e6)) < 2e6

    def test_bpsk_chips(self):
        e = EmitterSpec(
            EmitterKind.BPSK,
            9e9,
            pulse_start_s=0.0,
            pulse_len_s=200e-9,
            chip_rate_hz=50e6,
            code_seed=7,
        )
        s = synth_emitter(e, FULL_GRID)
        carrier = synth_emitter(EmitterSpec(EmitterKind.CW, 9e9), FULL_GRID)
        ratio = s.samples / carrier.samples
        assert np.all(np.abs(np.abs(ratio) - 1.0) < 1e-12)
        signs = np.unique(np.round(ratio.real))
        assert set(signs.tolist()) <= {-1.0, 1.0}
        # deterministic in the code seed
        again = synth_emitter(e, FULL_GRID)
        assert np.array_equal(s.samples, again.samples)

    def test_span_errors(self):
        with pytest.raises(SpanError):
            synth_emitter(EmitterSpec(EmitterKind.CW, 19e9), FULL_GRID)
        with pytest.raises(SpanError):
            synth_emitter(
                EmitterSpec(
                    EmitterKind.LFM,
                    17.99e9,
                    pulse_len_s=100e-9,
                    chirp_bw_hz=100e6,
                ),
                FULL_GRID,
            )

    def test_pulse_outside_window(self):
        e = EmitterSpec(EmitterKind.MONOPULSE, 9e9, pulse_start_s=300e-9, pulse_len_s=50e-9)
        with pytest.raises(ConfigError):
            synth_emitter(e, FULL_GRID)

    def test_invalid_specs(self):
        with pytest.raises(ConfigError):
            EmitterSpec(EmitterKind.MONOPULSE, 9e9, pulse_len_s=math.inf)
        with pytest.raises(ConfigError):
            EmitterSpec(EmitterKind.LFM, 9e9, pulse_len_s=1e-7)
        with pytest.raises(ConfigError):
            EmitterSpec(EmitterKind.CW, 9e9, azimuth_rad=2.0)


class TestSteeringPhase:
    def test_reference_element(self):
        assert steering_phase(0.3, -0.9, 0.0, 0.03) == 0.0

    def test_opposite_angles_cancel(self):
        assert steering_phase(0.4, -0.4, 0.05, 0.03) == pytest.approx(0.0, abs=1e-15)

    def test_half_wavelength(self):
        lam = 0.03
        val = steering_phase(0.0, math.pi / 6, lam / 2, lam)
        assert val == pytest.approx(math.pi * math.sin(math.pi / 6), abs=1e-12)
        assert val == pytest.approx(math.pi / 2, abs=1e-12)


class TestRisCombine:
    def _one(self, fc=9e9):
        return EmitterSpec(EmitterKind.CW, fc)

    def test_single_unit_element_is_identity(self):
        e = self._one()
        s = synth_emitter(e, FULL_GRID)
        geo = ArrayGeometry((0.0,))
        ris = RisWeights((1.0,), (0.0,))
        out = ris_combine([s], geo, ris, [e])
        assert np.abs(out.samples - s.samples).max() < 1e-12

    def test_pi_phases_negate(self):
        e = self._one()
        s = synth_emitter(e, FULL_GRID)
        geo = ArrayGeometry.ula(4, 0.02)
        out0 = ris_combine([s], geo, RisWeights((1.0,) * 4, (0.0,) * 4), [e])
        outpi = ris_combine([s], geo, RisWeights((1.0,) * 4, (math.pi,) * 4), [e])
        assert np.abs(outpi.samples + out0.samples).max() < 1e-9

    def test_two_elements_in_phase(self):
        fc = 9e9
        lam = 299792458.0 / fc
        e = EmitterSpec(EmitterKind.CW, fc, amplitude=1.0, azimuth_rad=0.0)
        s = synth_emitter(e, FULL_GRID)
        geo = ArrayGeometry((0.0, lam / 2), beta_rad=0.0)
        out = ris_combine([s], geo, RisWeights((1.0, 1.0), (0.0, 0.0)), [e])
        assert np.abs(out.samples - 2.0 * s.samples).max() < 1e-9

    def test_additive_in_emitters(self):
        e1 = EmitterSpec(EmitterKind.CW, 9e9, azimuth_rad=0.2)
        e2 = EmitterSpec(EmitterKind.CW, 13e9, azimuth_rad=-0.5)
        s1, s2 = synth_emitter(e1, FULL_GRID), synth_emitter(e2, FULL_GRID)
        geo = ArrayGeometry.ula(3, 0.02)
        ris = RisWeights.one_bit(3, seed=5)
        both = ris_combine([s1, s2], geo, ris, [e1, e2])
        first = ris_combine([s1], geo, ris, [e1])
        second = ris_combine([s2], geo, ris, [e2])
        scale = np.abs(both.samples).max()
        assert np.abs(both.samples - (first.samples + second.samples)).max() < 1e-12 * scale

    def test_shape_mismatch(self):
        e = self._one()
        s = synth_emitter(e, FULL_GRID)
        geo = ArrayGeometry.ula(2, 0.02)
        with pytest.raises(ShapeError):
            ris_combine([s], geo, RisWeights((1.0,), (0.0,)), [e])


class TestDelays:
    def test_zero_delay_identity(self):
        e1 = EmitterSpec(EmitterKind.CW, 9e9)
        e2 = EmitterSpec(EmitterKind.MONOPULSE, 5e9, pulse_start_s=50e-9, pulse_len_s=100e-9)
        sigs = [synth_emitter(e1, FULL_GRID), synth_emitter(e2, FULL_GRID)]
        out = delay_combine(sigs, np.zeros((2, 1)), 0, FULL_GRID)
        direct = sigs[0].samples + sigs[1].samples
        assert np.abs(out.samples - direct).max() < 1e-9

    def test_cw_delay_is_phase_rotation(self):
        fc = 9e9
        tau = 37e-12
        s = synth_emitter(EmitterSpec(EmitterKind.CW, fc), FULL_GRID)
        out = delay_signal(s, tau, FULL_GRID)
        expected = s.samples * np.exp(-2j * np.pi * fc * tau)
        assert np.abs(out.samples - expected).max() < 1e-9

    def test_integer_sample_delay_shifts_support(self):
        e = EmitterSpec(EmitterKind.MONOPULSE, 9e9, pulse_start_s=50e-9, pulse_len_s=50e-9)
        s = synth_emitter(e, FULL_GRID)
        tau = 2.0 / FULL_GRID.nyquist_rate_hz
        out = delay_signal(s, tau, FULL_GRID)
        # cross-correlation peak sits at a two-sample shift
        xc = np.fft.ifft(np.fft.fft(out.samples) * np.conj(np.fft.fft(s.samples)))
        assert int(np.argmax(np.abs(xc))) == 2
        nz_in = np.flatnonzero(np.abs(s.samples) > 1e-9)
        nz_out = np.flatnonzero(np.abs(out.samples) > 1e-9)
        assert nz_out[0] == nz_in[0] + 2 and nz_out[-1] == nz_in[-1] + 2

    def test_delay_combine_additive_in_emitters(self):
        e1 = EmitterSpec(EmitterKind.CW, 9e9)
        e2 = EmitterSpec(EmitterKind.MONOPULSE, 5e9, pulse_start_s=50e-9, pulse_len_s=100e-9)
        sigs = [synth_emitter(e1, FULL_GRID), synth_emitter(e2, FULL_GRID)]
        delays = np.array([[0.3e-9], [0.7e-9]])
        both = delay_combine(sigs, delays, 0, FULL_GRID)
        one = delay_combine([sigs[0]], delays[:1], 0, FULL_GRID)
        two = delay_combine([sigs[1]], delays[1:], 0, FULL_GRID)
        scale = np.abs(both.samples).max()
        assert np.abs(both.samples - (one.samples + two.samples)).max() < 1e-12 * scale

    def test_propagation_delays_shape(self):
        geo = ArrayGeometry.ula(3, 0.075)
        es = [EmitterSpec(EmitterKind.CW, 9e9, azimuth_rad=0.5)]
        d = propagation_delays(es, geo)
        assert d.shape == (1, 3)
        assert d[0, 0] == 0.0
        assert d[0, 2] == pytest.approx(0.15 * math.sin(0.5) / 299792458.0)


class TestAwgn:
    def test_infinite_snr_identity(self):
        s = synth_emitter(EmitterSpec(EmitterKind.CW, 9e9), FULL_GRID)
        out = add_awgn(s, math.inf, seed=1)
        assert np.array_equal(out.samples, s.samples)

    def test_variance_calibration(self):
        n = 200_000
        sig = ComplexSignal(np.ones(n, dtype=complex), 1.0)
        out = add_awgn(sig, 0.0, seed=3)
        noise = out.samples - sig.samples
        assert abs(np.mean(np.abs(noise) ** 2) - 1.0) < 0.05

    def test_zero_mean(self):
        n = 1_000_000
        sigma = 1.0
        sig = ComplexSignal(np.ones(n, dtype=complex), 1.0)
        noise = add_awgn(sig, 0.0, seed=11).samples - 1.0
        assert abs(noise.mean()) < 4 * sigma / 1e3

    def test_deterministic(self):
        s = synth_emitter(EmitterSpec(EmitterKind.CW, 9e9), FULL_GRID)
        a = add_awgn(s, 10.0, seed=42)
        b = add_awgn(s, 10.0, seed=42)
        assert np.array_equal(a.samples, b.samples)

    def test_pulse_support_reference(self):
        # noise power keys off the in-pulse power, not the window average
        e = EmitterSpec(EmitterKind.MONOPULSE, 9e9, pulse_start_s=0.0, pulse_len_s=50e-9)
        s = synth_emitter(e, FULL_GRID)
        out = add_awgn(s, 0.0, seed=5)
        tail = out.samples[s.samples == 0]
        assert abs(np.mean(np.abs(tail) ** 2) - 1.0) < 0.1

    def test_all_zero_rejected(self):
        sig = ComplexSignal(np.zeros(64, dtype=complex), 1.0)
        with pytest.raises(MetricError):
            add_awgn(sig, 0.0, seed=0)


class TestScenario:
    def _emitter(self):
        return EmitterSpec(EmitterKind.CW, 9e9)

    def test_topology_exclusive(self):
        lo = LoPattern(4e9, 1.0, 5e6)
        geo = ArrayGeometry.ula(2, 0.075)
        ris = RisWeights.one_bit(2, seed=0)
        with pytest.raises(ConfigError):
            Scenario(
                emitters=(self._emitter(),),
                geometry=geo,
                channels=(lo, lo),
                grid=FULL_GRID,
                ris=ris,
            )

    def test_channel_rate_must_match_grid(self):
        lo = LoPattern(2e9, 1.0, 5e6)
        with pytest.raises(ConfigError):
            Scenario(
                emitters=(self._emitter(),),
                geometry=ArrayGeometry((0.0,)),
                channels=(lo,),
                grid=FULL_GRID,
            )
