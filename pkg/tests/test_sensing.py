import math

import numpy as np
import pytest

from nyfrsense.errors import CapacityError, ConfigError, ShapeError
from nyfrsense.nyfr import GridSpec, LoPattern
from nyfrsense.sensing import (
    BlockPartition,
    SpectrumVector,
    apply_adjoint,
    apply_forward,
    assemble_multi,
    assemble_single,
    build_modulation,
    nyquist_from_spectrum,
    spectrum_from_nyquist,
)

FULL_GRID = GridSpec(4e9, 4, 800, 2e9)
TOY = GridSpec(4e9, 4, 64, 2e9)
TOY_LO = LoPattern(4e9, 1.0, 4e9 / 16)


class TestModulation:
    def test_no_modulation_gives_ones(self):
        theta = build_modulation(LoPattern(4e9, 0.0, 5e6), FULL_GRID)
        assert np.abs(theta - 1.0).max() == 0.0

    def test_first_entry_is_one(self):
        theta = build_modulation(LoPattern(4e9, 3.0, 7e6), FULL_GRID)
        assert np.abs(theta[:, 0] - 1.0).max() < 1e-15

    def test_unit_modulus(self):
        theta = build_modulation(LoPattern(4e9, 50.0, 30e6), FULL_GRID)
        assert np.abs(np.abs(theta) - 1.0).max() < 1e-12

    def test_direct_entry_value(self):
        # zone with fold index 1, sample 50: exp(j sin(2 pi 5 MHz 12.5 ns))
        theta = build_modulation(LoPattern(4e9, 1.0, 5e6), FULL_GRID)
        expected = np.exp(1j * math.sin(math.pi / 8))
        assert theta[0, 50] == pytest.approx(expected, abs=1e-12)


class TestAssembly:
    def test_shapes(self):
        assert assemble_single(FULL_GRID, LoPattern(4e9, 1.0, 5e6)).shape == (800, 3200)
        los = [LoPattern(4e9, a, f) for a, f in ((1.0, 5e6), (10.0, 10e6), (50.0, 30e6))]
        assert assemble_multi(FULL_GRID, los).shape == (2400, 3200)

    def test_single_channel_equals_p1_multi(self):
        lo = LoPattern(4e9, 2.0, 5e6)
        a = assemble_single(TOY, lo)
        b = assemble_multi(TOY, [lo])
        assert np.array_equal(a.modulations, b.modulations)

    def test_drift_rejected(self):
        with pytest.raises(ConfigError):
            assemble_single(TOY, LoPattern(4e9, 1.0, 5e6, drift_s=1e-9))

    def test_degenerate_identity(self):
        # one zone, no modulation: the operator is the unitary inverse DFT
        grid = GridSpec(4e9, 1, 64, 2e9)
        op = assemble_single(grid, LoPattern(4e9, 0.0, 5e6))
        h = op.dense()
        assert np.abs(h @ h.conj().T - np.eye(64)).max() < 1e-10

    def test_unit_column_norms(self):
        op = assemble_single(FULL_GRID, LoPattern(4e9, 1.0, 5e6))
        rng = np.random.default_rng(0)
        cols = rng.choice(op.shape[1], 1000, replace=False)
        h = op.columns(cols)
        assert np.abs(np.linalg.norm(h, axis=0) - 1.0).max() < 1e-10

    def test_dense_cap(self):
        op = assemble_single(TOY, TOY_LO, dense_cap_bytes=1024)
        with pytest.raises(CapacityError):
            op.dense()
        x = np.zeros(op.grid.n_nyquist, dtype=complex)
        x[5] = 1.0
        assert op.forward(x).shape == (64,)


class TestApply:
    def test_zero_maps_to_zero(self):
        op = assemble_single(TOY, TOY_LO)
        assert np.all(op.forward(np.zeros(TOY.n_nyquist, complex)) == 0)

    def test_impulse_gives_column(self):
        op = assemble_single(TOY, TOY_LO)
        for flat in (0, 100, 255):
            x = np.zeros(TOY.n_nyquist, complex)
            x[flat] = 1.0
            col = op.columns([flat])[:, 0]
            assert np.abs(op.forward(x) - col).max() < 1e-12

    def test_matches_dense(self):
        los = [LoPattern(4e9, a, f) for a, f in ((1.0, 2.5e8), (10.0, 5e8))]
        op = assemble_multi(TOY, los)
        h = op.dense()
        rng = np.random.default_rng(1)
        x = rng.normal(size=TOY.n_nyquist) + 1j * rng.normal(size=TOY.n_nyquist)
        assert np.abs(op.forward(x) - h @ x).max() < 1e-10

    def test_adjoint_identity(self):
        op = assemble_multi(TOY, [TOY_LO, LoPattern(4e9, 5.0, 5e8)])
        rng = np.random.default_rng(2)
        x = rng.normal(size=TOY.n_nyquist) + 1j * rng.normal(size=TOY.n_nyquist)
        y = rng.normal(size=op.shape[0]) + 1j * rng.normal(size=op.shape[0])
        lhs = np.vdot(y, op.forward(x))
        rhs = np.vdot(op.adjoint(y), x)
        assert abs(lhs - rhs) < 1e-10 * abs(lhs)

    def test_adjoint_is_dft_in_degenerate_case(self):
        grid = GridSpec(4e9, 1, 64, 2e9)
        op = assemble_single(grid, LoPattern(4e9, 0.0, 5e6))
        rng = np.random.default_rng(3)
        y = rng.normal(size=64) + 1j * rng.normal(size=64)
        expected = np.fft.fft(y) / math.sqrt(64)
        assert np.abs(op.adjoint(y) - expected).max() < 1e-12

    def test_multichannel_gram_additivity(self):
        los = [LoPattern(4e9, a, f) for a, f in ((1.0, 2.5e8), (10.0, 5e8), (50.0, 1.5e9))]
        multi = assemble_multi(TOY, los)
        g_multi = multi.dense().conj().T @ multi.dense()
        g_sum = np.zeros_like(g_multi)
        for lo in los:
            h = assemble_single(TOY, lo).dense()
            g_sum += h.conj().T @ h
        assert np.abs(g_multi - g_sum).max() < 1e-10

    def test_identical_channels_normalized_gram(self):
        lo = LoPattern(4e9, 3.0, 2.5e8)
        single = assemble_single(TOY, lo).dense()
        multi = assemble_multi(TOY, [lo, lo, lo]).dense()
        g1 = single.conj().T @ single
        g3 = (multi.conj().T @ multi) / 3.0
        assert np.abs(g1 - g3).max() < 1e-10

    def test_shape_validation(self):
        op = assemble_single(TOY, TOY_LO)
        with pytest.raises(ShapeError):
            op.forward(np.zeros(10, complex))
        with pytest.raises(ShapeError):
            op.adjoint(np.zeros(10, complex))

    def test_wrappers(self):
        op = assemble_single(TOY, TOY_LO)
        x = SpectrumVector.zeros(TOY)
        x.coefficients[7] = 2.0
        y = apply_forward(op, x)
        back = apply_adjoint(op, y)
        assert isinstance(back, SpectrumVector)
        assert abs(back.coefficients[7]) > 1.0


class TestSpectrumLayout:
    def test_bin_frequency_bijection(self):
        probe = SpectrumVector.zeros(TOY)
        seen = set()
        for flat in range(TOY.n_nyquist):
            f = probe.frequency_of(flat)
            assert TOY.span_hz[0] <= f < TOY.span_hz[1]
            assert probe.bin_of(f) == flat
            seen.add(round(f / TOY.bin_hz))
        assert len(seen) == TOY.n_nyquist

    def test_off_grid_rejected(self):
        probe = SpectrumVector.zeros(TOY)
        with pytest.raises(ValueError):
            probe.bin_of(TOY.span_hz[0] + 0.4 * TOY.bin_hz)

    def test_nyquist_roundtrip(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=TOY.n_nyquist) + 1j * rng.normal(size=TOY.n_nyquist)
        spec = spectrum_from_nyquist(x, TOY)
        back = nyquist_from_spectrum(spec)
        assert np.abs(back - x).max() < 1e-10

    def test_tone_maps_to_single_bin(self):
        f = 9.005e9
        t = np.arange(FULL_GRID.n_nyquist) / FULL_GRID.nyquist_rate_hz
        tone = 0.7 * np.exp(2j * np.pi * f * t + 0.3j)
        spec = spectrum_from_nyquist(tone, FULL_GRID)
        mags = np.abs(spec.coefficients)
        flat = int(np.argmax(mags))
        assert spec.frequency_of(flat) == pytest.approx(f)
        assert mags[flat] == pytest.approx(0.7 * math.sqrt(FULL_GRID.n_measure), rel=1e-9)
        mags[flat] = 0.0
        assert mags.max() < 1e-9


class TestBlockPartition:
    def test_uniform(self):
        p = BlockPartition.uniform(256, 64)
        assert p.n_blocks == 4
        assert p.starts() == (0, 64, 128, 192)
        assert list(p.indices(1)) == list(range(64, 128))

    def test_zone_partition(self):
        p = BlockPartition.zones(TOY)
        assert p.lengths == (64, 64, 64, 64)

    def test_validation(self):
        with pytest.raises(ConfigError):
            BlockPartition((4, 0, 4))
        with pytest.raises(ConfigError):
            BlockPartition.uniform(100, 7)
