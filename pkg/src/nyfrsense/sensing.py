"""The compressive acquisition operator and the spectrum unknown.

A single channel maps the length Z*N zone-stacked spectrum X to N time
samples in three factored steps: a unitary inverse DFT per zone, a unit
modulus zone modulation diagonal, and a fold that sums the zones.  All
application is matrix free via FFTs; dense materialization is available
below a memory cap for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, ConfigError, ShapeError
from .nyfr import GridSpec, LoPattern, lo_phase

DENSE_CAP_BYTES = 512 * 1024 * 1024


def build_modulation(lo: LoPattern, grid: GridSpec) -> np.ndarray:
    """Zone modulation diagonals: theta_z[n] = exp(j M_z theta(n T)).

    Returns a (zones, n_measure) array of unit-modulus entries; a zone with
    fold index 0 or a zero modulation amplitude gives an all-ones row.
    """
    t = np.arange(grid.n_measure) * grid.t_adc_s
    theta = lo_phase(t, lo)
    m = np.asarray(grid.zone_indices, dtype=float)
    return np.exp(1j * np.outer(m, theta))


@dataclass
class SpectrumVector:
    """Zone-stacked spectrum: flat index z*N + n.

    Bin (z, n) holds the amplitude (scaled by sqrt(N)) of the on-grid tone
    at M_z * f_s + wrap(n) * f_s/N, where wrap maps n to a baseband offset
    in [-f_s/2, f_s/2).  The map between flat indices and absolute
    frequencies is bijective over the covered span.
    """

    coefficients: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if self.coefficients.shape != (self.grid.n_nyquist,):
            raise ShapeError(
                f"expected {self.grid.n_nyquist} coefficients, got {self.coefficients.shape}"
            )

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SpectrumVector":
        return cls(np.zeros(grid.n_nyquist, dtype=complex), grid)

    def wrap_offset_bins(self, n: int) -> int:
        """Signed baseband bin offset of intra-zone index n."""
        nn = self.grid.n_measure
        return n if n < (nn + 1) // 2 else n - nn

    def bin_of(self, f_hz: float) -> int:
        """Flat index of the on-grid frequency f_hz."""
        g = self.grid
        z = g.zone_of(f_hz)
        off = f_hz - g.zone_indices[z] * g.f_s_hz
        n = int(round(off / g.bin_hz)) % g.n_measure
        if abs(off - self.wrap_offset_bins(n) * g.bin_hz) > 1e-6 * g.bin_hz:
            raise ValueError(f"{f_hz:g} Hz is not on the recovery grid")
        return z * g.n_measure + n

    def frequency_of(self, flat: int) -> float:
        g = self.grid
        z, n = divmod(int(flat), g.n_measure)
        return g.zone_indices[z] * g.f_s_hz + self.wrap_offset_bins(n) * g.bin_hz

    def frequency_order(self) -> np.ndarray:
        """Coefficients reordered by DFT bin of the Nyquist-rate grid."""
        out = np.empty_like(self.coefficients)
        out[_dft_bin_permutation(self.grid)] = self.coefficients
        return out


def _dft_bin_permutation(grid: GridSpec) -> np.ndarray:
    """DFT bin q (at rate Z f_s) of every flat zone-stacked index."""
    zn = grid.n_nyquist
    n = grid.n_measure
    q = np.empty(zn, dtype=int)
    for z in range(grid.zones):
        m = grid.zone_indices[z]
        for k in range(n):
            off = k if k < (n + 1) // 2 else k - n
            f = m * grid.f_s_hz + off * grid.bin_hz
            q[z * n + k] = int(round((f % grid.nyquist_rate_hz) / grid.bin_hz)) % zn
    return q


def spectrum_from_nyquist(samples: np.ndarray, grid: GridSpec) -> SpectrumVector:
    """Zone-stacked spectrum of a Nyquist-rate window.

    Scaled so that a unit-amplitude on-grid tone produces a single
    coefficient of magnitude sqrt(N), matching the unit-norm columns of the
    acquisition operator.
    """
    x = np.asarray(samples, dtype=complex)
    if x.shape != (grid.n_nyquist,):
        raise ShapeError("samples must cover exactly one Nyquist-rate window")
    bins = np.fft.fft(x) / math.sqrt(grid.n_nyquist)  # unitary forward DFT
    coeff = bins[_dft_bin_permutation(grid)] / math.sqrt(grid.zones)
    return SpectrumVector(coeff, grid)


def nyquist_from_spectrum(spectrum: SpectrumVector) -> np.ndarray:
    """Inverse of :func:`spectrum_from_nyquist`."""
    grid = spectrum.grid
    bins = spectrum.frequency_order() * math.sqrt(grid.zones)
    return np.fft.ifft(bins) * math.sqrt(grid.n_nyquist)


@dataclass(frozen=True)
class BlockPartition:
    """Contiguous non-overlapping blocks over the flat spectrum index."""

    lengths: tuple[int, ...]

    def __post_init__(self):
        if any(d < 1 for d in self.lengths):
            raise ConfigError("lengths", "block lengths must be positive")

    @classmethod
    def uniform(cls, total: int, d: int) -> "BlockPartition":
        if total % d:
            raise ConfigError("lengths", f"{d} does not divide {total}")
        return cls((d,) * (total // d))

    @classmethod
    def zones(cls, grid: GridSpec) -> "BlockPartition":
        return cls((grid.n_measure,) * grid.zones)

    @property
    def total(self) -> int:
        return sum(self.lengths)

    @property
    def n_blocks(self) -> int:
        return len(self.lengths)

    def starts(self) -> tuple[int, ...]:
        out, acc = [], 0
        for d in self.lengths:
            out.append(acc)
            acc += d
        return tuple(out)

    def indices(self, block: int) -> np.ndarray:
        start = self.starts()[block]
        return np.arange(start, start + self.lengths[block])


class SensingOperator:
    """Matrix-free fold(modulate(per-zone inverse DFT)) acquisition map.

    Stacks one block of N rows per channel; each channel applies its own
    zone modulation.  Immutable after assembly, so concurrent applications
    are safe.
    """

    def __init__(self, grid: GridSpec, los: Sequence[LoPattern], dense_cap_bytes: int = DENSE_CAP_BYTES):
        for lo in los:
            if lo.drift_s != 0.0:
                raise ConfigError("drift_s", "the acquisition model assumes the nominal LO (drift 0)")
            if lo.f_s_hz != grid.f_s_hz:
                raise ConfigError("f_s_hz", "all channels must share the grid ADC rate")
        self.grid = grid
        self.los = tuple(los)
        self.dense_cap_bytes = dense_cap_bytes
        self.modulations = np.stack([build_modulation(lo, grid) for lo in self.los])

    @property
    def n_channels(self) -> int:
        return len(self.los)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_channels * self.grid.n_measure, self.grid.n_nyquist)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """y = H x, channels stacked; O(P Z N log N)."""
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.grid.n_nyquist,):
            raise ShapeError(f"expected spectrum of length {self.grid.n_nyquist}")
        n = self.grid.n_measure
        per_zone = np.fft.ifft(x.reshape(self.grid.zones, n), axis=1) * math.sqrt(n)
        out = np.empty(self.shape[0], dtype=complex)
        for p in range(self.n_channels):
            out[p * n:(p + 1) * n] = (self.modulations[p] * per_zone).sum(axis=0)
        return out

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        """H^H y; satisfies <Hx, y> = <x, H^H y>."""
        y = np.asarray(y, dtype=complex)
        if y.shape != (self.shape[0],):
            raise ShapeError(f"expected stacked measurements of length {self.shape[0]}")
        n = self.grid.n_measure
        acc = np.zeros((self.grid.zones, n), dtype=complex)
        for p in range(self.n_channels):
            seg = y[p * n:(p + 1) * n]
            acc += np.fft.fft(self.modulations[p].conj() * seg[None, :], axis=1)
        return (acc / math.sqrt(n)).reshape(-1)

    def columns(self, flat_indices: Sequence[int]) -> np.ndarray:
        """Dense copy of selected columns, stacked over channels."""
        idx = np.asarray(flat_indices, dtype=int)
        n = self.grid.n_measure
        z = idx // n
        k = idx % n
        j = np.arange(n)
        atoms = np.exp(2j * np.pi * np.outer(j, k) / n) / math.sqrt(n)  # (N, |idx|)
        out = np.empty((self.shape[0], idx.shape[0]), dtype=complex)
        for p in range(self.n_channels):
            out[p * n:(p + 1) * n] = self.modulations[p][z, :].T * atoms
        return out

    def dense(self) -> np.ndarray:
        """Materialized operator; raises CapacityError above the cap."""
        rows, cols = self.shape
        need = rows * cols * 16
        if need > self.dense_cap_bytes:
            raise CapacityError(
                f"dense operator needs {need} bytes, cap is {self.dense_cap_bytes}"
            )
        return self.columns(range(cols))


def assemble_single(grid: GridSpec, lo: LoPattern, dense_cap_bytes: int = DENSE_CAP_BYTES) -> SensingOperator:
    """Single-channel operator of shape (N, Z N)."""
    return SensingOperator(grid, [lo], dense_cap_bytes)


def assemble_multi(grid: GridSpec, los: Sequence[LoPattern], dense_cap_bytes: int = DENSE_CAP_BYTES) -> SensingOperator:
    """Stacked multichannel operator of shape (P N, Z N)."""
    if len(los) == 0:
        raise ConfigError("channels", "at least one channel required")
    return SensingOperator(grid, los, dense_cap_bytes)


def apply_forward(op: SensingOperator, x) -> np.ndarray:
    coeff = x.coefficients if isinstance(x, SpectrumVector) else x
    return op.forward(coeff)


def apply_adjoint(op: SensingOperator, y: np.ndarray) -> SpectrumVector:
    return SpectrumVector(op.adjoint(y), op.grid)
