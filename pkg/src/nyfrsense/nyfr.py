"""Nyquist folding receiver front end.

The receiver samples a wideband input with an RF pulse train locked to a
local oscillator (LO) whose phase carries a slow sinusoidal modulation.
Every Nyquist zone of width f_s folds onto the same baseband, but a signal
from zone M picks up the modulation M times over, so the zone index stays
recoverable from the depth of the induced phase modulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import ConfigError, SpanError

if TYPE_CHECKING:
    from .scene import ComplexSignal


@dataclass(frozen=True)
class LoPattern:
    """Local oscillator settings of one receiver channel."""

    f_s_hz: float        # ADC rate and LO center frequency (Hz)
    a_theta: float       # amplitude of the sinusoidal phase modulation (rad)
    f_theta_hz: float    # frequency of the phase modulation (Hz)
    drift_s: float = 0.0  # LO/ADC time misalignment; 0 for the nominal model

    def __post_init__(self):
        if self.f_s_hz <= 0:
            raise ConfigError("f_s_hz", "must be positive")
        if self.a_theta < 0:
            raise ConfigError("a_theta", "must be nonnegative")
        if self.f_theta_hz < 0:
            raise ConfigError("f_theta_hz", "must be nonnegative")

    def nominal(self) -> "LoPattern":
        """The same pattern with the drift removed (what the model assumes)."""
        return LoPattern(self.f_s_hz, self.a_theta, self.f_theta_hz, 0.0)


@dataclass(frozen=True)
class GridSpec:
    """Acquisition grid: ADC rate, zone count, measurement count, span start.

    The covered span is [f_start_hz, f_start_hz + zones * f_s_hz) and the
    recovery grid has bin spacing f_s_hz / n_measure.  Zone centers must sit
    at integer multiples of f_s_hz so each zone folds exactly onto one
    baseband Nyquist interval.
    """

    f_s_hz: float      # ADC sampling rate (Hz)
    zones: int         # number of Nyquist zones Z
    n_measure: int     # measurements per channel N
    f_start_hz: float  # lower edge of the covered span (Hz)

    def __post_init__(self):
        if self.f_s_hz <= 0:
            raise ConfigError("f_s_hz", "must be positive")
        if self.zones < 1:
            raise ConfigError("zones", "must be at least 1")
        if self.n_measure < 2:
            raise ConfigError("n_measure", "must be at least 2")
        if self.f_start_hz < 0:
            raise ConfigError("f_start_hz", "must be nonnegative")
        center = self.f_start_hz + 0.5 * self.f_s_hz
        ratio = center / self.f_s_hz
        if abs(ratio - round(ratio)) > 1e-9:
            raise ConfigError(
                "f_start_hz",
                "zone centers must fall on integer multiples of f_s_hz "
                f"(f_start + f_s/2 = {center:g} is not a multiple of f_s)",
            )

    @property
    def t_adc_s(self) -> float:
        """ADC sample period T = 1/f_s."""
        return 1.0 / self.f_s_hz

    @property
    def bin_hz(self) -> float:
        """Recovery grid bin spacing f_s / N."""
        return self.f_s_hz / self.n_measure

    @property
    def span_hz(self) -> tuple[float, float]:
        return (self.f_start_hz, self.f_start_hz + self.zones * self.f_s_hz)

    @property
    def nyquist_rate_hz(self) -> float:
        """Complex Nyquist rate covering the whole span."""
        return self.zones * self.f_s_hz

    @property
    def n_nyquist(self) -> int:
        """Number of Nyquist-rate samples in one observation window."""
        return self.zones * self.n_measure

    @property
    def window_s(self) -> float:
        """Observation window duration N / f_s."""
        return self.n_measure / self.f_s_hz

    @property
    def zone_indices(self) -> tuple[int, ...]:
        """Fold index M_z of each zone, taken at the zone center."""
        out = []
        for z in range(self.zones):
            center = self.f_start_hz + (z + 0.5) * self.f_s_hz
            out.append(int(round(center / self.f_s_hz)))
        return tuple(out)

    def contains(self, f_hz: float) -> bool:
        lo, hi = self.span_hz
        return lo <= f_hz < hi

    def zone_of(self, f_hz: float) -> int:
        """Zone number (0-based) whose half-open interval holds f_hz."""
        if not self.contains(f_hz):
            raise SpanError(
                f"{f_hz:g} Hz outside covered span [{self.span_hz[0]:g}, {self.span_hz[1]:g}) Hz"
            )
        z = int(math.floor((f_hz - self.f_start_hz) / self.f_s_hz))
        return min(z, self.zones - 1)

    def fold_offset(self, f_hz: float) -> float:
        """Folded baseband offset f - M_z * f_s, in [-f_s/2, f_s/2)."""
        z = self.zone_of(f_hz)
        return f_hz - self.zone_indices[z] * self.f_s_hz

    def snap(self, f_hz: float) -> float:
        """Nearest on-grid frequency (bin spacing f_s/N within the zone)."""
        z = self.zone_of(f_hz)
        m = self.zone_indices[z]
        off = round((f_hz - m * self.f_s_hz) / self.bin_hz) * self.bin_hz
        half = 0.5 * self.f_s_hz
        off = min(max(off, -half), half - self.bin_hz)
        return m * self.f_s_hz + off


def lo_phase(t_s, lo: LoPattern):
    """LO phase modulation theta(t) = A sin(2 pi f_theta (t + drift))."""
    t = np.asarray(t_s, dtype=float)
    out = lo.a_theta * np.sin(2.0 * np.pi * lo.f_theta_hz * (t + lo.drift_s))
    return out if out.ndim else float(out)


def zone_index(f_hz: float, f_s_hz: float) -> int:
    """Fold index M with |f - M f_s| <= f_s/2, ties broken toward lower M."""
    if f_s_hz <= 0:
        raise ConfigError("f_s_hz", "must be positive")
    return int(math.ceil(f_hz / f_s_hz - 0.5))


def measure_analytic(
    emitter_signals: Sequence["ComplexSignal"],
    carriers_hz: Sequence[float],
    lo: LoPattern,
    grid: GridSpec,
) -> np.ndarray:
    """Sample the folded receiver output for one channel, noise free.

    Each emitter waveform (given on the Nyquist-rate grid of ``grid``) is
    taken at the ADC instants t = n T; the RF carrier term of the harmonic
    mixer cancels there, so emitter k contributes its own samples times
    exp(j M_k theta(nT)).  A nonzero LO drift shifts theta in time and adds
    the per-zone constant phase 2 pi M_k f_s drift that the shifted pulse
    train acquires.

    The zone index is assigned per signal (from its carrier), so spectral
    spillover into neighboring zones carries the owner's modulation.  For a
    pulse well inside its zone that costs a few percent against the per-bin
    acquisition operator (sinc tails); for tones the two agree exactly, and
    for carriers straddling a zone edge they diverge.

    Returns the length-N complex measurement vector.
    """
    if len(emitter_signals) != len(carriers_hz):
        raise ValueError("one carrier per emitter signal required")
    n = grid.n_measure
    step = grid.zones
    t = np.arange(n) * grid.t_adc_s
    theta = lo_phase(t, lo)
    y = np.zeros(n, dtype=complex)
    for sig, fc in zip(emitter_signals, carriers_hz):
        if sig.samples.shape[0] != grid.n_nyquist:
            raise ValueError("emitter signal is not on the Nyquist grid of this acquisition")
        m = grid.zone_indices[grid.zone_of(fc)]
        drift_phase = m * 2.0 * np.pi * grid.f_s_hz * lo.drift_s
        y += sig.samples[::step] * np.exp(1j * (m * theta + drift_phase))
    return y
