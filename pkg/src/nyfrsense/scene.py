"""Emitter waveform synthesis, array/RIS combining, and calibrated noise.

All signals are complex analytic sequences on the Nyquist-rate grid of the
acquisition window.  Synthesis is a pure function of (spec, seed), so every
scene is reproducible and safe to generate concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, MetricError, ShapeError, SpanError
from .nyfr import GridSpec, LoPattern

C_LIGHT = 299792458.0  # m/s


class EmitterKind(Enum):
    CW = "cw"
    MONOPULSE = "monopulse"
    BPSK = "bpsk"
    LFM = "lfm"


@dataclass(frozen=True)
class EmitterSpec:
    """One radiating source."""

    kind: EmitterKind
    carrier_hz: float
    amplitude: float = 1.0
    phase0_rad: float = 0.0
    pulse_start_s: float = 0.0
    pulse_len_s: float = math.inf   # inf for continuous wave
    chirp_bw_hz: float = 0.0        # LFM only
    chip_rate_hz: float = 0.0       # BPSK only
    code_seed: int = 0              # BPSK only
    azimuth_rad: float = 0.0

    def __post_init__(self):
        if self.carrier_hz <= 0:
            raise ConfigError("carrier_hz", "must be positive")
        if self.amplitude <= 0:
            raise ConfigError("amplitude", "must be positive")
        if not (-math.pi / 3 < self.azimuth_rad <= math.pi / 3):
            raise ConfigError("azimuth_rad", "must lie in (-pi/3, pi/3]")
        if self.kind is not EmitterKind.CW:
            if not (self.pulse_len_s > 0 and math.isfinite(self.pulse_len_s)):
                raise ConfigError("pulse_len_s", "pulsed emitters need a finite positive length")
        if self.kind is EmitterKind.LFM and self.chirp_bw_hz <= 0:
            raise ConfigError("chirp_bw_hz", "LFM needs a positive sweep bandwidth")
        if self.kind is EmitterKind.BPSK and self.chip_rate_hz <= 0:
            raise ConfigError("chip_rate_hz", "BPSK needs a positive chip rate")

    @property
    def occupied_bw_hz(self) -> float:
        """Nominal occupied bandwidth around the carrier (0 for tones)."""
        if self.kind is EmitterKind.LFM:
            return self.chirp_bw_hz
        return 0.0


@dataclass(frozen=True)
class ArrayGeometry:
    """Element positions along a line, first element at the origin."""

    positions_m: tuple[float, ...]
    beta_rad: float = 0.0  # known direction from swarm toward the collector

    def __post_init__(self):
        if len(self.positions_m) == 0:
            raise ConfigError("positions_m", "at least one element required")
        if self.positions_m[0] != 0.0:
            raise ConfigError("positions_m", "reference element must sit at 0")
        if any(b < a for a, b in zip(self.positions_m, self.positions_m[1:])):
            raise ConfigError("positions_m", "positions must be nondecreasing")

    @classmethod
    def ula(cls, n_elements: int, spacing_m: float, beta_rad: float = 0.0) -> "ArrayGeometry":
        return cls(tuple(m * spacing_m for m in range(n_elements)), beta_rad)


@dataclass(frozen=True)
class RisWeights:
    """Per-element reflection amplitudes and phases."""

    amplitudes: tuple[float, ...]
    phases_rad: tuple[float, ...]

    def __post_init__(self):
        if len(self.amplitudes) != len(self.phases_rad):
            raise ConfigError("phases_rad", "amplitude and phase lists must match")

    @classmethod
    def one_bit(cls, n_elements: int, seed: int) -> "RisWeights":
        """Unit amplitudes with seeded equiprobable {0, pi} phases."""
        rng = np.random.default_rng(seed)
        phases = rng.integers(0, 2, n_elements) * math.pi
        return cls(tuple(1.0 for _ in range(n_elements)), tuple(float(p) for p in phases))


@dataclass
class ComplexSignal:
    """Uniformly sampled complex sequence."""

    samples: np.ndarray
    rate_hz: float
    t0_s: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 1:
            raise ShapeError("samples must be one-dimensional")

    @property
    def duration_s(self) -> float:
        return self.samples.shape[0] / self.rate_hz

    def times(self) -> np.ndarray:
        return self.t0_s + np.arange(self.samples.shape[0]) / self.rate_hz


@dataclass(frozen=True)
class Scenario:
    """Complete description of one acquisition.

    Exactly one topology is active: a reflecting swarm feeding a single
    receiver (``ris`` set, one channel) or a decentralized swarm with one
    receiver per element (``ris`` absent, one channel per receiver).
    """

    emitters: tuple[EmitterSpec, ...]
    geometry: ArrayGeometry
    channels: tuple[LoPattern, ...]
    grid: GridSpec
    ris: Optional[RisWeights] = None
    snr_db: float = math.inf
    seed: int = 0

    def __post_init__(self):
        if len(self.emitters) == 0:
            raise ConfigError("emitters", "at least one emitter required")
        if len(self.channels) == 0:
            raise ConfigError("channels", "at least one channel required")
        if self.ris is not None:
            if len(self.channels) != 1:
                raise ConfigError("channels", "reflecting-swarm topology uses a single receiver")
            if len(self.ris.amplitudes) != len(self.geometry.positions_m):
                raise ConfigError("ris", "one weight per array element required")
        for lo in self.channels:
            if lo.f_s_hz != self.grid.f_s_hz:
                raise ConfigError("channels", "channel ADC rate must match the grid")


def nyquist_times(grid: GridSpec) -> np.ndarray:
    """Sample instants of the Nyquist-rate grid over one window."""
    return np.arange(grid.n_nyquist) / grid.nyquist_rate_hz


def pulse_mask(spec: EmitterSpec, t: np.ndarray) -> np.ndarray:
    """Boolean support of the emitter's pulse on the time grid t."""
    if spec.kind is EmitterKind.CW or math.isinf(spec.pulse_len_s):
        return np.ones_like(t, dtype=bool)
    return (t >= spec.pulse_start_s) & (t < spec.pulse_start_s + spec.pulse_len_s)


def synth_emitter(spec: EmitterSpec, grid: GridSpec) -> ComplexSignal:
    """Synthesize one emitter on the Nyquist-rate grid of the window.

    The waveform is zero outside the pulse window (clipped to the
    observation window).  LFM sweeps linearly from carrier - B/2 to
    carrier + B/2 over the pulse; BPSK draws its +/-1 chips from
    ``code_seed``.
    """
    lo_f, hi_f = grid.span_hz
    if spec.kind is EmitterKind.LFM:
        if spec.carrier_hz - spec.chirp_bw_hz / 2 < lo_f or spec.carrier_hz + spec.chirp_bw_hz / 2 > hi_f:
            raise SpanError(
                f"chirp {spec.carrier_hz:g} Hz +/- {spec.chirp_bw_hz / 2:g} Hz leaves the covered span"
            )
    elif not grid.contains(spec.carrier_hz):
        raise SpanError(f"carrier {spec.carrier_hz:g} Hz outside covered span")

    t = nyquist_times(grid)
    mask = pulse_mask(spec, t)
    if not mask.any():
        raise ConfigError("pulse_start_s", "pulse window does not intersect the observation window")

    phase = spec.phase0_rad + 2.0 * np.pi * spec.carrier_hz * t
    env = mask.astype(float)

    if spec.kind is EmitterKind.LFM:
        tau = np.where(mask, t - spec.pulse_start_s, 0.0)
        rate = spec.chirp_bw_hz / spec.pulse_len_s
        phase = phase + np.pi * rate * tau**2 - np.pi * spec.chirp_bw_hz * tau
    elif spec.kind is EmitterKind.BPSK:
        chip_len = 1.0 / spec.chip_rate_hz
        n_chips = max(1, int(math.ceil(spec.pulse_len_s / chip_len)))
        rng = np.random.default_rng(spec.code_seed)
        chips = rng.integers(0, 2, n_chips) * 2 - 1
        idx = np.clip(((t - spec.pulse_start_s) / chip_len).astype(int), 0, n_chips - 1)
        env = env * chips[idx]

    samples = spec.amplitude * env * np.exp(1j * phase)
    return ComplexSignal(samples, grid.nyquist_rate_hz, 0.0)


def steering_phase(psi_rad: float, phi_k_rad: float, d_m: float, lambda_k_m: float) -> float:
    """Two-way array phase 2 pi (d/lambda) (sin phi + sin psi)."""
    if lambda_k_m <= 0:
        raise ValueError("wavelength must be positive")
    return 2.0 * np.pi * (d_m / lambda_k_m) * (math.sin(phi_k_rad) + math.sin(psi_rad))


def ris_gain(emitter: EmitterSpec, geometry: ArrayGeometry, ris: RisWeights) -> complex:
    """Net complex gain the reflecting array applies to one emitter.

    Sums A_m exp(j alpha_m) exp(j 2 pi (d_m/lambda)(sin phi + sin beta))
    over the elements; time independent, so it scales the waveform.
    """
    lam = C_LIGHT / emitter.carrier_hz
    g = 0.0 + 0.0j
    for a, alpha, d in zip(ris.amplitudes, ris.phases_rad, geometry.positions_m):
        g += a * np.exp(1j * (alpha + steering_phase(geometry.beta_rad, emitter.azimuth_rad, d, lam)))
    return complex(g)


def ris_combine(
    emitter_signals: Sequence[ComplexSignal],
    geometry: ArrayGeometry,
    ris: RisWeights,
    emitters: Sequence[EmitterSpec],
) -> ComplexSignal:
    """Reflected and summed signal at the collector, noise excluded."""
    if len(emitter_signals) != len(emitters):
        raise ShapeError("one signal per emitter required")
    if len(ris.amplitudes) != len(geometry.positions_m):
        raise ShapeError("one reflection weight per array element required")
    ref = emitter_signals[0]
    total = np.zeros_like(ref.samples)
    for sig, spec in zip(emitter_signals, emitters):
        if sig.samples.shape != ref.samples.shape or sig.rate_hz != ref.rate_hz:
            raise ShapeError("emitter signals must share one grid")
        total = total + ris_gain(spec, geometry, ris) * sig.samples
    return ComplexSignal(total, ref.rate_hz, ref.t0_s)


def delay_signal(signal: ComplexSignal, delay_s: float, grid: GridSpec) -> ComplexSignal:
    """Delay by an exact frequency-domain phase ramp (circular in the window).

    The ramp uses the true absolute frequency of every occupied bin, so an
    on-grid tone at f comes back as the undelayed tone times
    exp(-j 2 pi f delay).
    """
    if not math.isfinite(delay_s):
        raise ValueError("delay must be finite")
    if signal.samples.shape[0] != grid.n_nyquist:
        raise ShapeError("signal is not on the Nyquist grid of this acquisition")
    spec = np.fft.fft(signal.samples)
    q = np.arange(grid.n_nyquist) * grid.bin_hz
    f_abs = grid.f_start_hz + np.mod(q - grid.f_start_hz, grid.nyquist_rate_hz)
    out = np.fft.ifft(spec * np.exp(-2j * np.pi * f_abs * delay_s))
    return ComplexSignal(out, signal.rate_hz, signal.t0_s)


def propagation_delays(emitters: Sequence[EmitterSpec], geometry: ArrayGeometry) -> np.ndarray:
    """Far-field delay of emitter k at element p: d_p sin(azimuth_k) / c."""
    d = np.asarray(geometry.positions_m)
    az = np.array([e.azimuth_rad for e in emitters])
    return np.outer(np.sin(az), d) / C_LIGHT  # (K, P) seconds


def delay_combine(
    emitter_signals: Sequence[ComplexSignal],
    delays_s: np.ndarray,
    channel: int,
    grid: GridSpec,
) -> ComplexSignal:
    """Sum of per-emitter signals delayed for one receiver, noise excluded."""
    delays = np.asarray(delays_s, dtype=float)
    if delays.ndim != 2 or delays.shape[0] != len(emitter_signals):
        raise ShapeError("delays must be (n_emitters, n_channels)")
    ref = emitter_signals[0]
    total = np.zeros_like(ref.samples)
    for k, sig in enumerate(emitter_signals):
        total = total + delay_signal(sig, float(delays[k, channel]), grid).samples
    return ComplexSignal(total, ref.rate_hz, ref.t0_s)


def add_awgn(
    signal: ComplexSignal,
    snr_db: float,
    seed: int,
    support: Optional[np.ndarray] = None,
) -> ComplexSignal:
    """Add circular complex Gaussian noise at the requested SNR.

    The reference power is the mean per-sample power over ``support``
    (default: the nonzero samples), so short pulses see the same in-pulse
    SNR as long ones.  Deterministic for a fixed seed.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return ComplexSignal(signal.samples.copy(), signal.rate_hz, signal.t0_s)
    if support is None:
        support = np.abs(signal.samples) > 0
    support = np.asarray(support, dtype=bool)
    if support.shape != signal.samples.shape:
        raise ShapeError("support mask must match the signal length")
    if not support.any():
        raise MetricError("cannot set a finite SNR on an all-zero signal")
    p_sig = float(np.mean(np.abs(signal.samples[support]) ** 2))
    if p_sig == 0.0:
        raise MetricError("cannot set a finite SNR on an all-zero signal")
    var = p_sig * 10.0 ** (-snr_db / 10.0)
    rng = np.random.default_rng(seed)
    n = signal.samples.shape[0]
    noise = rng.normal(scale=math.sqrt(var / 2.0), size=(n, 2))
    return ComplexSignal(
        signal.samples + noise[:, 0] + 1j * noise[:, 1], signal.rate_hz, signal.t0_s
    )
