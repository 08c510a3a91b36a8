"""Gram matrix structure, Gershgorin isometry certificates, block coherence.

The Gram of the acquisition operator is block structured: identity blocks
on the zone diagonal and circulant cross-zone blocks whose first row is the
inverse DFT of the zone modulation difference sequence.  That closed form
makes full-scale diagnostics cheap: every entry magnitude, the per-lag
profile, and exact singular values of the zone blocks come from Z^2 FFTs
of length N instead of a dense Z N x Z N product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityError, ShapeError
from .nyfr import GridSpec, LoPattern
from .sensing import BlockPartition, SensingOperator

CERT_TOL = 1e-9  # absolute tolerance on certification threshold comparisons


def modulation_difference_rows(op: SensingOperator, normalized: bool = True) -> np.ndarray:
    """Circulant generator rows of every Gram block.

    Returns R of shape (Z, Z, N) where the Gram entry coupling (zone i,
    row r) with (zone j, column c) is R[i, j, (c - r) mod N].  R[i, j] is
    the inverse DFT of the channel-averaged sequence conj(theta_i) *
    theta_j, and its DFT values (the plain diagonal differences) are the
    eigenvalues of the corresponding circulant block.
    """
    z = op.grid.zones
    n = op.grid.n_measure
    rows = np.zeros((z, z, n), dtype=complex)
    for p in range(op.n_channels):
        mod = op.modulations[p]
        for i in range(z):
            diff = mod[i].conj()[None, :] * mod  # (Z, N), row j = conj(theta_i) theta_j
            rows[i] += np.fft.ifft(diff, axis=1)
    scale = op.n_channels if normalized else 1
    return rows / scale


def block_eigenvalues(op: SensingOperator, i: int, j: int, normalized: bool = True) -> np.ndarray:
    """Exact eigenvalues of the (i, j) Gram block (it is circulant)."""
    acc = np.zeros(op.grid.n_measure, dtype=complex)
    for p in range(op.n_channels):
        acc += op.modulations[p][i].conj() * op.modulations[p][j]
    return acc / (op.n_channels if normalized else 1)


def t_block_closed_form(i: int, j: int, lo: LoPattern, grid: GridSpec) -> np.ndarray:
    """Dense N x N cross-zone Gram block of the single-channel operator.

    Equal zones give the identity.  Off the diagonal the block is circulant
    with first row ifft(conj(theta_i) * theta_j); every entry has magnitude
    strictly below one whenever the phase modulation is nonzero somewhere.
    """
    n = grid.n_measure
    if i == j:
        return np.eye(n, dtype=complex)
    op = SensingOperator(grid, [lo])
    row = np.fft.ifft(block_eigenvalues(op, i, j, normalized=False))
    idx = np.mod(np.arange(n)[None, :] - np.arange(n)[:, None], n)
    return row[idx]


def gram_dense(op: SensingOperator, normalized: bool = True) -> np.ndarray:
    """Dense Gram H^H H (divided by the channel count when normalized).

    Subject to the operator's dense memory cap; large instances should use
    the circulant path instead.
    """
    zn = op.grid.n_nyquist
    if zn * zn * 16 > op.dense_cap_bytes:
        raise CapacityError("dense Gram exceeds the memory cap; use the circulant path")
    h = op.dense()
    g = h.conj().T @ h
    return g / op.n_channels if normalized else g


def gram_submatrix(rows: np.ndarray, grid: GridSpec, row_idx: np.ndarray, col_idx: np.ndarray) -> np.ndarray:
    """Arbitrary Gram entries reconstructed from the circulant rows."""
    a = np.asarray(row_idx, dtype=int)
    b = np.asarray(col_idx, dtype=int)
    n = grid.n_measure
    za, ra = np.divmod(a, n)
    zb, cb = np.divmod(b, n)
    return rows[za[:, None], zb[None, :], np.mod(cb[None, :] - ra[:, None], n)]


@dataclass
class LagProfile:
    """Per column-lag maxima and means of off-diagonal Gram magnitudes."""

    lags: np.ndarray      # 1 .. ZN-1
    max_abs: np.ndarray
    mean_abs: np.ndarray

    def at_zone_lags(self, grid: GridSpec) -> dict[int, float]:
        """Maxima at lags that are multiples of N (the folding intervals)."""
        out = {}
        for k in range(1, grid.zones):
            out[k * grid.n_measure] = float(self.max_abs[k * grid.n_measure - 1])
        return out


def lag_profile(rows: np.ndarray, grid: GridSpec) -> LagProfile:
    """Fold the circulant rows into a positive-lag magnitude profile."""
    z = grid.zones
    n = grid.n_measure
    zn = z * n
    mx = np.zeros(zn - 1)
    acc = np.zeros(zn - 1)
    cnt = np.zeros(zn - 1, dtype=int)
    for i in range(z):
        for j in range(i, z):
            mags = np.abs(rows[i, j])
            lo_delta = 1 if i == j else -(n - 1)
            for delta in range(lo_delta, n):
                lag = (j - i) * n + delta
                if lag < 1:
                    continue
                a = mags[delta % n]
                k = n - abs(delta)
                pos = lag - 1
                if a > mx[pos]:
                    mx[pos] = a
                acc[pos] += a * k
                cnt[pos] += k
    mean = np.divide(acc, cnt, out=np.zeros_like(acc), where=cnt > 0)
    return LagProfile(np.arange(1, zn), mx, mean)


def certified_order(offdiag_max: float, max_order: int) -> int:
    """Largest s with (s - 1) * g below 1, compared at CERT_TOL."""
    if offdiag_max <= 0.0:
        return max_order
    s = 1 + int(math.floor((1.0 - CERT_TOL) / offdiag_max))
    return max(1, min(s, max_order))


def rip_certificate(offdiag_max: float, order: int) -> dict:
    """Gershgorin certificate for a target sparsity order.

    The bound (s - 1) * g on the isometry constant is sufficient only;
    the result reports a certified order, never an exact constant.
    """
    if not 0.0 <= offdiag_max <= 1.0:
        raise ValueError("offdiag_max must lie in [0, 1]")
    delta = (order - 1) * offdiag_max
    return {
        "order": order,
        "delta_bound": delta,
        "certified": bool(delta < 1.0 - CERT_TOL),
    }


@dataclass
class GramReport:
    """Summary of the Gram structure of one acquisition operator."""

    diag_max_dev: float
    offdiag_max: float
    profile: LagProfile
    rip_order: int
    normalized: bool
    n_channels: int
    grid: GridSpec

    def zone_lag_maxima(self) -> dict[int, float]:
        return self.profile.at_zone_lags(self.grid)

    def to_json(self) -> dict:
        return {
            "diag_max_dev": self.diag_max_dev,
            "offdiag_max": self.offdiag_max,
            "rip_order": self.rip_order,
            "normalized": self.normalized,
            "n_channels": self.n_channels,
            "zone_lag_maxima": {str(k): v for k, v in self.zone_lag_maxima().items()},
            "certificates": [rip_certificate(self.offdiag_max, s) for s in range(2, self.rip_order + 2)],
        }


def gram_report(op: SensingOperator, normalized: bool = True) -> GramReport:
    """Full-structure report via the circulant closed form."""
    grid = op.grid
    rows = modulation_difference_rows(op, normalized=normalized)
    n = grid.n_measure
    diag_dev = 0.0
    offdiag = 0.0
    for i in range(grid.zones):
        for j in range(grid.zones):
            mags = np.abs(rows[i, j])
            if i == j:
                diag_dev = max(diag_dev, float(abs(rows[i, i, 0] - 1.0)))
                if n > 1:
                    offdiag = max(offdiag, float(mags[1:].max()))
            else:
                offdiag = max(offdiag, float(mags.max()))
    profile = lag_profile(rows, grid)
    return GramReport(
        diag_max_dev=diag_dev,
        offdiag_max=offdiag,
        profile=profile,
        rip_order=certified_order(offdiag, grid.n_measure * op.n_channels),
        normalized=normalized,
        n_channels=op.n_channels,
        grid=grid,
    )


@dataclass
class BlockCoherenceReport:
    """Sub-coherence, block coherence, and the resulting isometry bound."""

    nu: float            # worst intra-block deviation from identity
    mu: float            # worst cross-block spectral norm over d
    d: int               # block length entering the bound (max length)
    partition: BlockPartition
    normalized: bool

    def bric(self, s_blocks: int) -> float:
        """Isometry-constant bound (d - 1) nu + (s - 1) d mu."""
        return (self.d - 1) * self.nu + (s_blocks - 1) * self.d * self.mu

    def certified_block_order(self, max_order: Optional[int] = None) -> int:
        cap = max_order if max_order is not None else self.partition.n_blocks
        s = 1
        while s + 1 <= cap and self.bric(s + 1) < 1.0 - CERT_TOL:
            s += 1
        return s

    def to_json(self) -> dict:
        return {
            "nu": self.nu,
            "mu": self.mu,
            "d": self.d,
            "d_mu": self.d * self.mu,
            "block_lengths": list(self.partition.lengths),
            "normalized": self.normalized,
            "bric": {str(s): self.bric(s) for s in range(1, min(self.partition.n_blocks, 8) + 1)},
            "certified_block_order": self.certified_block_order(),
        }


def block_coherence(op: SensingOperator, partition: BlockPartition, normalized: bool = True) -> BlockCoherenceReport:
    """Block coherence constants of the Gram over a spectrum partition.

    The zone partition is evaluated exactly: its blocks are circulant, so
    spectral radii and norms are magnitudes of the closed-form eigenvalues.
    Other partitions slice the Gram from the circulant rows and use dense
    eigen/singular decompositions per block pair.
    """
    grid = op.grid
    if partition.total != grid.n_nyquist:
        raise ShapeError("partition must cover the whole spectrum")

    if partition.lengths == (grid.n_measure,) * grid.zones:
        nu = 0.0
        sigma_max = 0.0
        for i in range(grid.zones):
            for j in range(grid.zones):
                eig = block_eigenvalues(op, i, j, normalized=normalized)
                if i == j:
                    nu = max(nu, float(np.abs(eig - 1.0).max()))
                else:
                    sigma_max = max(sigma_max, float(np.abs(eig).max()))
        d = grid.n_measure
        return BlockCoherenceReport(nu, sigma_max / d, d, partition, normalized)

    rows = modulation_difference_rows(op, normalized=normalized)
    d = max(partition.lengths)
    nu = 0.0
    sigma_max = 0.0
    for c in range(partition.n_blocks):
        ic = partition.indices(c)
        mcc = gram_submatrix(rows, grid, ic, ic)
        ev = np.linalg.eigvalsh(mcc)
        nu = max(nu, float(np.abs(ev - 1.0).max()))
        for r in range(partition.n_blocks):
            if r == c:
                continue
            mcr = gram_submatrix(rows, grid, ic, partition.indices(r))
            sv = np.linalg.svd(mcr, compute_uv=False)
            sigma_max = max(sigma_max, float(sv[0]))
    return BlockCoherenceReport(nu, sigma_max / d, d, partition, normalized)


def _zone_band_means(report: GramReport) -> dict[int, float]:
    """Mean of the per-lag maxima over a band around each fold interval.

    Channel averaging cannot shrink the entry at exactly lag k N when the
    channels share a modulation amplitude (those are the modulation DC
    terms), but it thins out the sideband skirt next to it; this aggregate
    captures that.
    """
    grid = report.grid
    n = grid.n_measure
    half = max(1, n // 8)
    out = {}
    for k in range(1, grid.zones):
        center = k * n - 1  # profile index of lag k N
        lo = max(0, center - half)
        hi = min(report.profile.max_abs.shape[0], center + half + 1)
        out[k * n] = float(report.profile.max_abs[lo:hi].mean())
    return out


def multichannel_gram_compare(single: GramReport, multi: GramReport) -> dict:
    """Side-by-side zone-lag coherence of two reports (same grid)."""
    if single.grid != multi.grid:
        raise ShapeError("reports must share a grid")
    s_lags = single.zone_lag_maxima()
    m_lags = multi.zone_lag_maxima()
    s_bands = _zone_band_means(single)
    m_bands = _zone_band_means(multi)
    return {
        "single_offdiag_max": single.offdiag_max,
        "multi_offdiag_max": multi.offdiag_max,
        "single_zone_lag_maxima": {str(k): v for k, v in s_lags.items()},
        "multi_zone_lag_maxima": {str(k): v for k, v in m_lags.items()},
        "single_zone_band_means": {str(k): v for k, v in s_bands.items()},
        "multi_zone_band_means": {str(k): v for k, v in m_bands.items()},
        "multi_improves_offdiag": multi.offdiag_max < single.offdiag_max,
        "multi_improves_zone_lags": all(m_lags[k] < s_lags[k] for k in s_lags),
        "multi_improves_zone_bands": all(m_bands[k] < s_bands[k] for k in s_bands),
    }
