"""Greedy sparse and block-sparse spectrum recovery.

Both solvers walk the matrix-free operator: pick the atom (or block) whose
correlation with the residual is largest, refit by least squares on the
grown support, and stop at the support budget or the residual threshold.
Ties break toward the lowest index so runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import ConfigError, ShapeError
from .sensing import BlockPartition, SensingOperator, SpectrumVector

RIDGE = 1e-12  # regularization used only when the support system is singular


class RecoveryMode(Enum):
    SPARSE = "sparse"
    BLOCK = "block"


@dataclass(frozen=True)
class RecoveryConfig:
    mode: RecoveryMode = RecoveryMode.SPARSE
    max_support: int = 1          # atoms (sparse) or blocks (block mode)
    residual_tol: float = 1e-8    # relative l2 stopping threshold
    partition: Optional[BlockPartition] = None

    def __post_init__(self):
        if self.max_support < 1:
            raise ConfigError("max_support", "must be at least 1")
        if not 0.0 < self.residual_tol < 1.0:
            raise ConfigError("residual_tol", "must lie in (0, 1)")
        if self.mode is RecoveryMode.BLOCK and self.partition is None:
            raise ConfigError("partition", "block mode needs a partition")


@dataclass
class RecoveryResult:
    support: tuple[int, ...]            # flat spectrum indices, selection order
    coefficients: np.ndarray            # complex values aligned with support
    spectrum: SpectrumVector            # zero off the support
    residual_norm: float                # relative l2 residual
    iterations: int
    blocks: tuple[int, ...] = ()        # selected block indices (block mode)
    ridge_used: bool = False
    residual_history: tuple[float, ...] = ()

    def to_json(self) -> dict:
        return {
            "support": list(self.support),
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "blocks": list(self.blocks),
            "ridge_used": self.ridge_used,
        }


def _refit(op: SensingOperator, y: np.ndarray, support: list[int]) -> tuple[np.ndarray, np.ndarray, bool]:
    """Least-squares coefficients on the support; ridge only if singular."""
    a = op.columns(support)
    gram = a.conj().T @ a
    rhs = a.conj().T @ y
    ridge_used = False
    try:
        coeff = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        coeff = np.linalg.solve(gram + RIDGE * np.eye(gram.shape[0]), rhs)
        ridge_used = True
    if not np.all(np.isfinite(coeff)):
        coeff = np.linalg.solve(gram + RIDGE * np.eye(gram.shape[0]), rhs)
        ridge_used = True
    return coeff, y - a @ coeff, ridge_used


def _empty_result(op: SensingOperator) -> RecoveryResult:
    return RecoveryResult(
        support=(),
        coefficients=np.zeros(0, dtype=complex),
        spectrum=SpectrumVector.zeros(op.grid),
        residual_norm=0.0,
        iterations=0,
    )


def _run_greedy(y: np.ndarray, op: SensingOperator, cfg: RecoveryConfig) -> RecoveryResult:
    y = np.asarray(y, dtype=complex)
    if y.shape != (op.shape[0],):
        raise ShapeError(f"expected measurements of length {op.shape[0]}")
    block_mode = cfg.mode is RecoveryMode.BLOCK
    if block_mode:
        partition = cfg.partition
        if partition.total != op.grid.n_nyquist:
            raise ShapeError("partition must cover the whole spectrum")
        starts = partition.starts()
    y_norm = float(np.linalg.norm(y))
    if y_norm == 0.0:
        return _empty_result(op)

    support: list[int] = []
    blocks: list[int] = []
    residual = y
    rel = 1.0
    history: list[float] = []
    ridge_used = False
    coeff = np.zeros(0, dtype=complex)

    while len(blocks if block_mode else support) < cfg.max_support and rel > cfg.residual_tol:
        corr = op.adjoint(residual)
        if block_mode:
            scores = np.array(
                [np.linalg.norm(corr[s:s + d]) for s, d in zip(starts, partition.lengths)]
            )
            scores[blocks] = -1.0
            pick = int(np.argmax(scores))
            if scores[pick] <= 0.0:
                break
            blocks.append(pick)
            support.extend(int(i) for i in partition.indices(pick))
        else:
            mags = np.abs(corr)
            if support:
                mags[support] = -1.0
            pick = int(np.argmax(mags))
            if mags[pick] <= 0.0:
                break
            support.append(pick)

        coeff, residual, used = _refit(op, y, support)
        ridge_used = ridge_used or used
        new_rel = float(np.linalg.norm(residual)) / y_norm
        if history and new_rel > history[-1] + 1e-7:
            raise RuntimeError("least-squares refit increased the residual")
        history.append(new_rel)
        rel = new_rel

    x = np.zeros(op.grid.n_nyquist, dtype=complex)
    if support:
        x[support] = coeff
    return RecoveryResult(
        support=tuple(support),
        coefficients=coeff.copy(),
        spectrum=SpectrumVector(x, op.grid),
        residual_norm=rel if support else 1.0,
        iterations=len(history),
        blocks=tuple(blocks),
        ridge_used=ridge_used,
        residual_history=tuple(history),
    )


def omp(y: np.ndarray, op: SensingOperator, cfg: RecoveryConfig) -> RecoveryResult:
    """Orthogonal matching pursuit over the flat spectrum grid."""
    if cfg.mode is not RecoveryMode.SPARSE:
        raise ConfigError("mode", "omp expects a sparse-mode config")
    return _run_greedy(y, op, cfg)


def bomp(y: np.ndarray, op: SensingOperator, cfg: RecoveryConfig) -> RecoveryResult:
    """Block matching pursuit: selects whole partition blocks at a time."""
    if cfg.mode is not RecoveryMode.BLOCK:
        raise ConfigError("mode", "bomp expects a block-mode config")
    return _run_greedy(y, op, cfg)


def reconstruct_time(spectrum: SpectrumVector):
    """Unitary inverse DFT of the coefficient vector (length Z N).

    The forward unitary DFT of the result returns the coefficients exactly;
    see :func:`nyfrsense.sensing.nyquist_from_spectrum` for the variant that
    reorders zone-stacked bins onto the physical frequency axis first.
    """
    from .scene import ComplexSignal

    zn = spectrum.grid.n_nyquist
    samples = np.fft.ifft(spectrum.coefficients) * np.sqrt(zn)
    return ComplexSignal(samples, spectrum.grid.nyquist_rate_hz, 0.0)
