"""Unitary dilation of a bounded matrix via SVD and a completed QR factorization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .numerics import CMatrix, as_cmatrix, max_abs, qr_full, svd, unitarity_error

CLAMP_TOL = 1e-12


class SpectralBoundError(ValueError):
    """The normalization factor is smaller than the spectral norm of the matrix."""


@dataclass(frozen=True)
class DilationResult:
    unitary: CMatrix
    source_dim: int
    normalization: float
    residual: float


@dataclass(frozen=True)
class DilationReport:
    unitarity_err: float
    block_err: float

    def ok(self, tol: float = 1e-11) -> bool:
        return self.unitarity_err <= tol and self.block_err <= tol


def unitary_dilation(m: ArrayLike, norm: float) -> DilationResult:
    """Embed ``M / N`` as the upper-left block of a ``2m x 2m`` unitary.

    With ``M = U S V^dag`` the lower-left block is ``B = sqrt(I - S^2/N^2) V^dag``,
    which makes ``W = [M/N; B]`` an isometry; completing ``W`` with a full QR
    factorization supplies the remaining columns. The unconstrained right
    half is whatever the factorization returns.

    Raises:
        SpectralBoundError: if ``N < |M|`` beyond a 1e-12 tolerance.
    """
    m = as_cmatrix(m, "M")
    k = m.shape[0]
    if m.shape[1] != k:
        raise ValueError(f"dilation expects a square matrix, got {m.shape}")
    if not norm > 0:
        raise SpectralBoundError(f"normalization must be positive, got {norm}")
    _, s, vh = svd(m)
    if s.size and s[0] - norm > CLAMP_TOL:
        raise SpectralBoundError(
            f"normalization violates spectral bound: N = {norm:.15g} < |M| = {s[0]:.15g}"
        )
    gap = 1.0 - (s / norm) ** 2
    gap[(gap < 0) & (gap >= -CLAMP_TOL)] = 0.0
    gap = np.clip(gap, 0.0, None)
    b = np.sqrt(gap)[:, None] * vh
    w = np.vstack([m / norm, b])
    q, _ = qr_full(w)
    # the phase-fixed Q already agrees with W to rounding; pin it exactly
    q[:, :k] = w
    residual = max_abs(q[:k, :k] - m / norm)
    return DilationResult(unitary=q, source_dim=k, normalization=float(norm), residual=residual)


def verify_dilation(r: DilationResult, m: ArrayLike, norm: float) -> DilationReport:
    m = as_cmatrix(m, "M")
    k = m.shape[0]
    return DilationReport(
        unitarity_err=unitarity_error(r.unitary),
        block_err=max_abs(r.unitary[:k, :k] - m / norm),
    )
