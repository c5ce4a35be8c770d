"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The helpers here
add input validation, the phase convention for the full QR factorization and
a dimension cap that keeps desk-scale runs bounded.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

CMatrix = NDArray[np.complex128]

DIM_CAP = 2**14


class DimensionError(ValueError):
    """Raised when a dense object would exceed the configured size cap."""


class NotHermitianError(ValueError):
    """Raised by :func:`eigh` when the input is not Hermitian."""

    def __init__(self, asymmetry: float) -> None:
        super().__init__(f"matrix is not Hermitian: max |H - H^dag| = {asymmetry:.3e}")
        self.asymmetry = asymmetry


class ConvergenceError(RuntimeError):
    """Raised when an underlying LAPACK routine fails to converge."""


def as_cmatrix(a: ArrayLike, name: str = "matrix") -> CMatrix:
    """Return ``a`` as a finite 2D complex array, raising ``ValueError`` otherwise."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def svd(m: ArrayLike) -> tuple[CMatrix, NDArray[np.float64], CMatrix]:
    """Full singular value decomposition ``M = U diag(sigma) Vdag``.

    ``sigma`` is non-negative and sorted in descending order; ``U`` and
    ``Vdag`` are square unitaries.
    """
    m = as_cmatrix(m)
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge: {exc}") from exc
    return u, s, vh


def qr_full(w: ArrayLike) -> tuple[CMatrix, CMatrix]:
    """Complete QR factorization of a ``2m x m`` matrix.

    The column phases of ``Q`` are fixed so that the diagonal of ``R`` is
    real and non-negative. For ``W`` with orthonormal columns this makes the
    first ``m`` columns of ``Q`` coincide with ``W`` (up to rounding), since
    an upper-triangular unitary with positive diagonal is the identity.

    Returns:
        ``(Q, R)`` with ``Q`` of shape ``(2m, 2m)`` and ``R`` of shape ``(2m, m)``.
    """
    w = as_cmatrix(w, "W")
    rows, cols = w.shape
    if rows != 2 * cols:
        raise ValueError(f"qr_full expects rows == 2*cols, got {w.shape}")
    try:
        q, r = np.linalg.qr(w, mode="complete")
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"QR did not converge: {exc}") from exc
    d = np.diagonal(r[:cols]).copy()
    mag = np.abs(d)
    phase = np.where(mag > 0, d / np.where(mag > 0, mag, 1.0), 1.0)
    q = q.copy()
    r = r.copy()
    q[:, :cols] *= phase[None, :]
    r[:cols] *= np.conj(phase)[:, None]
    return q, r


def spectral_norm(m: ArrayLike) -> float:
    """Largest singular value of ``m`` (0 for an empty or zero matrix)."""
    m = as_cmatrix(m)
    if m.size == 0:
        return 0.0
    try:
        s = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge: {exc}") from exc
    return float(s[0])


def eigh(h: ArrayLike, tol: float = 1e-10) -> tuple[NDArray[np.float64], CMatrix]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises:
        NotHermitianError: if ``max |H - H^dag|`` exceeds ``tol``.
    """
    h = as_cmatrix(h, "H")
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"eigh expects a square matrix, got {h.shape}")
    asym = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if asym > tol:
        raise NotHermitianError(asym)
    try:
        vals, vecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigh did not converge: {exc}") from exc
    return vals, vecs


def kron(a: ArrayLike, b: ArrayLike, cap: int = DIM_CAP) -> CMatrix:
    """Kronecker product with a cap on the resulting row/column dimension."""
    a = as_cmatrix(a, "A")
    b = as_cmatrix(b, "B")
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > cap:
        raise DimensionError(f"kron result {rows}x{cols} exceeds cap {cap}")
    return np.kron(a, b)


def kron_all(*mats: ArrayLike, cap: int = DIM_CAP) -> CMatrix:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = kron(out, m, cap=cap)
    return out


def max_abs(m: ArrayLike) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def unitarity_error(u: ArrayLike) -> float:
    """``max |U^dag U - I|``."""
    u = np.asarray(u, dtype=np.complex128)
    return max_abs(u.conj().T @ u - np.eye(u.shape[1]))


I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)

PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}
