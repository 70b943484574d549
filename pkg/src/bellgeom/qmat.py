"""Small dense complex linear algebra (2x2, 4x4, and the 8x8 dilations built from 4x4 blocks).

Matrices are plain ``numpy.complex128`` arrays.  The only eigensolver is a
cyclic Jacobi method for Hermitian input, written out here rather than taken
from LAPACK so that every spectrum in the package comes from one audited
routine.  It works on stacks of matrices (shape ``(..., n, n)``) so batch
callers pay the Python overhead once per rotation, not once per matrix.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_CLAMP = 1e-10
DEFAULT_TOL = 1e-13
MAX_SWEEPS = 100

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (I2, SX, SY, SZ)


class ShapeError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


class HermitianEig(NamedTuple):
    """Eigenvalues sorted descending; column k of ``eigenvectors`` pairs with value k."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(m, dim: int | None = None) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise ShapeError(f"expected {dim}x{dim}, got {a.shape[0]}x{a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def kron(a, b) -> np.ndarray:
    a = as_matrix(a, 2)
    b = as_matrix(b, 2)
    out = np.empty((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            out[2 * i:2 * i + 2, 2 * j:2 * j + 2] = a[i, j] * b
    return out


def det2(m) -> complex:
    m = as_matrix(m, 2)
    return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m)), initial=0.0))


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[..., mask]) ** 2, axis=-1))


def _jacobi(a: np.ndarray, tol: float):
    """Diagonalize a stack of Hermitian matrices in place; returns (a, v)."""
    n = a.shape[-1]
    batch = a.shape[:-2]
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    # round-off floor scales with the matrix, so the threshold does too
    tol = tol * np.maximum(1.0, np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1))))
    for _ in range(MAX_SWEEPS):
        if np.all(_offdiag_norm(a) < tol):
            return a, v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[..., p, q]
                mag = np.abs(apq)
                live = mag > 0.0
                safe = np.where(live, mag, 1.0)
                phase = np.where(live, apq / safe, 1.0)
                app = a[..., p, p].real
                aqq = a[..., q, q].real
                # stable small-angle root of t^2 + 2 tau t - 1 = 0
                tau = (aqq - app) / (2.0 * safe)
                big = np.abs(tau) > 1e150
                tau_s = np.where(big, 1.0, tau)
                t = np.where(tau_s >= 0, 1.0, -1.0) / (np.abs(tau_s) + np.sqrt(1.0 + tau_s * tau_s))
                t = np.where(big, 0.5 / np.where(big, tau, 1.0), t)
                t = np.where(live, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] restricted to (p, q)
                j = np.empty(batch + (2, 2), dtype=complex)
                j[..., 0, 0] = c
                j[..., 0, 1] = s
                j[..., 1, 0] = -s * np.conj(phase)
                j[..., 1, 1] = c * np.conj(phase)
                idx = [p, q]
                a[..., :, idx] = a[..., :, idx] @ j
                a[..., idx, :] = dagger(j) @ a[..., idx, :]
                v[..., :, idx] = v[..., :, idx] @ j
                a[..., p, q] = 0.0
                a[..., q, p] = 0.0
                a[..., p, p] = a[..., p, p].real
                a[..., q, q] = a[..., q, q].real
    if np.all(_offdiag_norm(a) < tol):
        return a, v
    raise ConvergenceError(f"Jacobi did not converge within {MAX_SWEEPS} sweeps")


def hermitian_eig_many(ms, tol: float = DEFAULT_TOL) -> HermitianEig:
    """Batched form of :func:`hermitian_eig` over a ``(..., n, n)`` stack."""
    a = np.array(ms, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ShapeError(f"expected a stack of square matrices, got shape {a.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    defect = hermiticity_defect(a)
    if defect > HERMITIAN_TOL:
        raise NotHermitianError(f"matrix is not Hermitian (max |m - m^H| = {defect:.3g})")
    a = 0.5 * (a + dagger(a))
    a, v = _jacobi(a, tol)
    w = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return HermitianEig(w, v)


def hermitian_eig(m, tol: float = DEFAULT_TOL) -> HermitianEig:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm is below
    ``tol * max(1, ||m||_F)``.  Raises NotHermitianError if any entry of
    ``m - m^H`` exceeds 1e-10 and ConvergenceError if the threshold is not
    reached within 100 sweeps.
    """
    return hermitian_eig_many(as_matrix(m), tol)


def psd_sqrt_many(ms) -> np.ndarray:
    w, v = hermitian_eig_many(ms)
    low = float(np.min(w, initial=0.0))
    if low < -PSD_CLAMP:
        raise NotPSDError(f"matrix has eigenvalue {low:.3g} < -{PSD_CLAMP:g}")
    root = np.sqrt(np.clip(w, 0.0, None))
    out = (v * root[..., None, :]) @ dagger(v)
    return 0.5 * (out + dagger(out))


def psd_sqrt(m) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues in [-1e-10, 0] are treated as 0."""
    return psd_sqrt_many(as_matrix(m))
