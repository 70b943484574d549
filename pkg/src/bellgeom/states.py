"""Two-qubit state representations.

Basis ordering is |00>, |01>, |10>, |11> throughout; the Kronecker
convention puts subsystem A on the left.  Partial transposition acts on B.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from bellgeom.qmat import PAULI, as_matrix, dagger, det2, kron

TRACE_TOL = 1e-12
IMAG_TOL = 1e-10
DET_TOL = 1e-12
NORM_TOL = 1e-12

# PAULI_BASIS[mu, nu] = sigma_mu (x) sigma_nu
PAULI_BASIS = np.array([[kron(a, b) for b in PAULI] for a in PAULI])


class NormalizationError(ValueError):
    pass


class FilterError(ValueError):
    pass


class StandardState(NamedTuple):
    """Point (r_x, r_y, r_z) of a Bell-diagonal state; need not be physical."""

    x: float
    y: float
    z: float

    @classmethod
    def of(cls, r) -> "StandardState":
        x, y, z = (float(v) for v in r)
        return cls(x, y, z)


def from_pauli(t) -> np.ndarray:
    r = np.asarray(t, dtype=float)
    if r.shape != (4, 4):
        raise ValueError(f"Pauli tensor must be 4x4, got {r.shape}")
    if abs(r[0, 0] - 1.0) > TRACE_TOL:
        raise NormalizationError(f"r_00 must be 1 (unit trace), got {r[0, 0]!r}")
    return 0.25 * np.einsum("mn,mnij->ij", r, PAULI_BASIS)


def to_pauli(d) -> np.ndarray:
    """Coefficients r_{mu nu} = Tr[d sigma_mu (x) sigma_nu]."""
    d = as_matrix(d, 4)
    # Tr[d P] = sum_ij d_ij P_ji
    r = np.einsum("ij,mnji->mn", d, PAULI_BASIS)
    worst = float(np.max(np.abs(r.imag)))
    if worst > IMAG_TOL:
        raise ValueError(f"input is not Hermitian: Pauli coefficient has imaginary part {worst:.3g}")
    return r.real.copy()


def from_standard_many(rs) -> np.ndarray:
    rs = np.asarray(rs, dtype=float)
    diag = PAULI_BASIS[[1, 2, 3], [1, 2, 3]]
    return 0.25 * (np.eye(4) + np.einsum("...k,kij->...ij", rs, diag))


def from_standard(s) -> np.ndarray:
    return from_standard_many(tuple(s))


def standard_eigenvalues(s) -> tuple[float, float, float, float]:
    x, y, z = s
    return (
        (1 + x - y + z) / 4,
        (1 - x + y + z) / 4,
        (1 + x + y - z) / 4,
        (1 - x - y - z) / 4,
    )


def pt_eigenvalues(s) -> tuple[float, float, float, float]:
    x, y, z = s
    return (
        (1 + x + y + z) / 4,
        (1 - x - y + z) / 4,
        (1 + x - y - z) / 4,
        (1 - x + y - z) / 4,
    )


def standard_eigenvalues_many(rs) -> np.ndarray:
    rs = np.asarray(rs, dtype=float)
    x, y, z = rs[..., 0], rs[..., 1], rs[..., 2]
    return np.stack(standard_eigenvalues((x, y, z)), axis=-1)


def pt_eigenvalues_many(rs) -> np.ndarray:
    rs = np.asarray(rs, dtype=float)
    x, y, z = rs[..., 0], rs[..., 1], rs[..., 2]
    return np.stack(pt_eigenvalues((x, y, z)), axis=-1)


def partial_transpose(d) -> np.ndarray:
    """Transpose subsystem B of a 4x4 matrix (or a stack of them)."""
    d = np.asarray(d, dtype=complex)
    lead = d.shape[:-2]
    t = d.reshape(lead + (2, 2, 2, 2))
    n = len(lead)
    axes = list(range(n)) + [n, n + 3, n + 2, n + 1]
    return np.transpose(t, axes).reshape(lead + (4, 4))


@dataclass(frozen=True)
class LocalFilter:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.a, 2)
        b = as_matrix(self.b, 2)
        for name, m in (("A", a), ("B", b)):
            if abs(det2(m)) <= DET_TOL:
                raise FilterError(f"filter not invertible: |det {name}| <= {DET_TOL:g}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def operator(self) -> np.ndarray:
        return kron(self.a, self.b)

    def det_factor(self) -> float:
        return abs(det2(self.a)) * abs(det2(self.b))

    def norm_trace(self, d) -> float:
        """Tr[(A^H A (x) B^H B) d], the normalization of the filtered state."""
        g = kron(dagger(self.a) @ self.a, dagger(self.b) @ self.b)
        return float(np.real(np.trace(g @ as_matrix(d, 4))))


def apply_filter(d, f: LocalFilter) -> np.ndarray:
    d = as_matrix(d, 4)
    k = f.operator
    out = k @ d @ dagger(k)
    tr = float(np.real(np.trace(out)))
    if tr <= NORM_TOL:
        raise FilterError("filter annihilates the state (vanishing normalization trace)")
    out = out / tr
    return 0.5 * (out + dagger(out))


def is_standard_form(d, tol: float = 1e-12) -> tuple[bool, StandardState | None]:
    r = to_pauli(d)
    off = r[1:, 1:] - np.diag(np.diag(r[1:, 1:]))
    worst = max(np.max(np.abs(r[0, 1:])), np.max(np.abs(r[1:, 0])), np.max(np.abs(off)))
    if worst > tol:
        return False, None
    return True, StandardState(float(r[1, 1]), float(r[2, 2]), float(r[3, 3]))
