"""Entanglement measures, each by two independent routes.

The standard route uses closed forms in (r_x, r_y, r_z).  The general route
works on the 4x4 density matrix: Wootters' spin-flip construction for the
concurrence and the partially transposed spectrum for the negativity.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from bellgeom.geometry import (
    Classification,
    DomainError,
    Kind,
    classify,
    distance_to_separable,
)
from bellgeom.qmat import SY, dagger, hermitian_eig_many, psd_sqrt_many
from bellgeom.states import (
    LocalFilter,
    apply_filter,
    partial_transpose,
    pt_eigenvalues,
    standard_eigenvalues,
)

CLIP = 1e-12
FILTER_LAW_TOL = 1e-8

YY = np.kron(SY, SY)


def _clip(v: float) -> float:
    """Round-off below 1e-12 is reported as exactly zero."""
    return 0.0 if v < CLIP else float(v)


def _require_physical(s) -> Classification:
    c = classify(s)
    if c.kind is Kind.NONPHYSICAL:
        raise DomainError(f"point {tuple(s)} lies outside the physical tetrahedron")
    return c


def concurrence_standard(s) -> float:
    if _require_physical(s).kind is Kind.SEPARABLE:
        return 0.0
    return _clip(2.0 * max(standard_eigenvalues(s)) - 1.0)


def negativity_standard(s) -> float:
    if _require_physical(s).kind is Kind.SEPARABLE:
        return 0.0
    return _clip(-2.0 * min(pt_eigenvalues(s)))


def euclidean_distance(s) -> float:
    return _clip(distance_to_separable(s))


def hs_distance_standard(s) -> float:
    """Hilbert-Schmidt distance to the separable set.

    Between Bell-diagonal states ||rho(r) - rho(w)||_2 = |r - w| / 2, so the
    minimum over the octahedron is half the Euclidean distance.
    """
    return _clip(distance_to_separable(s) / 2.0)


def hs_norm(a, b) -> float:
    diff = np.asarray(a) - np.asarray(b)
    return float(np.sqrt(np.real(np.trace(dagger(diff) @ diff))))


def spin_flip(ds) -> np.ndarray:
    """rho~ = (sy (x) sy) rho* (sy (x) sy) for one matrix or a stack."""
    return YY @ np.conj(ds) @ YY


def spin_flip_roots_many(ds) -> np.ndarray:
    """Square roots of the eigenvalues of R = rho rho~, descending.

    These are the singular values of M = sqrt(rho) (sy (x) sy) sqrt(rho)*,
    read off as the top half of the spectrum of the Hermitian dilation
    [[0, M], [M^H, 0]].  Going through the singular values directly avoids
    square-rooting round-off-sized eigenvalues of rank-deficient states.
    """
    ds = np.asarray(ds, dtype=complex)
    root = psd_sqrt_many(ds)
    m = root @ YY @ np.conj(root)
    lead = m.shape[:-2]
    dil = np.zeros(lead + (8, 8), dtype=complex)
    dil[..., :4, 4:] = m
    dil[..., 4:, :4] = dagger(m)
    w = hermitian_eig_many(dil).eigenvalues[..., :4]
    return np.clip(w, 0.0, None)


def concurrence_general_many(ds) -> np.ndarray:
    roots = spin_flip_roots_many(ds)
    c = 2.0 * roots[..., 0] - np.sum(roots, axis=-1)
    return np.where(c < CLIP, 0.0, c)


def concurrence_general(d) -> float:
    return float(concurrence_general_many(np.asarray(d, dtype=complex)[None])[0])


def negativity_general_many(ds) -> np.ndarray:
    w = hermitian_eig_many(partial_transpose(ds)).eigenvalues
    n = -2.0 * w[..., -1]
    return np.where(n < CLIP, 0.0, n)


def negativity_general(d) -> float:
    return float(negativity_general_many(np.asarray(d, dtype=complex)[None])[0])


@dataclass(frozen=True)
class MeasureReport:
    """Standard-route measures of one point; measures are None for non-physical points."""

    state: tuple[float, float, float]
    classification: Classification
    concurrence: float | None = None
    negativity: float | None = None
    euclidean_distance: float | None = None
    hs_distance: float | None = None

    def as_dict(self) -> dict:
        return {
            "r": list(self.state),
            "classification": str(self.classification),
            "concurrence": self.concurrence,
            "negativity": self.negativity,
            "euclidean_distance": self.euclidean_distance,
            "hs_distance": self.hs_distance,
        }


def measure(s) -> MeasureReport:
    s = tuple(float(v) for v in s)
    c = classify(s)
    if c.kind is Kind.NONPHYSICAL:
        return MeasureReport(s, c)
    if c.kind is Kind.SEPARABLE:
        # the classifier's boundary band counts as separable for every measure
        return MeasureReport(s, c, 0.0, 0.0, 0.0, 0.0)
    d = distance_to_separable(s)
    return MeasureReport(
        s,
        c,
        concurrence=_clip(2.0 * max(standard_eigenvalues(s)) - 1.0),
        negativity=_clip(-2.0 * min(pt_eigenvalues(s))),
        euclidean_distance=_clip(d),
        hs_distance=_clip(d / 2.0),
    )


class FilterLaw(NamedTuple):
    predicted: float
    actual: float
    exceeds_one: bool

    @property
    def deviation(self) -> float:
        return abs(self.predicted - self.actual)


def filter_concurrence_law(d, f: LocalFilter) -> FilterLaw:
    """Compare C' = C |det A||det B| / Tr[(A^H A (x) B^H B) rho] with a direct computation.

    ``predicted`` is left unclipped; ``exceeds_one`` flags values above 1.
    """
    after = apply_filter(d, f)
    predicted = concurrence_general(d) * f.det_factor() / f.norm_trace(d)
    actual = concurrence_general(after)
    return FilterLaw(predicted, actual, predicted > 1.0)
