"""Sampled checks of the identities linking the measures to the geometry.

Each check reports the largest deviation seen over its sample and the
tolerance it must stay within.  ``run_checks`` is what ``bellgeom verify``
prints.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from bellgeom import geometry, measures
from bellgeom.states import from_standard_many, standard_eigenvalues_many

SQRT3 = math.sqrt(3.0)
COMPETITORS = 100


@dataclass(frozen=True)
class Check:
    name: str
    deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tol)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict}  {self.name:<28} max_dev={self.deviation:.3e}  tol={self.tol:.0e}"


def halfspace_members(rs) -> np.ndarray:
    """Membership in both tetrahedra via their eight face inequalities 1 +- x +- y +- z >= 0."""
    rs = np.asarray(rs, dtype=float)
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=3)))
    return np.all(1.0 + rs @ signs.T >= 0.0, axis=-1)


def random_product_mixtures(n: int, rng: np.random.Generator, components: int = 4) -> np.ndarray:
    """Pauli tensors of n random mixtures of pure product states, shape (n, 4, 4)."""

    def bloch(shape):
        v = rng.normal(size=shape + (3,))
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    ones = np.ones((n, components, 1))
    a = np.concatenate([ones, bloch((n, components))], axis=-1)
    b = np.concatenate([ones, bloch((n, components))], axis=-1)
    p = rng.dirichlet(np.ones(components), size=n)
    return np.einsum("nk,nki,nkj->nij", p, a, b)


def hs_brute_force(s, n_mixtures: int, rng: np.random.Generator) -> float:
    """Smallest ||rho(s) - omega||_2 over random separable omega.

    Uses ||rho - omega||_2^2 = sum (r_mn - w_mn)^2 / 4 in the Pauli basis.
    """
    r = np.diag([1.0, *s])
    w = random_product_mixtures(n_mixtures, rng)
    return float(np.sqrt(np.min(np.sum((w - r) ** 2, axis=(1, 2)) / 4.0)))


def run_checks(
    n: int,
    seed: int,
    distance: Callable = geometry.distance_to_separable,
    hs_states: int = 10,
    hs_mixtures: int = 10_000,
) -> list[Check]:
    """Run every identity check on n samples per region.

    ``distance`` can be swapped to confirm the suite catches a broken
    distance formula.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    checks = []

    ent = geometry.sample_array(n, seed, "entangled")
    conc = np.array([measures.concurrence_standard(s) for s in ent])
    neg = np.array([measures.negativity_standard(s) for s in ent])
    dist = np.array([distance(s) for s in ent])
    hs = np.array([measures.hs_distance_standard(s) for s in ent])
    proj = geometry.project_l1_many(ent)
    gap = np.linalg.norm(ent - proj, axis=1)
    checks.append(Check("euclid-vs-concurrence", float(np.max(np.abs(dist - 2 * conc / SQRT3))), 1e-10))
    checks.append(Check("concurrence-vs-negativity", float(np.max(np.abs(conc - neg))), 1e-10))
    checks.append(Check("hs-vs-euclid", float(np.max(np.abs(hs - dist / 2))), 1e-10))
    checks.append(Check("projection-distance", float(np.max(np.abs(dist - gap))), 1e-10))

    rivals = geometry.sample_octahedron(n * COMPETITORS, rng).reshape(n, COMPETITORS, 3)
    rival_gap = np.linalg.norm(ent[:, None, :] - rivals, axis=2)
    excess = np.max(gap[:, None] - rival_gap)
    checks.append(Check("projection-optimality", max(0.0, float(excess)), 1e-12))

    phys = geometry.sample_array(n, seed + 1, "physical")
    ds = from_standard_many(phys)
    c_std = np.array([measures.concurrence_standard(s) for s in phys])
    n_std = np.array([measures.negativity_standard(s) for s in phys])
    roots = measures.spin_flip_roots_many(ds)
    c_gen = measures.concurrence_general_many(ds)
    n_gen = measures.negativity_general_many(ds)
    spec = -np.sort(-standard_eigenvalues_many(phys), axis=1)
    checks.append(Check("cross-path-concurrence", float(np.max(np.abs(c_gen - c_std))), 1e-9))
    checks.append(Check("cross-path-negativity", float(np.max(np.abs(n_gen - n_std))), 1e-9))
    checks.append(Check("spectral-identity", float(np.max(np.abs(roots - spec))), 1e-9))

    sep = geometry.sample_array(n, seed + 2, "separable")
    worst = 0.0
    for s in sep:
        rep = measures.measure(s)
        worst = max(worst, rep.concurrence, rep.negativity, rep.hs_distance, distance(s))
    checks.append(Check("separable-zero-set", worst, 1e-10))

    cube = geometry.sample_array(n, seed + 3, "cube")
    l1 = np.sum(np.abs(cube), axis=1) <= 1.0
    mismatches = int(np.count_nonzero(l1 != halfspace_members(cube)))
    checks.append(Check("octahedron-equivalence", float(mismatches), 0.0))

    kind, _ = geometry.classify_many(cube)
    dots = cube @ np.array(geometry.PHYSICAL_VERTICES, dtype=float).T
    doubles = int(np.count_nonzero((kind != geometry.Kind.NONPHYSICAL) & (np.sum(dots > 1.0, axis=1) > 1)))
    checks.append(Check("corner-uniqueness", float(doubles), 0.0))

    undercut = 0.0
    for s in ent[: min(n, hs_states)]:
        best = hs_brute_force(s, hs_mixtures, rng)
        undercut = max(undercut, measures.hs_distance_standard(s) - best)
    checks.append(Check("hs-brute-force", undercut, 1e-3))
    return checks
