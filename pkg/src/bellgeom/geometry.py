"""Polytope geometry of the Bell-diagonal states in (r_x, r_y, r_z) space.

Physical states fill the tetrahedron spanned by the four Bell vertices;
flipping r_y gives the Peres-Horodecki tetrahedron, and the two intersect in
the octahedron |r_x| + |r_y| + |r_z| <= 1 of separable states.  The four
corner tetrahedra left over hold the entangled states.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from bellgeom.states import StandardState, standard_eigenvalues, standard_eigenvalues_many

BOUNDARY_TOL = 1e-10
MAX_ATTEMPTS = 10**6
CHUNK = 4096
SQRT3 = math.sqrt(3.0)

PHYSICAL_VERTICES = ((-1, 1, 1), (1, -1, 1), (1, 1, -1), (-1, -1, -1))
PERES_HORODECKI_VERTICES = ((-1, -1, 1), (1, 1, 1), (1, -1, -1), (-1, 1, -1))
_VERTS = np.array(PHYSICAL_VERTICES, dtype=float)


class DomainError(ValueError):
    """Raised when a measure is requested for a point outside the physical tetrahedron."""


class SamplingStalled(RuntimeError):
    pass


class Kind(enum.IntEnum):
    SEPARABLE = 0
    ENTANGLED = 1
    NONPHYSICAL = 2


class Region(str, enum.Enum):
    CUBE = "cube"
    PHYSICAL = "physical"
    ENTANGLED = "entangled"
    SEPARABLE = "separable"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    corner: tuple[int, int, int] | None = None

    def __post_init__(self):
        if (self.kind is Kind.ENTANGLED) != (self.corner is not None):
            raise ValueError("exactly the entangled classification carries a corner")

    @property
    def is_physical(self) -> bool:
        return self.kind is not Kind.NONPHYSICAL

    def __str__(self) -> str:
        if self.kind is Kind.ENTANGLED:
            return "entangled({},{},{})".format(*self.corner)
        return self.kind.name.lower()


SEPARABLE = Classification(Kind.SEPARABLE)
NONPHYSICAL = Classification(Kind.NONPHYSICAL)


def classify_many(rs) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized classification.

    Returns ``(kind, corner)`` arrays; ``corner`` indexes PHYSICAL_VERTICES
    and is -1 unless the point is entangled.
    """
    rs = np.asarray(rs, dtype=float)
    eig = standard_eigenvalues_many(rs)
    physical = np.min(eig, axis=-1) >= -BOUNDARY_TOL
    inside = np.sum(np.abs(rs), axis=-1) <= 1.0 + BOUNDARY_TOL
    kind = np.where(~physical, Kind.NONPHYSICAL, np.where(inside, Kind.SEPARABLE, Kind.ENTANGLED))
    corner = np.argmax(rs @ _VERTS.T, axis=-1)
    corner = np.where(kind == Kind.ENTANGLED, corner, -1)
    return kind.astype(np.int8), corner


def classify(s) -> Classification:
    x, y, z = s
    if min(standard_eigenvalues((x, y, z))) < -BOUNDARY_TOL:
        return NONPHYSICAL
    if abs(x) + abs(y) + abs(z) <= 1.0 + BOUNDARY_TOL:
        return SEPARABLE
    dots = [vx * x + vy * y + vz * z for vx, vy, vz in PHYSICAL_VERTICES]
    return Classification(Kind.ENTANGLED, PHYSICAL_VERTICES[dots.index(max(dots))])


def distance_to_separable(s) -> float:
    """Euclidean distance from a physical point to the separable octahedron.

    For a point in the corner at vertex v this is its distance to the face
    plane v.r = 1, i.e. (v.r - 1)/sqrt(3).
    """
    c = classify(s)
    if c.kind is Kind.NONPHYSICAL:
        raise DomainError(f"point {tuple(s)} lies outside the physical tetrahedron")
    if c.kind is Kind.SEPARABLE:
        return 0.0
    vx, vy, vz = c.corner
    x, y, z = s
    return max(0.0, (vx * x + vy * y + vz * z - 1.0) / SQRT3)


def project_l1_many(rs, radius: float = 1.0) -> np.ndarray:
    """Nearest points of the closed L1 ball, row by row (sort-based simplex projection)."""
    rs = np.asarray(rs, dtype=float)
    flat = rs.reshape(-1, rs.shape[-1])
    mag = np.abs(flat)
    outside = np.sum(mag, axis=1) > radius
    out = flat.copy()
    if np.any(outside):
        u = -np.sort(-mag[outside], axis=1)
        css = np.cumsum(u, axis=1)
        k = np.arange(1, u.shape[1] + 1)
        cond = u - (css - radius) / k > 0
        rho = u.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
        theta = (css[np.arange(len(u)), rho] - radius) / (rho + 1)
        out[outside] = np.sign(flat[outside]) * np.maximum(mag[outside] - theta[:, None], 0.0)
    return out.reshape(rs.shape)


def project_onto_separable(s) -> StandardState:
    return StandardState.of(project_l1_many(np.array([tuple(s)], dtype=float))[0])


def sample_octahedron(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points of the unit L1 ball in three dimensions."""
    e = rng.exponential(size=(n, 4))
    pts = e[:, :3] / e.sum(axis=1, keepdims=True)
    return pts * rng.choice([-1.0, 1.0], size=(n, 3))


def _accepts(region: Region, rs: np.ndarray) -> np.ndarray:
    if region is Region.CUBE:
        return np.ones(len(rs), dtype=bool)
    kind, _ = classify_many(rs)
    if region is Region.PHYSICAL:
        return kind != Kind.NONPHYSICAL
    if region is Region.ENTANGLED:
        return kind == Kind.ENTANGLED
    return kind == Kind.SEPARABLE


def sample_array(n: int, seed: int, region: Region | str = Region.CUBE) -> np.ndarray:
    """Seeded rejection sampling from the cube [-1, 1]^3.

    Uses numpy's PCG64 generator.  Candidates are drawn in fixed chunks of
    4096, so the first k rows for a given (seed, region) do not depend on n.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    region = Region(region)
    rng = np.random.Generator(np.random.PCG64(seed))
    out = np.empty((n, 3))
    filled = 0
    since_last = 0
    while filled < n:
        cand = rng.uniform(-1.0, 1.0, size=(CHUNK, 3))
        ok = np.flatnonzero(_accepts(region, cand))
        if len(ok) == 0:
            since_last += CHUNK
            if since_last >= MAX_ATTEMPTS:
                raise SamplingStalled(f"no {region.value} sample in {since_last} attempts")
            continue
        take = ok[: n - filled]
        out[filled:filled + len(take)] = cand[take]
        filled += len(take)
        since_last = CHUNK - 1 - take[-1]
    return out


def sample_states(n: int, seed: int, region: Region | str = Region.CUBE) -> list[StandardState]:
    return [StandardState(*map(float, r)) for r in sample_array(n, seed, region)]
