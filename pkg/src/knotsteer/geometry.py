"""Polygonal space curves, sphere direction sampling and planar projection.

Conventions used throughout the package:

* Length unit is the bead diameter sigma of the dynamics model; curves from
  the growing-walk model use tangent spheres of unit radius (bond length 2).
* A projection direction ``d`` is a unit 3-vector.  The projection plane is
  spanned by a deterministic orthonormal frame ``(u, v)`` built from ``d``
  with the smallest-component axis rule, so projections are reproducible.
* Depth of a vertex is its signed coordinate along ``d``; larger depth means
  closer to the viewer, i.e. the strand with larger depth passes over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

_MIN_VERTEX_SEPARATION = 1e-9


class PolyCurve:
    """An open polygonal curve: an ordered list of 3D vertices.

    Vertices are stored as a read-only ``(n, 3)`` float array.  Consecutive
    vertices must be distinct and all coordinates finite.
    """

    __slots__ = ("vertices", "bead_radius")

    def __init__(self, vertices, bead_radius: float = 1.0):
        v = np.asarray(vertices, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise InvalidArgument(f"expected (n, 3) vertex array, got shape {v.shape}")
        if v.shape[0] < 2:
            raise InvalidArgument("a curve needs at least 2 vertices")
        if not np.all(np.isfinite(v)):
            raise InvalidArgument("curve vertices must be finite")
        seps = np.linalg.norm(np.diff(v, axis=0), axis=1)
        if np.any(seps <= _MIN_VERTEX_SEPARATION):
            raise InvalidArgument("consecutive vertices must be distinct")
        if bead_radius <= 0:
            raise InvalidArgument("bead_radius must be positive")
        v = v.copy()
        v.setflags(write=False)
        self.vertices = v
        self.bead_radius = float(bead_radius)

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def __repr__(self) -> str:
        return f"PolyCurve(n={len(self)}, bead_radius={self.bead_radius})"

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def bond_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)

    def diameter(self) -> float:
        """Largest pairwise vertex distance (exact, O(n^2))."""
        v = self.vertices
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))

    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def transformed(self, rotation: np.ndarray | None = None,
                    scale: float = 1.0,
                    translation: np.ndarray | None = None) -> "PolyCurve":
        v = self.vertices * float(scale)
        if rotation is not None:
            v = v @ np.asarray(rotation, dtype=np.float64).T
        if translation is not None:
            v = v + np.asarray(translation, dtype=np.float64)
        return PolyCurve(v, bead_radius=self.bead_radius * scale)


@dataclass(frozen=True)
class SubchainSpec:
    """Vertex index pair ``(a, b)`` selecting the subchain a..b inclusive."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < self.a:
            raise InvalidArgument(f"need 0 <= a <= b, got ({self.a}, {self.b})")


@dataclass(frozen=True)
class PlanarDiagramGeometry:
    """Projected curve: 2D points plus per-vertex depth along the direction."""

    points: np.ndarray          # (n, 2)
    depth: np.ndarray           # (n,)
    direction: np.ndarray       # (3,) unit vector
    closed: bool = False

    @property
    def n_vertices(self) -> int:
        return self.points.shape[0]

    def extent(self) -> float:
        """Diagonal of the 2D bounding box; zero means a degenerate projection."""
        span = self.points.max(axis=0) - self.points.min(axis=0)
        return float(np.hypot(span[0], span[1]))


def as_direction(d) -> np.ndarray:
    """Validate and return a unit 3-vector."""
    d = np.asarray(d, dtype=np.float64)
    if d.shape != (3,):
        raise InvalidArgument(f"direction must be a 3-vector, got shape {d.shape}")
    norm = float(np.linalg.norm(d))
    if not math.isfinite(norm) or abs(norm - 1.0) > 1e-12:
        raise InvalidArgument(f"direction must have unit norm, |d| = {norm}")
    return d


def sample_directions(n: int, scheme: str = "fibonacci", seed: int | None = None) -> np.ndarray:
    """Sample ``n`` unit vectors on the sphere.

    ``fibonacci`` gives the deterministic quasi-uniform spiral lattice;
    ``uniform_random`` gives iid uniform directions from the given seed.
    Returns an ``(n, 3)`` array.
    """
    if n < 1:
        raise InvalidArgument("need at least one direction")
    if scheme == "fibonacci":
        i = np.arange(n, dtype=np.float64)
        z = 1.0 - (2.0 * i + 1.0) / n
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = GOLDEN_ANGLE * i
        dirs = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    elif scheme == "uniform_random":
        if seed is None:
            raise InvalidArgument("uniform_random sampling requires a seed")
        rng = np.random.default_rng(seed)
        dirs = rng.standard_normal((n, 3))
        norms = np.linalg.norm(dirs, axis=1, keepdims=True)
        # Resample the (measure-zero) degenerate rows rather than dividing by ~0.
        while np.any(norms < 1e-12):
            bad = norms[:, 0] < 1e-12
            dirs[bad] = rng.standard_normal((int(bad.sum()), 3))
            norms = np.linalg.norm(dirs, axis=1, keepdims=True)
        dirs = dirs / norms
    else:
        raise InvalidArgument(f"unknown direction scheme {scheme!r}")
    # Exact unit norm to the working precision.
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return dirs


def random_rotation(seed) -> np.ndarray:
    """Haar-ish random rotation matrix from a seed (QR of a Gaussian matrix)."""
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((3, 3))
    q, r = np.linalg.qr(m)
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 2] = -q[:, 2]
    return q


def projection_frame(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal in-plane frame ``(u, v)`` for direction ``d``.

    Uses the smallest-|component| coordinate axis as reference so the frame
    is stable and reproducible; ``(u, v, d)`` is right-handed.
    """
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(d)))] = 1.0
    u = np.cross(axis, d)
    u /= np.linalg.norm(u)
    v = np.cross(d, u)
    return u, v


def project(curve: PolyCurve, d, closed: bool = False) -> PlanarDiagramGeometry:
    """Project a curve onto the plane orthogonal to direction ``d``."""
    d = as_direction(d)
    u, v = projection_frame(d)
    pts = np.column_stack([curve.vertices @ u, curve.vertices @ v])
    depth = curve.vertices @ d
    return PlanarDiagramGeometry(points=pts, depth=depth, direction=d, closed=closed)


def trim(curve: PolyCurve, spec: SubchainSpec) -> PolyCurve:
    """Return the subchain of vertices ``a..b`` inclusive."""
    n = len(curve)
    if spec.b > n - 1:
        raise InvalidArgument(f"subchain end {spec.b} out of range for n={n}")
    if spec.b - spec.a < 1:
        raise InvalidArgument("a subchain needs at least 2 vertices")
    return PolyCurve(curve.vertices[spec.a:spec.b + 1], bead_radius=curve.bead_radius)


def bending_angles(vertices: np.ndarray) -> np.ndarray:
    """Vertex angles theta_i at interior vertices (pi means locally straight)."""
    v = np.asarray(vertices, dtype=np.float64)
    u1 = v[:-2] - v[1:-1]
    u2 = v[2:] - v[1:-1]
    n1 = np.linalg.norm(u1, axis=1)
    n2 = np.linalg.norm(u2, axis=1)
    c = np.einsum("ij,ij->i", u1, u2) / (n1 * n2)
    return np.arccos(np.clip(c, -1.0, 1.0))


def dihedral_angles(vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dihedral angles phi in [0, 2pi) for each consecutive vertex quadruple.

    ``phi`` is the signed angle from the (p0,p1,p2) half-plane to the
    (p1,p2,p3) half-plane about the p1->p2 bond, measured with the standard
    atan2 formula and shifted into [0, 2pi).  Returns ``(phi, defined)``
    where ``defined`` is False when either triple is collinear.
    """
    v = np.asarray(vertices, dtype=np.float64)
    b1 = v[1:-2] - v[:-3]
    b2 = v[2:-1] - v[1:-2]
    b3 = v[3:] - v[2:-1]
    n1 = np.cross(b1, b2)
    n2 = np.cross(b2, b3)
    b2n = np.linalg.norm(b2, axis=1)
    m1 = np.linalg.norm(n1, axis=1)
    m2 = np.linalg.norm(n2, axis=1)
    defined = (m1 > 1e-12 * b2n * np.linalg.norm(b1, axis=1)) & \
              (m2 > 1e-12 * b2n * np.linalg.norm(b3, axis=1))
    x = np.einsum("ij,ij->i", n1, n2)
    y = np.einsum("ij,ij->i", np.cross(n1, n2), b2) / np.where(b2n > 0, b2n, 1.0)
    phi = np.arctan2(y, x)
    phi = np.mod(phi, 2.0 * math.pi)
    return phi, defined


def discrete_curvature_torsion(curve: PolyCurve) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-vertex discrete curvature and torsion of a polygonal curve.

    Turning-angle convention: ``kappa_i = (pi - theta_i) / l_i`` at interior
    vertex i, and ``tau_i = wrap(phi_i - pi) / l_i`` for each dihedral, where
    ``l_i`` is the mean length of the bonds meeting the vertex/bond and
    ``wrap`` maps to (-pi, pi].  Collinear triples give kappa = 0 and an
    undefined torsion, reported through the returned mask.

    Returns ``(kappa, tau, tau_defined)`` with ``len(kappa) = n - 2`` and
    ``len(tau) = n - 3``.
    """
    v = curve.vertices
    if len(curve) < 3:
        raise InvalidArgument("curvature needs at least 3 vertices")
    bonds = np.linalg.norm(np.diff(v, axis=0), axis=1)
    theta = bending_angles(v)
    l_k = 0.5 * (bonds[:-1] + bonds[1:])
    kappa = (math.pi - theta) / l_k
    if len(curve) < 4:
        return kappa, np.empty(0), np.empty(0, dtype=bool)
    phi, defined = dihedral_angles(v)
    # torsion lives on interior bonds: average the two flanking bonds
    l_t = 0.5 * (bonds[:-2] + bonds[2:])
    wrapped = np.mod(phi - math.pi + math.pi, 2.0 * math.pi) - math.pi
    tau = np.where(defined, wrapped / l_t, 0.0)
    return kappa, tau, defined


def read_curve(path, bead_radius: float = 1.0) -> PolyCurve:
    """Read a plain-text curve file: one "x y z" triple per line, '#' comments."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 3:
                raise InvalidArgument(f"{path}:{lineno}: expected 3 coordinates, got {len(parts)}")
            try:
                xyz = [float(p) for p in parts]
            except ValueError as exc:
                raise InvalidArgument(f"{path}:{lineno}: {exc}") from exc
            if not all(math.isfinite(c) for c in xyz):
                raise InvalidArgument(f"{path}:{lineno}: non-finite coordinate")
            rows.append(xyz)
    if len(rows) < 2:
        raise InvalidArgument(f"{path}: fewer than 2 vertices")
    return PolyCurve(np.array(rows), bead_radius=bead_radius)


def write_curve(path, curve: PolyCurve, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for x, y, z in curve.vertices:
            fh.write(f"{float(x)!r} {float(y)!r} {float(z)!r}\n")
