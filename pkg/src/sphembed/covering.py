"""Certify that no extra point fits on the sphere without raising ``alpha``.

For a vertex set ``V`` let ``f(p) = max_{x in V} <p, x>``.  ``f`` is
1-Lipschitz in geodesic distance, so if every point of the sphere lies within
``delta`` of a mesh point, ``min_sphere f >= min_mesh f - delta``.  The check
passes when that lower bound is still strictly above ``alpha``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .catalog import PHI, PolyhedronSpec

__all__ = [
    "MarginNotCertified",
    "MarginReport",
    "GeodesicMesh",
    "geodesic_mesh",
    "covering_increase_check",
    "MAX_DEPTH",
]

MAX_DEPTH = 10


class MarginNotCertified(ArithmeticError):
    def __init__(self, report):
        self.report = report
        super().__init__(
            f"{report.label}: min_mesh f = {report.mesh_min:.6f}, alpha = {report.alpha:.6f}, "
            f"discretisation bound {report.mesh_step:g} leaves margin {report.margin:.3e}; refine the mesh"
        )


@dataclass(frozen=True, eq=False)
class GeodesicMesh:
    points: np.ndarray  # unit vectors
    depth: int
    max_edge: float  # longest geodesic edge, radians


@dataclass(frozen=True)
class MarginReport:
    label: str
    mesh_step: float
    depth: int
    mesh_points: int
    max_edge: float
    mesh_min: float  # min over mesh points of max inner product with a vertex
    argmin: tuple
    alpha: float
    margin: float  # mesh_min - mesh_step - alpha

    @property
    def certified(self):
        return self.margin > 0


def _icosahedron():
    v = []
    for a in (1, -1):
        for b in (PHI, -PHI):
            v += [(0, a, b), (a, b, 0), (b, 0, a)]
    v = np.array(v, dtype=np.float64)
    v /= np.linalg.norm(v, axis=1)[:, None]
    g = v @ v.T
    adj = np.abs(g - g[~np.eye(12, dtype=bool)].max()) < 1e-9
    faces = [
        (a, b, c)
        for a in range(12)
        for b in range(a + 1, 12)
        for c in range(b + 1, 12)
        if adj[a, b] and adj[b, c] and adj[a, c]
    ]
    return v, np.array(faces, dtype=np.int64)


def _edge_keys(faces, n):
    """Sorted unique edges encoded as ``lo * n + hi``."""
    e = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [0, 2]]])
    return np.unique(e.min(axis=1) * n + e.max(axis=1))


def _max_edge(points, faces):
    n = len(points)
    lo, hi = np.divmod(_edge_keys(faces, n), n)
    dots = np.einsum("ij,ij->i", points[lo], points[hi])
    return float(np.arccos(np.clip(dots.min(), -1, 1)))


def _subdivide(points, faces):
    n = len(points)
    key = _edge_keys(faces, n)
    lo, hi = np.divmod(key, n)
    mids = points[lo] + points[hi]
    mids /= np.linalg.norm(mids, axis=1)[:, None]

    def mid(a, b):
        return n + np.searchsorted(key, np.minimum(a, b) * n + np.maximum(a, b))

    a, b, c = faces.T
    ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
    new_faces = np.concatenate(
        [
            np.stack([a, ab, ca], 1),
            np.stack([ab, b, bc], 1),
            np.stack([ca, bc, c], 1),
            np.stack([ab, bc, ca], 1),
        ]
    )
    return np.vstack([points, mids]), new_faces


@functools.lru_cache(maxsize=8)
def geodesic_mesh(step: float) -> GeodesicMesh:
    """Recursively subdivided icosahedron whose longest edge is at most ``step``."""
    points, faces = _icosahedron()
    depth = 0
    edge = _max_edge(points, faces)
    while edge > step:
        if depth == MAX_DEPTH:
            raise ValueError(f"mesh step {step} needs more than {MAX_DEPTH} subdivisions")
        points, faces = _subdivide(points, faces)
        depth += 1
        edge = _max_edge(points, faces)
    points.setflags(write=False)
    return GeodesicMesh(points=points, depth=depth, max_edge=edge)


def _min_max_inner(mesh_points, vertices, chunk=1 << 16):
    best, where = math.inf, None
    for start in range(0, len(mesh_points), chunk):
        block = mesh_points[start:start + chunk]
        f = (block @ vertices.T).max(axis=1)
        i = int(f.argmin())
        if f[i] < best:
            best, where = float(f[i]), block[i]
    return best, tuple(float(x) for x in where)


def covering_increase_check(spec: PolyhedronSpec, mesh_step: float = 0.005) -> MarginReport:
    """Certified lower bound on ``min_p max_x <p, x> - alpha`` over the sphere.

    Raises :class:`MarginNotCertified` when the bound is not positive.
    """
    mesh = geodesic_mesh(float(mesh_step))
    lowest, where = _min_max_inner(mesh.points, spec.vertices)
    g = spec.gram
    alpha = float(g[~np.eye(len(g), dtype=bool)].max())
    report = MarginReport(
        label=spec.label.slug,
        mesh_step=float(mesh_step),
        depth=mesh.depth,
        mesh_points=len(mesh.points),
        max_edge=mesh.max_edge,
        mesh_min=lowest,
        argmin=where,
        alpha=alpha,
        margin=lowest - float(mesh_step) - alpha,
    )
    if not report.certified:
        raise MarginNotCertified(report)
    return report
