"""Area-weighted L2 vertex-position and face-normal errors against a reference mesh."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.spatial import cKDTree

from .mesh import Mesh, MeshError, triangle_areas, triangle_normals


def _dot(u, v):
    return np.einsum("ij,ij->i", u, v)


def _segment_sq(p, a, b):
    ab = b - a
    den = _dot(ab, ab)
    t = np.where(den > 0, _dot(p - a, ab) / np.where(den > 0, den, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    d = p - (a + t[:, None] * ab)
    return _dot(d, d)


def closest_points(p, a, b, c):
    """Closest point on triangle (a, b, c) to p, row-wise over (k, 3) arrays.

    Voronoi-region classification of the closed triangle; degenerate triangles
    are handled by the caller.
    """
    p, a, b, c = (np.asarray(x, dtype=np.float64) for x in (p, a, b, c))
    ab, ac, ap = b - a, c - a, p - a
    d1, d2 = _dot(ab, ap), _dot(ac, ap)
    bp = p - b
    d3, d4 = _dot(ab, bp), _dot(ac, bp)
    cp = p - c
    d5, d6 = _dot(ab, cp), _dot(ac, cp)
    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2

    with np.errstate(divide="ignore", invalid="ignore"):
        den = va + vb + vc
        v = vb / den
        w = vc / den
        out = a + v[:, None] * ab + w[:, None] * ac
        done = np.zeros(len(p), dtype=bool)

        def put(mask, value):
            nonlocal done
            mask = mask & ~done
            out[mask] = value[mask]
            done |= mask

        put((d1 <= 0) & (d2 <= 0), a)
        put((d3 >= 0) & (d4 <= d3), b)
        put((d6 >= 0) & (d5 <= d6), c)
        t_ab = d1 / (d1 - d3)
        put((vc <= 0) & (d1 >= 0) & (d3 <= 0), a + t_ab[:, None] * ab)
        t_ac = d2 / (d2 - d6)
        put((vb <= 0) & (d2 >= 0) & (d6 <= 0), a + t_ac[:, None] * ac)
        t_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        put((va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0), b + t_bc[:, None] * (c - b))
    return out


def point_triangle_sq_distances(p, a, b, c) -> np.ndarray:
    """Squared distances from p[k] to triangle (a[k], b[k], c[k])."""
    p, a, b, c = (np.atleast_2d(np.asarray(x, dtype=np.float64)) for x in (p, a, b, c))
    p, a, b, c = np.broadcast_arrays(p, a, b, c)
    cross = np.cross(b - a, c - a)
    flat = _dot(cross, cross) == 0
    out = np.empty(len(p))
    ok = ~flat
    if ok.any():
        d = p[ok] - closest_points(p[ok], a[ok], b[ok], c[ok])
        out[ok] = _dot(d, d)
    if flat.any():
        pf, af, bf, cf = p[flat], a[flat], b[flat], c[flat]
        out[flat] = np.minimum.reduce([_segment_sq(pf, af, bf), _segment_sq(pf, bf, cf), _segment_sq(pf, cf, af)])
    return out


def point_triangle_distance(p, tri) -> float:
    a, b, c = np.asarray(tri, dtype=np.float64)
    return float(np.sqrt(point_triangle_sq_distances(p, a, b, c)[0]))


class SpatialIndex:
    """Exact nearest-triangle distance queries over a fixed reference mesh.

    Triangle centroids go in a KD-tree. A query first takes the exact distance
    to the triangles of the ``k`` nearest centroids as an upper bound ``u``;
    every point of triangle t lies within ``r_t`` of its centroid, so only
    triangles with centroid distance <= ``u + max(r)`` can beat it.
    """

    def __init__(self, reference: Mesh, k: int = 4, workers: int = 1):
        if reference.n_triangles == 0:
            raise MeshError("cannot index a mesh without triangles")
        self.tri = reference.vertices[reference.triangles]
        self.centroids = self.tri.mean(axis=1)
        self.radius = float(np.linalg.norm(self.tri - self.centroids[:, None], axis=2).max())
        self.tree = cKDTree(self.centroids)
        self.k = min(k, len(self.tri))
        self.workers = workers

    def _exact(self, pts, cand_rows, cand_tris):
        t = self.tri[cand_tris]
        return point_triangle_sq_distances(pts[cand_rows], t[:, 0], t[:, 1], t[:, 2])

    def sq_distances(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        n = len(pts)
        if n == 0:
            return np.zeros(0)
        _, nearest = self.tree.query(pts, k=self.k, workers=self.workers)
        nearest = nearest.reshape(n, self.k)
        upper = self._exact(pts, np.repeat(np.arange(n), self.k), nearest.ravel()).reshape(n, self.k).min(axis=1)
        # tiny slack so rounding in the bound never drops the true nearest triangle
        reach = np.sqrt(upper) + self.radius
        reach = reach * (1 + 1e-12) + 1e-12
        balls = self.tree.query_ball_point(pts, reach, workers=self.workers, return_sorted=True)
        counts = np.fromiter((len(b) for b in balls), dtype=np.int64, count=n)
        rows = np.repeat(np.arange(n), counts)
        cand = np.fromiter((t for b in balls for t in b), dtype=np.int64, count=int(counts.sum()))
        best = np.full(n, np.inf)
        np.minimum.at(best, rows, self._exact(pts, rows, cand))
        return np.minimum(best, upper)

    def distances(self, points) -> np.ndarray:
        return np.sqrt(self.sq_distances(points))


def build_spatial_index(reference: Mesh, workers: int = 1) -> SpatialIndex:
    return SpatialIndex(reference, workers=workers)


def brute_force_sq_distances(points, reference: Mesh) -> np.ndarray:
    """All-pairs scan; the oracle for SpatialIndex."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    tri = reference.vertices[reference.triangles]
    out = np.empty(len(pts))
    for k, p in enumerate(pts):
        out[k] = point_triangle_sq_distances(p[None], tri[:, 0], tri[:, 1], tri[:, 2]).min()
    return out


def vertex_areas(mesh: Mesh) -> np.ndarray:
    """Sum of the areas of the triangles incident on each vertex."""
    a = triangle_areas(mesh)
    return np.bincount(mesh.triangles.ravel(), weights=np.repeat(a, 3), minlength=mesh.n_vertices)


def vertex_position_error(mesh: Mesh, reference: Mesh, index: SpatialIndex | None = None) -> float:
    total = float(triangle_areas(mesh).sum())
    if total == 0:
        raise MeshError("vertex-position error undefined for a zero-area mesh")
    index = index or build_spatial_index(reference)
    return float(np.dot(vertex_areas(mesh), index.sq_distances(mesh.vertices)) / (3.0 * total))


def face_normal_error(mesh: Mesh, reference: Mesh) -> float:
    if not mesh.same_connectivity(reference):
        raise MeshError("face-normal error needs identical connectivity")
    area = triangle_areas(mesh)
    n, n_ref = triangle_normals(mesh), triangle_normals(reference)
    ok = (area > 0) & (np.linalg.norm(n_ref, axis=1) > 0)
    total = float(area[ok].sum())
    if total == 0:
        raise MeshError("face-normal error undefined for a zero-area mesh")
    diff = n_ref[ok] - n[ok]
    return float(np.dot(area[ok], np.sum(diff * diff, axis=1)) / total)


@dataclass(frozen=True)
class ErrorReport:
    eps_v: float
    eps_f: float | None
    iteration: int = 0

    def as_dict(self):
        return asdict(self)


def error_report(mesh: Mesh, reference: Mesh, index: SpatialIndex | None = None, iteration: int = 0) -> ErrorReport:
    eps_f = face_normal_error(mesh, reference) if mesh.same_connectivity(reference) else None
    return ErrorReport(vertex_position_error(mesh, reference, index), eps_f, iteration)
