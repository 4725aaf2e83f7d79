"""Indexed triangle meshes, per-triangle frames and neighborhood tables."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse


class MeshError(ValueError):
    pass


class UndefinedNormalError(MeshError):
    pass


def _frozen(a, dtype):
    """Read-only (k, 3) array; already-frozen inputs are shared, not copied."""
    out = np.asarray(a, dtype=dtype)
    if out.flags.writeable:
        out = out.copy()
    return out if out.ndim == 2 and out.shape[1] == 3 else out.reshape(-1, 3)


@dataclass(frozen=True, eq=False)
class Mesh:
    """Vertex positions (n, 3) and 0-based triangle index triples (m, 3).

    Filters never touch ``triangles``; they return a new Mesh sharing it.
    """

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        v, t = _frozen(self.vertices, np.float64), _frozen(self.triangles, np.int64)
        if t.size:
            if t.min() < 0 or t.max() >= len(v):
                raise MeshError(f"triangle index out of range for {len(v)} vertices")
            if np.any((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])):
                raise MeshError("triangle with repeated vertex index")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def with_vertices(self, vertices) -> "Mesh":
        return Mesh(vertices, self.triangles)

    def transformed(self, matrix=None, scale=1.0, offset=(0.0, 0.0, 0.0)) -> "Mesh":
        v = self.vertices if matrix is None else self.vertices @ np.asarray(matrix).T
        return self.with_vertices(v * scale + np.asarray(offset))

    @cached_property
    def edges(self) -> np.ndarray:
        """Undirected edges (i < j), deduplicated and lexicographically sorted."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    def same_connectivity(self, other: "Mesh") -> bool:
        return self.triangles.shape == other.triangles.shape and bool(
            np.array_equal(self.triangles, other.triangles)
        )


@dataclass(frozen=True)
class TriangleFrame:
    normal: np.ndarray
    area: float
    centroid: np.ndarray

    @property
    def degenerate(self) -> bool:
        return self.area == 0.0


@dataclass(frozen=True, eq=False)
class Csr:
    """Row-compressed integer sets; row ``k`` is ``indices[indptr[k]:indptr[k+1]]`` (sorted)."""

    indptr: np.ndarray
    indices: np.ndarray

    def __len__(self):
        return len(self.indptr) - 1

    def __getitem__(self, k):
        return self.indices[self.indptr[k]:self.indptr[k + 1]]

    def counts(self) -> np.ndarray:
        return np.diff(self.indptr)

    def rows(self) -> np.ndarray:
        """Row id of every entry of ``indices``."""
        return np.repeat(np.arange(len(self)), self.counts())

    @classmethod
    def from_sparse(cls, m: sparse.spmatrix) -> "Csr":
        m = sparse.csr_matrix(m)
        m.sort_indices()
        return cls(m.indptr.astype(np.int64), m.indices.astype(np.int64))


@dataclass(frozen=True, eq=False)
class AdjacencyIndex:
    vertex_neighbors: Csr
    vertex_triangles: Csr
    triangle_neighbors: Csr
    degrees: np.ndarray


def build_adjacency(mesh: Mesh) -> AdjacencyIndex:
    n, t = mesh.n_vertices, mesh.triangles
    m = len(t)
    e = mesh.edges
    ones = np.ones(len(e), dtype=np.int8)
    vv = sparse.coo_matrix((ones, (e[:, 0], e[:, 1])), shape=(n, n))
    vv = (vv + vv.T).tocsr()
    vt = sparse.coo_matrix(
        (np.ones(3 * m, dtype=np.int32), (t.ravel(), np.repeat(np.arange(m), 3))), shape=(n, m)
    ).tocsr()
    # triangles sharing at least one vertex; self removed below
    tt = (vt.T @ vt).tolil()
    tt.setdiag(0)
    tt = tt.tocsr()
    tt.eliminate_zeros()
    vertex_neighbors = Csr.from_sparse(vv)
    return AdjacencyIndex(
        vertex_neighbors=vertex_neighbors,
        vertex_triangles=Csr.from_sparse(vt),
        triangle_neighbors=Csr.from_sparse(tt),
        degrees=vertex_neighbors.counts(),
    )


def _raw_frames(mesh: Mesh):
    p = mesh.vertices[mesh.triangles]
    cross = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    norm = np.linalg.norm(cross, axis=1)
    return p, cross, norm


def triangle_normals(mesh: Mesh) -> np.ndarray:
    """Unit normals per triangle (right-hand rule); zero rows for degenerate triangles."""
    _, cross, norm = _raw_frames(mesh)
    out = np.zeros_like(cross)
    ok = norm > 0
    out[ok] = cross[ok] / norm[ok, None]
    return out


def triangle_areas(mesh: Mesh) -> np.ndarray:
    return 0.5 * _raw_frames(mesh)[2]


def triangle_centroids(mesh: Mesh) -> np.ndarray:
    return mesh.vertices[mesh.triangles].mean(axis=1)


def triangle_frame(mesh: Mesh, t: int) -> TriangleFrame:
    if not 0 <= t < mesh.n_triangles:
        raise IndexError(t)
    a, b, c = mesh.vertices[mesh.triangles[t]]
    cross = np.cross(b - a, c - a)
    norm = float(np.linalg.norm(cross))
    normal = cross / norm if norm > 0 else np.zeros(3)
    return TriangleFrame(normal=normal, area=0.5 * norm, centroid=(a + b + c) / 3.0)


def vertex_normal(mesh: Mesh, adj: AdjacencyIndex, i: int) -> np.ndarray:
    """Normalized average of the unit normals of the non-degenerate triangles around ``i``."""
    normals = [triangle_frame(mesh, t) for t in adj.vertex_triangles[i]]
    normals = [f.normal for f in normals if not f.degenerate]
    if not normals:
        raise UndefinedNormalError(f"vertex {i} has no non-degenerate incident triangle")
    s = np.sum(normals, axis=0) / len(normals)
    norm = np.linalg.norm(s)
    if norm == 0:
        raise UndefinedNormalError(f"incident normals of vertex {i} cancel out")
    return s / norm


def vertex_normals(mesh: Mesh, adj: AdjacencyIndex) -> np.ndarray:
    """All vertex normals at once; zero rows where the normal is undefined."""
    n = triangle_normals(mesh)
    live = (np.linalg.norm(n, axis=1) > 0).astype(np.float64)
    vt = adj.vertex_triangles
    rows = vt.rows()
    s = np.zeros((mesh.n_vertices, 3))
    np.add.at(s, rows, n[vt.indices])
    cnt = np.bincount(rows, weights=live[vt.indices], minlength=mesh.n_vertices)
    norm = np.linalg.norm(s, axis=1)
    out = np.zeros_like(s)
    ok = (cnt > 0) & (norm > 0)
    out[ok] = s[ok] / norm[ok, None]
    return out


def mean_edge_length(mesh: Mesh) -> float:
    e = mesh.edges
    if len(e) == 0:
        raise MeshError("mesh has no edges")
    d = mesh.vertices[e[:, 0]] - mesh.vertices[e[:, 1]]
    return float(np.linalg.norm(d, axis=1).mean())


def icosphere(level: int = 1, radius: float = 1.0) -> Mesh:
    """Icosahedron subdivided ``level`` times with midpoints projected to the sphere.

    Vertex count is ``10 * 4**level + 2``.
    """
    phi = (1.0 + 5.0 ** 0.5) / 2.0
    v = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    f = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [np.array(p, dtype=np.float64) / np.linalg.norm(p) for p in v]
    faces = f
    for _ in range(level):
        cache = {}

        def mid(a, b):
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    return Mesh(np.array(verts) * radius, np.array(faces))


def grid_plane(nx: int, ny: int, spacing: float = 1.0, z: float = 0.0) -> Mesh:
    """Flat ``nx`` by ``ny`` vertex grid in the plane ``z``, two triangles per cell."""
    xs, ys = np.meshgrid(np.arange(nx) * spacing, np.arange(ny) * spacing, indexing="ij")
    v = np.column_stack([xs.ravel(), ys.ravel(), np.full(nx * ny, float(z))])
    idx = np.arange(nx * ny).reshape(nx, ny)
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, d = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    t = np.concatenate([np.column_stack([a, b, c]), np.column_stack([a, c, d])])
    return Mesh(v, t)
