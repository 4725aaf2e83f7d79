"""Laplacian flow and degree-normalized anisotropic vertex diffusion."""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .mesh import AdjacencyIndex, Mesh, build_adjacency

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class DiffusivityKind(enum.Enum):
    CAUCHY = "cauchy"
    GAUSSIAN = "gaussian"
    LAPLACE = "laplace"
    RAYLEIGH = "rayleigh"


def diffusivity(kind: DiffusivityKind, x, c: float):
    """Edge-stopping weight g(x); works on scalars and arrays."""
    kind = DiffusivityKind(kind)
    r = np.asarray(x, dtype=np.float64) / c
    if kind is DiffusivityKind.CAUCHY:
        g = 1.0 / (1.0 + r * r)
    elif kind is DiffusivityKind.GAUSSIAN:
        g = _INV_SQRT_2PI * np.exp(-0.5 * r * r)
    elif kind is DiffusivityKind.LAPLACE:
        g = 0.5 * np.exp(-np.abs(r))
    else:
        g = r * np.exp(-0.5 * r * r)
    return float(g) if np.ndim(g) == 0 else g


@dataclass(frozen=True)
class DiffusionConfig:
    kind: DiffusivityKind
    c: float
    iterations: int = 1
    step: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DiffusivityKind(self.kind))
        if not self.c > 0:
            raise ValueError(f"c must be > 0, got {self.c}")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not self.step > 0:
            raise ValueError("step must be > 0")


@dataclass(frozen=True)
class LaplacianConfig:
    lam: float = 0.5
    iterations: int = 1

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not 0 < self.lam <= 1:
            warnings.warn(f"Laplacian step {self.lam} outside (0, 1]", stacklevel=3)


def _edges(adj: AdjacencyIndex):
    vn = adj.vertex_neighbors
    return vn.rows(), vn.indices


def neighbor_centroids(mesh: Mesh, adj: AdjacencyIndex) -> np.ndarray:
    """Mean of 1-ring positions; isolated vertices map to themselves."""
    i, j = _edges(adj)
    p = mesh.vertices
    d = adj.degrees
    s = np.stack([np.bincount(i, weights=p[j, k], minlength=len(p)) for k in range(3)], axis=1)
    out = p.copy()
    has = d > 0
    out[has] = s[has] / d[has, None]
    return out


def umbrella(mesh: Mesh, adj: AdjacencyIndex, i: int) -> np.ndarray:
    nb = adj.vertex_neighbors[i]
    if len(nb) == 0:
        return np.zeros(3)
    return mesh.vertices[nb].sum(axis=0) / len(nb) - mesh.vertices[i]


def laplacian_flow_step(mesh: Mesh, adj: AdjacencyIndex, cfg: LaplacianConfig) -> Mesh:
    """Jacobi update ``P + lam * U(P)``, written as ``(1 - lam) P + lam * centroid``
    so that ``lam == 1`` lands exactly on the neighbor centroid."""
    lam = cfg.lam
    return mesh.with_vertices((1.0 - lam) * mesh.vertices + lam * neighbor_centroids(mesh, adj))


def run_laplacian_flow(mesh: Mesh, cfg: LaplacianConfig, adj=None) -> Mesh:
    adj = adj or build_adjacency(mesh)
    for _ in range(cfg.iterations):
        mesh = laplacian_flow_step(mesh, adj, cfg)
    return mesh


def _scaled_positions(mesh, adj):
    d = adj.degrees.astype(np.float64)
    root = np.sqrt(d)
    q = np.zeros_like(mesh.vertices)
    has = d > 0
    q[has] = mesh.vertices[has] / root[has, None]
    return q, root


def gradient_magnitudes(mesh: Mesh, adj: AdjacencyIndex) -> np.ndarray:
    """``|grad P_i| = sqrt(sum_j ||P_i/sqrt(d_i) - P_j/sqrt(d_j)||^2)`` for every vertex."""
    i, j = _edges(adj)
    q, _ = _scaled_positions(mesh, adj)
    sq = np.sum((q[i] - q[j]) ** 2, axis=1)
    return np.sqrt(np.bincount(i, weights=sq, minlength=mesh.n_vertices))


def vertex_gradient_magnitude(mesh: Mesh, adj: AdjacencyIndex, i: int) -> float:
    nb = adj.vertex_neighbors[i]
    if len(nb) == 0:
        return 0.0
    qi = mesh.vertices[i] / math.sqrt(len(nb))
    qj = mesh.vertices[nb] / np.sqrt(adj.degrees[nb])[:, None]
    return float(np.sqrt(np.sum((qi - qj) ** 2)))


def edge_weights(mesh: Mesh, adj: AdjacencyIndex, kind, c: float):
    """Directed edge list (i, j) with the coupling ``g(|grad P_i|) + g(|grad P_j|)``."""
    i, j = _edges(adj)
    g = diffusivity(kind, gradient_magnitudes(mesh, adj), c)
    g = np.atleast_1d(g)
    return i, j, g[i] + g[j]


def diffusion_step(mesh: Mesh, adj: AdjacencyIndex, cfg: DiffusionConfig) -> Mesh:
    """One simultaneous update
    ``P_i += step * sum_j (P_j/sqrt(d_j) - P_i/sqrt(d_i)) (g_i + g_j) / sqrt(d_i)``.

    Gradients are taken on the incoming positions; neighbors are summed in
    ascending index order.
    """
    i, j, w = edge_weights(mesh, adj, cfg.kind, cfg.c)
    q, root = _scaled_positions(mesh, adj)
    contrib = (q[j] - q[i]) * w[:, None]
    n = mesh.n_vertices
    s = np.stack([np.bincount(i, weights=contrib[:, k], minlength=n) for k in range(3)], axis=1)
    has = root > 0
    out = mesh.vertices.copy()
    out[has] += cfg.step * s[has] / root[has, None]
    return mesh.with_vertices(out)


def run_vertex_diffusion(mesh: Mesh, cfg: DiffusionConfig, adj=None) -> Mesh:
    adj = adj or build_adjacency(mesh)
    for _ in range(cfg.iterations):
        mesh = diffusion_step(mesh, adj, cfg)
    return mesh
