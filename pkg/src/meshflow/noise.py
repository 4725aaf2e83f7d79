"""Additive Gaussian vertex noise scaled by the mean edge length."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .mesh import Mesh, build_adjacency, mean_edge_length, vertex_normals


class NoiseDirection(enum.Enum):
    PER_COORDINATE = "per-coordinate"
    ALONG_VERTEX_NORMAL = "along-normal"


@dataclass(frozen=True)
class NoiseSpec:
    level: float
    seed: int = 0
    direction: NoiseDirection = NoiseDirection.PER_COORDINATE

    def __post_init__(self):
        if not self.level >= 0:
            raise ValueError(f"noise level must be >= 0, got {self.level}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


def standard_normals(seed: int, n: int) -> np.ndarray:
    """(n, 4) standard normal draws; row i depends only on (seed, i).

    Row i comes from Philox block i (four 64-bit words at counter i), mapped to
    uniforms and pushed through Box-Muller, so any slice of rows can be
    regenerated independently.
    """
    raw = np.random.Philox(key=seed).random_raw(4 * n).reshape(n, 4)
    # 53-bit uniforms in (0, 1]
    u = ((raw >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0 ** -53
    r1 = np.sqrt(-2.0 * np.log(u[:, 0]))
    r2 = np.sqrt(-2.0 * np.log(u[:, 2]))
    a1, a2 = 2.0 * np.pi * u[:, 1], 2.0 * np.pi * u[:, 3]
    return np.column_stack([r1 * np.cos(a1), r1 * np.sin(a1), r2 * np.cos(a2), r2 * np.sin(a2)])


def noise_sigma(mesh: Mesh, level: float) -> float:
    return level * mean_edge_length(mesh)


def add_gaussian_noise(mesh: Mesh, spec: NoiseSpec) -> Mesh:
    sigma = noise_sigma(mesh, spec.level)
    if sigma == 0:
        return mesh
    z = standard_normals(spec.seed, mesh.n_vertices)
    if spec.direction is NoiseDirection.PER_COORDINATE:
        eta = sigma * z[:, :3]
    else:
        # vertices without a defined normal get a zero row and stay put
        eta = sigma * z[:, :1] * vertex_normals(mesh, build_adjacency(mesh))
    return mesh.with_vertices(mesh.vertices + eta)
