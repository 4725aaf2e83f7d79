"""Face-normal smoothing (mean, min, angle-median, adaptive MMSE) and the
vertex update that fits positions to a smoothed normal field."""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .mesh import (
    AdjacencyIndex,
    Mesh,
    build_adjacency,
    triangle_areas,
    triangle_centroids,
    triangle_normals,
)


class NormalFilter(enum.Enum):
    MEAN = "mean"
    MIN = "min"
    MEDIAN = "median"
    MMSE = "mmse"


@dataclass(frozen=True)
class NormalFilterKind:
    """Filter selector.

    ``mmse_frame`` picks the axes along which the adaptive MMSE blend is done:
    ``"principal"`` uses the eigenvectors of the neighborhood normal
    covariance (rotation-equivariant), ``"world"`` the fixed x/y/z axes.
    """

    tag: NormalFilter
    mmse_noise_variance: float = 0.0
    mmse_frame: str = "principal"

    def __post_init__(self):
        if isinstance(self.tag, str):
            object.__setattr__(self, "tag", NormalFilter(self.tag))
        if not self.mmse_noise_variance >= 0:
            raise ValueError("mmse_noise_variance must be >= 0")
        if self.mmse_frame not in ("principal", "world"):
            raise ValueError(f"unknown mmse_frame {self.mmse_frame!r}")


def _unit_rows(v):
    norm = np.linalg.norm(v, axis=1)
    ok = norm > 0
    out = np.zeros_like(v)
    out[ok] = v[ok] / norm[ok, None]
    return out, ok


def _closed_neighborhood(adj: AdjacencyIndex):
    """(rows, cols) of N(T) plus T itself, grouped by row."""
    tn = adj.triangle_neighbors
    m = len(tn)
    rows = np.concatenate([tn.rows(), np.arange(m)])
    cols = np.concatenate([tn.indices, np.arange(m)])
    order = np.lexsort((cols, rows))
    return rows[order], cols[order]


def _weighted_sums(rows, weights, values, m):
    return np.stack([np.bincount(rows, weights=weights * values[:, k], minlength=m) for k in range(values.shape[1])], axis=1)


def _angle(a, b):
    return np.arctan2(np.linalg.norm(np.cross(a, b), axis=-1), np.sum(a * b, axis=-1))


def _select(normals, live, adj, median, diagnostics):
    out = normals.copy()
    tn = adj.triangle_neighbors
    for t in range(len(tn)):
        if not live[t]:
            continue
        nb = tn[t]
        nb = nb[live[nb]]
        if len(nb) == 0:
            diagnostics["empty_neighborhood"] += 1
            continue
        theta = _angle(normals[t], normals[nb])
        if median:
            # stable sort keeps ascending triangle order among equal angles
            order = np.argsort(theta, kind="stable")
            pick = nb[order[(len(nb) - 1) // 2]]
        else:
            pick = nb[np.argmin(theta)]
        out[t] = normals[pick]
    return out


def _blend_weight(var, sn2):
    """Weight on the input normal per axis: 0 (take the mean) when the noise
    variance exceeds the local variance or the latter vanishes, else 1 - sn2/var."""
    safe = np.where(var > 0, var, 1.0)
    return np.where((sn2 > var) | (var <= 0), 0.0, 1.0 - sn2 / safe)


def _mmse(rows, cols, w, wsum, has, normals, mean, kind):
    m = len(normals)
    nc = normals[cols]
    outer = (nc[:, :, None] * nc[:, None, :]).reshape(-1, 9)
    second = np.zeros((m, 9))
    second[has] = _weighted_sums(rows, w, outer, m)[has] / wsum[has, None]
    cov = second.reshape(m, 3, 3) - mean[:, :, None] * mean[:, None, :]
    sn2 = kind.mmse_noise_variance
    delta = normals - mean
    if kind.mmse_frame == "world":
        var = np.diagonal(cov, axis1=1, axis2=2)
        return mean + _blend_weight(var, sn2) * delta
    var, axes = np.linalg.eigh(cov)
    wk = _blend_weight(var, sn2)
    local = np.einsum("tji,tj->ti", axes, delta)
    return mean + np.einsum("tij,tj->ti", axes, wk * local)


def smooth_normals(
    mesh: Mesh,
    adj: AdjacencyIndex,
    normals: np.ndarray,
    kind: NormalFilterKind,
    diagnostics: Counter | None = None,
) -> np.ndarray:
    """One smoothing pass over the per-triangle normal field.

    Mean and MMSE average over the neighborhood including the triangle itself;
    min and median select among the neighbors only. Triangles whose result is
    undefined keep their input normal and are counted in ``diagnostics``.
    """
    diagnostics = Counter() if diagnostics is None else diagnostics
    normals = np.asarray(normals, dtype=np.float64)
    m = mesh.n_triangles
    live = np.linalg.norm(normals, axis=1) > 0
    if kind.tag in (NormalFilter.MIN, NormalFilter.MEDIAN):
        return _select(normals, live, adj, kind.tag is NormalFilter.MEDIAN, diagnostics)

    area = np.where(live, triangle_areas(mesh), 0.0)
    rows, cols = _closed_neighborhood(adj)
    w = area[cols]
    wsum = np.bincount(rows, weights=w, minlength=m)
    has = wsum > 0
    mean = np.zeros_like(normals)
    mean[has] = _weighted_sums(rows, w, normals[cols], m)[has] / wsum[has, None]

    if kind.tag is NormalFilter.MEAN:
        raw = mean
    elif kind.mmse_noise_variance == 0:
        # zero noise: every axis keeps the input component
        raw = normals
    else:
        raw = _mmse(rows, cols, w, wsum, has, normals, mean, kind)

    unit, ok = _unit_rows(raw)
    keep = live & ~(ok & has)
    diagnostics["zero_average"] += int(np.count_nonzero(keep))
    # rows the filter left untouched pass through without renormalization
    keep |= np.all(raw == normals, axis=1)
    out = np.where(keep[:, None], normals, unit)
    out[~live] = normals[~live]
    return out


def update_vertices_from_normals(mesh: Mesh, adj: AdjacencyIndex, normals: np.ndarray) -> Mesh:
    """Move each vertex by the area-weighted mean of its projections onto the
    normals of incident triangles: ``((C(T) - P) . m(T)) m(T)``."""
    normals = np.asarray(normals, dtype=np.float64)
    area = triangle_areas(mesh)
    cen = triangle_centroids(mesh)
    vt = adj.vertex_triangles
    rows, tri = vt.rows(), vt.indices
    p = mesh.vertices
    m = normals[tri]
    proj = np.sum((cen[tri] - p[rows]) * m, axis=1)
    w = area[tri]
    n = mesh.n_vertices
    wsum = np.bincount(rows, weights=w, minlength=n)
    disp = _weighted_sums(rows, w * proj, m, n)
    moved = wsum > 0
    out = p.copy()
    out[moved] += disp[moved] / wsum[moved, None]
    return mesh.with_vertices(out)


def normal_filter_step(mesh: Mesh, adj: AdjacencyIndex, kind: NormalFilterKind, diagnostics=None) -> Mesh:
    field = smooth_normals(mesh, adj, triangle_normals(mesh), kind, diagnostics)
    return update_vertices_from_normals(mesh, adj, field)


def run_normal_filter(mesh: Mesh, kind: NormalFilterKind, iterations: int, adj=None, diagnostics=None) -> Mesh:
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    adj = adj or build_adjacency(mesh)
    for _ in range(iterations):
        mesh = normal_filter_step(mesh, adj, kind, diagnostics)
    return mesh
