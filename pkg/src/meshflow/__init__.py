"""Triangle mesh denoising: normal-field filters, Laplacian flow, anisotropic
vertex diffusion, and L2 error metrics."""
from .io import MeshFormat, load_mesh, save_mesh
from .mesh import AdjacencyIndex, Mesh, MeshError, build_adjacency, icosphere, mean_edge_length
from .metrics import ErrorReport, build_spatial_index, error_report, face_normal_error, vertex_position_error
from .noise import NoiseSpec, add_gaussian_noise
from .normal_filters import NormalFilter, NormalFilterKind, run_normal_filter
from .vertex_filters import (
    DiffusionConfig,
    DiffusivityKind,
    LaplacianConfig,
    diffusivity,
    run_laplacian_flow,
    run_vertex_diffusion,
)

__all__ = [
    "AdjacencyIndex", "DiffusionConfig", "DiffusivityKind", "ErrorReport", "LaplacianConfig", "Mesh",
    "MeshError", "MeshFormat", "NoiseSpec", "NormalFilter", "NormalFilterKind", "add_gaussian_noise",
    "build_adjacency", "build_spatial_index", "diffusivity", "error_report", "face_normal_error",
    "icosphere", "load_mesh", "mean_edge_length", "run_laplacian_flow", "run_normal_filter",
    "run_vertex_diffusion", "save_mesh", "vertex_position_error",
]
__version__ = "0.1.0"
