import math

import numpy as np
import pytest
from scipy.spatial import Delaunay
from scipy.spatial.transform import Rotation

from meshflow.mesh import Mesh, icosphere


def random_rotation(seed):
    return Rotation.random(random_state=seed).as_matrix()


def height_field(seed, n_points=60, amp=0.3):
    """Random Delaunay triangulation of the unit square lifted to a bumpy surface."""
    rng = np.random.default_rng(seed)
    xy = rng.random((n_points, 2))
    tri = Delaunay(xy).simplices
    z = amp * np.sin(3 * xy[:, 0]) * np.cos(2 * xy[:, 1]) + 0.02 * rng.standard_normal(n_points)
    return Mesh(np.column_stack([xy, z]), tri)


def noisy_sphere(seed, level=1, sigma=0.05):
    m = icosphere(level)
    rng = np.random.default_rng(seed)
    return m.with_vertices(m.vertices + sigma * rng.standard_normal(m.vertices.shape))


def random_mesh(seed):
    return height_field(seed) if seed % 2 else noisy_sphere(seed, level=1 + seed % 3)


def single_triangle():
    return Mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])


def tetrahedron():
    v = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
    v = np.array(v, dtype=float) / math.sqrt(8)  # edge length 1
    return Mesh(v, [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]])


def square_pyramid(height=1.0):
    v = [[0, 0, height], [1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]]
    return Mesh(v, [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1], [1, 4, 3], [1, 3, 2]])


def hexagon_fan(apex_height=1.0):
    ring = [[math.cos(k * math.pi / 3), math.sin(k * math.pi / 3), 0.0] for k in range(6)]
    v = [[0.0, 0.0, apex_height]] + ring
    return Mesh(v, [[0, 1 + k, 1 + (k + 1) % 6] for k in range(6)])


@pytest.fixture
def tri():
    return single_triangle()


@pytest.fixture
def tet():
    return tetrahedron()


@pytest.fixture(scope="session")
def sphere1():
    return icosphere(1)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(RESULTS):
        status, title, elapsed, budget, msg = RESULTS[num]
        line = f"[{status}] criterion {num:2d}: {title} ({elapsed:.2f}s / {budget:g}s)"
        tr.write_line(line + (f" :: {msg}" if msg else ""))
