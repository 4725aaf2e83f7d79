"""Slow, literal reference computations used as test oracles.

Everything here works on plain lists with explicit loops and shares no code
with the package beyond reading ``mesh.vertices`` / ``mesh.triangles``.
"""
import math
from itertools import combinations


def sub(a, b):
    return [a[0] - b[0], a[1] - b[1], a[2] - b[2]]


def add(a, b):
    return [a[0] + b[0], a[1] + b[1], a[2] + b[2]]


def scale(a, s):
    return [a[0] * s, a[1] * s, a[2] * s]


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def norm(a):
    return math.sqrt(dot(a, a))


def unit(a):
    n = norm(a)
    return [0.0, 0.0, 0.0] if n == 0 else scale(a, 1.0 / n)


def lists(mesh):
    return [list(map(float, p)) for p in mesh.vertices], [list(map(int, t)) for t in mesh.triangles]


def one_rings(mesh):
    v, tris = lists(mesh)
    ring = {i: set() for i in range(len(v))}
    for t in tris:
        for a, b in combinations(t, 2):
            ring[a].add(b)
            ring[b].add(a)
    return ring


def face_neighbors(mesh):
    _, tris = lists(mesh)
    out = []
    for i, t in enumerate(tris):
        out.append({j for j, u in enumerate(tris) if j != i and set(t) & set(u)})
    return out


def edge_lengths(mesh):
    v, tris = lists(mesh)
    seen = set()
    for t in tris:
        for a, b in combinations(t, 2):
            seen.add((min(a, b), max(a, b)))
    return [norm(sub(v[a], v[b])) for a, b in sorted(seen)]


def frame(mesh, t):
    v, tris = lists(mesh)
    a, b, c = (v[k] for k in tris[t])
    n = cross(sub(b, a), sub(c, a))
    return unit(n), 0.5 * norm(n), scale(add(add(a, b), c), 1 / 3)


def gradient(v, ring, i):
    di = len(ring[i])
    if di == 0:
        return 0.0
    s = 0.0
    for j in ring[i]:
        dj = len(ring[j])
        d = sub(scale(v[i], 1 / math.sqrt(di)), scale(v[j], 1 / math.sqrt(dj)))
        s += dot(d, d)
    return math.sqrt(s)


def g_literal(kind, x, c):
    r = x / c
    if kind == "cauchy":
        return 1 / (1 + x ** 2 / c ** 2)
    if kind == "gaussian":
        return math.sqrt(1 / (2 * math.pi)) * math.exp(-(r ** 2) / 2)
    if kind == "laplace":
        return math.exp(-abs(r)) / 2
    return math.exp(-(r ** 2) / 2) * r


def diffusion_step(mesh, kind, c, step=1.0, order=None):
    """One update of the degree-normalized diffusion, neighbors visited in ``order`` (a callable)."""
    v, _ = lists(mesh)
    ring = one_rings(mesh)
    grad = [gradient(v, ring, i) for i in range(len(v))]
    out = []
    for i in range(len(v)):
        di = len(ring[i])
        acc = [0.0, 0.0, 0.0]
        nbrs = list(ring[i]) if order is None else order(list(ring[i]))
        for j in nbrs:
            dj = len(ring[j])
            diff = sub(scale(v[j], 1 / math.sqrt(dj)), scale(v[i], 1 / math.sqrt(di)))
            w = g_literal(kind, grad[i], c) + g_literal(kind, grad[j], c)
            acc = add(acc, scale(diff, w / math.sqrt(di)))
        out.append(add(v[i], scale(acc, step)) if di else v[i])
    return out


def _seg_dist(p, a, b):
    ab = sub(b, a)
    den = dot(ab, ab)
    t = 0.0 if den == 0 else max(0.0, min(1.0, dot(sub(p, a), ab) / den))
    return norm(sub(p, add(a, scale(ab, t))))


def point_triangle(p, a, b, c):
    """Project onto the plane; inside -> plane distance, else nearest of the three edges."""
    n = cross(sub(b, a), sub(c, a))
    nn = dot(n, n)
    if nn > 0:
        q = sub(p, scale(n, dot(sub(p, a), n) / nn))
        # barycentric signs via sub-triangle orientation
        s1 = dot(cross(sub(b, a), sub(q, a)), n)
        s2 = dot(cross(sub(c, b), sub(q, b)), n)
        s3 = dot(cross(sub(a, c), sub(q, c)), n)
        if s1 >= 0 and s2 >= 0 and s3 >= 0:
            return abs(dot(sub(p, a), n)) / math.sqrt(nn)
    return min(_seg_dist(p, a, b), _seg_dist(p, b, c), _seg_dist(p, c, a))


def mesh_distance(p, ref):
    v, tris = lists(ref)
    return min(point_triangle(p, v[a], v[b], v[c]) for a, b, c in tris)


def eps_v(mesh, ref):
    v, tris = lists(mesh)
    areas = [frame(mesh, t)[1] for t in range(len(tris))]
    total = sum(areas)
    s = 0.0
    for i, p in enumerate(v):
        ap = sum(areas[t] for t, tri in enumerate(tris) if i in tri)
        s += ap * mesh_distance(p, ref) ** 2
    return s / (3 * total)


def eps_f(mesh, ref):
    _, tris = lists(mesh)
    num = den = 0.0
    for t in range(len(tris)):
        n, a, _ = frame(mesh, t)
        n_ref = frame(ref, t)[0]
        if a == 0:
            continue
        d = sub(n_ref, n)
        num += a * dot(d, d)
        den += a
    return num / den


def mean_filter_normals(mesh):
    tris = lists(mesh)[1]
    frames = [frame(mesh, t) for t in range(len(tris))]
    nb = face_neighbors(mesh)
    out = []
    for t in range(len(tris)):
        acc, w = [0.0, 0.0, 0.0], 0.0
        for u in sorted(nb[t] | {t}):
            n, a, _ = frames[u]
            acc = add(acc, scale(n, a))
            w += a
        out.append(unit(scale(acc, 1 / w)))
    return out


def vertex_update(mesh, normals):
    v, tris = lists(mesh)
    frames = [frame(mesh, t) for t in range(len(tris))]
    out = []
    for i, p in enumerate(v):
        acc, w = [0.0, 0.0, 0.0], 0.0
        for t, tri in enumerate(tris):
            if i not in tri:
                continue
            _, a, cen = frames[t]
            m = normals[t]
            acc = add(acc, scale(m, a * dot(sub(cen, p), m)))
            w += a
        out.append(add(p, scale(acc, 1 / w)) if w else p)
    return out
