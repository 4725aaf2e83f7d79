"""ASCII OBJ / OFF reading and writing."""
from __future__ import annotations

import enum
from pathlib import Path

import numpy as np

from .mesh import Mesh, MeshError


class MeshFormat(enum.Enum):
    OBJ = "obj"
    OFF = "off"

    @classmethod
    def from_path(cls, path) -> "MeshFormat":
        suffix = Path(path).suffix.lower().lstrip(".")
        try:
            return cls(suffix)
        except ValueError:
            raise MeshError(f"cannot infer mesh format from {str(path)!r}") from None


class MeshParseError(MeshError):
    def __init__(self, path, lineno, msg):
        self.path, self.lineno = path, lineno
        super().__init__(f"{path}:{lineno}: {msg}")


def _fan(poly):
    return [(poly[0], poly[k], poly[k + 1]) for k in range(1, len(poly) - 1)]


def _floats(tokens, path, lineno):
    try:
        out = [float(x) for x in tokens]
    except ValueError:
        raise MeshParseError(path, lineno, f"non-numeric coordinate in {' '.join(tokens)!r}") from None
    if not np.all(np.isfinite(out)):
        raise MeshParseError(path, lineno, "non-finite coordinate")
    return out


def _parse_obj(lines, path):
    verts, faces, face_lines = [], [], []
    for lineno, line in enumerate(lines, 1):
        tok = line.split("#", 1)[0].split()
        if not tok:
            continue
        if tok[0] == "v":
            if len(tok) < 4:
                raise MeshParseError(path, lineno, "vertex needs 3 coordinates")
            verts.append(_floats(tok[1:4], path, lineno))
        elif tok[0] == "f":
            if len(tok) < 4:
                raise MeshParseError(path, lineno, "face with fewer than 3 vertices")
            poly = []
            for ref in tok[1:]:
                try:
                    k = int(ref.split("/")[0])
                except ValueError:
                    raise MeshParseError(path, lineno, f"bad face index {ref!r}") from None
                # negative indices are relative to the vertices read so far
                idx = k - 1 if k > 0 else len(verts) + k
                if k == 0 or idx < 0:
                    raise MeshParseError(path, lineno, f"face index {k} out of range")
                poly.append(idx)
            for tri in _fan(poly):
                faces.append(tri)
                face_lines.append(lineno)
    n = len(verts)
    for tri, lineno in zip(faces, face_lines):
        if max(tri) >= n:
            raise MeshParseError(path, lineno, f"face index {max(tri) + 1} out of range (only {n} vertices)")
        if len(set(tri)) < 3:
            raise MeshParseError(path, lineno, "face repeats a vertex")
    return Mesh(np.array(verts, dtype=np.float64).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3))


def _parse_off(lines, path):
    rows = []
    for lineno, line in enumerate(lines, 1):
        tok = line.split("#", 1)[0].split()
        if tok:
            rows.append((lineno, tok))
    if not rows or not rows[0][1][0].endswith("OFF"):
        raise MeshParseError(path, rows[0][0] if rows else 1, "missing OFF header")
    lineno, head = rows[0]
    tok = head[1:]
    pos = 1
    if not tok:
        if len(rows) < 2:
            raise MeshParseError(path, lineno, "missing counts line")
        lineno, tok = rows[1]
        pos = 2
    try:
        nv, nf = int(tok[0]), int(tok[1])
    except (ValueError, IndexError):
        raise MeshParseError(path, lineno, "bad counts line") from None
    if len(rows) < pos + nv + nf:
        raise MeshParseError(path, rows[-1][0], "file ends before all vertices and faces")
    verts = []
    for lineno, tok in rows[pos:pos + nv]:
        if len(tok) < 3:
            raise MeshParseError(path, lineno, "vertex needs 3 coordinates")
        verts.append(_floats(tok[:3], path, lineno))
    faces = []
    for lineno, tok in rows[pos + nv:pos + nv + nf]:
        try:
            k = int(tok[0])
            poly = [int(x) for x in tok[1:1 + k]]
        except (ValueError, IndexError):
            raise MeshParseError(path, lineno, "bad face record") from None
        if k < 3 or len(poly) != k:
            raise MeshParseError(path, lineno, "face with fewer than 3 vertices")
        if min(poly) < 0 or max(poly) >= nv:
            raise MeshParseError(path, lineno, "face index out of range")
        if len(set(poly)) < k:
            raise MeshParseError(path, lineno, "face repeats a vertex")
        faces.extend(_fan(poly))
    return Mesh(np.array(verts, dtype=np.float64).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3))


def parse_mesh(text: str, fmt: MeshFormat, path="<string>") -> Mesh:
    lines = text.splitlines()
    return _parse_obj(lines, path) if fmt is MeshFormat.OBJ else _parse_off(lines, path)


def load_mesh(path, fmt: MeshFormat | None = None) -> Mesh:
    """Read an OBJ or OFF file; polygons are fan-triangulated, indices become 0-based."""
    fmt = fmt or MeshFormat.from_path(path)
    with open(path, encoding="utf-8") as f:
        text = f.read()
    return parse_mesh(text, fmt, path)


def format_mesh(mesh: Mesh, fmt: MeshFormat) -> str:
    # repr() round-trips float64 exactly
    vlines = [" ".join(repr(float(x)) for x in p) for p in mesh.vertices]
    if fmt is MeshFormat.OBJ:
        out = [f"v {s}" for s in vlines]
        out += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.triangles.tolist()]
    else:
        out = ["OFF", f"{mesh.n_vertices} {mesh.n_triangles} 0"] + vlines
        out += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles.tolist()]
    return "\n".join(out) + "\n"


def save_mesh(mesh: Mesh, path, fmt: MeshFormat | None = None) -> None:
    fmt = fmt or MeshFormat.from_path(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_mesh(mesh, fmt))
