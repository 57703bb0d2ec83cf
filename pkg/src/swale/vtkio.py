"""Legacy ASCII VTK snapshot writer (unstructured grid, triangle cells)."""

from __future__ import annotations

import numpy as np

from .stepper import SimState


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_vtk_snapshot(path: str, state: SimState, title: str = "swale snapshot") -> None:
    """One snapshot with point data h, eta, |u| and the velocity vector."""
    mesh = state.mesh
    h = state.h.values
    eta = h - state.topo.values
    u = state.u.values
    speed = np.linalg.norm(u, axis=1)

    lines = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {mesh.num_vertices} double",
    ]
    for x, y in mesh.vertices:
        lines.append(f"{_fmt(x)} {_fmt(y)} 0")
    lines.append(f"CELLS {mesh.num_triangles} {4 * mesh.num_triangles}")
    for a, b, c in mesh.triangles:
        lines.append(f"3 {a} {b} {c}")
    lines.append(f"CELL_TYPES {mesh.num_triangles}")
    lines.extend(["5"] * mesh.num_triangles)
    lines.append(f"POINT_DATA {mesh.num_vertices}")
    for name, arr in (("h", h), ("eta", eta), ("speed", speed)):
        lines.append(f"SCALARS {name} double 1")
        lines.append("LOOKUP_TABLE default")
        lines.extend(_fmt(v) for v in arr)
    lines.append("VECTORS velocity double")
    for ux, uy in u:
        lines.append(f"{_fmt(ux)} {_fmt(uy)} 0")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
