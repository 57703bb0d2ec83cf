"""Vertex-valued (P1) fields on a triangulation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .mesh import TriMesh


@dataclass
class NodalField:
    """Piecewise-linear field given by one scalar or 2-vector per vertex.

    ``values`` has shape (V,) for scalars or (V, 2) for vectors, where V is
    the vertex count of ``mesh``. All values must be finite.
    """

    mesh: "TriMesh"
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        nv = self.mesh.num_vertices
        if vals.ndim == 1:
            if vals.shape != (nv,):
                raise ValueError(f"scalar field has {vals.shape[0]} values for {nv} vertices")
        elif vals.ndim == 2:
            if vals.shape != (nv, 2):
                raise ValueError(f"vector field has shape {vals.shape}, expected ({nv}, 2)")
        else:
            raise ValueError(f"field values must be (V,) or (V, 2), got shape {vals.shape}")
        if not np.isfinite(vals).all():
            raise ValueError("field contains non-finite values")
        self.values = vals

    @property
    def is_vector(self) -> bool:
        return self.values.ndim == 2

    def with_values(self, values: np.ndarray) -> "NodalField":
        """New field on the same mesh."""
        return NodalField(self.mesh, values)
