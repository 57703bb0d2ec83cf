"""Discrete contact-line operator on the reference boundary curve.

The regularizing operator acting on boundary traces is the arclength
Laplace-Beltrami, whose square root is discretized by periodic three-point
second differences with non-uniform spacing. Its quadratic form, the gram
matrix below, controls the discrete curve-smoothness seminorm; constants
(rigid translations of the contact line) are exactly in the kernel.

Everything is built once from the frozen reference curve and never touches
the deformed boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_SEGMENT_LENGTH = 1e-12


@dataclass
class BoundaryOperator:
    """Square-root operator and its quadrature gram matrix on the curve.

    halfroot annihilates constants exactly by construction; gram is the
    arclength-weighted normal product halfroot^T W halfroot, symmetric
    positive semi-definite. Both act componentwise on 2-vector traces.
    """

    seg_lengths: np.ndarray  # (B,) segment i joins node i to node i+1 (cyclic)
    node_weights: np.ndarray  # (B,) arclength quadrature weight per node
    halfroot: np.ndarray  # (B, B)
    gram: np.ndarray  # (B, B)

    @property
    def size(self) -> int:
        return self.seg_lengths.shape[0]


def build_boundary_operator(gamma0: np.ndarray) -> BoundaryOperator:
    """Build the operator from the ordered closed reference polyline."""
    coords = np.asarray(gamma0, dtype=np.float64)
    n = coords.shape[0]
    if n < 4:
        raise ValueError("boundary operator needs at least 4 nodes")
    seg = np.roll(coords, -1, axis=0) - coords
    s = np.linalg.norm(seg, axis=1)
    if s.min() < MIN_SEGMENT_LENGTH:
        raise ValueError(f"degenerate boundary segment of length {s.min():.3e}")

    s_prev = np.roll(s, 1)  # segment ending at node i
    half = np.zeros((n, n))
    idx = np.arange(n)
    c_next = 2.0 / (s * (s + s_prev))
    c_prev = 2.0 / (s_prev * (s + s_prev))
    half[idx, (idx + 1) % n] = c_next
    half[idx, (idx - 1) % n] = c_prev
    half[idx, idx] = -(c_next + c_prev)  # exact row-sum cancellation

    w = 0.5 * (s + s_prev)
    gram = half.T @ (w[:, None] * half)
    gram = 0.5 * (gram + gram.T)
    return BoundaryOperator(seg_lengths=s, node_weights=w, halfroot=half, gram=gram)


def boundary_system_terms(
    op: BoundaryOperator, u_boundary_prev: np.ndarray, dt: float
) -> tuple[np.ndarray, np.ndarray]:
    """Left and right contributions of the contact-line pairing for one step.

    The implicit trace term lands on the matrix as gram/dt; the explicit
    previous-step trace moves to the right-hand side as gram @ u_prev / dt.
    Both act per velocity component on the boundary-node block.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    u_prev = np.asarray(u_boundary_prev, dtype=np.float64)
    if u_prev.shape[0] != op.size:
        raise ValueError("previous trace must cover every boundary node")
    lhs = op.gram / dt
    rhs = (op.gram @ u_prev) / dt
    return lhs, rhs
