"""Independent brute-force oracles used to cross-check assembly and geometry.

Everything here is deliberately written with plain loops and its own
quadrature table so it shares no code path with the package.
"""

import numpy as np

# Degree-2 Gauss rule on the triangle, written out independently.
_QPOINTS = [
    (2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0),
    (1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0),
    (1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0),
]
_QWEIGHTS = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]


def tri_area(coords):
    (x0, y0), (x1, y1), (x2, y2) = coords
    return 0.5 * ((x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0))


def hat_gradients(coords):
    """Gradients of the three nodal basis functions on one triangle."""
    (x0, y0), (x1, y1), (x2, y2) = coords
    two_a = 2.0 * tri_area(coords)
    return [
        ((y1 - y2) / two_a, (x2 - x1) / two_a),
        ((y2 - y0) / two_a, (x0 - x2) / two_a),
        ((y0 - y1) / two_a, (x1 - x0) / two_a),
    ]


def gauss_mass(coords):
    """Element mass matrix via the quadrature rule."""
    area = tri_area(coords)
    m = np.zeros((3, 3))
    for (l0, l1, l2), w in zip(_QPOINTS, _QWEIGHTS):
        lam = (l0, l1, l2)
        for i in range(3):
            for j in range(3):
                m[i, j] += w * area * lam[i] * lam[j]
    return m


def gauss_stiffness(coords):
    """Element stiffness matrix via the quadrature rule."""
    area = tri_area(coords)
    g = hat_gradients(coords)
    k = np.zeros((3, 3))
    for _, w in zip(_QPOINTS, _QWEIGHTS):
        for i in range(3):
            for j in range(3):
                k[i, j] += w * area * (g[i][0] * g[j][0] + g[i][1] * g[j][1])
    return k


def gauss_weighted_mass(coords, weights):
    """Element drag matrix with a vertex-interpolated weight."""
    area = tri_area(coords)
    m = np.zeros((3, 3))
    for (l0, l1, l2), w in zip(_QPOINTS, _QWEIGHTS):
        lam = (l0, l1, l2)
        speed = sum(weights[i] * lam[i] for i in range(3))
        for i in range(3):
            for j in range(3):
                m[i, j] += w * area * speed * lam[i] * lam[j]
    return m


def gauss_pressure_load(coords, eta):
    """Element load with entries integral of grad(eta) . phi_i, per component."""
    area = tri_area(coords)
    g = hat_gradients(coords)
    grad = [
        sum(eta[i] * g[i][0] for i in range(3)),
        sum(eta[i] * g[i][1] for i in range(3)),
    ]
    load = np.zeros((3, 2))
    for (l0, l1, l2), w in zip(_QPOINTS, _QWEIGHTS):
        lam = (l0, l1, l2)
        for i in range(3):
            load[i, 0] += w * area * grad[0] * lam[i]
            load[i, 1] += w * area * grad[1] * lam[i]
    return load


def shoelace(coords):
    total = 0.0
    n = len(coords)
    for i in range(n):
        x0, y0 = coords[i]
        x1, y1 = coords[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return 0.5 * total


def brute_locate(vertices, triangles, point, tol=1e-12):
    """Scan every triangle; return (index, barycentric) or (None, None)."""
    for t, tri in enumerate(triangles):
        a, b, c = (vertices[i] for i in tri)
        area = tri_area((a, b, c))
        la = tri_area((point, b, c)) / area
        lb = tri_area((a, point, c)) / area
        lc = tri_area((a, b, point)) / area
        if la >= -tol and lb >= -tol and lc >= -tol:
            return t, np.array([la, lb, lc])
    return None, None


def random_triangles(count, rng, min_area=1e-3):
    """Non-degenerate random triangles with coordinates in [0, 1]^2."""
    out = []
    while len(out) < count:
        coords = rng.random((3, 2))
        if tri_area(coords) < min_area:
            coords = coords[::-1]
        if tri_area(coords) >= min_area:
            out.append(coords)
    return out
