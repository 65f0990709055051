"""Finite-element assembly on axisymmetric meshes.

Piecewise linear Lagrange elements with one-point (centroid) quadrature;
the cylindrical measure contributes a 2*pi*r_bar factor per element and a
2*pi*r weight on boundary line integrals. Mass matrices are lumped
(row-sum), which keeps nodal energy bookkeeping exact.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

TWO_PI = 2.0 * math.pi


def _nodal(mesh, coeff):
    arr = np.asarray(coeff, dtype=float)
    if arr.ndim == 0:
        arr = np.full(mesh.n_nodes, float(arr))
    if arr.shape != (mesh.n_nodes,):
        raise ValueError("coefficient must be scalar or one value per node")
    return arr


def assemble_stiffness(mesh, coeff):
    """Stiffness matrix for integrand coeff * grad(u) . grad(v) * 2 pi r."""
    c = _nodal(mesh, coeff)
    if not np.all(c > 0.0):
        raise ValueError("stiffness coefficient must be positive nodewise")
    c_bar = c[mesh.triangles].mean(axis=1)
    scale = c_bar * TWO_PI * mesh.centroid_r / (4.0 * mesh.areas)
    b, cc = mesh.grad_b, mesh.grad_c
    rows, cols, data = [], [], []
    for i in range(3):
        for j in range(3):
            rows.append(mesh.triangles[:, i])
            cols.append(mesh.triangles[:, j])
            data.append(scale * (b[:, i] * b[:, j] + cc[:, i] * cc[:, j]))
    n = mesh.n_nodes
    matrix = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n)).tocsr()
    return matrix


def lumped_mass_diagonal(mesh, coeff):
    """Diagonal of the lumped mass matrix with nodal coefficient coeff."""
    c = _nodal(mesh, coeff)
    if not np.all(c > 0.0):
        raise ValueError("mass coefficient must be positive nodewise")
    c_bar = c[mesh.triangles].mean(axis=1)
    w = c_bar * TWO_PI * mesh.centroid_r * mesh.areas / 3.0
    return np.bincount(mesh.triangles.ravel(), weights=np.repeat(w, 3),
                       minlength=mesh.n_nodes)


def assemble_mass_lumped(mesh, coeff):
    """Lumped (diagonal) mass matrix; trace equals int coeff 2 pi r dr dz."""
    return sp.diags(lumped_mass_diagonal(mesh, coeff), format="csr")


def boundary_measure_weights(mesh, tag):
    """Lumped weights of int v 2 pi r dGamma over the edges with one tag."""
    edges = mesh.edges_with_tag(tag)
    w = np.zeros(mesh.n_nodes)
    if len(edges) == 0:
        return w
    p, q = mesh.nodes[edges[:, 0]], mesh.nodes[edges[:, 1]]
    length = np.hypot(p[:, 0] - q[:, 0], p[:, 1] - q[:, 1])
    # Row-sum lumping of the consistent edge mass with linear r weight.
    np.add.at(w, edges[:, 0], TWO_PI * length * (2.0 * p[:, 0] + q[:, 0]) / 6.0)
    np.add.at(w, edges[:, 1], TWO_PI * length * (p[:, 0] + 2.0 * q[:, 0]) / 6.0)
    return w


def assemble_boundary(mesh, tag_weights):
    """Boundary mass matrix plus a Robin load builder.

    tag_weights maps boundary tags to nonnegative coefficients; the matrix
    carries weight * u * v * 2 pi r over the tagged edges (lumped). The
    returned builder maps (tag, external value) to the matching load vector
    weight * value * int v 2 pi r dGamma.
    """
    known = set(mesh.tags)
    measures = {}
    diag = np.zeros(mesh.n_nodes)
    for tag, weight in tag_weights.items():
        if tag not in known:
            raise ValueError(f"unknown boundary tag {tag!r}; "
                             f"mesh has {sorted(known)}")
        if weight < 0.0:
            raise ValueError(f"boundary weight for {tag!r} must be >= 0")
        measures[tag] = boundary_measure_weights(mesh, tag)
        diag += weight * measures[tag]
    matrix = sp.diags(diag, format="csr")
    matrix.eliminate_zeros()

    def load(tag, external_value):
        if tag not in measures:
            raise ValueError(f"no boundary weight registered for tag {tag!r}")
        return tag_weights[tag] * external_value * measures[tag]

    return matrix, load
