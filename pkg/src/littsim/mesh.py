"""Axisymmetric (r, z) triangle meshes with tagged boundaries.

The tissue domain is the meridian half-section of a cylinder with the
applicator slot removed; rotational symmetry puts the 2*pi*r weight into
every volume and surface integral. Scalar fields on a mesh are plain
float arrays with one value per node.

Boundary tags:
    TAG_RAD   radiating diffuser span on the applicator wall
    TAG_COOL  remaining applicator wall and tip face (water cooled)
    TAG_AMB   outer surface of the tissue block
    TAG_AXIS  symmetry axis r = 0 (natural condition, no boundary term)
"""

from __future__ import annotations

import math

import numpy as np

TAG_RAD = "rad"
TAG_COOL = "cool"
TAG_AMB = "amb"
TAG_AXIS = "axis"

_MIN_AREA = 1e-16  # m^2, degeneracy threshold
_LOCATE_TOL = 1e-9  # m, how far outside a point may fall


class MeshError(ValueError):
    pass


class PointOutsideDomain(MeshError):
    pass


class AxiMesh:
    """Triangulated (r, z) half-section with tagged boundary edges.

    Immutable after construction; the constructor validates orientation,
    degeneracy, r >= 0, and that the tagged edges are exactly the boundary
    edges of the triangulation.
    """

    def __init__(self, nodes, triangles, edges, edge_tags):
        self.nodes = np.ascontiguousarray(nodes, dtype=float)
        self.triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        self.edges = np.ascontiguousarray(edges, dtype=np.int64)
        self.edge_tags = np.asarray(edge_tags, dtype=object)
        self._validate_shapes()
        self._precompute_geometry()
        self._validate_boundary()
        for arr in (self.nodes, self.triangles, self.edges):
            arr.setflags(write=False)

    # -- construction helpers ------------------------------------------------

    def _validate_shapes(self):
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 2:
            raise MeshError("nodes must be an (n, 2) array of (r, z)")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise MeshError("triangles must be an (m, 3) index array")
        if self.edges.shape[0] != self.edge_tags.shape[0]:
            raise MeshError("one tag per boundary edge required")
        if np.any(self.nodes[:, 0] < 0.0):
            raise MeshError("all radii must satisfy r >= 0")

    def _precompute_geometry(self):
        tri = self.triangles
        r = self.nodes[:, 0][tri]  # (m, 3)
        z = self.nodes[:, 1][tri]
        # P1 gradient coefficients: grad(lambda_i) = (b_i, c_i) / (2 A)
        b = np.empty_like(r)
        c = np.empty_like(r)
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            b[:, i] = z[:, j] - z[:, k]
            c[:, i] = r[:, k] - r[:, j]
        area2 = r[:, 0] * b[:, 0] + r[:, 1] * b[:, 1] + r[:, 2] * b[:, 2]
        if np.any(area2 <= 2.0 * _MIN_AREA):
            raise MeshError("triangles must be positively oriented and "
                            f"non-degenerate (area > {_MIN_AREA:g} m^2)")
        self.areas = 0.5 * area2
        self.grad_b = b
        self.grad_c = c
        self.centroid_r = r.mean(axis=1)
        # Lumped volume weights: each vertex of K receives 2 pi r_bar |K| / 3.
        w = (2.0 * math.pi) * self.centroid_r * self.areas / 3.0
        self.lumped_volumes = np.bincount(
            tri.ravel(), weights=np.repeat(w, 3), minlength=self.n_nodes)
        # Heights used to convert barycentric deficits into distances.
        lengths = np.stack([np.hypot(self.nodes[tri[:, (i + 2) % 3], 0]
                                     - self.nodes[tri[:, (i + 1) % 3], 0],
                                     self.nodes[tri[:, (i + 2) % 3], 1]
                                     - self.nodes[tri[:, (i + 1) % 3], 1])
                            for i in range(3)], axis=1)
        self._heights = 2.0 * self.areas[:, None] / lengths

    def _validate_boundary(self):
        pairs = np.concatenate([self.triangles[:, [0, 1]],
                                self.triangles[:, [1, 2]],
                                self.triangles[:, [2, 0]]])
        pairs.sort(axis=1)
        uniq, counts = np.unique(pairs, axis=0, return_counts=True)
        boundary = {tuple(e) for e in uniq[counts == 1]}
        if np.any(counts > 2):
            raise MeshError("non-manifold edge in triangulation")
        tagged = [tuple(sorted(e)) for e in self.edges]
        if len(set(tagged)) != len(tagged):
            raise MeshError("boundary edge tagged more than once")
        if set(tagged) != boundary:
            raise MeshError("tagged edges must be exactly the boundary edges")

    # -- basic queries ---------------------------------------------------------

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_triangles(self):
        return self.triangles.shape[0]

    @property
    def tags(self):
        return sorted(set(self.edge_tags))

    def edges_with_tag(self, tag):
        return self.edges[self.edge_tags == tag]

    def boundary_measure(self, tag=None):
        """Surface measure int 2 pi r dGamma of one tag (or all edges)."""
        edges = self.edges if tag is None else self.edges_with_tag(tag)
        p, q = self.nodes[edges[:, 0]], self.nodes[edges[:, 1]]
        length = np.hypot(p[:, 0] - q[:, 0], p[:, 1] - q[:, 1])
        r_mid = 0.5 * (p[:, 0] + q[:, 0])
        return float((2.0 * math.pi) * np.dot(length, r_mid))

    def locate(self, point):
        """Containing triangle and barycentric coordinates of a point.

        Accepts points up to 1e-9 m outside; raises PointOutsideDomain
        otherwise, naming the point.
        """
        p = np.asarray(point, dtype=float)
        v0 = self.nodes[self.triangles[:, 0]]
        d1 = self.nodes[self.triangles[:, 1]] - v0
        d2 = self.nodes[self.triangles[:, 2]] - v0
        dp = p[None, :] - v0
        det = 2.0 * self.areas
        u = (dp[:, 0] * d2[:, 1] - dp[:, 1] * d2[:, 0]) / det
        v = (d1[:, 0] * dp[:, 1] - d1[:, 1] * dp[:, 0]) / det
        bary = np.stack([1.0 - u - v, u, v], axis=1)
        deficit = np.maximum(-bary, 0.0) * self._heights
        worst = deficit.max(axis=1)
        best = int(np.argmin(worst))
        if worst[best] > _LOCATE_TOL:
            raise PointOutsideDomain(
                f"point (r={p[0]:g}, z={p[1]:g}) lies outside the mesh")
        w = np.clip(bary[best], 0.0, None)
        return best, w / w.sum()

    def dump_text(self, path):
        """Plain-text dump: node, triangle, and tagged-edge tables."""
        with open(path, "w", encoding="utf-8", newline="\n") as out:
            out.write(f"nodes {self.n_nodes}\n")
            for i, (r, z) in enumerate(self.nodes):
                out.write(f"{i} {r!r} {z!r}\n")
            out.write(f"triangles {self.n_triangles}\n")
            for a, b, c in self.triangles:
                out.write(f"{a} {b} {c}\n")
            out.write(f"edges {len(self.edges)}\n")
            for (a, b), tag in zip(self.edges, self.edge_tags):
                out.write(f"{a} {b} {tag}\n")


def interpolate_at(mesh, field, point):
    """P1 interpolation of a nodal field at an (r, z) point."""
    tri, bary = mesh.locate(point)
    return float(np.dot(bary, np.asarray(field)[mesh.triangles[tri]]))


def integrate(mesh, field, region_mask=None):
    """Lumped integral of a nodal field, optionally over a nodal mask.

    With field == 1 and a mask this returns the volume of the masked region.
    """
    values = np.asarray(field, dtype=float)
    if region_mask is None:
        return float(np.dot(mesh.lumped_volumes, values))
    mask = np.asarray(region_mask, dtype=bool)
    return float(np.dot(mesh.lumped_volumes[mask], values[mask]))


def _segment(a, b, h):
    """Points from a to b with spacing <= h (endpoints included)."""
    n = max(1, int(math.ceil((b - a) / h - 1e-9)))
    return np.linspace(a, b, n + 1)


def _graded_segment(a, b, h, h_start, ratio=1.3):
    """Points from a to b, spacing growing from h_start up to h.

    Every spacing is proportional to its cap, so halving h halves the whole
    profile (the refinement-factor invariant relies on this).
    """
    if h_start >= h or b - a <= h_start:
        return _segment(a, b, h)
    points = [a]
    step = h_start
    while points[-1] + 1.5 * step < b:
        points.append(points[-1] + step)
        step = min(step * ratio, h)
    tail = _segment(points[-1], b, step)[1:]
    return np.concatenate([np.asarray(points), tail])


def _lines(features, h):
    pieces = [_segment(a, b, h)[:-1] for a, b in zip(features, features[1:])]
    return np.concatenate(pieces + [features[-1:]])


def structured_mesh(r_lines, z_lines, tag_edge, keep_cell=None):
    """Right-triangle mesh over a product grid of r and z lines.

    keep_cell(r_center, z_center) decides which grid cells belong to the
    domain; tag_edge(r_mid, z_mid) names each boundary edge.
    """
    r_lines = np.asarray(r_lines, dtype=float)
    z_lines = np.asarray(z_lines, dtype=float)
    nr, nz = len(r_lines), len(z_lines)
    rr, zz = np.meshgrid(r_lines, z_lines, indexing="ij")
    grid_nodes = np.stack([rr.ravel(), zz.ravel()], axis=1)

    def gid(ir, iz):
        return ir * nz + iz

    tris = []
    for ir in range(nr - 1):
        for iz in range(nz - 1):
            rc = 0.5 * (r_lines[ir] + r_lines[ir + 1])
            zc = 0.5 * (z_lines[iz] + z_lines[iz + 1])
            if keep_cell is not None and not keep_cell(rc, zc):
                continue
            ll, lr = gid(ir, iz), gid(ir + 1, iz)
            ul, ur = gid(ir, iz + 1), gid(ir + 1, iz + 1)
            tris.append((ll, lr, ur))
            tris.append((ll, ur, ul))
    if not tris:
        raise MeshError("empty mesh: no cells kept")
    tris = np.asarray(tris, dtype=np.int64)

    used = np.zeros(nr * nz, dtype=bool)
    used[tris.ravel()] = True
    renumber = -np.ones(nr * nz, dtype=np.int64)
    renumber[used] = np.arange(int(used.sum()))
    nodes = grid_nodes[used]
    tris = renumber[tris]

    pairs = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    spairs = np.sort(pairs, axis=1)
    uniq, counts = np.unique(spairs, axis=0, return_counts=True)
    boundary = uniq[counts == 1]
    tags = []
    for a, b in boundary:
        rm = 0.5 * (nodes[a, 0] + nodes[b, 0])
        zm = 0.5 * (nodes[a, 1] + nodes[b, 1])
        tag = tag_edge(rm, zm)
        if not tag:
            raise MeshError(f"boundary edge at (r={rm:g}, z={zm:g}) "
                            "received no tag")
        tags.append(tag)
    return AxiMesh(nodes, tris, boundary, tags)


def build_mesh(settings, mesh_h=None):
    """Mesh the applicator geometry described by RunSettings.

    The tissue occupies [0, domain_radius] x [z_bottom, applicator_depth]
    minus the applicator slot (r < applicator_radius, z > 0); the tip sits
    at z = 0. Grid lines are snapped to every geometric feature, so each
    boundary edge lies exactly on the surface it is tagged with.
    """
    h = settings.mesh_h if mesh_h is None else mesh_h
    a = settings.applicator_radius
    big_r = settings.domain_radius
    depth = settings.applicator_depth
    diff = settings.diffuser_length
    if not a < big_r:
        raise MeshError("applicator_radius must be smaller than domain_radius")
    if not diff + depth < settings.domain_height:
        raise MeshError("diffuser_length + applicator_depth must be smaller "
                        "than domain_height")
    z_bot = depth - settings.domain_height
    z_top = depth

    # The radiative source decays within a few mm of the applicator wall;
    # grade the radial spacing there (h/4 growing back to h).
    r_lines = np.concatenate([
        _segment(0.0, a, h)[:-1],
        _graded_segment(a, big_r, h, 0.25 * h),
    ])
    z_lines = _lines([z_bot, 0.0, diff, z_top], h)
    tol = 1e-9 * max(big_r, z_top - z_bot)

    def keep_cell(rc, zc):
        return not (rc < a and zc > 0.0)

    def tag_edge(rm, zm):
        if rm < tol:
            return TAG_AXIS
        if abs(rm - a) < tol and zm > 0.0:
            return TAG_RAD if zm < diff else TAG_COOL
        if abs(zm) < tol and rm < a:
            return TAG_COOL
        if (abs(rm - big_r) < tol or abs(zm - z_bot) < tol
                or abs(zm - z_top) < tol):
            return TAG_AMB
        return None

    return structured_mesh(r_lines, z_lines, tag_edge, keep_cell)
