"""Tetrahedral simplicial complexes.

Connectivity (edge/face enumeration with a global orientation), boundary
classification, per-tet geometry, topology invariants, and voxel-based
generation of the built-in test domains.
"""

from typing import NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import MeshError, NonManifoldError, TopologyError

__all__ = [
    "TetMesh",
    "TetGeometry",
    "MeshCounts",
    "BettiNumbers",
    "build_complex",
    "tet_geometry",
    "betti_numbers",
    "generate_voxel_domain",
    "DOMAIN_TOPOLOGY",
]

# Local simplex conventions: edge l connects the local vertex pair
# _LOCAL_EDGES[l]; face k is opposite local vertex k.
_LOCAL_EDGES = np.array([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
_LOCAL_FACES = np.array([(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)])


class MeshCounts(NamedTuple):
    n_v: int
    n_e: int
    n_f: int
    n_t: int
    n_bv: int
    n_be: int
    n_bf: int
    n_iv: int
    n_ie: int
    n_if: int


class BettiNumbers(NamedTuple):
    """Betti numbers (b0, b1, b2) of a solid embedded in 3-space."""

    b0: int
    b1: int
    b2: int

    @property
    def h2(self) -> int:
        """Dimension of the absolute second cohomology (number of cavities)."""
        return self.b2

    @property
    def h2_rel(self) -> int:
        """Dimension of the relative second cohomology (handles/tunnels)."""
        return self.b1


class TetGeometry(NamedTuple):
    """Geometry of a single tetrahedron."""

    volume: float
    bary_gradients: np.ndarray  # (4, 3) constant gradients of the 4 hat functions


class TetMesh:
    """Immutable tetrahedral complex with global edge/face enumeration.

    Attributes
    ----------
    vertices : (n_v, 3) float array
    tets : (n_t, 4) int array, positively oriented
    edges : (n_e, 2) int array, each row (i, j) with i < j
    faces : (n_f, 3) int array, each row sorted ascending
    tet_edges : (n_t, 6) int array, global edge index per local edge
    tet_edge_signs : (n_t, 6) int8 array, +1 iff the local directed edge
        agrees with the global low-to-high orientation
    tet_faces : (n_t, 4) int array, global face index of the face opposite
        local vertex k
    boundary_vertex, boundary_edge, boundary_face : boolean masks
    volumes : (n_t,) positive tet volumes
    """

    def __init__(self, vertices, tets, edges, faces, tet_edges, tet_edge_signs,
                 tet_faces, boundary_vertex, boundary_edge, boundary_face, volumes):
        self.vertices = vertices
        self.tets = tets
        self.edges = edges
        self.faces = faces
        self.tet_edges = tet_edges
        self.tet_edge_signs = tet_edge_signs
        self.tet_faces = tet_faces
        self.boundary_vertex = boundary_vertex
        self.boundary_edge = boundary_edge
        self.boundary_face = boundary_face
        self.volumes = volumes
        for a in (vertices, tets, edges, faces, tet_edges, tet_edge_signs,
                  tet_faces, boundary_vertex, boundary_edge, boundary_face, volumes):
            a.setflags(write=False)

    @property
    def n_v(self) -> int:
        return len(self.vertices)

    @property
    def n_e(self) -> int:
        return len(self.edges)

    @property
    def n_f(self) -> int:
        return len(self.faces)

    @property
    def n_t(self) -> int:
        return len(self.tets)

    @property
    def counts(self) -> MeshCounts:
        n_bv = int(self.boundary_vertex.sum())
        n_be = int(self.boundary_edge.sum())
        n_bf = int(self.boundary_face.sum())
        return MeshCounts(self.n_v, self.n_e, self.n_f, self.n_t,
                          n_bv, n_be, n_bf,
                          self.n_v - n_bv, self.n_e - n_be, self.n_f - n_bf)

    @property
    def euler_characteristic(self) -> int:
        return self.n_v - self.n_e + self.n_f - self.n_t

    def total_volume(self) -> float:
        return float(self.volumes.sum())

    def barycenters(self) -> np.ndarray:
        return self.vertices[self.tets].mean(axis=1)

    def __repr__(self):
        c = self.counts
        return (f"TetMesh(n_v={c.n_v}, n_e={c.n_e}, n_f={c.n_f}, n_t={c.n_t}, "
                f"boundary_faces={c.n_bf})")


def build_complex(vertices, tets) -> TetMesh:
    """Build a validated tetrahedral complex from raw connectivity.

    Edges and faces are deduplicated with a canonical vertex ordering
    (edges oriented low-to-high global index, faces sorted ascending) and
    tets are reordered so that their signed volume is positive.

    Parameters
    ----------
    vertices : array_like (n_v, 3)
    tets : array_like (n_t, 4) of vertex indices

    Raises
    ------
    MeshError
        Out-of-range or unused vertex indices, degenerate tets.
    NonManifoldError
        Duplicate tets or a face shared by three or more tets.
    """
    vertices = np.ascontiguousarray(np.asarray(vertices, dtype=np.float64))
    tets = np.ascontiguousarray(np.asarray(tets, dtype=np.int64))
    if vertices.ndim != 2 or vertices.shape[1] != 3:
        raise MeshError("vertices must be an (n, 3) array")
    if tets.ndim != 2 or tets.shape[1] != 4 or len(tets) == 0:
        raise MeshError("at least one tetrahedron (4 vertex indices) is required")
    n_v = len(vertices)
    if tets.min() < 0 or tets.max() >= n_v:
        raise MeshError("tetrahedron vertex index out of range")
    used = np.zeros(n_v, dtype=bool)
    used[tets] = True
    if not used.all():
        raise MeshError(f"{int((~used).sum())} vertices are not referenced by any tet")

    canon = np.sort(tets, axis=1)
    if len(np.unique(canon, axis=0)) != len(canon):
        raise NonManifoldError("duplicate tetrahedron (same vertex set appears twice)")

    # Scale-invariant degeneracy guard relative to the bounding box.
    span = vertices.max(axis=0) - vertices.min(axis=0)
    diag = float(np.linalg.norm(span))
    eps_vol = 1e-12 * diag**3

    edge_mat = vertices[tets[:, 1:]] - vertices[tets[:, :1]]
    det = np.linalg.det(edge_mat)
    volumes = np.abs(det) / 6.0
    if (volumes <= eps_vol).any():
        t = int(np.argmax(volumes <= eps_vol))
        raise MeshError(f"degenerate tetrahedron {t} (volume {volumes[t]:.3e} "
                        f"<= threshold {eps_vol:.3e})")
    flip = det < 0.0
    if flip.any():
        tets = tets.copy()
        tmp = tets[flip, 2].copy()
        tets[flip, 2] = tets[flip, 3]
        tets[flip, 3] = tmp

    n_t = len(tets)

    ev = tets[:, _LOCAL_EDGES]                          # (n_t, 6, 2)
    ekey = ev.min(axis=-1) * n_v + ev.max(axis=-1)
    edge_keys, tet_edges = np.unique(ekey, return_inverse=True)
    tet_edges = tet_edges.reshape(n_t, 6)
    edges = np.stack([edge_keys // n_v, edge_keys % n_v], axis=1)
    tet_edge_signs = np.where(ev[..., 0] < ev[..., 1], 1, -1).astype(np.int8)

    fv = np.sort(tets[:, _LOCAL_FACES], axis=-1)        # (n_t, 4, 3)
    fkey = (fv[..., 0] * n_v + fv[..., 1]) * n_v + fv[..., 2]
    face_keys, tet_faces = np.unique(fkey, return_inverse=True)
    tet_faces = tet_faces.reshape(n_t, 4)
    faces = np.stack([face_keys // (n_v * n_v),
                      (face_keys // n_v) % n_v,
                      face_keys % n_v], axis=1)

    incidence = np.bincount(tet_faces.ravel(), minlength=len(faces))
    if (incidence > 2).any():
        f = int(np.argmax(incidence > 2))
        raise NonManifoldError(f"face {tuple(faces[f])} is shared by "
                               f"{int(incidence[f])} tets")
    boundary_face = incidence == 1

    bf = faces[boundary_face]
    boundary_vertex = np.zeros(n_v, dtype=bool)
    boundary_vertex[bf] = True
    be_keys = np.unique(np.concatenate([bf[:, 0] * n_v + bf[:, 1],
                                        bf[:, 0] * n_v + bf[:, 2],
                                        bf[:, 1] * n_v + bf[:, 2]]))
    boundary_edge = np.zeros(len(edges), dtype=bool)
    boundary_edge[np.searchsorted(edge_keys, be_keys)] = True

    return TetMesh(vertices, tets, edges, faces, tet_edges, tet_edge_signs,
                   tet_faces, boundary_vertex, boundary_edge, boundary_face, volumes)


def tet_geometry(mesh: TetMesh, t: int) -> TetGeometry:
    """Volume and hat-function gradients of tet `t`.

    The gradients are the constant vectors grad(phi_k) of the linear
    functions with phi_k(v_j) = delta_kj on the tet; they always sum to
    the zero vector.
    """
    if not 0 <= t < mesh.n_t:
        raise MeshError(f"tet index {t} out of range")
    v = mesh.vertices[mesh.tets[t]]
    edge_mat = v[1:] - v[0]
    det = float(np.linalg.det(edge_mat))
    grads = np.empty((4, 3))
    grads[1:] = np.linalg.inv(edge_mat).T
    grads[0] = -grads[1:].sum(axis=0)
    return TetGeometry(volume=abs(det) / 6.0, bary_gradients=grads)


def _solid_components(mesh: TetMesh) -> int:
    """Number of connected components of the tet adjacency graph."""
    f_flat = mesh.tet_faces.ravel()
    t_ids = np.repeat(np.arange(mesh.n_t), 4)
    order = np.argsort(f_flat, kind="stable")
    f_sorted = f_flat[order]
    t_sorted = t_ids[order]
    same = f_sorted[1:] == f_sorted[:-1]
    a = t_sorted[:-1][same]
    b = t_sorted[1:][same]
    graph = coo_matrix((np.ones(len(a)), (a, b)), shape=(mesh.n_t, mesh.n_t))
    n_comp, _ = connected_components(graph, directed=False)
    return int(n_comp)


def betti_numbers(mesh: TetMesh) -> BettiNumbers:
    """Betti numbers (b0, b1, b2) from boundary-surface Euler characteristics.

    Valid for compact solids embedded in 3-space: b0 is the number of
    connected solids, b1 the total genus of the boundary surfaces
    (handles/tunnels), b2 the number of cavities. The result's `h2` and
    `h2_rel` name the harmonic-space dimensions these induce.

    Raises
    ------
    NonManifoldError
        If a boundary edge does not have exactly two boundary faces, a
        boundary component has odd Euler characteristic, or the interior
        Euler characteristic is inconsistent with the boundary's.
    """
    n_v = mesh.n_v
    b0 = _solid_components(mesh)

    bface_ids = np.flatnonzero(mesh.boundary_face)
    n_bf = len(bface_ids)
    if n_bf == 0:
        raise NonManifoldError("complex has no boundary (not a solid in 3-space)")
    bf = mesh.faces[bface_ids]
    ekeys = np.concatenate([bf[:, 0] * n_v + bf[:, 1],
                            bf[:, 0] * n_v + bf[:, 2],
                            bf[:, 1] * n_v + bf[:, 2]])
    owner = np.tile(np.arange(n_bf), 3)
    order = np.argsort(ekeys, kind="stable")
    ekeys_s = ekeys[order]
    owner_s = owner[order]
    starts = np.flatnonzero(np.r_[True, ekeys_s[1:] != ekeys_s[:-1]])
    group_sizes = np.diff(np.r_[starts, len(ekeys_s)])
    if (group_sizes != 2).any():
        raise NonManifoldError("boundary edge without exactly two boundary faces "
                               "(pinched boundary)")
    fa = owner_s[starts]
    fb = owner_s[starts + 1]
    graph = coo_matrix((np.ones(len(fa)), (fa, fb)), shape=(n_bf, n_bf))
    n_surf, face_label = connected_components(graph, directed=False)

    f_per = np.bincount(face_label, minlength=n_surf)
    # Boundary edges inherit the (shared) label of their two faces.
    e_per = np.bincount(face_label[fa], minlength=n_surf)
    # Vertices counted once per (surface component, vertex) pair.
    pair = face_label[:, None] * np.int64(n_v) + bf
    upair = np.unique(pair)
    v_per = np.bincount((upair // n_v).astype(np.intp), minlength=n_surf)

    chi = v_per - e_per + f_per
    if (chi % 2 != 0).any():
        raise NonManifoldError("boundary component with odd Euler characteristic "
                               "(non-manifold input)")
    genus = (2 - chi) // 2
    if (genus < 0).any():
        raise NonManifoldError("boundary component with negative genus")
    if 2 * mesh.euler_characteristic != int(chi.sum()):
        raise NonManifoldError("Euler characteristic of the solid does not match "
                               "half the boundary's (non-manifold input)")
    return BettiNumbers(b0=b0, b1=int(genus.sum()), b2=int(n_surf) - b0)


# --- voxel domain generation -------------------------------------------------

# Corner codes: bit 0 -> +x, bit 1 -> +y, bit 2 -> +z.
_CUBE_OFFSETS = np.array([[(c >> 0) & 1, (c >> 1) & 1, (c >> 2) & 1]
                          for c in range(8)])

# Six tets per cube sharing the main diagonal (corner 0 to corner 7); one tet
# per axis permutation, compatible across adjacent cubes.
_KUHN_TETS = np.array([
    [0, 1, 3, 7],   # x, y, z
    [0, 1, 5, 7],   # x, z, y
    [0, 2, 3, 7],   # y, x, z
    [0, 2, 6, 7],   # y, z, x
    [0, 4, 5, 7],   # z, x, y
    [0, 4, 6, 7],   # z, y, x
])

DOMAIN_TOPOLOGY = {
    "ball": (1, 0, 0),
    "ball_with_cavity": (1, 0, 1),
    "solid_torus": (1, 1, 0),
    "cylinder": (1, 0, 0),
    "box": (1, 0, 0),
}


def _domain_indicator(domain: str, params: dict):
    """Indicator function and half-extent bounds for a named domain."""
    if domain == "ball":
        r = params.pop("radius", 1.0)
        return (lambda x, y, z: x * x + y * y + z * z < r * r), (r, r, r)
    if domain == "ball_with_cavity":
        r = params.pop("radius", 1.0)
        rc = params.pop("cavity_radius", 0.3)
        if not 0.0 < rc < r:
            raise MeshError("cavity_radius must lie strictly between 0 and radius")

        def ind(x, y, z, r=r, rc=rc):
            q = x * x + y * y + z * z
            return (q < r * r) & (q > rc * rc)

        return ind, (r, r, r)
    if domain == "solid_torus":
        ring = params.pop("ring_radius", 1.0)
        tube = params.pop("tube_radius", 0.4)
        if not 0.0 < tube < ring:
            raise MeshError("tube_radius must lie strictly between 0 and ring_radius")

        def ind(x, y, z, ring=ring, tube=tube):
            rho = np.sqrt(x * x + y * y)
            return (rho - ring) ** 2 + z * z < tube * tube

        return ind, (ring + tube, ring + tube, tube)
    if domain == "cylinder":
        r = params.pop("radius", 1.0)
        hgt = params.pop("height", 2.0)
        return (lambda x, y, z: (x * x + y * y < r * r) & (np.abs(z) < hgt / 2.0)), \
            (r, r, hgt / 2.0)
    if domain == "box":
        ext = params.pop("extents", (1.0, 1.0, 1.0))
        ex, ey, ez = (float(v) for v in ext)
        return (lambda x, y, z: (np.abs(x) < ex / 2) & (np.abs(y) < ey / 2)
                & (np.abs(z) < ez / 2)), (ex / 2, ey / 2, ez / 2)
    raise MeshError(f"unknown domain '{domain}' "
                    f"(choose from {sorted(DOMAIN_TOPOLOGY)})")


def generate_voxel_domain(domain: str, h: float, **params) -> TetMesh:
    """Generate one of the built-in test domains on a voxel lattice.

    Every lattice cube whose center lies inside the domain's indicator
    function is split into 6 tets sharing the cube's main diagonal, which
    keeps the face diagonals of adjacent cubes compatible. The resulting
    complex is validated and its Betti numbers are checked against the
    domain's known topology.

    Parameters
    ----------
    domain : one of "ball", "ball_with_cavity", "solid_torus", "cylinder", "box"
    h : voxel edge length (must resolve the domain's features)
    **params : domain parameters, e.g. radius=1.0, cavity_radius=0.3,
        ring_radius=1.0, tube_radius=0.4, height=2.0, extents=(1, 1, 1)

    Raises
    ------
    TopologyError
        If the voxelization is empty or its Betti numbers do not match the
        declared topology of the domain (h too coarse).
    """
    if h <= 0.0:
        raise MeshError("voxel size h must be positive")
    params = dict(params)
    indicator, half_extent = _domain_indicator(domain, params)
    if params:
        raise MeshError(f"unknown parameters for domain '{domain}': {sorted(params)}")

    lo = [int(np.floor(-ext / h)) - 1 for ext in half_extent]
    hi = [int(np.ceil(ext / h)) + 1 for ext in half_extent]
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    ci, cj, ck = np.meshgrid(*axes, indexing="ij")
    cx = (ci + 0.5) * h
    cy = (cj + 0.5) * h
    cz = (ck + 0.5) * h
    mask = indicator(cx, cy, cz)
    if not mask.any():
        raise TopologyError(f"domain '{domain}' contains no voxel centers at h={h}")

    kept = np.stack([ci[mask], cj[mask], ck[mask]], axis=1)      # (K, 3)
    corners = kept[:, None, :] + _CUBE_OFFSETS[None, :, :]       # (K, 8, 3)
    base = np.array([a - 1 for a in lo], dtype=np.int64)
    dims = np.array([b - a + 3 for a, b in zip(lo, hi)], dtype=np.int64)
    rel = corners - base
    keys = (rel[..., 0] * dims[1] + rel[..., 1]) * dims[2] + rel[..., 2]
    ukeys, corner_ids = np.unique(keys, return_inverse=True)
    corner_ids = corner_ids.reshape(corners.shape[:2])

    lat = np.stack([ukeys // (dims[1] * dims[2]),
                    (ukeys // dims[2]) % dims[1],
                    ukeys % dims[2]], axis=1) + base
    verts = lat.astype(np.float64) * h
    tets = corner_ids[:, _KUHN_TETS].reshape(-1, 4)

    mesh = build_complex(verts, tets)
    expected = DOMAIN_TOPOLOGY[domain]
    found = betti_numbers(mesh)
    if tuple(found) != expected:
        raise TopologyError(f"domain '{domain}' not resolved at h={h}: Betti numbers "
                            f"{tuple(found)} != expected {expected}")
    return mesh
