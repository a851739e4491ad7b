"""Metric geometry of a single Euclidean 4-simplex.

A simplex is described either by coordinates (5 points in R^4) or by a
squared-length table: a symmetric (5, 5) ndarray with zero diagonal whose
(p, q) entry is the squared distance between local vertices p and q.
Faces and edges are sorted tuples of local vertex labels 0..4.

Dihedral angles are computed by embedding the length table (Cholesky of the
Gram matrix anchored at vertex 0) and projecting the two opposite vertices
onto the 2-plane orthogonal to the face.  Magnitudes lie in (0, pi); the
signed angle attaches the simplex sign eps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSimplexError, NonRealizableLengthsError

TWO_PI = 2.0 * math.pi

# |V| below DEGENERACY_REL * (mean edge length)^4 counts as degenerate.
DEGENERACY_REL = 1e-10

# Central finite differences use a step of FD_REL_STEP * max(L).
FD_REL_STEP = 1e-5

EDGES5 = tuple((i, j) for i in range(5) for j in range(i + 1, 5))
FACES5 = tuple(
    (i, j, k) for i in range(5) for j in range(i + 1, 5) for k in range(j + 1, 5)
)
EDGE_INDEX5 = {e: n for n, e in enumerate(EDGES5)}
FACE_INDEX5 = {f: n for n, f in enumerate(FACES5)}


def squared_length_table(points):
    """Squared pairwise distances of an (n, d) coordinate array."""
    pts = np.asarray(points, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def validate_length_table(L, size=None):
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError("length table must be square")
    if size is not None and L.shape[0] != size:
        raise ValueError(f"length table must be {size}x{size}")
    if not np.allclose(L, L.T):
        raise ValueError("length table must be symmetric")
    if not np.allclose(np.diag(L), 0.0):
        raise ValueError("length table must have zero diagonal")
    return L


def cm_squared_volume(k, L):
    """Squared k-volume of k+1 points via the Cayley-Menger determinant.

    May be <= 0 for tables with no Euclidean realization; the raw value is
    returned so callers can detect degeneracy.
    """
    L = validate_length_table(L, size=k + 1)
    n = k + 1
    bordered = np.ones((n + 1, n + 1))
    bordered[0, 0] = 0.0
    bordered[1:, 1:] = L
    det = np.linalg.det(bordered)
    return float((-1) ** (k + 1) * det / (2**k * math.factorial(k) ** 2))


def signed_volume4(points):
    """Oriented hypervolume det[v1-v0, ..., v4-v0] / 4! of 5 points in R^4."""
    pts = np.asarray(points, dtype=float)
    if pts.shape != (5, 4):
        raise ValueError("expected 5 points in R^4")
    return float(np.linalg.det(pts[1:] - pts[0]) / 24.0)


def mean_edge_length(L):
    """Mean Euclidean edge length of a squared-length table."""
    L = np.asarray(L, dtype=float)
    n = L.shape[0]
    iu = np.triu_indices(n, k=1)
    return float(np.mean(np.sqrt(np.maximum(L[iu], 0.0))))


def degeneracy_threshold(L):
    return DEGENERACY_REL * mean_edge_length(L) ** 4


def gram_matrix(L):
    """Gram matrix G_pq = (L_0p + L_0q - L_pq) / 2 anchored at vertex 0."""
    L = validate_length_table(L, size=5)
    G = np.empty((4, 4))
    for p in range(4):
        for q in range(4):
            G[p, q] = 0.5 * (L[0, p + 1] + L[0, q + 1] - L[p + 1, q + 1])
    return G


def gram_embed(L):
    """Coordinates of 5 points in R^4 reproducing a squared-length table.

    Vertex 0 sits at the origin and the output has positive oriented volume
    (Cholesky factors have positive diagonal).  Raises
    NonRealizableLengthsError when the Gram matrix is not positive definite.
    """
    G = gram_matrix(L)
    try:
        C = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise NonRealizableLengthsError(
            "length table has no nondegenerate Euclidean realization"
        ) from exc
    pts = np.zeros((5, 4))
    pts[1:] = C
    return pts


def face_squared_area(L, face):
    p, q, r = face
    T = np.zeros((3, 3))
    T[0, 1] = T[1, 0] = L[p, q]
    T[0, 2] = T[2, 0] = L[p, r]
    T[1, 2] = T[2, 1] = L[q, r]
    return cm_squared_volume(2, T)


def face_area(L, face):
    sq = face_squared_area(L, face)
    if sq <= 0.0:
        raise DegenerateSimplexError(f"face {face} has nonpositive squared area")
    return math.sqrt(sq)


def area_length_derivative(L, face, edge):
    """d(area of face)/d(squared length of edge); zero if edge not in face.

    From 16 S^2 = 2 L1 L2 + 2 L2 L3 + 2 L3 L1 - L1^2 - L2^2 - L3^2.
    """
    a, b = edge
    if a not in face or b not in face:
        return 0.0
    (c,) = [v for v in face if v not in edge]
    S = face_area(L, face)
    return (L[a, c] + L[b, c] - L[a, b]) / (16.0 * S)


def dihedral_angle(points, face):
    """Dihedral angle magnitude in (0, pi) at a 2-face of a 4-simplex.

    The two vertices opposite the face are projected onto the orthogonal
    complement of the face plane; the angle between the projections is
    returned via atan2(rejection norm, dot product) for stability near the
    endpoints.
    """
    pts = np.asarray(points, dtype=float)
    p, q, r = face
    x, y = [v for v in range(5) if v not in face]
    basis = np.stack([pts[q] - pts[p], pts[r] - pts[p]], axis=1)
    G2 = basis.T @ basis
    det = G2[0, 0] * G2[1, 1] - G2[0, 1] * G2[1, 0]
    if det <= 0.0:
        raise DegenerateSimplexError("face spans less than two dimensions")
    inv = np.array([[G2[1, 1], -G2[0, 1]], [-G2[1, 0], G2[0, 0]]]) / det
    u = pts[x] - pts[p]
    v = pts[y] - pts[p]
    u = u - basis @ (inv @ (basis.T @ u))
    v = v - basis @ (inv @ (basis.T @ v))
    dot = float(u @ v)
    wedge_sq = float(u @ u) * float(v @ v) - dot * dot
    wedge = math.sqrt(max(wedge_sq, 0.0))
    angle = math.atan2(wedge, dot)
    if angle <= 0.0 or angle >= math.pi:
        raise DegenerateSimplexError(f"dihedral angle at face {face} is degenerate")
    return angle


# complements of the ten faces, aligned with FACES5
_OPPOSITE5 = tuple(
    tuple(v for v in range(5) if v not in face) for face in FACES5
)


def dihedral_angles_from_points(points):
    """All ten dihedral angle magnitudes of an embedded simplex at once.

    Facet normals are the barycentric-coordinate gradients (rows of the
    inverse of the bordered coordinate matrix); the inner angle at the face
    opposite vertices {x, y} has cosine -n_x.n_y / (|n_x| |n_y|).  Agrees
    with the projection route for nondegenerate simplices.
    """
    pts = np.asarray(points, dtype=float)
    X = np.empty((5, 5))
    X[:, 0] = 1.0
    X[:, 1:] = pts
    try:
        Ainv = np.linalg.inv(X)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSimplexError("simplex is degenerate") from exc
    N = Ainv[1:, :]  # column i is the gradient of barycentric coordinate i
    G = N.T @ N
    d = np.sqrt(np.diag(G))
    cosines = -G / np.outer(d, d)
    out = {}
    for face, (x, y) in zip(FACES5, _OPPOSITE5):
        c = min(1.0, max(-1.0, cosines[x, y]))
        out[face] = math.acos(c)
    return out


def dihedral_angles_from_lengths(L):
    """All ten dihedral angle magnitudes of a length table (one embedding)."""
    return dihedral_angles_from_points(gram_embed(L))


def signed_dihedral(L, face, eps):
    """Dihedral angle magnitude times the simplex sign eps."""
    pts = gram_embed(L)
    return eps * dihedral_angle(pts, face)


@dataclass(frozen=True)
class AngleTable:
    """Dihedral angle magnitudes of one simplex plus its sign."""

    magnitudes: dict
    eps: int

    def signed(self, face):
        return self.eps * self.magnitudes[face]

    def signed_all(self):
        return {face: self.eps * theta for face, theta in self.magnitudes.items()}


def angle_table(L, eps):
    return AngleTable(dihedral_angles_from_lengths(L), eps)


def edge_angle_theta(L, edge, eps):
    """Angle at an edge: sum of area-derivative-weighted signed dihedrals.

    Only the three faces containing the edge contribute (the area of any
    other face does not depend on this edge).
    """
    angles = dihedral_angles_from_lengths(L)
    total = 0.0
    for face in FACES5:
        if edge[0] in face and edge[1] in face:
            total += area_length_derivative(L, face, edge) * (eps * angles[face])
    return total


def edge_angle_thetas(L, eps):
    """Angles at all ten edges, sharing a single embedding."""
    angles = dihedral_angles_from_lengths(L)
    out = {}
    for edge in EDGES5:
        total = 0.0
        for face in FACES5:
            if edge[0] in face and edge[1] in face:
                total += area_length_derivative(L, face, edge) * (eps * angles[face])
        out[edge] = total
    return out


def reduce_angle(x):
    """Representative of x mod 2*pi in (-pi, pi]."""
    r = math.remainder(x, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r
