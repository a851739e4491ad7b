"""Derivative matrices of the deficit angles and submatrix selection.

Per simplex, dS/dL is analytic (a sparse 10x10 with three entries per row)
and dtheta/dL comes from central finite differences of the signed dihedral
angles through the length embedding.  Global matrices are assembled by
scattering per-simplex blocks:

- dOmega_dL:    rows = triangles, cols = edges,       entries d(omega_i)/d(L_a)
- dOmega_dS:    rows = cols = triangles,              entries d(omega_i)/d(S_j)
- dBigOmega_dS: rows = edges, cols = triangles,       entries d(Omega_a)/d(S_i)

Row/column order follows the complex's lexicographic face tables.  The
maximal nondegenerate submatrix is found by complete-pivoting Gaussian
elimination with a relative pivot threshold.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import geometry
from .errors import DegenerateSimplexError, SelectionError

PIVOT_TOL = 1e-9


def dS_dL_simplex(L):
    """(10, 10) matrix of face-area derivatives by squared edge length.

    Rows follow geometry.FACES5, columns geometry.EDGES5; the (i, a) entry
    vanishes unless edge a lies in face i.
    """
    L = geometry.validate_length_table(L, size=5)
    M = np.zeros((10, 10))
    for fi, face in enumerate(geometry.FACES5):
        for a, b in ((face[0], face[1]), (face[0], face[2]), (face[1], face[2])):
            M[fi, geometry.EDGE_INDEX5[(a, b)]] = geometry.area_length_derivative(
                L, face, (a, b)
            )
    return M


def _all_signed_angles(L, eps):
    mags = geometry.dihedral_angles_from_lengths(L)
    return eps * np.array([mags[f] for f in geometry.FACES5])


def dtheta_dL_simplex(L, eps, h_rel=geometry.FD_REL_STEP, richardson=False):
    """(10, 10) finite-difference matrix of signed dihedral angles by length.

    Central differences with relative step h_rel * max(L); one Richardson
    extrapolation level behind the flag.  If an evaluation leaves the
    realizable region the step is shrunk once before giving up.
    """
    L = geometry.validate_length_table(L, size=5)
    h0 = h_rel * float(L.max())

    def column(edge, h):
        i, j = edge
        Lp = L.copy()
        Lp[i, j] += h
        Lp[j, i] += h
        Lm = L.copy()
        Lm[i, j] -= h
        Lm[j, i] -= h
        return (_all_signed_angles(Lp, eps) - _all_signed_angles(Lm, eps)) / (2 * h)

    def matrix(h):
        cols = []
        for edge in geometry.EDGES5:
            try:
                cols.append(column(edge, h))
            except geometry.NonRealizableLengthsError:
                try:
                    cols.append(column(edge, h / 16.0))
                except geometry.NonRealizableLengthsError as exc:
                    raise DegenerateSimplexError(
                        f"finite-difference stencil at edge {edge} left the "
                        "realizable region"
                    ) from exc
        return np.stack(cols, axis=1)

    if not richardson:
        return matrix(h0)
    return (4.0 * matrix(h0 / 2) - matrix(h0)) / 3.0


def _local_face_keys(verts):
    return [tuple(verts[i] for i in f) for f in geometry.FACES5]


def _local_edge_keys(verts):
    return [tuple(verts[i] for i in e) for e in geometry.EDGES5]


def assemble_domega_dL(c, m, h_rel=geometry.FD_REL_STEP, richardson=False):
    """Global matrix of face-deficit derivatives by squared edge lengths."""
    F = len(c.faces[2])
    E = len(c.faces[1])
    M = np.zeros((F, E))
    for sid in range(len(c.simplices)):
        verts, _ = c.simplices[sid]
        L5 = m.simplex_lengths(verts)
        D = dtheta_dL_simplex(L5, m.eps[sid], h_rel=h_rel, richardson=richardson)
        rows = [c.face_index[2][k] for k in _local_face_keys(verts)]
        cols = [c.face_index[1][k] for k in _local_edge_keys(verts)]
        M[np.ix_(rows, cols)] -= D
    return M


def domega_dS_simplex(L, eps, h_rel=geometry.FD_REL_STEP, richardson=False):
    """Per-simplex (10, 10) signed-angle derivatives by face areas.

    Areas determine all metric variations within one simplex, so the matrix
    is (dtheta/dL) (dS/dL)^-1.  A singular area map means the realization is
    non-generic.
    """
    D = dtheta_dL_simplex(L, eps, h_rel=h_rel, richardson=richardson)
    A = dS_dL_simplex(L)
    try:
        return np.linalg.solve(A.T, D.T).T
    except np.linalg.LinAlgError as exc:
        raise DegenerateSimplexError(
            "per-simplex area map is singular (non-generic realization)"
        ) from exc


def assemble_domega_dS(c, m, h_rel=geometry.FD_REL_STEP, richardson=False):
    """Global matrix of face-deficit derivatives by independent area variations."""
    F = len(c.faces[2])
    M = np.zeros((F, F))
    for sid in range(len(c.simplices)):
        verts, _ = c.simplices[sid]
        L5 = m.simplex_lengths(verts)
        X = domega_dS_simplex(L5, m.eps[sid], h_rel=h_rel, richardson=richardson)
        idx = [c.face_index[2][k] for k in _local_face_keys(verts)]
        M[np.ix_(idx, idx)] -= X
    return M


def area_length_weights(c, m):
    """Global (edges x triangles) matrix of dS_j/dL_a.

    Each triangle's area depends only on its own three edge lengths, so the
    entries are shared by every simplex containing the face.
    """
    E = len(c.faces[1])
    F = len(c.faces[2])
    P = np.zeros((E, F))
    for tri in c.faces[2]:
        fi = c.face_index[2][tri]
        for a, b in ((tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])):
            (cv,) = [v for v in tri if v != a and v != b]
            ka = (a, cv) if a < cv else (cv, a)
            kb = (b, cv) if b < cv else (cv, b)
            w = (m.L[ka] + m.L[kb] - m.L[(a, b)]) / (16.0 * m.S[tri])
            P[c.face_index[1][(a, b)], fi] = w
    return P


def assemble_dBigOmega_dS(c, m, domega_dS=None, h_rel=geometry.FD_REL_STEP,
                          richardson=False):
    """Global matrix of edge-deficit derivatives by area variations.

    At a flat point the area-derivative weights are stationary against the
    vanishing face deficits, leaving the weighted sum of dOmega_dS rows.
    """
    if domega_dS is None:
        domega_dS = assemble_domega_dS(c, m, h_rel=h_rel, richardson=richardson)
    return area_length_weights(c, m) @ domega_dS


@dataclass(frozen=True)
class JacobianSet:
    """The three global derivative matrices with their index maps."""

    face_keys: tuple
    edge_keys: tuple
    dOmega_dL: np.ndarray
    dOmega_dS: np.ndarray
    dBigOmega_dS: np.ndarray

    @property
    def face_index(self):
        return {k: i for i, k in enumerate(self.face_keys)}

    @property
    def edge_index(self):
        return {k: i for i, k in enumerate(self.edge_keys)}

    def symmetry_residual(self):
        M = self.dOmega_dS
        scale = np.abs(M).max()
        return float(np.abs(M - M.T).max() / scale) if scale else 0.0

    def conjugacy_residual(self):
        A = self.dBigOmega_dS
        B = self.dOmega_dL.T
        scale = max(np.abs(A).max(), np.abs(B).max())
        return float(np.abs(A - B).max() / scale) if scale else 0.0


def build_jacobians(c, m, h_rel=geometry.FD_REL_STEP, richardson=False):
    dL = assemble_domega_dL(c, m, h_rel=h_rel, richardson=richardson)
    dS = assemble_domega_dS(c, m, h_rel=h_rel, richardson=richardson)
    dBig = assemble_dBigOmega_dS(c, m, domega_dS=dS)
    return JacobianSet(
        face_keys=tuple(c.faces[2]),
        edge_keys=tuple(c.faces[1]),
        dOmega_dL=dL,
        dOmega_dS=dS,
        dBigOmega_dS=dBig,
    )


@dataclass(frozen=True)
class SubmatrixSelection:
    """A maximal nondegenerate square submatrix in pivot order.

    rows/cols are matrix indices in pivot order; det is the determinant of
    the submatrix taken in exactly that ordering (the product of pivots).
    Complements are in ascending ambient order.
    """

    rows: tuple
    cols: tuple
    rows_comp: tuple
    cols_comp: tuple
    det: float
    rank: int
    row_keys: tuple = None
    col_keys: tuple = None
    row_comp_keys: tuple = None
    col_comp_keys: tuple = None

    def with_keys(self, face_keys, edge_keys):
        return replace(
            self,
            row_keys=tuple(face_keys[i] for i in self.rows),
            col_keys=tuple(edge_keys[i] for i in self.cols),
            row_comp_keys=tuple(face_keys[i] for i in self.rows_comp),
            col_comp_keys=tuple(edge_keys[i] for i in self.cols_comp),
        )


def rank_and_submatrix(matrix, must_include_row=None, tol=PIVOT_TOL):
    """Complete-pivoting elimination: rank, pivot rows/cols and det.

    Pivoting stops when |pivot| <= tol * max|entry|; under complete pivoting
    the largest entry is exactly the first pivot, and it stays the reference
    when a (possibly weaker) first pivot row is forced.  If must_include_row
    is given, that row is forced as the first pivot row (its largest entry
    becomes the first pivot); a numerically zero forced row is an error.
    """
    M = np.array(matrix, dtype=float)
    if M.ndim != 2:
        raise SelectionError("selection needs a 2-d matrix")
    if not np.all(np.isfinite(M)):
        raise SelectionError("matrix has non-finite entries")
    n_rows, n_cols = M.shape
    global_max = float(np.abs(M).max()) if M.size else 0.0

    work = M.copy()
    row_free = list(range(n_rows))
    col_free = list(range(n_cols))
    pivots = []
    pivot_rows = []
    pivot_cols = []

    forced = None
    if must_include_row is not None:
        forced = int(must_include_row)
        row_max = float(np.abs(M[forced]).max()) if n_cols else 0.0
        if row_max == 0.0 or (global_max and row_max <= tol * global_max):
            raise SelectionError(
                f"forced row {forced} is numerically zero; it cannot pivot"
            )

    while row_free and col_free:
        if forced is not None and not pivots:
            r = forced
            sub = np.abs(work[r, col_free])
            c = col_free[int(np.argmax(sub))]
        else:
            sub = np.abs(work[np.ix_(row_free, col_free)])
            flat = int(np.argmax(sub))
            r = row_free[flat // len(col_free)]
            c = col_free[flat % len(col_free)]
        piv = work[r, c]
        if pivots and abs(piv) <= tol * global_max:
            break
        if not pivots and piv == 0.0:
            break
        pivots.append(float(piv))
        pivot_rows.append(r)
        pivot_cols.append(c)
        row_free.remove(r)
        col_free.remove(c)
        if row_free and col_free:
            factors = work[np.ix_(row_free, [c])] / piv
            work[np.ix_(row_free, col_free)] -= factors @ work[np.ix_([r], col_free)]

    rank = len(pivots)
    det = float(np.prod(pivots)) if pivots else 0.0
    rows_comp = tuple(i for i in range(n_rows) if i not in pivot_rows)
    cols_comp = tuple(j for j in range(n_cols) if j not in pivot_cols)
    return SubmatrixSelection(
        rows=tuple(pivot_rows),
        cols=tuple(pivot_cols),
        rows_comp=rows_comp,
        cols_comp=cols_comp,
        det=det,
        rank=rank,
    )


def kernel_basis(matrix, rank):
    """Orthonormal null-space basis (columns) from the SVD, given the rank."""
    _, _, Vh = np.linalg.svd(np.asarray(matrix, dtype=float))
    return Vh[rank:].T.copy()


def displacement_length_differential(c, coords, delta):
    """dL induced by an infinitesimal vertex displacement field.

    For an edge (u, w): dL = 2 (x_u - x_w) . (delta_u - delta_w).  The result
    follows the complex's edge ordering.
    """
    out = np.zeros(len(c.faces[1]))
    for n, (u, w) in enumerate(c.faces[1]):
        d = np.asarray(coords[u], float) - np.asarray(coords[w], float)
        dd = np.asarray(delta[u], float) - np.asarray(delta[w], float)
        out[n] = 2.0 * float(d @ dd)
    return out
