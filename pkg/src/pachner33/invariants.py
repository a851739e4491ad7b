"""Local cluster identities and the global 3->3 move invariant.

The local checks work on six labelled points A..F in R^4 (indices 0..5).
Around the triangle ABC sit the three simplices ABCEF, ABCFD, ABCDE; around
DEF sit BCDEF, CADEF, ABDEF.  Both triples are consistently oriented, and
the deficit at the central triangle is minus the algebraic sum of the three
signed dihedral angles, viewed as a function of the fifteen squared lengths.

The global invariant of a closed flat complex is det(B) * prod(V) / prod(S)
for a maximal nondegenerate submatrix B of the face-deficit/length matrix
(its reciprocal carries the complementary index sets).  Moves are compared
with matched selections: the row of the disappearing triangle is replaced by
the row of the appearing one.  When the opposite triangle is already a face
(the boundary-of-the-5-simplex situation) the rebuilt complex is no longer
simplicial, so the after-quantities are computed by a cluster-local virtual
rebuild instead of materializing the moved complex; the two paths agree
whenever both are available.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .complexes import (
    build_complex,
    move_cluster,
    oriented_tuple,
    pachner_33,
)
from .errors import DegenerateSimplexError, SelectionError
from .flatmetric import realize
from .jacobians import (
    PIVOT_TOL,
    assemble_domega_dL,
    dtheta_dL_simplex,
    kernel_basis,
    rank_and_submatrix,
)

A, B, C, D, E, F = range(6)

BEFORE_CELLS = ((A, B, C, E, F), (A, B, C, F, D), (A, B, C, D, E))
AFTER_CELLS = ((B, C, D, E, F), (C, A, D, E, F), (A, B, D, E, F))
CLUSTER_EDGES = tuple(itertools.combinations(range(6), 2))


def _hat(x):
    return tuple(v for v in range(6) if v != x)


@dataclass(frozen=True)
class ClusterSix:
    """Six points with both three-simplex clusters nondegenerate."""

    points: np.ndarray  # (6, 4)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (6, 4):
            raise ValueError("cluster needs 6 points in R^4")
        object.__setattr__(self, "points", pts)
        for x in range(6):
            sub = pts[list(_hat(x))]
            L = geometry.squared_length_table(sub)
            if abs(geometry.signed_volume4(sub)) < geometry.degeneracy_threshold(L):
                raise DegenerateSimplexError(
                    f"simplex omitting point {x} is degenerate"
                )
        for side in ("abc", "def"):
            if abs(self.omega_value(side)) > 1e-8:
                raise DegenerateSimplexError(
                    "cluster angle sum does not close up; placement is not flat"
                )

    def hat_volume(self, x):
        """Oriented volume of the five points excluding x, ascending order."""
        return geometry.signed_volume4(self.points[list(_hat(x))])

    def area(self, face):
        pts = self.points[list(face)]
        L = geometry.squared_length_table(pts)
        sq = geometry.cm_squared_volume(2, L)
        if sq <= 0.0:
            raise DegenerateSimplexError(f"triangle {face} is degenerate")
        return math.sqrt(sq)

    def lengths(self):
        return geometry.squared_length_table(self.points)

    def _cells(self, side):
        return BEFORE_CELLS if side == "abc" else AFTER_CELLS

    def _face(self, side):
        return (A, B, C) if side == "abc" else (D, E, F)

    def _cell_signs(self, side):
        signs = {}
        for cell in self._cells(side):
            vol = geometry.signed_volume4(self.points[list(cell)])
            signs[cell] = 1 if vol > 0 else -1
        return signs

    def _omega_from_lengths(self, side, L6, signs):
        face = self._face(side)
        total = 0.0
        for cell in self._cells(side):
            idx = list(cell)
            L5 = L6[np.ix_(idx, idx)]
            local = tuple(sorted(cell.index(v) for v in face))
            total += signs[cell] * geometry.dihedral_angle(geometry.gram_embed(L5), local)
        return -total

    def omega_value(self, side):
        """Deficit at the central triangle, reduced to (-pi, pi]."""
        raw = self._omega_from_lengths(side, self.lengths(), self._cell_signs(side))
        return geometry.reduce_angle(raw)

    def omega_gradient(self, side, h_rel=geometry.FD_REL_STEP, richardson=True):
        """Gradient of the deficit over the fifteen squared lengths."""
        L6 = self.lengths()
        signs = self._cell_signs(side)
        h0 = h_rel * float(L6.max())

        def deriv(edge, h):
            i, j = edge
            Lp = L6.copy()
            Lp[i, j] += h
            Lp[j, i] += h
            Lm = L6.copy()
            Lm[i, j] -= h
            Lm[j, i] -= h
            return (
                self._omega_from_lengths(side, Lp, signs)
                - self._omega_from_lengths(side, Lm, signs)
            ) / (2 * h)

        grad = {}
        for edge in CLUSTER_EDGES:
            if richardson:
                grad[edge] = (4 * deriv(edge, h0 / 2) - deriv(edge, h0)) / 3
            else:
                grad[edge] = deriv(edge, h0)
        return grad


def random_cluster(seed, quality=2e-3):
    """Seed-deterministic six unit-ball points, every 5-subset nondegenerate."""
    rng = np.random.default_rng(seed)
    for _ in range(500):
        raw = rng.standard_normal((6, 4))
        pts = raw / np.linalg.norm(raw, axis=1, keepdims=True)
        pts = pts * rng.uniform(size=(6, 1)) ** 0.25
        ok = True
        for x in range(6):
            sub = pts[list(_hat(x))]
            L = geometry.squared_length_table(sub)
            if abs(geometry.signed_volume4(sub)) < quality * geometry.mean_edge_length(L) ** 4:
                ok = False
                break
        if ok:
            return ClusterSix(pts)
    raise DegenerateSimplexError("could not sample a generic cluster")


@dataclass(frozen=True)
class TwoEdgeCheck:
    """Constrained derivative of one squared length against another."""

    ratio: float  # dL_DE / dL_AB along the flat one-parameter family
    predicted: float  # -V_hatA V_hatB / (V_hatD V_hatE)
    residual: float


def check_basic2(cluster, h_rel=geometry.FD_REL_STEP):
    """Move A and E only, keeping every squared length but AB and DE fixed.

    The placements stay flat by construction, so the measured dL_DE/dL_AB
    must equal minus the volume-product ratio.
    """
    pts = cluster.points
    fixed_pairs = [(A, C), (A, D), (A, E), (A, F), (B, E), (C, E), (E, F)]
    J = np.zeros((len(fixed_pairs), 8))
    for r, (u, w) in enumerate(fixed_pairs):
        d = pts[u] - pts[w]
        if u == A:
            J[r, 0:4] += 2 * d
        if w == A:
            J[r, 0:4] -= 2 * d
        if u == E:
            J[r, 4:8] += 2 * d
        if w == E:
            J[r, 4:8] -= 2 * d
    _, svals, Vh = np.linalg.svd(J)
    # 7 constraints on 8 coordinates: a unique flat direction needs full rank
    if svals[-1] < 1e-10 * svals[0]:
        raise DegenerateSimplexError("constraint Jacobian is rank deficient")
    v = Vh[-1]
    scale = float(np.abs(pts).max())
    s = h_rel * scale

    def lengths_at(t):
        q = pts.copy()
        q[A] += t * v[0:4]
        q[E] += t * v[4:8]
        return geometry.squared_length_table(q)

    Lp, Lm = lengths_at(s), lengths_at(-s)
    dAB = Lp[A, B] - Lm[A, B]
    dDE = Lp[D, E] - Lm[D, E]
    if abs(dAB) < 1e-14 * max(abs(dDE), 1.0):
        raise DegenerateSimplexError("flat family does not move the AB length")
    ratio = dDE / dAB
    predicted = -cluster.hat_volume(A) * cluster.hat_volume(B) / (
        cluster.hat_volume(D) * cluster.hat_volume(E)
    )
    return TwoEdgeCheck(
        ratio=ratio,
        predicted=predicted,
        residual=abs(ratio - predicted) / abs(predicted),
    )


@dataclass(frozen=True)
class SixTermCheck:
    """Volume-weighted gradient identity between the two cluster deficits."""

    residual: float  # max component mismatch, relative
    cosine: float  # |cos| of the two 15-component gradients
    ratio_residual: float  # gradient-component ratio vs volume products


def check_6term(cluster, h_rel=geometry.FD_REL_STEP, richardson=True):
    gA = cluster.omega_gradient("abc", h_rel=h_rel, richardson=richardson)
    gD = cluster.omega_gradient("def", h_rel=h_rel, richardson=richardson)
    va = np.array([gA[e] for e in CLUSTER_EDGES])
    vd = np.array([gD[e] for e in CLUSTER_EDGES])

    V = {x: cluster.hat_volume(x) for x in range(6)}
    lhs = V[D] * (-V[E]) * V[F] / cluster.area((A, B, C)) * va
    rhs = V[A] * (-V[B]) * V[C] / cluster.area((D, E, F)) * vd
    scale = max(np.abs(lhs).max(), np.abs(rhs).max())
    residual = float(np.abs(lhs - rhs).max() / scale)

    cosine = abs(float(va @ vd / (np.linalg.norm(va) * np.linalg.norm(vd))))

    ratio = gA[(A, B)] / gA[(D, E)]
    predicted = V[A] * V[B] / (V[D] * V[E])
    ratio_residual = abs(ratio - predicted) / abs(predicted)
    return SixTermCheck(residual=residual, cosine=cosine, ratio_residual=ratio_residual)


def cluster_complexes(cluster):
    """(complex, metric, coords) for the before and after clusters."""
    out = []
    for cells in (BEFORE_CELLS, AFTER_CELLS):
        c = build_complex(cells, allow_boundary=True)
        coords = {i: cluster.points[i] for i in range(6)}
        out.append((c, realize(c, coords, allow_boundary=True), coords))
    return out


def product_of_areas(c, m):
    prod = 1.0
    for tri in c.faces[2]:
        prod *= m.S[tri]
    return prod


def product_of_volumes(c, m):
    prod = 1.0
    for sid in range(len(c.simplices)):
        prod *= m.V[sid]
    return prod


def restricted_invariant(c, m, sel):
    """det(B) * product of signed volumes / product of areas."""
    if sel.rank < 1 or not math.isfinite(sel.det) or sel.det == 0.0:
        raise SelectionError("selection is degenerate (zero or non-finite det)")
    if max(sel.rows, default=0) >= len(c.faces[2]) or max(sel.cols, default=0) >= len(
        c.faces[1]
    ):
        raise SelectionError("selection does not fit the complex")
    return sel.det * product_of_volumes(c, m) / product_of_areas(c, m)


@dataclass(frozen=True)
class MoveComparison:
    old_face: tuple
    new_face: tuple
    six_vertices: tuple
    value_before: float
    value_after: float
    ratio: float
    deviation: float  # | |ratio| - 1 |
    materialized: bool
    record: object = None


@dataclass(frozen=True)
class InvariantReport:
    """Scalar invariant with the selection that produced it."""

    value: float
    selection: object
    prod_S: float
    prod_V: float
    move_context: MoveComparison = None


def full_invariant(c, m, pivot_tol=PIVOT_TOL, h_rel=geometry.FD_REL_STEP,
                   richardson=False):
    """prod(S) / (det(B) * prod(V)) with a complete-pivoting selection.

    The complementary face/edge index sets ride along in the selection; they
    label the symbolic differential-form part, of which only transition
    factors (see basis_change_factor) are numerically meaningful.
    """
    M = assemble_domega_dL(c, m, h_rel=h_rel, richardson=richardson)
    sel = rank_and_submatrix(M, tol=pivot_tol).with_keys(c.faces[2], c.faces[1])
    if sel.rank < 1:
        raise SelectionError("deficit/length matrix has rank zero")
    prod_S = product_of_areas(c, m)
    prod_V = product_of_volumes(c, m)
    return InvariantReport(
        value=prod_S / (sel.det * prod_V),
        selection=sel,
        prod_S=prod_S,
        prod_V=prod_V,
    )


def _new_cell_data(c, m, coords, new_cells):
    """Signed volumes, eps and length tables of the replacement cells."""
    data = []
    for verts, sign in new_cells:
        pts = np.stack([np.asarray(coords[v], float) for v in oriented_tuple(verts, sign)])
        vol = geometry.signed_volume4(pts)
        Ltab = geometry.squared_length_table(pts)
        if abs(vol) < geometry.degeneracy_threshold(Ltab):
            raise DegenerateSimplexError(f"replacement simplex {verts} is degenerate")
        data.append((verts, sign, vol, m.simplex_lengths(verts)))
    return data


def virtual_rebuild(c, m, coords, M, star, def_, new_cells,
                    h_rel=geometry.FD_REL_STEP, richardson=True):
    """Deficit/length matrix after the move, without materializing it.

    Subtracts the removed cluster's angle derivatives from the assembled
    matrix and adds the replacement cluster's; the appearing triangle is a
    cell of its own, so its row is returned separately (in the self-dual
    situation an older face with the same vertices may survive alongside).
    """
    new_data = _new_cell_data(c, m, coords, new_cells)
    M_after = M.copy()
    def_row = np.zeros(M.shape[1])
    for sid in star:
        verts, _ = c.simplices[sid]
        Dth = dtheta_dL_simplex(
            m.simplex_lengths(verts), m.eps[sid], h_rel=h_rel, richardson=richardson
        )
        rows = [c.face_index[2][tuple(verts[i] for i in f)] for f in geometry.FACES5]
        cols = [c.face_index[1][tuple(verts[i] for i in e)] for e in geometry.EDGES5]
        M_after[np.ix_(rows, cols)] += Dth
    for verts, sign, vol, L5 in new_data:
        eps_new = 1 if vol > 0 else -1
        Dth = dtheta_dL_simplex(L5, eps_new, h_rel=h_rel, richardson=richardson)
        cols = [c.face_index[1][tuple(verts[i] for i in e)] for e in geometry.EDGES5]
        for fi, f in enumerate(geometry.FACES5):
            key = tuple(verts[i] for i in f)
            if key == def_:
                def_row[cols] -= Dth[fi]
            else:
                M_after[c.face_index[2][key], cols] -= Dth[fi]
    return M_after, def_row, new_data


def compare_under_move(c, coords, t, pivot_tol=PIVOT_TOL,
                       h_rel=geometry.FD_REL_STEP, richardson=True,
                       force_virtual=False):
    """Invariant before and after the 3->3 move at triangle t.

    The before-selection forces the row of t into the submatrix; the
    after-selection keeps the same rows and columns except that the row of t
    is replaced by the row of the opposite triangle.  The placement is reused
    for the rebuilt cluster, so flatness persists.
    """
    m = realize(c, coords)
    M = assemble_domega_dL(c, m, h_rel=h_rel, richardson=richardson)
    abc = tuple(sorted(int(v) for v in t))
    row_abc = c.face_index[2][abc]
    sel = rank_and_submatrix(M, must_include_row=row_abc, tol=pivot_tol).with_keys(
        c.faces[2], c.faces[1]
    )
    value_before = restricted_invariant(c, m, sel)

    abc2, def_, star, new_cells = move_cluster(c, t)
    materializable = def_ not in c.face_index[2]

    if materializable and not force_virtual:
        c2, record = pachner_33(c, t)
        m2 = realize(c2, coords)
        M2 = assemble_domega_dL(c2, m2, h_rel=h_rel, richardson=richardson)
        rows2 = [
            c2.face_index[2][def_ if key == abc else key] for key in sel.row_keys
        ]
        cols2 = [c2.face_index[1][key] for key in sel.col_keys]
        detB_after = float(np.linalg.det(M2[np.ix_(rows2, cols2)]))
        if detB_after == 0.0 or not math.isfinite(detB_after):
            raise SelectionError("matched after-selection is degenerate")
        value_after = detB_after * product_of_volumes(c2, m2) / product_of_areas(c2, m2)
        materialized = True
    else:
        M_after, def_row, new_data = virtual_rebuild(
            c, m, coords, M, star, def_, new_cells, h_rel=h_rel, richardson=richardson
        )
        B_after = np.empty((sel.rank, sel.rank))
        for s, j in enumerate(sel.rows):
            source = def_row if j == row_abc else M_after[j]
            B_after[s] = source[list(sel.cols)]
        detB_after = float(np.linalg.det(B_after))
        if detB_after == 0.0 or not math.isfinite(detB_after):
            raise SelectionError("matched after-selection is degenerate")

        prod_V_after = product_of_volumes(c, m)
        for sid in star:
            prod_V_after /= m.V[sid]
        for _, _, vol, _ in new_data:
            prod_V_after *= vol
        S_abc = m.S[abc]
        T = np.zeros((3, 3))
        for (i, j) in ((0, 1), (0, 2), (1, 2)):
            key = (def_[i], def_[j])
            T[i, j] = T[j, i] = m.L[key]
        S_def = math.sqrt(geometry.cm_squared_volume(2, T))
        prod_S_after = product_of_areas(c, m) / S_abc * S_def
        value_after = detB_after * prod_V_after / prod_S_after
        record = None
        materialized = False

    ratio = value_before / value_after
    comparison = MoveComparison(
        old_face=abc,
        new_face=def_,
        six_vertices=abc2 + def_,
        value_before=value_before,
        value_after=value_after,
        ratio=ratio,
        deviation=abs(abs(ratio) - 1.0),
        materialized=materialized,
        record=record,
    )
    return InvariantReport(
        value=value_before,
        selection=sel,
        prod_S=product_of_areas(c, m),
        prod_V=product_of_volumes(c, m),
        move_context=comparison,
    )


@dataclass(frozen=True)
class BasisChangeFactors:
    """Transition factors when one element of a selection is exchanged.

    factor_det is det(B_new)/det(B_old).  factor_form is the multiplier the
    complementary differential form picks up, computed from a kernel basis
    (of the face/length matrix for edge swaps, of the conjugate edge/area
    matrix for face swaps).  The contracts are factor_det = -factor_form for
    edge swaps and factor_det = coefficient = -factor_form for face swaps,
    making det(B)^-1 times the form invariant up to sign.
    """

    kind: str
    factor_det: float
    factor_form: float
    coefficient: float = None


def basis_change_factor(M, sel, swap, conjugate=None):
    """Factors for swapping one edge (column) or one face (row) of B.

    swap is ("edge", b, c) with column b outside the selection replacing
    column c inside it, or ("face", new_row, old_row) with row new_row
    outside the selection replacing old_row inside it.  Face swaps need the
    independently assembled conjugate (edge x face) matrix for the form
    factor.
    """
    M = np.asarray(M, dtype=float)
    kind = swap[0]
    if kind == "edge":
        b, c_col = int(swap[1]), int(swap[2])
        if b not in sel.cols_comp or c_col not in sel.cols:
            raise SelectionError("edge swap must exchange an outside and an inside column")
        cols_new = [b if j == c_col else j for j in sel.cols]
        detB_new = float(np.linalg.det(M[np.ix_(list(sel.rows), cols_new)]))
        factor_det = detB_new / sel.det
        if not math.isfinite(factor_det) or abs(factor_det) <= PIVOT_TOL:
            raise SelectionError("edge swap produces a singular submatrix")

        N = kernel_basis(M, sel.rank)
        K = N[list(sel.cols_comp)]
        rhs = np.zeros(len(sel.cols_comp))
        rhs[sel.cols_comp.index(b)] = 1.0
        try:
            x = np.linalg.solve(K, rhs)
        except np.linalg.LinAlgError as exc:
            raise SelectionError("outside columns do not parametrize the kernel") from exc
        factor_form = float((N @ x)[c_col])
        return BasisChangeFactors(kind="edge", factor_det=factor_det, factor_form=factor_form)

    if kind == "face":
        new_row, old_row = int(swap[1]), int(swap[2])
        if new_row not in sel.rows_comp or old_row not in sel.rows:
            raise SelectionError("face swap must exchange an outside and an inside row")
        if conjugate is None:
            raise SelectionError("face swaps need the conjugate edge/area matrix")
        rows_new = [new_row if i == old_row else i for i in sel.rows]
        detB_new = float(np.linalg.det(M[np.ix_(rows_new, list(sel.cols))]))
        factor_det = detB_new / sel.det
        if not math.isfinite(factor_det) or abs(factor_det) <= PIVOT_TOL:
            raise SelectionError("face swap produces a singular submatrix")

        coeffs, *_ = np.linalg.lstsq(M[list(sel.rows)].T, M[new_row], rcond=None)
        coefficient = float(coeffs[sel.rows.index(old_row)])

        T = np.asarray(conjugate, dtype=float)
        K_T = kernel_basis(T, sel.rank)
        rows_comp = list(sel.rows_comp)
        Kc = K_T[rows_comp]
        rhs = np.zeros(len(rows_comp))
        rhs[rows_comp.index(new_row)] = 1.0
        try:
            x = np.linalg.solve(Kc, rhs)
        except np.linalg.LinAlgError as exc:
            raise SelectionError("outside rows do not parametrize the area kernel") from exc
        factor_form = float((K_T @ x)[old_row])
        return BasisChangeFactors(
            kind="face",
            factor_det=factor_det,
            factor_form=factor_form,
            coefficient=coefficient,
        )

    raise SelectionError(f"unknown swap kind {kind!r}")
