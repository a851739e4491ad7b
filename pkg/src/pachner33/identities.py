"""Randomized batteries for the differential identities.

Each battery draws seed-deterministic configurations, evaluates one identity
and reports the worst relative residual.  Finite differences run with one
Richardson extrapolation level so that truncation stays far below the
tolerances even for moderately thin simplices.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .invariants import (
    check_6term,
    check_basic2,
    cluster_complexes,
    random_cluster,
)
from .jacobians import assemble_domega_dL

DEFAULT_TOL = 1e-6
PARALLEL_COS_TOL = 1e-10


@dataclass(frozen=True)
class BatteryResult:
    name: str
    trials: int
    tol: float
    max_residual: float
    failures: int
    extras: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.failures == 0


def random_simplex_points(seed, quality=2e-3):
    """Five unit-ball points forming a quality-nondegenerate 4-simplex."""
    rng = np.random.default_rng(seed)
    for _ in range(500):
        raw = rng.standard_normal((5, 4))
        pts = raw / np.linalg.norm(raw, axis=1, keepdims=True)
        pts = pts * rng.uniform(size=(5, 1)) ** 0.25
        L = geometry.squared_length_table(pts)
        if abs(geometry.signed_volume4(pts)) >= quality * geometry.mean_edge_length(L) ** 4:
            return pts
    raise geometry.DegenerateSimplexError("could not sample a generic simplex")


def _trial_seeds(seed, trials):
    return np.random.default_rng(seed).integers(0, 2**63 - 1, size=trials)


def _fd_signed_angle_derivative(L, face, edge, eps, h_rel, richardson=True):
    h0 = h_rel * float(L.max())

    def fd(h):
        i, j = edge
        Lp = L.copy()
        Lp[i, j] += h
        Lp[j, i] += h
        Lm = L.copy()
        Lm[i, j] -= h
        Lm[j, i] -= h
        return (geometry.signed_dihedral(Lp, face, eps) - geometry.signed_dihedral(Lm, face, eps)) / (2 * h)

    if not richardson:
        return fd(h0)
    return (4 * fd(h0 / 2) - fd(h0)) / 3


def battery_opposite_edge_derivative(trials=100, seed=0, tol=DEFAULT_TOL):
    """Angle-by-opposite-length derivative against area over 24 volumes.

    For points A..E with only the squared length AE varying, the signed
    dihedral angle at BCD satisfies 24 dtheta/dL = S_BCD / V_ABCDE.
    """
    worst, failures = 0.0, 0
    for s in _trial_seeds(seed, trials):
        pts = random_simplex_points(s)
        V = geometry.signed_volume4(pts)
        eps = 1 if V > 0 else -1
        L = geometry.squared_length_table(pts)
        face, edge = (1, 2, 3), (0, 4)
        S = geometry.face_area(L, face)
        d = _fd_signed_angle_derivative(L, face, edge, eps, geometry.FD_REL_STEP)
        target = S / V
        residual = abs(24.0 * d - target) / abs(target)
        worst = max(worst, float(residual))
        failures += int(residual > tol)
    return BatteryResult("opposite_edge_derivative", trials, tol, worst, failures)


def _directional_angle_differentials(L, direction, eps, h_rel, richardson=True):
    h0 = h_rel * float(L.max())

    def fd(h):
        Lp = L + h * direction
        Lm = L - h * direction
        mp = geometry.dihedral_angles_from_lengths(Lp)
        mm = geometry.dihedral_angles_from_lengths(Lm)
        return {f: eps * (mp[f] - mm[f]) / (2 * h) for f in geometry.FACES5}

    if not richardson:
        return fd(h0)
    a, b = fd(h0 / 2), fd(h0)
    return {f: (4 * a[f] - b[f]) / 3 for f in geometry.FACES5}


def _random_direction(rng):
    d = np.zeros((5, 5))
    for i, j in geometry.EDGES5:
        d[i, j] = d[j, i] = rng.standard_normal()
    return d / np.abs(d).max()


def battery_schlafli(trials=100, seed=0, tol=DEFAULT_TOL):
    """Area-weighted angle differentials sum to zero for any deformation."""
    worst, failures = 0.0, 0
    for s in _trial_seeds(seed, trials):
        rng = np.random.default_rng(s)
        pts = random_simplex_points(s)
        L = geometry.squared_length_table(pts)
        direction = _random_direction(rng)
        dtheta = _directional_angle_differentials(L, direction, +1, geometry.FD_REL_STEP)
        terms = [geometry.face_area(L, f) * dtheta[f] for f in geometry.FACES5]
        residual = abs(sum(terms)) / sum(abs(t) for t in terms)
        worst = max(worst, float(residual))
        failures += int(residual > tol)
    return BatteryResult("schlafli", trials, tol, worst, failures)


def battery_modified_schlafli(trials=100, seed=0, tol=DEFAULT_TOL):
    """Length-weighted edge-angle differentials sum to zero as well.

    Follows from the face areas being homogeneous of degree one in the
    squared lengths together with the plain area-weighted identity.
    """
    worst, failures = 0.0, 0
    for s in _trial_seeds(seed, trials):
        rng = np.random.default_rng(s)
        pts = random_simplex_points(s)
        L = geometry.squared_length_table(pts)
        direction = _random_direction(rng)
        h0 = geometry.FD_REL_STEP * float(L.max())

        def dthetas(h):
            Tp = geometry.edge_angle_thetas(L + h * direction, +1)
            Tm = geometry.edge_angle_thetas(L - h * direction, +1)
            return {e: (Tp[e] - Tm[e]) / (2 * h) for e in geometry.EDGES5}

        fine, coarse = dthetas(h0 / 2), dthetas(h0)
        dTheta = {e: (4 * fine[e] - coarse[e]) / 3 for e in geometry.EDGES5}
        terms = [L[e] * dTheta[e] for e in geometry.EDGES5]
        residual = abs(sum(terms)) / sum(abs(t) for t in terms)
        worst = max(worst, float(residual))
        failures += int(residual > tol)
    return BatteryResult("modified_schlafli", trials, tol, worst, failures)


def battery_two_edge_ratio(trials=100, seed=0, tol=DEFAULT_TOL):
    """Constrained two-length derivative against the volume-product ratio."""
    worst, failures = 0.0, 0
    for s in _trial_seeds(seed, trials):
        res = check_basic2(random_cluster(s)).residual
        worst = max(worst, float(res))
        failures += int(res > tol)
    return BatteryResult("two_edge_ratio", trials, tol, worst, failures)


def battery_six_term(trials=100, seed=0, tol=DEFAULT_TOL, cos_tol=PARALLEL_COS_TOL):
    """Full gradient form of the six-volume relation plus parallelism."""
    worst, worst_cos, worst_ratio, failures = 0.0, 1.0, 0.0, 0
    for s in _trial_seeds(seed, trials):
        chk = check_6term(random_cluster(s))
        worst = max(worst, float(chk.residual))
        worst_cos = min(worst_cos, float(chk.cosine))
        worst_ratio = max(worst_ratio, float(chk.ratio_residual))
        failures += int(
            (chk.residual > tol)
            or (chk.cosine < 1 - cos_tol)
            or (chk.ratio_residual > tol)
        )
    return BatteryResult(
        "six_term",
        trials,
        tol,
        worst,
        failures,
        extras={"min_cosine": worst_cos, "max_ratio_residual": worst_ratio},
    )


def battery_cluster_closed_forms(trials=100, seed=0, tol=DEFAULT_TOL):
    """Assembled deficit/length entries against the closed volume-ratio forms.

    On the cluster around ABC the (ABC, AB) entry must equal
    -(S_ABC/24) V_hatA V_hatB / (V_hatD V_hatE V_hatF); the mirrored statement
    holds for (DEF, DE) on the replacement cluster.
    """
    worst, failures = 0.0, 0
    for s in _trial_seeds(seed, trials):
        cluster = random_cluster(s)
        V = {x: cluster.hat_volume(x) for x in range(6)}
        (c1, m1, _), (c2, m2, _) = cluster_complexes(cluster)

        M1 = assemble_domega_dL(c1, m1, richardson=True)
        got1 = M1[c1.face_index[2][(0, 1, 2)], c1.face_index[1][(0, 1)]]
        want1 = -(cluster.area((0, 1, 2)) / 24.0) * V[0] * V[1] / (V[3] * V[4] * V[5])
        r1 = abs(got1 - want1) / abs(want1)

        M2 = assemble_domega_dL(c2, m2, richardson=True)
        got2 = M2[c2.face_index[2][(3, 4, 5)], c2.face_index[1][(3, 4)]]
        want2 = -(cluster.area((3, 4, 5)) / 24.0) * V[3] * V[4] / (V[0] * V[1] * V[2])
        r2 = abs(got2 - want2) / abs(want2)

        residual = max(r1, r2)
        worst = max(worst, float(residual))
        failures += int(residual > tol)
    return BatteryResult("cluster_closed_forms", trials, tol, worst, failures)


ALL_BATTERIES = (
    battery_opposite_edge_derivative,
    battery_two_edge_ratio,
    battery_six_term,
    battery_schlafli,
    battery_modified_schlafli,
    battery_cluster_closed_forms,
)


def run_all_batteries(trials=100, seed=0, tol=DEFAULT_TOL):
    return [battery(trials=trials, seed=seed, tol=tol) for battery in ALL_BATTERIES]
