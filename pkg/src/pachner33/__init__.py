"""Euclidean-geometric invariants of 3->3 Pachner moves on 4-manifolds."""

from .complexes import (
    Complex4,
    MoveRecord,
    bipyramid_sphere,
    boundary_delta5,
    build_complex,
    orient_consistently,
    pachner_33,
    star_of_triangle,
    tetra_circle_join,
)
from .errors import (
    ComplexStructureError,
    DegenerateSimplexError,
    MovePreconditionError,
    NonRealizableLengthsError,
    Pachner33Error,
    SchemaError,
    SelectionError,
)
from .flatmetric import (
    FlatMetric,
    check_flat,
    deficit_Omega,
    deficit_omega,
    random_realization,
    realize,
)
from .geometry import (
    cm_squared_volume,
    dihedral_angle,
    edge_angle_theta,
    gram_embed,
    signed_dihedral,
    signed_volume4,
    squared_length_table,
)
from .invariants import (
    ClusterSix,
    InvariantReport,
    basis_change_factor,
    check_6term,
    check_basic2,
    compare_under_move,
    full_invariant,
    random_cluster,
    restricted_invariant,
)
from .io import ComplexDocument, load_fixture, parse_complex, serialize_complex
from .jacobians import (
    JacobianSet,
    SubmatrixSelection,
    assemble_dBigOmega_dS,
    assemble_domega_dL,
    assemble_domega_dS,
    build_jacobians,
    dS_dL_simplex,
    dtheta_dL_simplex,
    rank_and_submatrix,
)

__version__ = "0.1.0"
