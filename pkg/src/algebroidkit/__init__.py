"""Exact calculus on Lie algebroids over polynomial charts.

Polynomials carry rational coefficients, so every identity (d^2 = 0, Stokes
over standard simplices, chain homotopies) is checked to exact zero.
"""
from .algebroid import (
    ChartAlgebroid,
    ChartMorphism,
    Section,
    bracket,
    compose_morphisms,
    identity,
    include,
    point,
    product,
    prolong,
    prolongation_of,
    psi_check,
    tangent,
    validate,
    validate_morphism,
)
from .cohomology import (
    BettiVector,
    CEComplex,
    betti,
    ce_matrix,
    exactness_witness,
    is_closed,
    truncated_prolong_betti,
)
from .errors import (
    AlgebroidKitError,
    VarSpaceMismatch,
    UnknownVariable,
    IncompleteSubstitution,
    EmptyIntegrationSet,
    ShapeError,
    AlgebroidMismatch,
    VarClash,
    NotProlongation,
    ChainMismatch,
    InvalidMorphism,
    ArityMismatch,
    InvalidAlgebroid,
    BadAverageSet,
    TargetMismatch,
    BadFaceIndex,
    EndpointError,
    DegreeTooLow,
    NotPointAlgebroid,
    NotClosed,
)
from .forms import (
    CubeAvg,
    Dr,
    RLinearForm,
    ScalarMul,
    Sum,
    Tensor,
    TensorForm,
    Wedge,
    d,
    evaluate,
    make_integrated,
    pullback,
    r_d,
    r_eval,
    r_pullback,
    wedge,
)
from .homotopy import (
    Homotopy,
    chain_operator,
    endpoints,
    poincare_homotopy,
    projection,
    verify_chain,
    zero_section_map,
)
from .poly import BASE, PARAM, Poly, VarSpace, integrate_simplex, simplex_moment
from .simplex import StokesReport, face_map, fiber_integrate, stokes_residual

__version__ = "0.1.0"

__all__ = [
    "ChartAlgebroid",
    "ChartMorphism",
    "Section",
    "bracket",
    "compose_morphisms",
    "identity",
    "include",
    "point",
    "product",
    "prolong",
    "prolongation_of",
    "psi_check",
    "tangent",
    "validate",
    "validate_morphism",
    "CubeAvg",
    "Dr",
    "RLinearForm",
    "ScalarMul",
    "Sum",
    "Tensor",
    "TensorForm",
    "Wedge",
    "d",
    "evaluate",
    "make_integrated",
    "pullback",
    "r_d",
    "r_eval",
    "r_pullback",
    "wedge",
    "Homotopy",
    "chain_operator",
    "endpoints",
    "poincare_homotopy",
    "projection",
    "verify_chain",
    "zero_section_map",
    "BettiVector",
    "CEComplex",
    "betti",
    "ce_matrix",
    "exactness_witness",
    "is_closed",
    "truncated_prolong_betti",
    "BASE",
    "PARAM",
    "Poly",
    "VarSpace",
    "integrate_simplex",
    "simplex_moment",
    "StokesReport",
    "face_map",
    "fiber_integrate",
    "stokes_residual",
    "AlgebroidKitError",
    "VarSpaceMismatch",
    "UnknownVariable",
    "IncompleteSubstitution",
    "EmptyIntegrationSet",
    "ShapeError",
    "AlgebroidMismatch",
    "VarClash",
    "NotProlongation",
    "ChainMismatch",
    "InvalidMorphism",
    "ArityMismatch",
    "InvalidAlgebroid",
    "BadAverageSet",
    "TargetMismatch",
    "BadFaceIndex",
    "EndpointError",
    "DegreeTooLow",
    "NotPointAlgebroid",
    "NotClosed",
]
