"""Meromorphic solution families of Fermat-type functional equations.

Numerical construction of every explicit solution family for equations of
the form f^n(z) + f^m(L(z)) = rhs(z) with an affine L, built on the
equianharmonic Weierstrass function and the degenerate Jacobi sine, plus
sampling and contour-integral machinery to verify the identities the
constructions rest on.
"""

from .errors import (
    ClassificationError,
    ConstructionError,
    ContourError,
    DegeneratePairError,
    DomainError,
    FermateqError,
    InconclusiveOrderError,
    NotASolutionError,
    ParameterError,
)
from .exprdsl import (
    AffineMap,
    Expr,
    ExprError,
    const,
    contains_var,
    evaluate,
    parse,
    to_source,
)
from .jacobi import SnValue, pole_near, quarter_period, sn
from .lattice import (
    CellCoords,
    Lattice,
    check_rotation_bijection,
    is_lattice_point,
    reduce_to_cell,
)
from .solutions import (
    FAMILIES,
    BuiltSolution,
    ExpFamilyCertificate,
    MeroFn,
    ShiftCertificate,
    SolutionSpec,
    build_solution,
    companion_under_shift,
    cubic_pair,
    exp_family,
    exp_modulated_inner,
    modulated_shift_solution,
    pair_2_3,
    pair_2_4,
    scalar_exp_solution,
    shift_solution,
)
from .verifier import (
    Disk,
    VerificationReport,
    order_at,
    residue_at,
    residue_identity_check,
    sample_disk,
    stable_residue,
    verify_equation,
)
from .weierstrass import (
    EquianharmonicContext,
    WpValue,
    find_zeros,
    laurent_coefficients,
    make_context,
    real_half_period,
    rotation_identity,
    rotation_identity_prime,
    translate_theta1,
    translate_theta2,
    wp,
    wp_addition,
)

__version__ = "0.1.0"
