"""Exact Cantor-Bendixson and Szlenk index computations on compact ordinal spaces."""

from .ordinal import (
    OMEGA,
    ONE,
    ZERO,
    Ordinal,
    ParseError,
    add,
    compare,
    divide_by_omega_pow,
    format_ordinal,
    from_int,
    left_subtract,
    leading_exponent,
    mul_nat,
    omega_mul,
    omega_pow,
    parse,
    predecessor,
    successor,
    tower_index,
)
from .topology import (
    ClosedSet,
    Singleton,
    Stratum,
    cb_index,
    contains,
    derivative,
    finite_points,
    format_closed_set,
    interval,
    is_empty,
    iterated_derivative,
    roundup,
)
from .grasberg import (
    GrasbergParams,
    KingReport,
    QueenReport,
    StepFunction,
    check_king,
    check_queen,
    constant,
    grasberg_norm,
    indicator,
    params,
    phi,
    random_step_function,
    step_add,
    step_convex,
    step_scale,
    sup_on,
    value_at,
)
from .trees import (
    EMPTY_TREE,
    FactReport,
    FamilyContractError,
    FiniteTree,
    WeaklyNullFamily,
    check_fact_i,
    check_fact_ii,
    family_from_table,
    iterated_prune,
    marching_indicators,
    max_nodes,
    prune,
    rank,
    strip,
    subtree_above,
    tree_from_json,
    tree_from_text,
    tree_to_json,
    tree_to_text,
    zero_family,
)
from .szlenk import (
    CertificateError,
    ExtractionCertificate,
    SzlenkResult,
    dirac_derivative,
    extract_small_combination,
    index_of_CK,
    index_of_interval,
)

__version__ = "0.1.0"
