"""Matchings between subsets of abelian groups and between subspaces of finite field extensions."""

from .abelian import GroupSpec, GroupSubset, coset_structure, cyclic_phi_psi, sumset
from .errors import (
    CapExceededError,
    CoveringBoundError,
    InternalTheoremViolation,
    MatchkitError,
    PreconditionError,
    StructuralError,
    Theorem2BoundError,
)
from .gfq import FieldTower, subfield, subfield_lattice
from .harness import (
    DivisorFamilyReport,
    LinearDeficiencyReport,
    RunConfig,
    conjecture_linear_deficiency,
    question_divisor_family,
    report_emit,
    verify_linear_case,
)
from .intersectfam import (
    SetFamily,
    check_dimension_intersection_property,
    check_set_intersection_property,
    dual_basis_pipeline,
    extend_dimension_family,
    extend_set_family,
    free_transversal,
)
from .matchgrp import deficiency, is_matched, max_matching
from .matchlin import (
    build_partition,
    check_basis_matched,
    is_primitive,
    max_trivial_intersector,
    psi_phi,
    subspace_matched,
    translate_obstructions,
)
from .subspace import Subspace, VectorSpace, enumerate_subspaces, intersect, product_span, span, stabilizer

__version__ = "0.1.0"
