"""Demonic refinement calculus over finite bases.

Decides whether a finite ordered-composition structure is isomorphic to a
set of binary relations under demonic refinement and ordinary composition,
produces machine-checkable certificates either way, and synthesizes explicit
representations for the positive case.
"""

from .counterexamples import enumerate_small, gen_sn
from .decision import (
    Certificate,
    InvalidStructure,
    NotRepresentable,
    Representable,
    certificate_to_json,
    certificate_to_obj,
    check_sigma,
    decide,
    load_certificate,
    min_sigma_stage,
)
from .errors import (
    CertificateError,
    DemonicError,
    DerivationError,
    DimensionError,
    ExprError,
    FormatError,
    PreconditionError,
    ResourceCapError,
)
from .oracle import LawReport, brute_force_represent, law_suite
from .predicates import (
    HAVE_COMPILED,
    BlackFact,
    Derivation,
    PredicateFixpoint,
    TriFact,
    check_derivation,
    compute_fixpoint,
    explain,
    holds_black,
    holds_tri,
    stage_black,
    stage_tri,
)
from .relcore import (
    PointSet,
    Relation,
    compose,
    demonic_compose,
    demonic_join,
    demonic_meet,
    demonic_refines,
    dom,
    parse_relation,
    relation_to_json,
    restrict,
    saturate_infinity,
)
from .relexpr import eval_relexpr
from .repbuilder import (
    BasePoint,
    Representation,
    VerifyReport,
    build_base,
    export_dot,
    parse_representation,
    represent,
    representation_to_json,
    verify,
)
from .structure import (
    Diagnostics,
    FinStructure,
    adjoin_identity,
    parse_structure,
    serialize_structure,
    validate,
)

__version__ = "0.1.0"
