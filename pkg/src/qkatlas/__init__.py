"""Exact combinatorics of twisted Bruhat orders, stratum posets of
parabolic quotients, and glued-diagram atlas groups."""

from .cartan import (
    CartanError,
    GeneralizedCartanMatrix,
    GluedDiagram,
    glue_breve,
    glue_tilde,
    load_group_file,
    validate,
)
from .coxeter import CapExceeded, CoxeterError, CoxeterGroup, GroupElement, Reflection
from .posets import (
    BOTTOM,
    FinitePoset,
    PosetError,
    augment_zero_hat,
    build_reflection_order,
    el_check,
    is_pure,
    is_thin,
    poset_to_dict,
    poset_to_dot,
    transitive_reduction,
)
from .qk import (
    AtlasContext,
    QKContext,
    QKElement,
    build_qk_poset,
    structural_scan,
    verify_convexity_tilde,
    verify_image_tilde,
    verify_iso_breve,
    verify_iso_tilde,
)
from .twisted import TwistedContext

__version__ = "0.1.0"

__all__ = [
    "AtlasContext",
    "BOTTOM",
    "CapExceeded",
    "CartanError",
    "CoxeterError",
    "CoxeterGroup",
    "FinitePoset",
    "GeneralizedCartanMatrix",
    "GluedDiagram",
    "GroupElement",
    "PosetError",
    "QKContext",
    "QKElement",
    "Reflection",
    "TwistedContext",
    "augment_zero_hat",
    "build_qk_poset",
    "build_reflection_order",
    "el_check",
    "glue_breve",
    "glue_tilde",
    "is_pure",
    "is_thin",
    "load_group_file",
    "poset_to_dict",
    "poset_to_dot",
    "structural_scan",
    "transitive_reduction",
    "validate",
    "verify_convexity_tilde",
    "verify_image_tilde",
    "verify_iso_breve",
    "verify_iso_tilde",
]
