"""Exact algebraic-number arithmetic: integer polynomials, certified root
isolation, number-field elements, interval reals, Pisot testing, and
multiplicative-relation detection."""

from .intpoly import IntPolynomial
from .roots import (
    ComplexRootBox,
    RealRootInterval,
    RootIsolation,
    isolate_real_roots,
    refine_complex_box,
    refine_real_root,
)
from .algnum import (
    AlgebraicNumber,
    ExactScalar,
    FieldElement,
    NumberField,
    exact_abs,
    exact_enclosure,
    exact_float,
    exact_sign,
    is_pisot,
    named_constant,
    parse_scalar,
    scalar_to_str,
)
from .bigreal import BigReal
from .multiplicative import (
    Dependent,
    IndependentCertified,
    IndependentUpTo,
    Verdict,
    multiplicative_relation,
)

__all__ = [
    "IntPolynomial",
    "RealRootInterval",
    "ComplexRootBox",
    "RootIsolation",
    "isolate_real_roots",
    "refine_real_root",
    "refine_complex_box",
    "AlgebraicNumber",
    "NumberField",
    "FieldElement",
    "ExactScalar",
    "is_pisot",
    "named_constant",
    "parse_scalar",
    "scalar_to_str",
    "exact_sign",
    "exact_float",
    "exact_abs",
    "exact_enclosure",
    "BigReal",
    "Dependent",
    "IndependentCertified",
    "IndependentUpTo",
    "Verdict",
    "multiplicative_relation",
]
