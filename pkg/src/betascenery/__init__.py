"""Disintegration of self-similar measures and scenery-flow tooling for
checking pointwise normality in Pisot bases."""

from .algebraics import (
    AlgebraicNumber,
    BigReal,
    Dependent,
    ExactScalar,
    FieldElement,
    IndependentCertified,
    IndependentUpTo,
    IntPolynomial,
    NumberField,
    exact_enclosure,
    exact_float,
    exact_sign,
    is_pisot,
    isolate_real_roots,
    multiplicative_relation,
    named_constant,
    parse_scalar,
    scalar_to_str,
)
from .selfsimilar import (
    SeparatedPair,
    SimilarityIFS,
    SimilarityMap,
    attractor_hull,
    find_separated_pair,
    iterate_ifs,
    sample_measure,
)
from .model import (
    CodedPoint,
    Model,
    ModelComponent,
    OmegaWord,
    atom_mass_bound,
    build_model,
    sample_disintegration,
    sample_eta,
    sample_eta_coded,
    verify_ssc,
)
from .beta_numeration import (
    BetaBase,
    MapSpec,
    NormalityStatistic,
    OrbitRecord,
    OrbitUndecidable,
    ParryDensity,
    beta_orbit,
    normality_from_orbit,
    normality_statistic,
    orbit_of_one,
    parry_density,
    pushforward_samples,
)
from .scenery import (
    ComparisonReport,
    ExtendedChain,
    Inconclusive,
    InnerWord,
    NormalityImplied,
    PANEL_VERSION,
    PrefixedWord,
    QSamples,
    SceneryOrbit,
    WindowMeasure,
    build_extended_chain,
    center_and_window,
    compare_scenery_to_Q,
    evaluate_panel,
    panel_average,
    panel_names,
    point_mass_window,
    rescale_model_for_gap,
    sample_Q,
    scenery_orbit,
    spectrum_obstruction,
    window_of_state,
)
from .rng import UniformStream, derive_key, generator

__version__ = "0.1.0"
