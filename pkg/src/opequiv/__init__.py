"""Deciding operator equivalence relations with constructive witnesses.

Operators are described by finite matrices, compact diagonal specifications
with symbolic tails, or bucketed spectral data. The package decides whether
two such operators are strongly equivalent, or equivalent after one-sided
identity extensions, and produces witnesses: ratio envelopes, shifts,
extension dimensions, and explicit element pairings.
"""

from .cardinal import (
    ALEPH0,
    Aleph,
    Cardinal,
    Finite,
    ONE,
    ZERO,
    as_cardinal,
    card_add,
    card_from_json,
    card_le,
    card_lt,
    card_max,
    card_min,
    card_scale,
    card_sum,
    card_to_json,
    is_finite,
)
from .conditions import (
    ConditionOutcome,
    WindowViolation,
    check_condition_S,
    check_condition_S_tilde,
    condition_s_outcome,
    condition_s_tilde_outcome,
    lemma_s_tilde_consistency,
)
from .cli import SpecDocument, main, parse_spec, run, serialize_document
from .engine import (
    EngineParams,
    EquivalenceWitness,
    LeftByDim,
    RELATION_EXTENSION,
    RELATION_STRONG,
    RightByDim,
    Verdict,
    build_witness,
    comparable_after_shift,
    decide_extension_family,
    decide_strong,
)
from .errors import (
    BoundaryAmbiguityError,
    DeltaMismatchError,
    DeltaRangeError,
    HypothesisViolationError,
    SchemaError,
    SpecError,
    UnsupportedTailError,
)
from .matcher import (
    BucketFunction,
    KERNEL_BACKEND,
    MatchMode,
    MatchResult,
    Violation,
    build_matching,
    find_hypothesis_violation,
    verify_hypotheses,
    window_count,
)
from .spectral import (
    Buckets,
    BucketMeasure,
    CoefficientSeq,
    CompactDiagonal,
    ConstantRay,
    DEFAULT_SVD_TOL,
    DirectSum,
    FiniteMatrix,
    GeometricRay,
    OperatorSpec,
    ScaledIdentity,
    SeqRay,
    SparseRay,
    ValueInventory,
    direct_sum,
    flatten_values,
    identity_measure,
    kernel_condition,
    merge_measures,
    modulus_data,
    range_membership,
    truncate_inventory,
)
from .tails import (
    FactorialSeq,
    GeometricSeq,
    PowerSeq,
    SeqSpan,
    TailModel,
    ZeroTail,
    bucket_index,
    check_delta,
    pow_delta,
)

__version__ = "0.1.0"

__all__ = [
    "ALEPH0",
    "Aleph",
    "BoundaryAmbiguityError",
    "BucketFunction",
    "BucketMeasure",
    "Buckets",
    "Cardinal",
    "CoefficientSeq",
    "CompactDiagonal",
    "ConditionOutcome",
    "ConstantRay",
    "DEFAULT_SVD_TOL",
    "DeltaMismatchError",
    "DeltaRangeError",
    "DirectSum",
    "EngineParams",
    "EquivalenceWitness",
    "FactorialSeq",
    "Finite",
    "FiniteMatrix",
    "GeometricRay",
    "GeometricSeq",
    "HypothesisViolationError",
    "KERNEL_BACKEND",
    "LeftByDim",
    "MatchMode",
    "MatchResult",
    "ONE",
    "OperatorSpec",
    "PowerSeq",
    "RELATION_EXTENSION",
    "RELATION_STRONG",
    "RightByDim",
    "ScaledIdentity",
    "SchemaError",
    "SeqRay",
    "SeqSpan",
    "SparseRay",
    "SpecDocument",
    "SpecError",
    "TailModel",
    "UnsupportedTailError",
    "ValueInventory",
    "Verdict",
    "Violation",
    "WindowViolation",
    "ZERO",
    "ZeroTail",
    "as_cardinal",
    "build_matching",
    "build_witness",
    "bucket_index",
    "card_add",
    "card_from_json",
    "card_le",
    "card_lt",
    "card_max",
    "card_min",
    "card_scale",
    "card_sum",
    "card_to_json",
    "check_condition_S",
    "check_condition_S_tilde",
    "check_delta",
    "comparable_after_shift",
    "condition_s_outcome",
    "condition_s_tilde_outcome",
    "decide_extension_family",
    "decide_strong",
    "direct_sum",
    "find_hypothesis_violation",
    "flatten_values",
    "identity_measure",
    "is_finite",
    "kernel_condition",
    "lemma_s_tilde_consistency",
    "main",
    "merge_measures",
    "modulus_data",
    "parse_spec",
    "pow_delta",
    "range_membership",
    "run",
    "serialize_document",
    "truncate_inventory",
    "verify_hypotheses",
    "window_count",
]
