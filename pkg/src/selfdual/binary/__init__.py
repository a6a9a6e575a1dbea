"""Analysis of binary linear codes: rank, weights, types, invariants."""

from .analysis import (
    CodeType,
    DesignReport,
    EnumeratorReport,
    IncompleteCensusError,
    ScanBoundError,
    WeightCensus,
    classify_type,
    design_lambda,
    extract_params,
    extremal_bound,
    low_weight_census,
    min_distance_full,
    pair_invariant,
    plan_census,
    scan_bound,
    weight_census_full,
)
from .code import BinaryCode, CodeError, rank_and_systematize

__all__ = [
    "BinaryCode",
    "CodeError",
    "CodeType",
    "DesignReport",
    "EnumeratorReport",
    "IncompleteCensusError",
    "ScanBoundError",
    "WeightCensus",
    "classify_type",
    "design_lambda",
    "extract_params",
    "extremal_bound",
    "low_weight_census",
    "min_distance_full",
    "pair_invariant",
    "plan_census",
    "rank_and_systematize",
    "scan_bound",
    "weight_census_full",
]
