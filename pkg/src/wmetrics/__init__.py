"""Observation-weighted MCC and multiclass correlation measures."""

from .binary import WeightedConfusion, confusion, mcc
from .core import (
    BinaryLabeledData,
    DegenerateLabels,
    DimensionError,
    MulticlassLabeledData,
    PreconditionViolated,
    WeightVector,
    WMetricsError,
    one_hot,
    weighted_inner,
)
from .multiclass import CovarianceSet, covariance_set, ecc, mpc1, mpc2

__all__ = [
    "BinaryLabeledData",
    "CovarianceSet",
    "DegenerateLabels",
    "DimensionError",
    "MulticlassLabeledData",
    "PreconditionViolated",
    "WMetricsError",
    "WeightVector",
    "WeightedConfusion",
    "confusion",
    "covariance_set",
    "ecc",
    "mcc",
    "mpc1",
    "mpc2",
    "one_hot",
    "weighted_inner",
]
