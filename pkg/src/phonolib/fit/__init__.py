"""Weighted least-squares fitting and the temperature-law model registry."""

from .dataset import Dataset
from .engine import FitResult, fit_model
from .models import REGISTRY, ModelSpec, get_model
from .selection import ComparisonReport, aicc, compare_models, power_law_exponent

__all__ = [
    "REGISTRY",
    "ComparisonReport",
    "Dataset",
    "FitResult",
    "ModelSpec",
    "aicc",
    "compare_models",
    "fit_model",
    "get_model",
    "power_law_exponent",
]
