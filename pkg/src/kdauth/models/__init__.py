from .standardize import Standardizer
from .smote import smote
from .svm import KernelSVM
from .mlp import MLPClassifier
from .gbt import GradientBoostedTrees
from .gridsearch import GridSpec, DEFAULT_GRIDS, stratified_kfold, grid_search_cv
from .verifier import VerifierModel, train_verifier

__all__ = [
    "Standardizer",
    "smote",
    "KernelSVM",
    "MLPClassifier",
    "GradientBoostedTrees",
    "GridSpec",
    "DEFAULT_GRIDS",
    "stratified_kfold",
    "grid_search_cv",
    "VerifierModel",
    "train_verifier",
]
