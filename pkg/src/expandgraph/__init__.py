"""Learning how incoming nodes attach to a graph for signal interpolation."""

from .attachment import AttachmentModel, AttachmentSample, covariance_diag, mean, sample
from .filters import FilterSpec, build_shifted_matrix, filter_expanded, interpolate_incoming
from .graph import ExpandedGraph, Graph, barabasi_albert, erdos_renyi, expand, smooth_signal
from .optimizer import (FitResult, OptimizerConfig, TrainingSample, TrainingSet,
                        closed_form_mse, empirical_cost, fit)

__version__ = "0.1.0"

__all__ = [
    "AttachmentModel", "AttachmentSample", "ExpandedGraph", "FilterSpec", "FitResult", "Graph",
    "OptimizerConfig", "TrainingSample", "TrainingSet", "barabasi_albert",
    "build_shifted_matrix", "closed_form_mse", "covariance_diag", "empirical_cost",
    "erdos_renyi", "expand", "filter_expanded", "fit", "interpolate_incoming", "mean",
    "sample", "smooth_signal",
]
