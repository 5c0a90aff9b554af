"""Random free-fermion ensembles: eigenstate correlations, entanglement and thermal averages."""
from .entanglement import Subsystem, entanglement_entropy, predicted_entropy_multi, predicted_entropy_single
from .experiments import ExperimentConfig, run_experiment
from .goe import sample_goe
from .kernels import BACKEND
from .model import EigenstateSpec, ModelParams, build_model, correlation_matrix, sample_occupation
from .stats import EnsembleReport, Record
from .thermal import avg_occupation, effective_beta

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "EigenstateSpec",
    "EnsembleReport",
    "ExperimentConfig",
    "ModelParams",
    "Record",
    "Subsystem",
    "avg_occupation",
    "build_model",
    "correlation_matrix",
    "effective_beta",
    "entanglement_entropy",
    "predicted_entropy_multi",
    "predicted_entropy_single",
    "run_experiment",
    "sample_goe",
    "sample_occupation",
]
