"""Gaussian receptive field population encoding for online stream classifiers."""

from .drift import Adwin
from .encoding import FeatureLimits, GrfConfig, GrfEncoder, GrfField, build_fields, encode_sample
from .evaluation import EvalLedger, McNemarWindow, RunReport
from .harness import ExperimentConfig, PairedResult, run_paired, run_single, run_suite
from .learners import LEARNERS, make_learner

__version__ = "0.1.0"

__all__ = [
    "Adwin",
    "EvalLedger",
    "ExperimentConfig",
    "FeatureLimits",
    "GrfConfig",
    "GrfEncoder",
    "GrfField",
    "LEARNERS",
    "McNemarWindow",
    "PairedResult",
    "RunReport",
    "build_fields",
    "encode_sample",
    "make_learner",
    "run_paired",
    "run_single",
    "run_suite",
]
