"""Renyi entropy power inequalities: classical densities and Gaussian bosonic states."""

from repi.convolution import convolve, weighted_combine
from repi.densities import (
    Cauchy,
    Exponential,
    FiniteMixture,
    Gaussian,
    GridDensity,
    GridSpec,
    Laplace,
    Uniform,
    discretize,
    family_from_spec,
    mean_and_covariance,
    scale_density,
)
from repi.kernels import BACKEND
from repi.renyi import entropy_power, renyi_entropy, shannon_limit_check, thermo_renyi_check
from repi.report import EpiCheckCell, ExperimentReport

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Cauchy",
    "EpiCheckCell",
    "ExperimentReport",
    "Exponential",
    "FiniteMixture",
    "Gaussian",
    "GridDensity",
    "GridSpec",
    "Laplace",
    "Uniform",
    "convolve",
    "discretize",
    "entropy_power",
    "family_from_spec",
    "mean_and_covariance",
    "renyi_entropy",
    "scale_density",
    "shannon_limit_check",
    "thermo_renyi_check",
    "weighted_combine",
]
