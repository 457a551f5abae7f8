"""Projected stochastic gradient descent in reproducing-kernel function
spaces, with an exact ridge-system oracle and a Monte-Carlo harness that
measures the empirical 1/k convergence rate."""

from .data import Dataset, generate_dataset, load_dataset, save_dataset
from .exact import OracleSolution, distance_sq, solve
from .errors import (
    AcceptanceError,
    ConfigError,
    InputError,
    NumericsError,
    RkhsSgdError,
)
from .experiment import ConvergenceRecord, StudyConfig, bound_report, fit_rate, run_study
from .functions import (
    KernelExpansion,
    combine,
    inner,
    norm_sq,
    project_ball,
    representer,
    zero,
)
from .kernels import GramMatrix, KernelSpec, gram, sup_bound
from .objective import (
    MixtureWeights,
    ProblemConstants,
    bound_term,
    constants,
    loss_component,
    loss_total,
    riesz_grad_component,
    riesz_grad_full,
)
from .sgd import OperatorMode, SgdConfig, StepSchedule, Trajectory, make_schedule, run

__all__ = [
    "AcceptanceError",
    "ConfigError",
    "ConvergenceRecord",
    "Dataset",
    "GramMatrix",
    "InputError",
    "KernelExpansion",
    "KernelSpec",
    "MixtureWeights",
    "NumericsError",
    "OperatorMode",
    "OracleSolution",
    "ProblemConstants",
    "RkhsSgdError",
    "SgdConfig",
    "StepSchedule",
    "StudyConfig",
    "Trajectory",
    "bound_report",
    "bound_term",
    "combine",
    "constants",
    "distance_sq",
    "fit_rate",
    "generate_dataset",
    "gram",
    "inner",
    "load_dataset",
    "loss_component",
    "loss_total",
    "make_schedule",
    "norm_sq",
    "project_ball",
    "representer",
    "riesz_grad_component",
    "riesz_grad_full",
    "run",
    "run_study",
    "save_dataset",
    "solve",
    "sup_bound",
    "zero",
]

__version__ = "0.1.0"
