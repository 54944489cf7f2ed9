# Services package
from .benchmark_service import RegretReport, compute_regret
from .experiment_service import ExperimentConfig, run_batch, run_experiment

__all__ = [
    'RegretReport',
    'compute_regret',
    'ExperimentConfig',
    'run_batch',
    'run_experiment',
]
