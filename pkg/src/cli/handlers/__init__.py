# Command handlers
from .generate import generate_command
from .predict import predict_command
from .report import report_command
from .run import run_command

__all__ = [
    'generate_command',
    'predict_command',
    'report_command',
    'run_command',
]
