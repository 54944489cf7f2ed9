# Utils package
from .errors import OolrError, ConfigError
from .domain import Decision, FeasibleBox, GradVector, diameter, optimal_sigma, project
from .loss import LossConfig, TraceSlot, loss_gradient, loss_value

__all__ = [
    'OolrError',
    'ConfigError',
    'Decision',
    'FeasibleBox',
    'GradVector',
    'diameter',
    'optimal_sigma',
    'project',
    'LossConfig',
    'TraceSlot',
    'loss_gradient',
    'loss_value',
]
