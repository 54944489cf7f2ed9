# Managers package
from .learners import FtrlLearner, OolrLearner
from .predictors import ArmaOgdPredictor, SyntheticPredictor, ZeroPredictor
from .trace_generator import TraceConfig, generate

__all__ = [
    'FtrlLearner',
    'OolrLearner',
    'ArmaOgdPredictor',
    'SyntheticPredictor',
    'ZeroPredictor',
    'TraceConfig',
    'generate',
]
