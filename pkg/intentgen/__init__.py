"""intentgen - intent prediction for task-oriented dialogue with look-ahead generation.

Multi-task text-to-text training (intent classification, third-utterance
generation, utterance reordering, escalation and repetition detection),
look-ahead inference scenarios, agreement-based weak labeling and
counterfactual conflict resolution, driven by a resumable pipeline.

Version: 1.0.0
"""

__version__ = "1.0.0"

from .config import Config, get_config, init_config, reset_config
from .settings import PipelineSettings, load_settings

__all__ = [
    '__version__',
    'Config',
    'get_config',
    'init_config',
    'reset_config',
    'PipelineSettings',
    'load_settings',
]
