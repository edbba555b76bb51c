"""Text-to-text model backends."""

from .base import BackendConfig, EarlyStopping, Seq2SeqBackend, normalize_log_likelihoods, run_epochs
from .oracle import OracleBackend, OracleRule, keyword_weight, load_oracle_script
from .t5 import T5Backend
from .manager import BackendManager

__all__ = [
    'BackendConfig',
    'EarlyStopping',
    'Seq2SeqBackend',
    'normalize_log_likelihoods',
    'run_epochs',
    'OracleBackend',
    'OracleRule',
    'keyword_weight',
    'load_oracle_script',
    'T5Backend',
    'BackendManager',
]
