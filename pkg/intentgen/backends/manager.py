"""Backend construction and checkpoint loading."""

from pathlib import Path
from typing import Dict, Optional, Type, Union

from ..utils.errors import ConfigurationError
from ..utils.io import read_json
from ..utils.logging import get_logger
from .base import BackendConfig, Seq2SeqBackend
from .oracle import OracleBackend
from .t5 import T5Backend

logger = get_logger(__name__)


class BackendManager:
    """Maps backend keys (oracle | tiny | full) to implementations."""

    REGISTRY: Dict[str, Type[Seq2SeqBackend]] = {
        'oracle': OracleBackend,
        'tiny': T5Backend,
        'full': T5Backend,
    }
    BY_NAME: Dict[str, Type[Seq2SeqBackend]] = {
        OracleBackend.name: OracleBackend,
        T5Backend.name: T5Backend,
    }

    @staticmethod
    def create(config: Optional[BackendConfig] = None) -> Seq2SeqBackend:
        """
        Instantiate an untrained backend.

        Args:
            config: Backend configuration (``kind`` selects the class)

        Returns:
            Backend instance
        """
        config = config or BackendConfig()
        backend_cls = BackendManager.REGISTRY.get(config.kind)
        if backend_cls is None:
            raise ConfigurationError(f"unknown backend '{config.kind}'")
        return backend_cls(config)

    @staticmethod
    def load(path: Union[str, Path]) -> Seq2SeqBackend:
        """Restore a backend from a checkpoint directory written by ``save``."""
        path = Path(path)
        meta_path = path / "backend.json"
        if not meta_path.exists():
            raise ConfigurationError(f"{path} is not a backend checkpoint")
        meta = read_json(meta_path)
        backend_cls = BackendManager.BY_NAME.get(meta.get('name'))
        if backend_cls is None:
            raise ConfigurationError(f"unknown backend '{meta.get('name')}' in {meta_path}")
        backend = backend_cls(BackendConfig(**meta['config']))
        logger.info(f"Loading {backend.name} backend from {path}")
        return backend.load(path)
