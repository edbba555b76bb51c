"""Run directory layout and the pipeline manifest."""

from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from ..constants import CHECKPOINTS_DIR, EXAMPLES_DIR, MANIFEST_FILE, PREDICTIONS_DIR, REPORTS_DIR
from ..models.run import RunManifest
from ..utils.errors import ConfigurationError
from ..utils.io import read_json, write_json
from ..utils.logging import get_logger

logger = get_logger(__name__)

SPLITS_DIR = "splits"
CONFIG_FILE = "config.yaml"
ERROR_FILE = "error.json"


class RunDirectory:
    """
    A single-writer run directory.

    Layout: ``manifest.json``, ``config.yaml``, ``splits/``, ``examples/``,
    ``checkpoints/``, ``predictions/`` and ``reports/``. The manifest records
    completed stages so an interrupted run can resume.
    """

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_FILE

    @property
    def config_path(self) -> Path:
        return self.root / CONFIG_FILE

    @property
    def splits_dir(self) -> Path:
        return self.root / SPLITS_DIR

    @property
    def examples_dir(self) -> Path:
        return self.root / EXAMPLES_DIR

    @property
    def checkpoints_dir(self) -> Path:
        return self.root / CHECKPOINTS_DIR

    @property
    def predictions_dir(self) -> Path:
        return self.root / PREDICTIONS_DIR

    @property
    def reports_dir(self) -> Path:
        return self.root / REPORTS_DIR

    def checkpoint(self, model: str) -> Path:
        return self.checkpoints_dir / model

    def report(self, name: str) -> Path:
        return self.reports_dir / name

    def ensure(self) -> 'RunDirectory':
        for path in (self.root, self.examples_dir, self.checkpoints_dir,
                     self.predictions_dir, self.reports_dir):
            path.mkdir(parents=True, exist_ok=True)
        return self

    # ---------- manifest ----------

    def load_manifest(self) -> Dict[str, Any]:
        if not self.manifest_path.exists():
            return {}
        return read_json(self.manifest_path)

    def save_manifest(self, manifest: Dict[str, Any]) -> None:
        write_json(self.manifest_path, manifest)

    def open(self, config_hash: str, seed: int, run_id: Optional[str] = None) -> Dict[str, Any]:
        """
        Create or reopen the manifest for a configuration.

        Raises:
            ConfigurationError: if the directory holds a run of another configuration
        """
        self.ensure()
        manifest = self.load_manifest()
        if manifest:
            if manifest.get('config_hash') != config_hash:
                raise ConfigurationError(
                    f"{self.root} holds a run with config {manifest.get('config_hash')}, "
                    f"not {config_hash}; use a fresh run directory"
                )
            logger.info(f"Resuming run {manifest['run_id']} ({', '.join(manifest['completed']) or 'no stages done'})")
            return manifest
        manifest = {
            'run_id': run_id or f"run-{config_hash[:8]}",
            'config_hash': config_hash,
            'seed': seed,
            'created_at': datetime.now(timezone.utc).isoformat(timespec='seconds'),
            'completed': [],
            'stages': {},
            'regimes': {},
        }
        self.save_manifest(manifest)
        return manifest

    def is_done(self, stage: str) -> bool:
        return stage in self.load_manifest().get('completed', [])

    def mark_done(self, stage: str, info: Optional[Dict[str, Any]] = None) -> None:
        manifest = self.load_manifest()
        if stage not in manifest.setdefault('completed', []):
            manifest['completed'].append(stage)
        manifest.setdefault('stages', {})[stage] = info or {}
        self.save_manifest(manifest)

    def record_regime(self, run_manifest: RunManifest) -> None:
        manifest = self.load_manifest()
        manifest.setdefault('regimes', {})[run_manifest.regime] = run_manifest.to_dict()
        self.save_manifest(manifest)

    def regime_manifests(self) -> Dict[str, RunManifest]:
        return {name: RunManifest.from_dict(data)
                for name, data in self.load_manifest().get('regimes', {}).items()}

    def trained_models(self) -> List[str]:
        """Regimes with a checkpoint, in manifest order."""
        return [name for name in self.load_manifest().get('regimes', {})
                if (self.checkpoint(name) / "backend.json").exists()]

    def write_error(self, record: Dict[str, Any]) -> Path:
        path = self.report(ERROR_FILE)
        write_json(path, record)
        return path
