"""Root-seed fan-out.

All randomness in a run flows from one root seed. Each stage receives
``derive_seed(root, stage)``: the first 8 hex digits of
``sha256(f"{root}:{stage}")`` read as an integer.
"""

import hashlib


def derive_seed(root: int, stage: str) -> int:
    """
    Derive a stage seed from the root seed.

    Args:
        root: Root seed from the pipeline configuration
        stage: Stage or sub-stage name (e.g. "splits", "tasks.reorder")

    Returns:
        Non-negative 32-bit seed
    """
    digest = hashlib.sha256(f"{root}:{stage}".encode("utf-8")).hexdigest()
    return int(digest[:8], 16)


def stable_hash(text: str) -> int:
    """Process-independent 64-bit hash of a string."""
    return int(hashlib.sha256(text.encode("utf-8")).hexdigest()[:16], 16)
