"""Dialogue corpus: ingestion, window extraction, splits and the synthetic corpus."""

from .ingest import canonicalize_turns, ingest, serialize_dialogues
from .windows import extract_intent_windows, truncate_windows
from .splits import load_splits, make_splits, parse_sizes, read_splits_meta, save_splits, splits_fingerprint
from .synthetic import synth_edu

__all__ = [
    'canonicalize_turns',
    'ingest',
    'serialize_dialogues',
    'extract_intent_windows',
    'truncate_windows',
    'make_splits',
    'parse_sizes',
    'save_splits',
    'load_splits',
    'read_splits_meta',
    'splits_fingerprint',
    'synth_edu',
]
