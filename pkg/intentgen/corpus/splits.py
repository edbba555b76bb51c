"""Dialogue-disjoint corpus splits and their on-disk layout."""

import random
from collections import OrderedDict
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

from ..constants import SPLITS_META_FILE, SplitName
from ..models.dialogue import CorpusSplits, IntentWindow
from ..utils.errors import ConfigurationError, SizingError, UsageError
from ..utils.io import fingerprint, iter_jsonl, read_json, write_json, write_jsonl
from ..utils.logging import get_logger

logger = get_logger(__name__)

# Labeled splits are filled first so unlabeled leftovers can still go to the unsupervised pool
FILL_ORDER = (SplitName.SUPERVISED, SplitName.DEV, SplitName.TEST, SplitName.UNSUPERVISED)
SIZE_ORDER = (SplitName.UNSUPERVISED, SplitName.SUPERVISED, SplitName.DEV, SplitName.TEST)

SizesLike = Union[Mapping[Any, int], Sequence[int]]


def parse_sizes(sizes: SizesLike) -> Dict[SplitName, int]:
    """
    Normalize split sizes.

    Args:
        sizes: Either a mapping of split name to count or a 4-sequence
            ordered unsupervised, supervised, dev, test (also "U,S,DEV,TEST")

    Returns:
        Mapping from SplitName to requested count
    """
    if isinstance(sizes, str):
        try:
            sizes = [int(part) for part in sizes.split(',')]
        except ValueError:
            raise UsageError(f"invalid sizes '{sizes}'; expected U,S,DEV,TEST") from None
    if isinstance(sizes, Mapping):
        result = {SplitName(k) if not isinstance(k, SplitName) else k: int(v) for k, v in sizes.items()}
    else:
        sizes = list(sizes)
        if len(sizes) != len(SIZE_ORDER):
            raise UsageError(f"expected {len(SIZE_ORDER)} sizes (U,S,DEV,TEST), got {len(sizes)}")
        result = dict(zip(SIZE_ORDER, (int(s) for s in sizes)))
    if any(v < 0 for v in result.values()):
        raise UsageError("split sizes must be non-negative")
    return {split: result.get(split, 0) for split in SIZE_ORDER}


def _eligible(window: IntentWindow, split: SplitName) -> bool:
    return split is SplitName.UNSUPERVISED or window.intent is not None


def make_splits(windows: Iterable[IntentWindow], sizes: SizesLike, seed: int,
                name: str = "corpus", intents: Optional[Iterable[str]] = None) -> CorpusSplits:
    """
    Partition windows into dialogue-disjoint splits of exact sizes.

    Dialogues are shuffled under ``seed``. One dialogue per intent is reserved
    for the supervised split first (when it fits), then the supervised, dev,
    test and unsupervised splits are filled in that order, preferring whole
    dialogues that fit the remaining capacity. A dialogue is truncated only
    when nothing else fits; its leftover windows are discarded.

    Args:
        windows: Extracted windows
        sizes: Requested counts (see ``parse_sizes``)
        seed: Shuffle seed
        name: Dataset name
        intents: Label set (defaults to the labels present in ``windows``)

    Returns:
        CorpusSplits with labels erased on the unsupervised split

    Raises:
        SizingError: if the pool cannot satisfy the request
    """
    requested = parse_sizes(sizes)
    pool = list(windows)
    labels = sorted(set(intents) if intents is not None else {w.intent for w in pool if w.intent})

    total = sum(requested.values())
    if total > len(pool):
        raise SizingError("windows", len(pool), total)
    labeled_requested = total - requested[SplitName.UNSUPERVISED]
    labeled_available = sum(1 for w in pool if w.intent is not None)
    if labeled_requested > labeled_available:
        raise SizingError("labeled windows", labeled_available, labeled_requested)

    groups: Dict[str, List[IntentWindow]] = OrderedDict()
    for window in sorted(pool, key=lambda w: (w.dialogue_id, w.start)):
        groups.setdefault(window.dialogue_id, []).append(window)
    order = list(groups)
    random.Random(seed).shuffle(order)

    assigned: Dict[SplitName, List[IntentWindow]] = {split: [] for split in SIZE_ORDER}
    used = set()

    def take(split: SplitName, dialogue_id: str, limit: int) -> None:
        eligible = [w for w in groups[dialogue_id] if _eligible(w, split)]
        assigned[split].extend(eligible[:limit])
        used.add(dialogue_id)

    def remaining(split: SplitName) -> int:
        return requested[split] - len(assigned[split])

    supervised = SplitName.SUPERVISED
    for label in labels:
        if remaining(supervised) <= 0:
            break
        if any(w.intent == label for w in assigned[supervised]):
            continue
        for dialogue_id in order:
            if dialogue_id in used:
                continue
            eligible = [w for w in groups[dialogue_id] if w.intent is not None]
            if any(w.intent == label for w in eligible) and len(eligible) <= remaining(supervised):
                take(supervised, dialogue_id, len(eligible))
                break
        else:
            logger.warning(f"No supervised dialogue fits for intent '{label}'")

    for split in FILL_ORDER:
        if remaining(split) <= 0:
            continue
        candidates = [d for d in order if d not in used]
        if split is not SplitName.UNSUPERVISED:
            # Fully labeled dialogues first; mixed ones lose their unlabeled windows
            candidates.sort(key=lambda d: any(w.intent is None for w in groups[d]))
        for dialogue_id in candidates:
            need = remaining(split)
            if need <= 0:
                break
            count = sum(1 for w in groups[dialogue_id] if _eligible(w, split))
            if 0 < count <= need:
                take(split, dialogue_id, count)
        for dialogue_id in candidates:
            need = remaining(split)
            if need <= 0:
                break
            if dialogue_id in used:
                continue
            if any(_eligible(w, split) for w in groups[dialogue_id]):
                take(split, dialogue_id, need)
        if remaining(split) > 0:
            raise SizingError(f"{split.value} split", len(assigned[split]), requested[split])

    result = {
        split: [
            (w.with_intent(None) if split is SplitName.UNSUPERVISED else w).with_split(split)
            for w in assigned[split]
        ]
        for split in SIZE_ORDER
    }
    splits = CorpusSplits(name=name, intents=labels, windows=result)
    logger.info(f"Split {name}: {splits.counts}")
    return splits


def splits_fingerprint(splits: CorpusSplits) -> str:
    """Content fingerprint: hash of the sorted dialogue ids per split."""
    return fingerprint(
        f"{split.value}:{dialogue_id}"
        for split, windows in splits.windows.items()
        for dialogue_id in sorted({w.dialogue_id for w in windows})
    )


def save_splits(splits: CorpusSplits, out_dir: Union[str, Path],
                extra_meta: Optional[Dict[str, Any]] = None) -> Path:
    """
    Write one JSONL file per split plus the ``splits.meta`` record.

    Args:
        splits: Splits to write
        out_dir: Output directory
        extra_meta: Additional fields for the meta record (e.g. the prep report)

    Returns:
        Path to the meta file
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for split, windows in splits.windows.items():
        write_jsonl(out_dir / f"{split.value}.jsonl", (w.to_dict() for w in windows))
    meta: Dict[str, Any] = {
        'name': splits.name,
        'intents': list(splits.intents),
        'counts': {split.value: len(ws) for split, ws in splits.windows.items()},
        'fingerprint': splits_fingerprint(splits),
    }
    if extra_meta:
        meta.update(extra_meta)
    meta_path = out_dir / SPLITS_META_FILE
    write_json(meta_path, meta)
    return meta_path


def read_splits_meta(splits_dir: Union[str, Path]) -> Dict[str, Any]:
    """Read the ``splits.meta`` record of a splits directory."""
    meta_path = Path(splits_dir) / SPLITS_META_FILE
    if not meta_path.exists():
        raise ConfigurationError(f"{splits_dir} is not a splits directory (missing {SPLITS_META_FILE})")
    return read_json(meta_path)


def load_splits(splits_dir: Union[str, Path]) -> CorpusSplits:
    """
    Load a splits directory written by ``save_splits``.

    Only splits listed in the meta record are loaded, so an absent weak split
    stays absent.
    """
    splits_dir = Path(splits_dir)
    meta = read_splits_meta(splits_dir)
    windows: Dict[SplitName, List[IntentWindow]] = {}
    for split_name in meta.get('counts', {}):
        split = SplitName(split_name)
        path = splits_dir / f"{split.value}.jsonl"
        if not path.exists():
            raise ConfigurationError(f"{path} listed in {SPLITS_META_FILE} but missing")
        windows[split] = [IntentWindow.from_dict(r) for r in iter_jsonl(path)]
    return CorpusSplits(name=meta.get('name', splits_dir.name), intents=list(meta['intents']),
                        windows=windows)
