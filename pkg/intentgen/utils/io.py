"""Line-delimited record IO and fingerprints."""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Union

from .errors import ParseError

PathLike = Union[str, Path]


def write_jsonl(path: PathLike, records: Iterable[Dict[str, Any]]) -> int:
    """
    Write records as one JSON object per line.

    Args:
        path: Output file (parent directories are created)
        records: Iterable of JSON-serialisable dicts

    Returns:
        Number of records written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, 'w', encoding='utf-8') as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            f.write('\n')
            count += 1
    return count


def iter_jsonl(path: PathLike) -> Iterator[Dict[str, Any]]:
    """Yield records from a JSONL file, raising ParseError with the line number."""
    path = Path(path)
    with open(path, 'r', encoding='utf-8') as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(str(path), f"line {line_no}", e.msg) from e
            if not isinstance(record, dict):
                raise ParseError(str(path), f"line {line_no}", "record is not an object")
            yield record


def read_jsonl(path: PathLike) -> List[Dict[str, Any]]:
    """Read all records of a JSONL file."""
    return list(iter_jsonl(path))


def write_json(path: PathLike, data: Any) -> None:
    """Write a single JSON document (sorted keys, stable output)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, ensure_ascii=False, sort_keys=True, indent=2)
        f.write('\n')


def read_json(path: PathLike) -> Any:
    """Read a JSON document, raising ParseError on malformed input."""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(str(path), f"line {e.lineno}", e.msg) from e


def fingerprint(items: Iterable[str]) -> str:
    """SHA-256 over the sorted items; order-independent content fingerprint."""
    digest = hashlib.sha256()
    for item in sorted(items):
        digest.update(item.encode('utf-8'))
        digest.update(b'\n')
    return digest.hexdigest()


def config_hash(data: Dict[str, Any]) -> str:
    """Short stable hash of a configuration mapping."""
    payload = json.dumps(data, sort_keys=True, default=str).encode('utf-8')
    return hashlib.sha256(payload).hexdigest()[:16]
