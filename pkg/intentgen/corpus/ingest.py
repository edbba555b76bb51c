#!/usr/bin/env python3
"""Dataset ingestion into canonical dialogues.

Readers for the Schema-Guided Dialogue release, MultiWOZ (2.2 frame layout
and the 2.1 ``data.json`` layout) and the canonical JSONL format. Every
reader funnels through ``canonicalize_turns``, which merges consecutive
same-speaker turns so that the result strictly alternates.
"""

from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from ..constants import DialogueSource, InputFormat, Speaker
from ..models.dialogue import Dialogue, Turn, normalize_whitespace
from ..utils.errors import ParseError, UsageError, ValidationError
from ..utils.io import iter_jsonl, read_json, write_jsonl
from ..utils.logging import get_logger

logger = get_logger(__name__)

LABEL_FIELDS = ("intent", "domain")
_NO_INTENT = {"", "NONE", "none", None}


def canonicalize_turns(raw_turns: Iterable[Turn]) -> Tuple[Turn, ...]:
    """
    Merge consecutive same-speaker turns and re-index.

    Merged text is joined with a single space; slot sets are unioned in order;
    the first non-null intent wins.

    Args:
        raw_turns: Turns in conversation order

    Returns:
        Alternating tuple of turns indexed from 0
    """
    merged: List[Turn] = []
    for turn in raw_turns:
        if merged and merged[-1].speaker is turn.speaker:
            prev = merged[-1]
            slots: Optional[Tuple[str, ...]] = prev.slots
            if turn.slots is not None:
                slots = tuple(dict.fromkeys((prev.slots or ()) + turn.slots))
            merged[-1] = replace(
                prev,
                text=f"{prev.text} {turn.text}",
                slots=slots,
                intent=prev.intent if prev.intent is not None else turn.intent,
            )
        else:
            merged.append(turn)
    return tuple(replace(t, index=i) for i, t in enumerate(merged))


def _make_turn(index: int, speaker: Speaker, text: Any, slots: Optional[List[str]],
               intent: Optional[str]) -> Optional[Turn]:
    """Build a Turn, returning None for empty utterances."""
    if not isinstance(text, str) or not normalize_whitespace(text):
        return None
    if slots is not None:
        slots = list(dict.fromkeys(s for s in slots if s))
    return Turn(
        index=index,
        speaker=speaker,
        text=text,
        slots=tuple(slots) if slots is not None else None,
        intent=intent if speaker is Speaker.USER else None,
    )


# ---------- Schema-guided (SGD and MultiWOZ 2.2) ----------

def _frame_slots(frame: Dict[str, Any]) -> List[str]:
    names = [s.get('slot') for s in frame.get('slots', []) if isinstance(s, dict)]
    names += [a.get('slot') for a in frame.get('actions', []) if isinstance(a, dict)]
    return [n for n in names if n]


def _frame_label(frame: Dict[str, Any], label_field: str) -> Optional[str]:
    state = frame.get('state') or {}
    active = state.get('active_intent')
    if active in _NO_INTENT:
        return None
    if label_field == 'domain':
        service = frame.get('service') or ''
        return service.split('_')[0].lower() or None
    return active


def _parse_schema_guided_dialogue(record: Dict[str, Any], source: DialogueSource,
                                  label_field: str) -> Dialogue:
    turns: List[Turn] = []
    for i, raw in enumerate(record['turns']):
        speaker = Speaker.USER if str(raw['speaker']).upper() == 'USER' else Speaker.BOT
        frames = raw.get('frames') or []
        slots: List[str] = []
        label: Optional[str] = None
        for frame in frames:
            slots.extend(_frame_slots(frame))
            if label is None and speaker is Speaker.USER:
                label = _frame_label(frame, label_field)
        turn = _make_turn(i, speaker, raw.get('utterance'), slots, label)
        if turn is not None:
            turns.append(turn)

    services = record.get('services') or []
    domain = services[0] if services else ''
    return Dialogue(
        id=str(record['dialogue_id']),
        domain=domain,
        turns=canonicalize_turns(turns),
        source=source,
    )


def _schema_guided_files(path: Path) -> List[Path]:
    if path.is_file():
        return [path]
    files = sorted(
        p for p in path.rglob('*.json')
        if p.name.startswith('dialogue') and p.name != 'schema.json'
    )
    return files


def _read_schema_guided(path: Path, source: DialogueSource, label_field: str) -> List[Dialogue]:
    dialogues: List[Dialogue] = []
    for file_path in _schema_guided_files(path):
        data = read_json(file_path)
        if not isinstance(data, list):
            raise ParseError(str(file_path), "root", "expected a list of dialogues")
        for position, record in enumerate(data):
            try:
                dialogues.append(_parse_schema_guided_dialogue(record, source, label_field))
            except (KeyError, TypeError, AttributeError) as e:
                raise ParseError(str(file_path), f"record {position}", f"missing field {e}") from e
    return dialogues


# ---------- MultiWOZ 2.1 data.json ----------

def _dialog_act_domain(entry: Dict[str, Any]) -> Optional[str]:
    acts = entry.get('dialog_act') or {}
    for act in acts:
        domain = act.split('-')[0].lower()
        if domain not in ('general', 'booking'):
            return domain
    return None


def _parse_multiwoz21_dialogue(dialogue_id: str, record: Dict[str, Any]) -> Dialogue:
    turns: List[Turn] = []
    domains: List[str] = []
    for i, entry in enumerate(record['log']):
        speaker = Speaker.USER if i % 2 == 0 else Speaker.BOT
        label = _dialog_act_domain(entry) if speaker is Speaker.USER else None
        slots = None
        acts = entry.get('dialog_act')
        if isinstance(acts, dict):
            slots = [pair[0] for values in acts.values() for pair in values if pair and pair[0] != 'none']
        turn = _make_turn(i, speaker, entry.get('text'), slots, label)
        if turn is not None:
            turns.append(turn)
        if label and label not in domains:
            domains.append(label)
    name = dialogue_id[:-5] if dialogue_id.endswith('.json') else dialogue_id
    return Dialogue(
        id=name,
        domain=domains[0] if domains else '',
        turns=canonicalize_turns(turns),
        source=DialogueSource.MULTIWOZ,
    )


def _read_multiwoz(path: Path, label_field: str) -> List[Dialogue]:
    if path.is_file() and path.name == 'data.json':
        if label_field != 'domain':
            logger.warning("MultiWOZ 2.1 data.json carries domain labels only; using label_field=domain")
        data = read_json(path)
        if not isinstance(data, dict):
            raise ParseError(str(path), "root", "expected an object keyed by dialogue id")
        dialogues = []
        for dialogue_id in sorted(data):
            try:
                dialogues.append(_parse_multiwoz21_dialogue(dialogue_id, data[dialogue_id]))
            except (KeyError, TypeError, AttributeError) as e:
                raise ParseError(str(path), f"record {dialogue_id}", f"missing field {e}") from e
        return dialogues
    return _read_schema_guided(path, DialogueSource.MULTIWOZ, label_field)


# ---------- Canonical JSONL ----------

def _read_canonical(path: Path) -> List[Dialogue]:
    dialogues: List[Dialogue] = []
    for position, record in enumerate(iter_jsonl(path), start=1):
        try:
            dialogue = Dialogue.from_dict(record)
        except (KeyError, TypeError, ValueError, ValidationError) as e:
            raise ParseError(str(path), f"record {position}", str(e)) from e
        dialogues.append(replace(dialogue, turns=canonicalize_turns(dialogue.turns)))
    return dialogues


def ingest(path: Union[str, Path], format: Union[str, InputFormat],
           label_field: str = "intent") -> List[Dialogue]:
    """
    Ingest a dataset into canonical dialogues.

    Args:
        path: Dataset file or release directory
        format: One of multiwoz, sgd, canonical
        label_field: "intent" (active intent) or "domain" (service/domain label)

    Returns:
        Canonicalized dialogues with intents on user turns

    Raises:
        UsageError: unknown format, unknown label field or missing path
        ParseError: malformed file (names the file and line/record)
    """
    try:
        fmt = InputFormat(format) if not isinstance(format, InputFormat) else format
    except ValueError:
        raise UsageError(f"unknown format '{format}'; expected one of "
                         f"{', '.join(f.value for f in InputFormat)}") from None
    if label_field not in LABEL_FIELDS:
        raise UsageError(f"unknown label field '{label_field}'")

    path = Path(path)
    if not path.exists():
        raise UsageError(f"{path} does not exist")

    if fmt is InputFormat.CANONICAL:
        dialogues = _read_canonical(path)
    elif fmt is InputFormat.SGD:
        dialogues = _read_schema_guided(path, DialogueSource.SGD, label_field)
    else:
        dialogues = _read_multiwoz(path, label_field)

    seen = set()
    for dialogue in dialogues:
        if dialogue.id in seen:
            raise ParseError(str(path), f"dialogue {dialogue.id}", "duplicate dialogue id")
        seen.add(dialogue.id)

    logger.info(f"Ingested {len(dialogues)} dialogues from {path} ({fmt.value})")
    return dialogues


def serialize_dialogues(dialogues: Iterable[Dialogue], path: Union[str, Path]) -> int:
    """
    Write dialogues in the canonical line-delimited format.

    Args:
        dialogues: Dialogues to write
        path: Output JSONL file

    Returns:
        Number of dialogues written
    """
    return write_jsonl(path, (d.to_dict() for d in dialogues))
