#!/usr/bin/env python3
"""Pytest configuration and shared fixtures."""

import os
import sys
import tempfile
from pathlib import Path
from typing import Callable, Optional, Sequence

import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

# Loggers are configured on first import; keep the log file out of the working tree
_LOG_DIR = tempfile.mkdtemp(prefix="intentgen-tests-")
os.environ.setdefault('INTENTGEN_LOG_FILE', str(Path(_LOG_DIR) / "intentgen.log"))
os.environ.setdefault('INTENTGEN_LOG_LEVEL', 'ERROR')

from intentgen.constants import DialogueSource, Speaker, SplitName  # noqa: E402
from intentgen.models.dialogue import CorpusSplits, Dialogue, IntentWindow, Turn  # noqa: E402


@pytest.fixture(autouse=True)
def reset_singletons():
    """
    Reset global singleton instances before each test.

    Clears the cached config and logger registry so environment changes made
    by a test are picked up.
    """
    from intentgen.config import reset_config
    from intentgen.utils.logging import reset_logging

    reset_config()
    reset_logging()

    yield

    reset_config()


@pytest.fixture(autouse=True)
def test_env_vars():
    """
    Set safe test environment variables.

    Pipeline overrides are removed so configuration files are read as written.
    """
    original_env = os.environ.copy()

    os.environ['INTENTGEN_LOG_LEVEL'] = 'ERROR'
    os.environ['INTENTGEN_LOG_FILE'] = str(Path(_LOG_DIR) / "intentgen.log")
    for variable in ('INTENTGEN_SEED', 'INTENTGEN_DATA_PATH', 'INTENTGEN_RUN_DIR', 'INTENTGEN_RUNS_DIR'):
        os.environ.pop(variable, None)

    yield

    os.environ.clear()
    os.environ.update(original_env)


def _turns(texts: Sequence[str], intent: Optional[str], offset: int = 0,
           slots: Optional[Sequence[Optional[Sequence[str]]]] = None):
    turns = []
    for i, text in enumerate(texts):
        speaker = Speaker.USER if i % 2 == 0 else Speaker.BOT
        turn_slots = tuple(slots[i]) if slots and slots[i] is not None else None
        turns.append(Turn(
            index=offset + i,
            speaker=speaker,
            text=text,
            slots=turn_slots,
            intent=intent if speaker is Speaker.USER else None,
        ))
    return tuple(turns)


@pytest.fixture
def make_window() -> Callable[..., IntentWindow]:
    """Factory for alternating user-first windows."""

    def factory(dialogue_id: str, intent: Optional[str], texts: Sequence[str],
                split: SplitName = SplitName.SUPERVISED, start: int = 0,
                slots: Optional[Sequence[Optional[Sequence[str]]]] = None) -> IntentWindow:
        return IntentWindow(
            dialogue_id=dialogue_id,
            intent=intent,
            utterances=_turns(texts, intent, start, slots),
            split=split,
            start=start,
        )

    return factory


@pytest.fixture
def make_dialogue() -> Callable[..., Dialogue]:
    """Factory for single-intent alternating dialogues."""

    def factory(dialogue_id: str, intent: Optional[str], texts: Sequence[str],
                escalated: Optional[bool] = None,
                source: DialogueSource = DialogueSource.SYNTHETIC) -> Dialogue:
        return Dialogue(
            id=dialogue_id,
            domain="test",
            turns=_turns(texts, intent),
            source=source,
            escalated=escalated,
        )

    return factory


@pytest.fixture
def labeled_windows(make_window):
    """Twelve labeled windows over three intents, one dialogue each."""
    intents = ["book_hotel", "find_train", "order_taxi"]
    phrases = {
        "book_hotel": ("I need a room for tonight", "Which area?", "Near the centre, a hotel please"),
        "find_train": ("When does the next train leave", "Where to?", "A train to Cambridge please"),
        "order_taxi": ("Can you get me a cab", "Pickup point?", "A taxi from the station please"),
    }
    windows = []
    for i in range(12):
        intent = intents[i % 3]
        windows.append(make_window(f"d{i:02d}", intent, phrases[intent]))
    return windows


@pytest.fixture
def small_splits(make_window):
    """Hand-built splits with every split present except weak."""
    intents = ["book_hotel", "find_train"]
    texts = {
        "book_hotel": ("I want a hotel", "For how many nights?", "Two nights in a hotel"),
        "find_train": ("I want a train", "Going where?", "A train to London"),
    }

    def windows(prefix: str, count: int, split: SplitName, labeled: bool = True):
        result = []
        for i in range(count):
            intent = intents[i % 2]
            result.append(make_window(f"{prefix}{i}", intent if labeled else None, texts[intent], split))
        return result

    return CorpusSplits(
        name="small",
        intents=intents,
        windows={
            SplitName.UNSUPERVISED: windows("u", 8, SplitName.UNSUPERVISED, labeled=False),
            SplitName.SUPERVISED: windows("s", 6, SplitName.SUPERVISED),
            SplitName.DEV: windows("v", 4, SplitName.DEV),
            SplitName.TEST: windows("t", 4, SplitName.TEST),
        },
    )
