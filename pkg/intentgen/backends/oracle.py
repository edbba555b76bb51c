#!/usr/bin/env python3
"""Deterministic scripted backend.

Answers come from, in order: test hooks (``generate_fn``/``score_fn``),
scripted rules (regex pattern, response, score) and finally what it
memorized during ``fine_tune``. Generation retrieves the third utterance
of the nearest memorized prompt by TF-IDF cosine similarity; label scoring
weighs the verbalized label's words found in the prompt.
"""

import math
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.metrics.pairwise import linear_kernel

from ..constants import TASK_PREFIXES, TaskName
from ..models.prediction import GenerationResult
from ..models.run import EpochRecord, TrainingLog
from ..models.task import LabelSpace, TaskExample
from ..utils.errors import ParseError
from ..utils.io import iter_jsonl, read_json, read_jsonl, write_json, write_jsonl
from ..utils.logging import get_logger
from ..utils.seeding import stable_hash
from .base import BackendConfig, Seq2SeqBackend

logger = get_logger(__name__)

_WORD_RE = re.compile(r"[a-z0-9]+")
FULL_MATCH_BONUS = 8.0

GenerateFn = Callable[[str, int, int], List[str]]
ScoreFn = Callable[[str, LabelSpace], Sequence[float]]


@dataclass(frozen=True)
class OracleRule:
    """A scripted response for prompts matching ``pattern``."""

    pattern: str
    response: str
    score: float = 1.0

    def matches(self, prompt: str) -> bool:
        return re.search(self.pattern, prompt) is not None

    def to_dict(self) -> Dict[str, object]:
        return {'pattern': self.pattern, 'response': self.response, 'score': self.score}


def load_oracle_script(path: Union[str, Path]) -> List[OracleRule]:
    """Read scripted rules from a JSONL file of {pattern, response, score} records."""
    rules = []
    for line_no, record in enumerate(iter_jsonl(path), start=1):
        try:
            rule = OracleRule(str(record['pattern']), str(record['response']),
                              float(record.get('score', 1.0)))
            re.compile(rule.pattern)
        except (KeyError, ValueError, re.error) as e:
            raise ParseError(str(path), f"record {line_no}", str(e)) from e
        rules.append(rule)
    return rules


def _words(text: str) -> set:
    return set(_WORD_RE.findall(text.lower()))


def keyword_weight(prompt_words: set, verbalized: str) -> float:
    """1 + label words present + a bonus when all of them are present."""
    label_words = _words(verbalized)
    present = len(label_words & prompt_words)
    full = FULL_MATCH_BONUS if label_words and present == len(label_words) else 0.0
    return 1.0 + present + full


class OracleBackend(Seq2SeqBackend):
    """Scripted, bit-deterministic backend for tests and smoke runs."""

    name = "oracle"

    def __init__(self, config: Optional[BackendConfig] = None,
                 rules: Optional[Sequence[OracleRule]] = None,
                 generate_fn: Optional[GenerateFn] = None,
                 score_fn: Optional[ScoreFn] = None):
        super().__init__(config)
        if rules is None and self.config.script:
            rules = load_oracle_script(self.config.script)
        self.rules: List[OracleRule] = list(rules or [])
        self.generate_fn = generate_fn
        self.score_fn = score_fn
        self._memory: List[Dict[str, str]] = []
        self._vectorizer: Optional[TfidfVectorizer] = None
        self._matrix = None

    @property
    def ready(self) -> bool:
        return (self._trained or bool(self.rules)
                or self.generate_fn is not None or self.score_fn is not None)

    # ---------- training ----------

    def _fine_tune(self, examples: List[TaskExample], config: BackendConfig,
                   dev_examples: List[TaskExample]) -> TrainingLog:
        added = 0
        known = {(m['input'], m['target']) for m in self._memory}
        for example in examples:
            if example.task is not TaskName.GEN3:
                continue
            body = self._body(example.input_text)
            if not body or (body, example.target_text) in known:
                continue
            self._memory.append({'input': body, 'target': example.target_text})
            known.add((body, example.target_text))
            added += 1
        self._reindex()
        logger.info(f"Oracle memorized {added} generation examples ({len(self._memory)} total)")
        return TrainingLog(epochs=[EpochRecord(epoch=1, train_loss=0.0)], best_epoch=1)

    def _reindex(self) -> None:
        if not self._memory:
            self._vectorizer, self._matrix = None, None
            return
        self._vectorizer = TfidfVectorizer(lowercase=True, token_pattern=r"[A-Za-z0-9]+")
        self._matrix = self._vectorizer.fit_transform([m['input'] for m in self._memory])

    @staticmethod
    def _body(prompt: str) -> str:
        for prefix in TASK_PREFIXES.values():
            if prompt.startswith(prefix):
                return prompt[len(prefix):].strip()
        return prompt.strip()

    # ---------- generation ----------

    def _generate(self, prompt: str, n: int, config: BackendConfig, seed: int) -> GenerationResult:
        if self.generate_fn is not None:
            texts = list(self.generate_fn(prompt, n, seed))
            return GenerationResult(texts=texts, scores=[0.0] * len(texts))

        for rule in self.rules:
            if rule.matches(prompt):
                return GenerationResult(texts=[rule.response] * n,
                                        scores=[math.log(max(rule.score, 1e-12))] * n)

        if not self._memory:
            # Scripted but nothing applies: echo the prompt body
            body = self._body(prompt) or "ok"
            return GenerationResult(texts=[body] * n, scores=[0.0] * n)

        body = self._body(prompt)
        if not body:
            rng = random.Random(stable_hash(f"{seed}:{prompt}"))
            picks = [rng.randrange(len(self._memory)) for _ in range(n)]
            return GenerationResult(texts=[self._memory[i]['target'] for i in picks],
                                    scores=[math.log(1.0 / len(self._memory))] * n)

        similarities = linear_kernel(self._vectorizer.transform([body]), self._matrix).ravel()
        ranked = sorted(
            range(len(self._memory)),
            key=lambda i: (-round(float(similarities[i]), 9), stable_hash(f"{seed}:{body}:{i}")),
        )
        picks = [ranked[j % len(ranked)] for j in range(n)]
        return GenerationResult(
            texts=[self._memory[i]['target'] for i in picks],
            scores=[math.log(max(float(similarities[i]), 1e-9)) for i in picks],
        )

    # ---------- scoring ----------

    def _label_log_likelihoods(self, prompt: str, labels: LabelSpace) -> List[float]:
        if self.score_fn is not None:
            weights = [float(w) for w in self.score_fn(prompt, labels)]
            return [math.log(max(w, 1e-12)) for w in weights]

        scripted: Dict[str, float] = {}
        for rule in self.rules:
            if rule.matches(prompt):
                label = labels.decode(rule.response)
                if label is not None:
                    scripted[label] = scripted.get(label, 0.0) + rule.score
        if scripted:
            return [math.log(scripted.get(label, 1e-6)) for label in labels]

        words = _words(self._body(prompt))
        return [math.log(keyword_weight(words, labels.encode(label))) for label in labels]

    # ---------- persistence ----------

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        write_jsonl(path / "memory.jsonl", self._memory)
        write_jsonl(path / "rules.jsonl", (r.to_dict() for r in self.rules))
        write_json(path / "backend.json", {
            'name': self.name,
            'config': self.config.model_dump(mode='json'),
            'trained': self._trained,
            'history': self.history,
        })
        return path

    def load(self, path: Union[str, Path]) -> 'OracleBackend':
        path = Path(path)
        meta = read_json(path / "backend.json")
        self.config = BackendConfig(**meta['config'])
        self._memory = read_jsonl(path / "memory.jsonl")
        self.rules = [OracleRule(r['pattern'], r['response'], float(r['score']))
                      for r in read_jsonl(path / "rules.jsonl")]
        self._trained = bool(meta.get('trained'))
        self.history = list(meta.get('history', []))
        self._reindex()
        return self
