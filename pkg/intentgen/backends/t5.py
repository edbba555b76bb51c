#!/usr/bin/env python3
"""Trainable encoder-decoder backend (T5 family via transformers).

torch and transformers are imported lazily so the rest of the package
works without the ``model`` extra installed.
"""

import copy
import random
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from ..constants import TaskName
from ..models.prediction import GenerationResult
from ..models.run import TrainingLog
from ..models.task import LabelSpace, TaskExample
from ..utils.errors import ConfigurationError, GenerationError, TrainingError
from ..utils.io import read_json, write_json
from ..utils.logging import get_logger
from .base import BackendConfig, Seq2SeqBackend, run_epochs

logger = get_logger(__name__)

MODEL_SIZES = {
    "tiny": "t5-small",
    "full": "t5-base",
}
MAX_GENERATION_RETRIES = 3


def _require_torch():
    try:
        import torch
        import transformers
    except ImportError as e:
        raise ConfigurationError(
            "the tiny/full backends need the 'model' extra (pip install intentgen[model])"
        ) from e
    return torch, transformers


def build_optimizer(parameters: Iterable[Any], config: BackendConfig) -> Any:
    """Adam with the configured betas and epsilon and no weight decay."""
    torch, _ = _require_torch()
    return torch.optim.Adam(
        parameters,
        lr=config.learning_rate,
        betas=tuple(config.adam_betas),
        eps=config.adam_epsilon,
        weight_decay=0.0,
    )


class T5Backend(Seq2SeqBackend):
    """Fine-tunable T5 model; ``tiny`` is t5-small, ``full`` is t5-base."""

    name = "t5"
    serialized = True

    def __init__(self, config: Optional[BackendConfig] = None):
        super().__init__(config)
        self.model = None
        self.tokenizer = None
        self.device = None

    # ---------- setup ----------

    def _ensure_model(self, source: Optional[str] = None) -> None:
        if self.model is not None and source is None:
            return
        torch, transformers = _require_torch()
        name = source or self.config.model_name or MODEL_SIZES.get(self.config.kind)
        if name is None:
            raise ConfigurationError(f"no model name for backend kind '{self.config.kind}'")
        self.device = torch.device(
            self.config.device or ("cuda" if torch.cuda.is_available() else "cpu")
        )
        self.tokenizer = transformers.AutoTokenizer.from_pretrained(name)
        self.model = transformers.T5ForConditionalGeneration.from_pretrained(name).to(self.device)
        logger.info(f"Loaded {name} on {self.device}")

    def _encode(self, texts: Sequence[str], max_length: int):
        return self.tokenizer(
            list(texts),
            max_length=max_length,
            truncation=True,
            padding=True,
            return_tensors="pt",
        ).to(self.device)

    def _target_ids(self, texts: Sequence[str], max_length: int):
        labels = self._encode(texts, max_length).input_ids
        labels[labels == self.tokenizer.pad_token_id] = -100
        return labels

    # ---------- training ----------

    def _batches(self, examples: List[TaskExample], batch_size: int,
                 rng: random.Random) -> List[List[TaskExample]]:
        order = examples[:]
        rng.shuffle(order)
        return [order[i:i + batch_size] for i in range(0, len(order), batch_size)]

    def _fine_tune(self, examples: List[TaskExample], config: BackendConfig,
                   dev_examples: List[TaskExample]) -> TrainingLog:
        torch, transformers = _require_torch()
        self._ensure_model()
        transformers.set_seed(config.seed)
        optimizer = build_optimizer(self.model.parameters(), config)
        rng = random.Random(config.seed)
        best_state: Dict[str, Any] = {}

        def train_epoch(epoch: int) -> float:
            self.model.train()
            losses = []
            for batch in self._batches(examples, config.batch_size, rng):
                enc = self._encode([e.input_text for e in batch], config.max_sequence_length)
                labels = self._target_ids([e.target_text for e in batch], config.max_sequence_length)
                loss = self.model(**enc, labels=labels).loss
                if not torch.isfinite(loss):
                    raise TrainingError(f"non-finite loss {loss.item()}", epoch=epoch)
                loss.backward()
                optimizer.step()
                optimizer.zero_grad()
                losses.append(loss.item())
            return sum(losses) / len(losses)

        def evaluate(epoch: int) -> Tuple[Optional[float], Optional[float]]:
            if not dev_examples:
                return None, None
            return self._dev_loss(dev_examples, config), self._dev_accuracy(dev_examples)

        def remember(epoch: int) -> None:
            best_state['weights'] = copy.deepcopy(
                {k: v.detach().cpu() for k, v in self.model.state_dict().items()}
            )

        log = run_epochs(train_epoch, evaluate if dev_examples else None,
                         config.epochs, config.early_stopping_patience, remember)
        if 'weights' in best_state:
            self.model.load_state_dict(best_state['weights'])
        self.model.eval()
        return log

    def _dev_loss(self, dev_examples: List[TaskExample], config: BackendConfig) -> float:
        torch, _ = _require_torch()
        self.model.eval()
        losses = []
        with torch.no_grad():
            for i in range(0, len(dev_examples), config.batch_size):
                batch = dev_examples[i:i + config.batch_size]
                enc = self._encode([e.input_text for e in batch], config.max_sequence_length)
                labels = self._target_ids([e.target_text for e in batch], config.max_sequence_length)
                losses.append(self.model(**enc, labels=labels).loss.item())
        return sum(losses) / len(losses)

    def _dev_accuracy(self, dev_examples: List[TaskExample]) -> Optional[float]:
        intent_examples = [e for e in dev_examples if e.task is TaskName.INTENT]
        if not intent_examples:
            return None
        labels = LabelSpace(sorted({e.target_text for e in intent_examples}))
        correct = 0
        for example in intent_examples:
            scores = self._forced_decode(example.input_text, labels.targets)
            best = max(range(len(scores)), key=lambda i: (scores[i], -i))
            correct += labels.labels[best] == example.target_text
        return correct / len(intent_examples)

    # ---------- inference ----------

    def _label_log_likelihoods(self, prompt: str, labels: LabelSpace) -> List[float]:
        return self._forced_decode(prompt, labels.targets)

    def _forced_decode(self, prompt: str, targets: List[str]) -> List[float]:
        """Mean token log-probability of each target given the prompt."""
        torch, _ = _require_torch()
        self.model.eval()
        with torch.no_grad():
            enc = self._encode([prompt] * len(targets), self.config.max_sequence_length)
            label_ids = self._target_ids(targets, self.config.max_sequence_length)
            logits = self.model(**enc, labels=label_ids).logits
            log_probs = torch.log_softmax(logits, dim=-1)
            mask = label_ids != -100
            gathered = log_probs.gather(2, label_ids.clamp(min=0).unsqueeze(-1)).squeeze(-1)
            totals = (gathered * mask).sum(dim=1) / mask.sum(dim=1)
        return [float(v) for v in totals.tolist()]

    def _generate(self, prompt: str, n: int, config: BackendConfig, seed: int) -> GenerationResult:
        torch, transformers = _require_torch()
        self.model.eval()
        enc = self._encode([prompt], config.max_sequence_length)
        sampling = n > 1 or not prompt.split(":", 1)[-1].strip()
        for attempt in range(MAX_GENERATION_RETRIES):
            transformers.set_seed(seed + attempt)
            kwargs: Dict[str, Any] = dict(
                max_new_tokens=config.max_new_tokens,
                num_return_sequences=n,
                output_scores=True,
                return_dict_in_generate=True,
            )
            if sampling:
                kwargs.update(do_sample=True, top_p=config.top_p, temperature=config.temperature)
                if config.top_k is not None:
                    kwargs['top_k'] = config.top_k
            else:
                kwargs.update(do_sample=False, num_beams=1)
            with torch.no_grad():
                output = self.model.generate(**enc, **kwargs)
            texts = [t.strip() for t in self.tokenizer.batch_decode(output.sequences, skip_special_tokens=True)]
            if all(texts):
                transitions = self.model.compute_transition_scores(
                    output.sequences, output.scores, normalize_logits=True
                )
                scores = []
                for row in transitions:
                    finite = row[torch.isfinite(row)]
                    scores.append(float(finite.mean()) if len(finite) else 0.0)
                return GenerationResult(texts=texts, scores=scores)
            sampling = True
        raise GenerationError(f"empty generation for prompt '{prompt[:60]}'")

    # ---------- persistence ----------

    def save(self, path: Union[str, Path]) -> Path:
        self._require_ready("save")
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        self.model.save_pretrained(path / "model")
        self.tokenizer.save_pretrained(path / "model")
        write_json(path / "backend.json", {
            'name': self.name,
            'config': self.config.model_dump(mode='json'),
            'trained': True,
            'history': self.history,
        })
        return path

    def load(self, path: Union[str, Path]) -> 'T5Backend':
        path = Path(path)
        meta = read_json(path / "backend.json")
        self.config = BackendConfig(**meta['config'])
        self._ensure_model(str(path / "model"))
        self.history = list(meta.get('history', []))
        self._trained = True
        return self
