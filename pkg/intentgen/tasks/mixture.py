"""Seeded multi-task mixture sampling."""

import math
import random
from collections import Counter
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping

from ..constants import TaskName
from ..models.task import MixtureSpec, TaskExample
from ..utils.errors import SizingError
from ..utils.logging import get_logger

logger = get_logger(__name__)

UNSUPERVISED_TASKS = (TaskName.REORDER, TaskName.GEN3)


def reorder_share(budget: int, ratio: float) -> int:
    """floor(ratio * budget), computed exactly on the decimal ratio."""
    return math.floor(Fraction(str(ratio)) * budget)


def build_mixture(spec: MixtureSpec, pools: Mapping[TaskName, List[TaskExample]],
                  seed: int) -> List[TaskExample]:
    """
    Assemble a shuffled multi-task training set.

    The unsupervised budget B is divided into floor(rB) reordering examples
    and B - floor(rB) third-utterance examples, drawn without replacement
    from distinct windows. Other enabled tasks are added whole, or sampled
    down to their entry in ``spec.counts``.

    Args:
        spec: Ratio, enabled tasks and budgets
        pools: Candidate examples per task
        seed: Sampling seed

    Returns:
        Shuffled examples

    Raises:
        SizingError: if a budget exceeds its pool
    """
    rng = random.Random(seed)
    reorder_pool = list(pools.get(TaskName.REORDER, [])) if TaskName.REORDER in spec.tasks else []
    gen3_pool = list(pools.get(TaskName.GEN3, [])) if TaskName.GEN3 in spec.tasks else []

    budget = spec.unsupervised_budget
    if budget is None:
        budget = max(len(gen3_pool), len(reorder_pool))

    if TaskName.REORDER in spec.tasks and TaskName.GEN3 in spec.tasks:
        n_reorder = reorder_share(budget, spec.reorder_ratio)
    elif TaskName.REORDER in spec.tasks:
        n_reorder = budget
    else:
        n_reorder = 0
    n_gen3 = budget - n_reorder if TaskName.GEN3 in spec.tasks else 0

    if n_reorder > len(reorder_pool):
        raise SizingError("reorder pool", len(reorder_pool), n_reorder)
    reorder = rng.sample(reorder_pool, n_reorder)

    used_windows = {e.origin for e in reorder}
    gen3_candidates = [e for e in gen3_pool if e.origin not in used_windows]
    if n_gen3 > len(gen3_candidates):
        raise SizingError("gen3 pool (windows not used for reordering)", len(gen3_candidates), n_gen3)
    gen3 = rng.sample(gen3_candidates, n_gen3)

    mixture: List[TaskExample] = reorder + gen3
    for task in sorted(spec.tasks, key=lambda t: t.value):
        if task in UNSUPERVISED_TASKS:
            continue
        pool = list(pools.get(task, []))
        wanted = spec.counts.get(task.value)
        if wanted is None:
            mixture.extend(pool)
            continue
        if wanted > len(pool):
            raise SizingError(f"{task.value} pool", len(pool), wanted)
        mixture.extend(rng.sample(pool, wanted))

    rng.shuffle(mixture)
    logger.info(f"Built mixture r={spec.reorder_ratio}: {dict(task_counts(mixture))}")
    return mixture


def task_counts(examples: Iterable[TaskExample]) -> Dict[str, int]:
    """Number of examples per task name, sorted by task."""
    counts = Counter(e.task.value for e in examples)
    return dict(sorted(counts.items()))
