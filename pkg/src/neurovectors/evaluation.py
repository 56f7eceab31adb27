"""Accuracy, MAE, RMSE and test-set evaluation."""

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .core import EnergyParams, FallbackPolicy, NeurovectorStore, PredictionOutcome
from .costs import CostCounters, FlopModel, flop_estimate
from .data import Dataset, Target, Task
from .errors import DataError, TaskMismatchError

__all__ = [
    "CostCounters",
    "EvalReport",
    "FlopModel",
    "accuracy",
    "evaluate",
    "flop_estimate",
    "mae",
    "rmse",
]


def accuracy(pairs: Sequence[tuple[Target, Target]]) -> float:
    if not pairs:
        raise ValueError("accuracy of an empty list")
    return sum(p == a for p, a in pairs) / len(pairs)


def mae(pairs: Sequence[tuple[float, float]]) -> float:
    if not pairs:
        raise ValueError("MAE of an empty list")
    return math.fsum(abs(a - p) for p, a in pairs) / len(pairs)


def rmse(pairs: Sequence[tuple[float, float]]) -> float:
    if not pairs:
        raise ValueError("RMSE of an empty list")
    errors = [abs(a - p) for p, a in pairs]
    scale = max(errors)
    if scale == 0:
        return 0.0
    # scaled so tiny errors do not underflow when squared
    return scale * math.sqrt(math.fsum((e / scale) ** 2 for e in errors) / len(errors))


@dataclass
class EvalReport:
    task: Task
    n: int
    d: int
    fallback_count: int
    counters: CostCounters
    accuracy: Optional[float] = None
    mae: Optional[float] = None
    rmse: Optional[float] = None
    outcomes: list[PredictionOutcome] = field(default_factory=list, repr=False, compare=False)

    @property
    def flops(self) -> int:
        return flop_estimate(self.counters, self.d)

    def metrics(self) -> dict[str, object]:
        """Ordered metric mapping; the order is part of the output contract."""
        out: dict[str, object] = {"task": self.task.value, "n": self.n}
        if self.task is Task.CLASSIFICATION:
            out["accuracy"] = self.accuracy
        else:
            out["mae"] = self.mae
            out["rmse"] = self.rmse
        out["fallback_count"] = self.fallback_count
        out.update(self.counters.as_dict())
        out["flop_estimate"] = self.flops
        return out


def _predict_shard(
    store: NeurovectorStore,
    dataset: Dataset,
    indices: range,
    params: EnergyParams,
    fallback: FallbackPolicy,
) -> tuple[list[PredictionOutcome], CostCounters]:
    counters = CostCounters()
    outcomes = []
    for i in indices:
        tokens = store.tokenizer.tokenize(dataset.feature_values(i), dataset.schema, counters, dataset.row_ids[i])
        outcomes.append(store.predict(tokens, params, fallback, counters))
    return outcomes, counters


def evaluate(
    store: NeurovectorStore,
    dataset: Dataset,
    params: EnergyParams = EnergyParams(),
    fallback: FallbackPolicy = FallbackPolicy(),
    workers: int = 1,
) -> EvalReport:
    """Predict every row of ``dataset`` and score against its targets.

    With ``workers > 1`` the rows are cut into contiguous shards predicted on
    a thread pool; outcomes are reassembled in row order and the counters
    summed, so the report matches a sequential run exactly.
    """
    if len(dataset) == 0:
        raise DataError("cannot evaluate on an empty test set")
    task = dataset.schema.task
    if task is not store.task:
        raise TaskMismatchError(f"model is {store.task.value}, data is {task.value}")
    n = len(dataset)
    workers = max(1, min(workers, n))
    bounds = [n * k // workers for k in range(workers + 1)]
    shards = [range(bounds[k], bounds[k + 1]) for k in range(workers)]
    if workers == 1:
        results = [_predict_shard(store, dataset, shards[0], params, fallback)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda s: _predict_shard(store, dataset, s, params, fallback), shards))

    outcomes: list[PredictionOutcome] = []
    counters = CostCounters()
    for shard_outcomes, shard_counters in results:
        outcomes.extend(shard_outcomes)
        counters.merge(shard_counters)

    actual = dataset.targets()
    pairs = [(o.predicted, a) for o, a in zip(outcomes, actual)]
    report = EvalReport(
        task=task,
        n=n,
        d=dataset.schema.d,
        fallback_count=sum(o.used_fallback for o in outcomes),
        counters=counters,
        outcomes=outcomes,
    )
    if task is Task.CLASSIFICATION:
        report.accuracy = accuracy(pairs)
    else:
        report.mae = mae(pairs)  # type: ignore[arg-type]
        report.rmse = rmse(pairs)  # type: ignore[arg-type]
    return report
