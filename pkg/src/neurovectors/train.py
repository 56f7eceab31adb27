"""Failure-driven training loop.

Each training row is predicted with the store built so far. The selected
neurovector is charged a use (and a success when it was right); when the
prediction is wrong, or nothing matched at all, the row becomes a new
neurovector.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, field
from typing import Literal, Optional

from .core import EnergyParams, FallbackPolicy, NeurovectorStore, Tokenizer
from .costs import CostCounters
from .data import Dataset
from .errors import DataError, NoModelError


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 1
    energy: EnergyParams = field(default_factory=EnergyParams)
    fallback: Literal["auto", "error"] = "auto"
    shuffle_seed: Optional[int] = None
    tokenizer: Tokenizer = field(default_factory=Tokenizer)

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.fallback not in ("auto", "error"):
            raise ValueError(f"unknown fallback {self.fallback!r}")


@dataclass(frozen=True)
class EpochStats:
    rows: int
    successes: int
    failures: int
    no_match: int


@dataclass(frozen=True)
class EnergySummary:
    count: int
    energy_mean: float
    energy_std: float
    success_mean: float
    success_std: float
    max_energy: float
    max_energy_id: int
    max_energy_row: Optional[int]


@dataclass(frozen=True)
class TrainReport:
    rows_seen: int
    successes: int
    failures: int
    final_store_size: int
    train_rows: int
    epochs: tuple[EpochStats, ...]
    summary: EnergySummary
    counters: CostCounters
    fallback: FallbackPolicy

    @property
    def store_ratio(self) -> float:
        return self.final_store_size / self.train_rows


def training_summary(store: NeurovectorStore, params: EnergyParams = EnergyParams()) -> EnergySummary:
    """Count, mean and population standard deviation of energy and success.

    The maximum is the highest-energy neurovector, lowest id on ties.
    """
    if not store.records:
        raise NoModelError("cannot summarize an empty store")
    energies = [store.energy(r.id, params) for r in store.records]
    successes = [float(r.success) for r in store.records]
    best = max(range(len(energies)), key=lambda i: (energies[i], -i))
    return EnergySummary(
        count=len(energies),
        energy_mean=statistics.fmean(energies),
        energy_std=statistics.pstdev(energies),
        success_mean=statistics.fmean(successes),
        success_std=statistics.pstdev(successes),
        max_energy=energies[best],
        max_energy_id=best,
        max_energy_row=store.records[best].source_row,
    )


def train(
    dataset: Dataset,
    config: TrainConfig = TrainConfig(),
    counters: CostCounters | None = None,
) -> tuple[NeurovectorStore, TrainReport]:
    """Build a store from ``dataset`` and report what happened.

    Rows are visited in file order unless ``config.shuffle_seed`` is set, in
    which case each epoch uses its own seeded permutation. A row with no
    matching neurovector is always a failure.
    """
    if len(dataset) == 0:
        raise DataError("cannot train on an empty dataset")
    schema = dataset.schema
    task = schema.task
    params = config.energy
    counters = counters if counters is not None else CostCounters()
    store = NeurovectorStore(task, config.tokenizer)

    targets = dataset.targets()
    if config.fallback == "auto":
        fallback = FallbackPolicy.from_targets(task, targets)
    else:
        fallback = FallbackPolicy("error")

    rng = random.Random(config.shuffle_seed) if config.shuffle_seed is not None else None
    epochs = []
    for _ in range(config.epochs):
        order = list(range(len(dataset)))
        if rng is not None:
            rng.shuffle(order)
        ok_count = fail_count = no_match = 0
        for i in order:
            row_id = dataset.row_ids[i]
            tokens = config.tokenizer.tokenize(dataset.feature_values(i), schema, counters, row_id)
            if not tokens:
                raise DataError(f"row {row_id}: no usable feature values")
            actual = targets[i]
            chosen = store.select(store.candidate_set(tokens, counters), params, counters)
            ok = False
            if chosen is None:
                no_match += 1
            else:
                rec = store.record_outcome(chosen.id, actual, params)
                ok, _ = store.judge(rec.target, actual, params)
            if ok:
                ok_count += 1
            else:
                fail_count += 1
                store.insert(tokens, actual, row_id, counters)
        epochs.append(EpochStats(len(order), ok_count, fail_count, no_match))

    report = TrainReport(
        rows_seen=sum(e.rows for e in epochs),
        successes=sum(e.successes for e in epochs),
        failures=sum(e.failures for e in epochs),
        final_store_size=len(store),
        train_rows=len(dataset),
        epochs=tuple(epochs),
        summary=training_summary(store, params),
        counters=counters,
        fallback=fallback,
    )
    return store, report
