"""Neurovector store: tokens, inverted index, selection and energy.

A neurovector is one stored training instance. It is reachable through one
token per feature, each token being the feature name and the canonical value
joined by a reserved separator. Prediction collects every neurovector that
shares at least one token with the query, keeps the one with the most shared
tokens, and settles ties by energy and then by lowest id.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Literal, Optional

from .costs import CostCounters
from .data import ColumnKind, Schema, Target, Task, canonical_value
from .errors import (
    DataError,
    MissingValueError,
    NoMatchError,
    NoModelError,
    StoreCorruptionError,
    TokenError,
)

#: ASCII unit separator; cannot appear in feature names or values.
SEP = "\x1f"


def make_token(feature: str, value: str, sep: str = SEP) -> str:
    if not feature:
        raise TokenError("feature name must be non-empty")
    if sep in feature:
        raise TokenError(f"feature name {feature!r} contains the reserved separator")
    if sep in value:
        raise TokenError(f"value {value!r} of feature {feature!r} contains the reserved separator")
    return f"{feature}{sep}{value}"


def split_token(token: str, sep: str = SEP) -> tuple[str, str]:
    feature, _, value = token.partition(sep)
    return feature, value


@dataclass(frozen=True)
class Tokenizer:
    """How raw rows become tokens.

    ``decimals`` quantizes numeric cells before rendering; ``skip_missing``
    drops the token for an empty cell instead of rejecting the row.
    """

    sep: str = SEP
    decimals: Optional[int] = None
    skip_missing: bool = False

    def __post_init__(self) -> None:
        if len(self.sep) != 1:
            raise TokenError(f"separator must be one character, got {self.sep!r}")

    def tokenize(
        self,
        row: Mapping[str, str],
        schema: Schema,
        counters: CostCounters | None = None,
        row_number: int | None = None,
    ) -> list[str]:
        tokens = []
        for col in schema.features:
            cell = row.get(col.name)
            if cell is None or not cell.strip():
                if self.skip_missing:
                    continue
                where = f"row {row_number}: " if row_number is not None else ""
                raise MissingValueError(f"{where}missing value for column {col.name!r}")
            try:
                value = canonical_value(cell, col.kind, self.decimals if col.kind is ColumnKind.NUMERIC else None)
            except DataError as exc:
                where = f"row {row_number}: " if row_number is not None else ""
                raise DataError(f"{where}column {col.name!r}: {exc}") from None
            tokens.append(make_token(col.name, value, self.sep))
        if counters is not None:
            counters.hash_ops += len(tokens)
        return tokens


def tokenize_instance(
    row: Mapping[str, str],
    schema: Schema,
    tokenizer: Tokenizer = Tokenizer(),
    counters: CostCounters | None = None,
) -> list[str]:
    """One token per feature column, in schema order, target excluded."""
    return tokenizer.tokenize(row, schema, counters)


@dataclass(frozen=True)
class EnergyParams:
    alpha: float = 1.0
    tolerance: float = 0.0

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.tolerance >= 0:
            raise ValueError(f"tolerance must be non-negative, got {self.tolerance}")


@dataclass
class NeurovectorRecord:
    id: int
    target: Target
    tokens: tuple[str, ...]
    use: int = 0
    success: int = 0
    cum_abs_error: float = 0.0
    source_row: Optional[int] = None


def energy(record: NeurovectorRecord, task: Task, params: EnergyParams = EnergyParams()) -> float:
    """Reliability score: success**2 / use, damped by the accumulated error.

    For regression the ratio is multiplied by ``exp(-alpha * cum_abs_error)``
    where ``cum_abs_error`` is the running sum (not the mean) of absolute
    errors. A neurovector that was never selected has energy 0.
    """
    if record.use == 0:
        return 0.0
    e = record.success * record.success / record.use
    if task is Task.REGRESSION:
        e *= math.exp(-params.alpha * record.cum_abs_error)
    return e


@dataclass(frozen=True)
class FallbackPolicy:
    """Answer used when no stored neurovector shares a token with the query.

    ``mode="value"`` returns ``value`` (the training majority class or the
    training-target mean); ``mode="error"`` raises instead.
    """

    mode: Literal["value", "error"] = "error"
    value: Optional[Target] = None

    def __post_init__(self) -> None:
        if self.mode not in ("value", "error"):
            raise ValueError(f"unknown fallback mode {self.mode!r}")
        if self.mode == "value" and self.value is None:
            raise ValueError("fallback mode 'value' needs a value")

    @classmethod
    def from_targets(cls, task: Task, targets: Sequence[Target]) -> FallbackPolicy:
        if not targets:
            raise ValueError("cannot derive a fallback from no targets")
        if task is Task.CLASSIFICATION:
            counts = Counter(targets)
            best = max(counts.values())
            # ties go to the smallest label so the choice ignores row order
            return cls("value", min(str(t) for t, c in counts.items() if c == best))
        return cls("value", math.fsum(float(t) for t in targets) / len(targets))


@dataclass(frozen=True)
class Selection:
    id: int
    match_count: int
    energy: float


@dataclass(frozen=True)
class PredictionOutcome:
    predicted: Target
    selected_id: Optional[int]
    match_count: int
    selected_energy: float
    candidate_count: int

    @property
    def used_fallback(self) -> bool:
        return self.selected_id is None


@dataclass
class NeurovectorStore:
    """Inverted index from token to neurovector ids plus the records themselves.

    Posting lists hold ids in creation order. Training is single-writer; once
    training is over the store is only read, and any number of threads may
    call :meth:`predict` with their own counters.
    """

    task: Task
    tokenizer: Tokenizer = field(default_factory=Tokenizer)
    records: list[NeurovectorRecord] = field(default_factory=list)
    index: dict[str, list[int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.task = Task(self.task)
        if self.records and not self.index:
            self.reindex()

    def __len__(self) -> int:
        return len(self.records)

    def reindex(self) -> None:
        self.index = {}
        for rec in self.records:
            for tok in rec.tokens:
                self.index.setdefault(tok, []).append(rec.id)

    def check_target(self, target: Target) -> Target:
        if self.task is Task.CLASSIFICATION:
            if not isinstance(target, str):
                raise StoreCorruptionError(f"classification store given non-label target {target!r}")
            return target
        if isinstance(target, bool) or not isinstance(target, (int, float)):
            raise StoreCorruptionError(f"regression store given non-numeric target {target!r}")
        return float(target)

    def insert(
        self,
        tokens: Sequence[str],
        target: Target,
        source_row: int | None = None,
        counters: CostCounters | None = None,
    ) -> int:
        """Append a fresh neurovector and link it under each of ``tokens``."""
        if not tokens:
            raise StoreCorruptionError("cannot insert a neurovector without tokens")
        target = self.check_target(target)
        nv_id = len(self.records)
        toks = tuple(dict.fromkeys(tokens))
        self.records.append(NeurovectorRecord(nv_id, target, toks, source_row=source_row))
        for tok in toks:
            self.index.setdefault(tok, []).append(nv_id)
        if counters is not None:
            counters.nv_creations += 1
        return nv_id

    def candidate_set(self, tokens: Iterable[str], counters: CostCounters | None = None) -> dict[int, int]:
        """Map each neurovector sharing a token with the query to its match count."""
        counts: dict[int, int] = {}
        n = 0
        for tok in tokens:
            n += 1
            for nv_id in self.index.get(tok, ()):
                counts[nv_id] = counts.get(nv_id, 0) + 1
        if counters is not None:
            counters.searches += 1
            counters.index_lookups += n
        return counts

    def energy(self, nv_id: int, params: EnergyParams) -> float:
        return energy(self.records[nv_id], self.task, params)

    def select(
        self,
        candidates: Mapping[int, int],
        params: EnergyParams,
        counters: CostCounters | None = None,
    ) -> Selection | None:
        """Highest match count wins, then highest energy, then lowest id."""
        if not candidates:
            return None
        if counters is not None:
            counters.candidate_comparisons += len(candidates)
        top = max(candidates.values())
        best: Selection | None = None
        for nv_id, count in candidates.items():
            if count != top:
                continue
            e = self.energy(nv_id, params)
            if best is None or e > best.energy or (e == best.energy and nv_id < best.id):
                best = Selection(nv_id, count, e)
        return best

    def predict(
        self,
        tokens: Sequence[str],
        params: EnergyParams,
        fallback: FallbackPolicy = FallbackPolicy(),
        counters: CostCounters | None = None,
    ) -> PredictionOutcome:
        candidates = self.candidate_set(tokens, counters)
        chosen = self.select(candidates, params, counters)
        if chosen is not None:
            return PredictionOutcome(
                self.records[chosen.id].target, chosen.id, chosen.match_count, chosen.energy, len(candidates)
            )
        if fallback.mode == "error":
            if not self.records:
                raise NoModelError("store is empty and fallback is disabled")
            raise NoMatchError("no stored neurovector shares a token with the query")
        return PredictionOutcome(fallback.value, None, 0, 0.0, 0)  # type: ignore[arg-type]

    def judge(self, predicted: Target, actual: Target, params: EnergyParams) -> tuple[bool, float]:
        """Whether ``predicted`` counts as correct, and its absolute error."""
        if self.task is Task.CLASSIFICATION:
            return predicted == actual, 0.0
        err = abs(float(predicted) - float(actual))
        return err <= params.tolerance, err

    def record_outcome(self, nv_id: int, actual: Target, params: EnergyParams) -> NeurovectorRecord:
        """Charge one use to ``nv_id`` and credit a success if it predicted ``actual``."""
        if not 0 <= nv_id < len(self.records):
            raise StoreCorruptionError(f"unknown neurovector id {nv_id}")
        actual = self.check_target(actual)
        rec = self.records[nv_id]
        ok, err = self.judge(rec.target, actual, params)
        rec.use += 1
        if ok:
            rec.success += 1
        if self.task is Task.REGRESSION:
            rec.cum_abs_error += err
        return rec


def candidate_set(store: NeurovectorStore, tokens: Iterable[str], counters: CostCounters | None = None) -> dict[int, int]:
    return store.candidate_set(tokens, counters)


def select_neurovector(
    candidates: Mapping[int, int], store: NeurovectorStore, params: EnergyParams = EnergyParams()
) -> Selection | None:
    return store.select(candidates, params)


def predict_one(
    store: NeurovectorStore,
    tokens: Sequence[str],
    params: EnergyParams = EnergyParams(),
    fallback: FallbackPolicy = FallbackPolicy(),
    counters: CostCounters | None = None,
) -> PredictionOutcome:
    return store.predict(tokens, params, fallback, counters)
