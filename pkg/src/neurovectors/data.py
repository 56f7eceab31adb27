"""CSV ingestion, schema inference, canonical cell rendering and splitting."""

from __future__ import annotations

import csv
import math
import random
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Union

from .errors import DataError, SplitError

Target = Union[str, float]

_DECIMAL = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")

# integral floats below this render without a fractional part
_INT_LIMIT = 2.0**53


class Task(str, Enum):
    CLASSIFICATION = "classification"
    REGRESSION = "regression"


class ColumnKind(str, Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class Column:
    name: str
    kind: ColumnKind


@dataclass(frozen=True)
class Schema:
    """Ordered columns plus the target column and task.

    The target is forced categorical for classification and must be numeric
    for regression.
    """

    columns: tuple[Column, ...]
    target: str
    task: Task

    def __post_init__(self) -> None:
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DataError(f"duplicate column names: {dupes}")
        if self.target not in names:
            raise DataError(f"target column {self.target!r} not in columns")
        kind = self.column(self.target).kind
        if self.task is Task.CLASSIFICATION and kind is not ColumnKind.CATEGORICAL:
            cols = tuple(
                Column(c.name, ColumnKind.CATEGORICAL) if c.name == self.target else c
                for c in self.columns
            )
            object.__setattr__(self, "columns", cols)
        elif self.task is Task.REGRESSION and kind is not ColumnKind.NUMERIC:
            raise DataError(f"regression target {self.target!r} is not numeric")
        if not self.features:
            raise DataError("schema has no feature columns")

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def features(self) -> list[Column]:
        return [c for c in self.columns if c.name != self.target]

    @property
    def d(self) -> int:
        return len(self.features)

    @property
    def target_index(self) -> int:
        return self.names.index(self.target)


@dataclass
class Dataset:
    """Rows of raw cells in header order.

    ``row_ids`` holds each row's 0-based position in the source file so that
    provenance survives shuffling and splitting.
    """

    schema: Schema
    rows: list[list[str]]
    row_ids: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.row_ids:
            self.row_ids = list(range(len(self.rows)))
        if len(self.row_ids) != len(self.rows):
            raise DataError("row_ids and rows differ in length")

    def __len__(self) -> int:
        return len(self.rows)

    def feature_values(self, i: int) -> dict[str, str]:
        row = self.rows[i]
        t = self.schema.target_index
        return {name: cell for j, (name, cell) in enumerate(zip(self.schema.names, row)) if j != t}

    def target(self, i: int) -> Target:
        return parse_target(self.rows[i][self.schema.target_index], self.schema.task, self.row_ids[i])

    def targets(self) -> list[Target]:
        return [self.target(i) for i in range(len(self.rows))]

    def subset(self, indices: Sequence[int]) -> Dataset:
        return Dataset(self.schema, [self.rows[i] for i in indices], [self.row_ids[i] for i in indices])


def is_decimal(cell: str) -> bool:
    return bool(_DECIMAL.fullmatch(cell.strip()))


def parse_target(cell: str, task: Task, row: int | None = None) -> Target:
    raw = cell.strip()
    where = f" (row {row})" if row is not None else ""
    if not raw:
        raise DataError(f"missing target value{where}")
    if task is Task.CLASSIFICATION:
        return raw
    if not is_decimal(raw):
        raise DataError(f"non-numeric regression target {cell!r}{where}")
    return float(raw)


def format_number(value: float) -> str:
    """Shortest decimal string that parses back to ``value``.

    Integral values drop the fractional part, so ``2.0`` renders as ``"2"``.
    """
    if not math.isfinite(value):
        raise DataError(f"non-finite numeric value {value!r}")
    if value.is_integer() and abs(value) < _INT_LIMIT:
        return str(int(value))
    return repr(value)


def canonical_value(cell: str, kind: ColumnKind, decimals: int | None = None) -> str:
    """Render one raw cell as the value half of a token.

    Categorical cells are only trimmed. Numeric cells are parsed and
    re-rendered with :func:`format_number`, optionally after rounding to
    ``decimals`` places, so ``"2"``, ``"2.0"`` and ``"2.00"`` coincide.
    """
    raw = cell.strip()
    if kind is ColumnKind.CATEGORICAL:
        return raw
    if not is_decimal(raw):
        raise DataError(f"cannot parse {cell!r} as a number")
    value = float(raw)
    if decimals is not None:
        value = round(value, decimals)
    return format_number(value + 0.0)


def infer_kind(cells: Sequence[str]) -> ColumnKind:
    present = [c for c in cells if c.strip()]
    if present and all(is_decimal(c) for c in present):
        return ColumnKind.NUMERIC
    return ColumnKind.CATEGORICAL


def _read_table(path: Path, delimiter: str) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="", encoding="utf-8-sig") as fh:
            reader = csv.reader(fh, delimiter=delimiter)
            header = next(reader, None)
            if header is None:
                raise DataError(f"{path}: empty file, header row required")
            header = [h.strip() for h in header]
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != len(header):
                    raise DataError(
                        f"{path}: line {lineno} has {len(row)} cells, expected {len(header)}"
                    )
                rows.append(row)
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8 ({exc.reason})") from None
    except csv.Error as exc:
        raise DataError(f"{path}: {exc}") from None
    return header, rows


def load_csv(
    path: str | Path,
    target: str,
    task: Task | str,
    overrides: Mapping[str, ColumnKind | str] | None = None,
    delimiter: str = ",",
) -> Dataset:
    """Read a headed CSV file and infer a :class:`Schema` for it.

    A column is numeric iff every non-empty cell is a plain decimal number;
    ``overrides`` force a kind per column name.
    """
    path = Path(path)
    task = Task(task)
    header, rows = _read_table(path, delimiter)
    if target not in header:
        raise DataError(f"{path}: target column {target!r} not in header")
    if not rows:
        raise DataError(f"{path}: no data rows")
    overrides = {k: ColumnKind(v) for k, v in (overrides or {}).items()}
    unknown = sorted(set(overrides) - set(header))
    if unknown:
        raise DataError(f"{path}: overrides name unknown columns {unknown}")

    columns = []
    for j, name in enumerate(header):
        kind = overrides.get(name) or infer_kind([r[j] for r in rows])
        columns.append(Column(name, kind))
    schema = Schema(tuple(columns), target, task)

    for j, col in enumerate(schema.columns):
        if col.kind is ColumnKind.NUMERIC:
            for i, row in enumerate(rows):
                cell = row[j]
                if cell.strip() and not is_decimal(cell):
                    raise DataError(f"{path}: row {i}: column {col.name!r} value {cell!r} is not numeric")
    return Dataset(schema, rows)


def load_rows(
    path: str | Path,
    schema: Schema,
    delimiter: str = ",",
    require_target: bool = True,
) -> Dataset:
    """Read a CSV file against an existing schema, e.g. one stored in a model.

    Columns are matched by name; extra columns are ignored. Without
    ``require_target`` the target column may be absent and is filled with
    empty cells.
    """
    path = Path(path)
    header, rows = _read_table(path, delimiter)
    positions = []
    for col in schema.columns:
        if col.name in header:
            positions.append(header.index(col.name))
        elif col.name == schema.target and not require_target:
            positions.append(None)
        else:
            raise DataError(f"{path}: column {col.name!r} required by the model is missing")
    out = [[row[p] if p is not None else "" for p in positions] for row in rows]
    if not out:
        raise DataError(f"{path}: no data rows")
    return Dataset(schema, out)


@dataclass(frozen=True)
class SplitSpec:
    train: float = 0.7
    validation: float = 0.0
    test: float = 0.3
    seed: int = 0

    def __post_init__(self) -> None:
        parts = (self.train, self.validation, self.test)
        if any(p < 0 for p in parts):
            raise SplitError(f"negative split fraction in {parts}")
        if self.train <= 0:
            raise SplitError("train fraction must be positive")
        if abs(sum(parts) - 1.0) > 1e-9:
            raise SplitError(f"split fractions {parts} do not sum to 1")


def split_indices(n: int, spec: SplitSpec) -> tuple[list[int], list[int], list[int]]:
    """Seeded shuffle of ``range(n)`` cut at floor(n*train) and floor(n*(train+val))."""
    order = list(range(n))
    random.Random(spec.seed).shuffle(order)
    a = math.floor(n * spec.train)
    b = math.floor(n * (spec.train + spec.validation))
    if spec.test == 0:
        b = n
    parts = order[:a], order[a:b], order[b:]
    for name, frac, part in zip(("train", "validation", "test"), (spec.train, spec.validation, spec.test), parts):
        if frac > 0 and not part:
            raise SplitError(f"{name} partition is empty with {n} rows at fraction {frac}")
    return parts


def split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset, Dataset]:
    return tuple(dataset.subset(p) for p in split_indices(len(dataset), spec))  # type: ignore[return-value]
