"""Versioned, line-oriented model files.

Layout (UTF-8, ``\\n`` line endings)::

    neurovectors-model
    format_version=1
    task="classification"
    target="diagnosis"
    columns=[["mean radius","numeric"], ...]
    separator="\\u001f"
    decimals=null
    skip_missing=false
    alpha=1.0
    tolerance=0.0
    fallback={"mode":"value","value":"B"}
    records=284
    {"id":0,"target":"M","use":3,"success":3,"cum_abs_error":0.0,"source_row":12,"tokens":[...]}
    ...
    checksum=sha256:<hex digest of every preceding byte>

Header values and record lines are compact JSON. Records appear in id order
with tokens in schema order. The inverted index is not written; it is rebuilt
from the record token lists on load.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .core import EnergyParams, FallbackPolicy, NeurovectorRecord, NeurovectorStore, Tokenizer
from .data import Column, ColumnKind, Schema, Task
from .errors import (
    ChecksumMismatchError,
    DataError,
    MalformedRecordError,
    ModelFormatError,
    StoreCorruptionError,
    VersionMismatchError,
)

MAGIC = "neurovectors-model"
FORMAT_VERSION = 1

_HEADER_KEYS = (
    "task",
    "target",
    "columns",
    "separator",
    "decimals",
    "skip_missing",
    "alpha",
    "tolerance",
    "fallback",
    "records",
)
_RECORD_KEYS = ("id", "target", "use", "success", "cum_abs_error", "source_row", "tokens")


@dataclass
class TrainedModel:
    store: NeurovectorStore
    schema: Schema
    params: EnergyParams
    fallback: FallbackPolicy


def _dump(value: Any) -> str:
    return json.dumps(value, separators=(",", ":"), ensure_ascii=False)


def dumps(model: TrainedModel) -> str:
    store, schema = model.store, model.schema
    tk = store.tokenizer
    header = {
        "task": store.task.value,
        "target": schema.target,
        "columns": [[c.name, c.kind.value] for c in schema.columns],
        "separator": tk.sep,
        "decimals": tk.decimals,
        "skip_missing": tk.skip_missing,
        "alpha": float(model.params.alpha),
        "tolerance": float(model.params.tolerance),
        "fallback": {"mode": model.fallback.mode, "value": model.fallback.value},
        "records": len(store.records),
    }
    lines = [MAGIC, f"format_version={FORMAT_VERSION}"]
    lines += [f"{k}={_dump(header[k])}" for k in _HEADER_KEYS]
    for rec in store.records:
        lines.append(
            _dump(
                {
                    "id": rec.id,
                    "target": rec.target,
                    "use": rec.use,
                    "success": rec.success,
                    "cum_abs_error": float(rec.cum_abs_error),
                    "source_row": rec.source_row,
                    "tokens": list(rec.tokens),
                }
            )
        )
    body = "\n".join(lines) + "\n"
    return body + f"checksum=sha256:{_digest(body)}\n"


def _digest(body: str) -> str:
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


def save(model: TrainedModel, path: str | Path) -> str:
    """Write ``model`` to ``path`` and return its checksum."""
    text = dumps(model)
    Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text.rsplit("checksum=", 1)[1].strip()


def _header_value(line: str, key: str, lineno: int) -> Any:
    name, sep, raw = line.partition("=")
    if not sep or name != key:
        raise MalformedRecordError(f"line {lineno}: expected {key}=..., got {line[:60]!r}")
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedRecordError(f"line {lineno}: bad value for {key}: {exc.msg}") from None


def _parse_record(line: str, lineno: int, expected_id: int) -> NeurovectorRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecordError(f"line {lineno}: bad record: {exc.msg}") from None
    if not isinstance(obj, dict) or tuple(obj) != _RECORD_KEYS:
        raise MalformedRecordError(f"line {lineno}: record fields must be {list(_RECORD_KEYS)}")
    ok = (
        obj["id"] == expected_id
        and isinstance(obj["use"], int)
        and isinstance(obj["success"], int)
        and 0 <= obj["success"] <= obj["use"]
        and isinstance(obj["cum_abs_error"], (int, float))
        and obj["cum_abs_error"] >= 0
        and (obj["source_row"] is None or isinstance(obj["source_row"], int))
        and isinstance(obj["tokens"], list)
        and obj["tokens"]
        and all(isinstance(t, str) for t in obj["tokens"])
    )
    if not ok:
        raise MalformedRecordError(f"line {lineno}: invalid record {expected_id}")
    return NeurovectorRecord(
        id=obj["id"],
        target=obj["target"],
        tokens=tuple(obj["tokens"]),
        use=obj["use"],
        success=obj["success"],
        cum_abs_error=float(obj["cum_abs_error"]),
        source_row=obj["source_row"],
    )


def loads(text: str) -> TrainedModel:
    lines = text.split("\n")
    if not lines or lines[0] != MAGIC:
        raise ModelFormatError("not a neurovectors model file")
    if len(lines) < 2 or not lines[1].startswith("format_version="):
        raise MalformedRecordError("line 2: missing format_version")
    try:
        version = int(lines[1].partition("=")[2])
    except ValueError:
        raise MalformedRecordError("line 2: format_version is not an integer") from None
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"model file format_version {version}, this build reads {FORMAT_VERSION}")

    if len(lines) < 3 or lines[-1] != "" or not lines[-2].startswith("checksum="):
        raise MalformedRecordError("file is truncated: no trailing checksum line")
    body = "\n".join(lines[:-2]) + "\n"
    stored = lines[-2].partition("=")[2]
    if stored != f"sha256:{_digest(body)}":
        raise ChecksumMismatchError("checksum does not match file contents")

    content = lines[2:-2]
    if len(content) < len(_HEADER_KEYS):
        raise MalformedRecordError("header block is incomplete")
    header = {k: _header_value(content[i], k, i + 3) for i, k in enumerate(_HEADER_KEYS)}
    record_lines = content[len(_HEADER_KEYS) :]
    if len(record_lines) != header["records"]:
        raise MalformedRecordError(f"header says {header['records']} records, file has {len(record_lines)}")

    try:
        task = Task(header["task"])
        schema = Schema(
            tuple(Column(name, ColumnKind(kind)) for name, kind in header["columns"]),
            header["target"],
            task,
        )
        tokenizer = Tokenizer(header["separator"], header["decimals"], bool(header["skip_missing"]))
        params = EnergyParams(header["alpha"], header["tolerance"])
        fb = header["fallback"]
        fallback = FallbackPolicy(fb["mode"], fb["value"])
    except (DataError, ValueError, TypeError, KeyError) as exc:
        raise MalformedRecordError(f"invalid header: {exc}") from None

    first = 2 + len(_HEADER_KEYS) + 1
    records = [_parse_record(line, first + i, i) for i, line in enumerate(record_lines)]
    store = NeurovectorStore(task, tokenizer)
    try:
        for rec in records:
            store.check_target(rec.target)
    except StoreCorruptionError as exc:
        raise MalformedRecordError(str(exc)) from None
    if task is Task.REGRESSION:
        for rec in records:
            rec.target = float(rec.target)
    store.records = records
    store.reindex()
    return TrainedModel(store, schema, params, fallback)


def load(path: str | Path) -> TrainedModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ModelFormatError(f"{path}: no such model file") from None
    except UnicodeDecodeError:
        raise MalformedRecordError(f"{path}: not valid UTF-8") from None
    return loads(text)
