"""Instance-based learning for tabular data through an inverted token index."""

from .core import (
    SEP,
    EnergyParams,
    FallbackPolicy,
    NeurovectorRecord,
    NeurovectorStore,
    PredictionOutcome,
    Selection,
    Tokenizer,
    candidate_set,
    energy,
    make_token,
    predict_one,
    select_neurovector,
    tokenize_instance,
)
from .costs import CostCounters, FlopModel, flop_estimate
from .data import Column, ColumnKind, Dataset, Schema, SplitSpec, Task, canonical_value, load_csv, load_rows, split
from .evaluation import EvalReport, accuracy, evaluate, mae, rmse
from .model import TrainedModel, load, save
from .train import EnergySummary, TrainConfig, TrainReport, train, training_summary

__version__ = "0.1.0"

__all__ = [
    "SEP",
    "Column",
    "ColumnKind",
    "CostCounters",
    "Dataset",
    "EnergyParams",
    "EnergySummary",
    "EvalReport",
    "FallbackPolicy",
    "FlopModel",
    "NeurovectorRecord",
    "NeurovectorStore",
    "PredictionOutcome",
    "Schema",
    "Selection",
    "SplitSpec",
    "Task",
    "Tokenizer",
    "TrainConfig",
    "TrainReport",
    "TrainedModel",
    "accuracy",
    "candidate_set",
    "canonical_value",
    "energy",
    "evaluate",
    "flop_estimate",
    "load",
    "load_csv",
    "load_rows",
    "mae",
    "make_token",
    "predict_one",
    "rmse",
    "save",
    "select_neurovector",
    "split",
    "tokenize_instance",
    "train",
    "training_summary",
]
