"""Human-readable tables and ``key=value`` lines for reports.

Machine output writes one metric per line in a fixed order. Floats use
``repr`` so the text is bit-stable across runs.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Optional

from .costs import flop_estimate
from .evaluation import EvalReport
from .train import EnergySummary, TrainReport


@dataclass(frozen=True)
class Reference:
    """Published neurovector results for one benchmark dataset."""

    rows: int
    features: int
    neurovectors: int
    energy: str
    success: str
    max_energy: str
    accuracy: Optional[float] = None
    mae: Optional[float] = None
    rmse: Optional[float] = None
    flops: float = 0.0


REFERENCES: dict[str, Reference] = {
    "breast_cancer": Reference(569, 30, 456, "4.826 ± 1.521", "4.901 ± 1.509", "18 (row #23)", accuracy=0.9558, flops=2.67e4),
    "absenteeism": Reference(740, 20, 592, "1.663 ± 1.848", "2.013 ± 2.119", "13.474 (row #370)", mae=4.01, rmse=10.46, flops=3.47e4),
    "red_wine": Reference(1599, 11, 1280, "4.224 ± 2.45", "4.545 ± 2.538", "16 (row #1339)", accuracy=0.6897, flops=7.50e4),
}

# hashing 569 rows of 30 tokens, one search per row, creations for half the rows
ASSUMED_CREATIONS = {"breast_cancer": 284}


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return "-"
    return str(value)


def machine_lines(metrics: Mapping[str, object]) -> str:
    return "".join(f"{k}={_fmt(v)}\n" for k, v in metrics.items())


def table(metrics: Mapping[str, object], title: str) -> str:
    width = max(len(k) for k in metrics)
    out = [title, "-" * len(title)]
    for k, v in metrics.items():
        shown = f"{v:.6g}" if isinstance(v, float) else _fmt(v)
        out.append(f"{k.ljust(width)}  {shown}")
    return "\n".join(out) + "\n"


def summary_metrics(s: EnergySummary) -> dict[str, object]:
    return {
        "neurovectors": s.count,
        "energy_mean": s.energy_mean,
        "energy_std": s.energy_std,
        "success_mean": s.success_mean,
        "success_std": s.success_std,
        "max_energy": s.max_energy,
        "max_energy_id": s.max_energy_id,
        "max_energy_row": s.max_energy_row,
    }


def summary_row(s: EnergySummary) -> str:
    """One line shaped like the published store-statistics table."""
    return (
        f"{s.count} | {s.energy_mean:.3f} ± {s.energy_std:.3f} | "
        f"{s.success_mean:.3f} ± {s.success_std:.3f} | "
        f"{s.max_energy:.4g} (row #{s.max_energy_row})"
    )


def train_metrics(report: TrainReport, d: int) -> dict[str, object]:
    out: dict[str, object] = {
        "train_rows": report.train_rows,
        "rows_seen": report.rows_seen,
        "successes": report.successes,
        "failures": report.failures,
        "store_size": report.final_store_size,
        "store_ratio": report.store_ratio,
    }
    for k, e in enumerate(report.epochs, start=1):
        out[f"epoch{k}_successes"] = e.successes
        out[f"epoch{k}_failures"] = e.failures
        out[f"epoch{k}_no_match"] = e.no_match
    out.update(summary_metrics(report.summary))
    out.update(report.counters.as_dict())
    out["flop_estimate"] = flop_estimate(report.counters, d)
    return out


def render(metrics: Mapping[str, object], fmt: str, title: str) -> str:
    return machine_lines(metrics) if fmt == "machine" else table(metrics, title)


def render_eval(report: EvalReport, fmt: str, reference: Optional[Reference] = None) -> str:
    text = render(report.metrics(), fmt, "Evaluation")
    if reference is not None and fmt != "machine":
        if reference.accuracy is not None:
            text += f"(published accuracy: {reference.accuracy:.4f})\n"
        if reference.mae is not None:
            text += f"(published MAE / RMSE: {reference.mae} / {reference.rmse})\n"
    return text
