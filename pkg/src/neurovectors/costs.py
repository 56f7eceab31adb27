"""Logical operation counters and the analytic FLOP model built on them."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields


@dataclass
class CostCounters:
    """Monotone counts of the operations that dominate neurovector cost.

    ``hash_ops`` counts tokens built, ``searches`` counts candidate
    retrievals (one per query row), ``index_lookups`` counts individual
    dictionary probes (one per query token), ``nv_creations`` counts inserted
    neurovectors and ``candidate_comparisons`` counts candidates ranked
    during selection.
    """

    hash_ops: int = 0
    index_lookups: int = 0
    searches: int = 0
    nv_creations: int = 0
    candidate_comparisons: int = 0

    def merge(self, other: CostCounters) -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def __add__(self, other: CostCounters) -> CostCounters:
        out = CostCounters(**asdict(self))
        out.merge(other)
        return out

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


@dataclass(frozen=True)
class FlopModel:
    """Per-operation FLOP coefficients.

    Defaults charge one FLOP per hashed token, two per dictionary search and
    one per token link when a neurovector is created, so a creation over
    ``d`` features costs ``d``.
    """

    per_hash: int = 1
    per_search: int = 2
    per_creation_link: int = 1


DEFAULT_FLOP_MODEL = FlopModel()


def flop_estimate(counters: CostCounters, d: int, model: FlopModel = DEFAULT_FLOP_MODEL) -> int:
    """Estimated FLOPs for the operations recorded in ``counters``.

    ``d`` is the number of features, which sets the cost of linking a new
    neurovector to its tokens.
    """
    return (
        counters.hash_ops * model.per_hash
        + counters.searches * model.per_search
        + counters.nv_creations * d * model.per_creation_link
    )
