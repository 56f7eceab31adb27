import math
import os
import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from neurovectors import NeurovectorStore, Task

ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = Path(os.environ.get("NEUROVECTORS_DATA_DIR", ROOT / "data"))


def brute_force_select(store, query, task, alpha=1.0):
    """Linear scan over every record: (overlap, energy, -id) maximum.

    Shares nothing with the store's index or selection code.
    """
    q = set(query)
    best = None
    for rec in store.records:
        overlap = len(q & set(rec.tokens))
        if overlap == 0:
            continue
        if rec.use == 0:
            e = 0.0
        else:
            e = rec.success**2 / rec.use
            if task is Task.REGRESSION:
                e *= math.exp(-alpha * rec.cum_abs_error)
        key = (overlap, e, -rec.id)
        if best is None or key > best[0]:
            best = (key, rec.id)
    return None if best is None else best[1]


def T(feature, value):
    return f"{feature}\x1f{value}"


def build_random_store(seed, task=Task.CLASSIFICATION, max_nvs=200, max_features=12):
    """Random store with random counters plus a query over the same features.

    Few distinct values per feature keep overlaps and count ties frequent.
    """
    rnd = random.Random(seed)
    d = rnd.randint(1, max_features)
    n_values = rnd.randint(1, 4)
    n = rnd.randint(0, max_nvs)
    store = NeurovectorStore(task)
    for _ in range(n):
        tokens = [T(f"f{j}", rnd.randrange(n_values)) for j in range(d)]
        if task is Task.CLASSIFICATION:
            target = rnd.choice("abc")
        else:
            target = float(rnd.randint(0, 5))
        rec = store.records[store.insert(tokens, target)]
        rec.use = rnd.randint(0, 6)
        rec.success = rnd.randint(0, rec.use)
        if task is Task.REGRESSION:
            rec.cum_abs_error = rnd.choice([0.0, 0.5, 1.0, 2.5])
    # one value beyond the stored range so some queries miss entirely
    query = [T(f"f{j}", rnd.randrange(n_values + 1)) for j in range(d)]
    return store, query


def random_stores(task=Task.CLASSIFICATION, max_nvs=200, max_features=12):
    return st.integers(0, 2**32 - 1).map(lambda seed: build_random_store(seed, task, max_nvs, max_features))


@pytest.fixture
def three_nv_store():
    store = NeurovectorStore(Task.CLASSIFICATION)
    store.insert([T("a", 1), T("b", 2)], "x")
    store.insert([T("a", 1), T("c", 3)], "y")
    store.insert([T("b", 9), T("c", 3)], "z")
    return store


def dataset_path(name):
    return DATA_DIR / name


ACCEPTANCE_LINES: list[str] = []


class Criterion:
    """Context manager that records one PASS/FAIL line for a criterion.

    The line is printed immediately and repeated in the terminal summary so
    it survives output capture. Exceptions propagate unchanged.
    """

    def __init__(self, label):
        self.label = label
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            status, why = "PASS", self.detail
        else:
            status = "FAIL"
            reason = str(exc).splitlines()[0] if str(exc) else exc_type.__name__
            why = f"{self.detail}; {reason}" if self.detail else reason
        line = f"[{status}] {self.label}" + (f": {why}" if why else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return False


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
