"""Build the bundled benchmark CSVs under ``data/``.

Breast Cancer Wisconsin (Diagnostic) is exported from scikit-learn's bundled
copy. Red Wine Quality is rebuilt from the four binarized KEEL subsets shipped
in the ``keel-ds`` wheel: ``winequality-red-4`` carries all 1599 rows in UCI
order, and the other three subsets recover the remaining quality labels.

Absenteeism at Work is not redistributed by any package reachable offline;
drop the UCI file (``Absenteeism_at_work.csv``, semicolon-delimited) into
``data/`` by hand.

Usage::

    pip install --no-deps --target /tmp/keel keel-ds
    python scripts/build_datasets.py --keel-dir /tmp/keel/keel_ds
"""

from __future__ import annotations

import argparse
import csv
from collections import Counter
from pathlib import Path

WINE_COLUMNS = [
    "fixed acidity",
    "volatile acidity",
    "citric acid",
    "residual sugar",
    "chlorides",
    "free sulfur dioxide",
    "total sulfur dioxide",
    "density",
    "pH",
    "sulphates",
    "alcohol",
    "quality",
]

WINE_CLASS_COUNTS = {"3": 10, "4": 53, "5": 681, "6": 638, "7": 199, "8": 18}


def _read_keel(path: Path) -> list[tuple[list[str], str]]:
    rows = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        *features, label = [cell.strip() for cell in line.split(",")]
        rows.append((features, label))
    return rows


def _key(features: list[str]) -> tuple[float, ...]:
    return tuple(float(v) for v in features)


def build_red_wine(keel_dir: Path, out: Path) -> None:
    raw = keel_dir / "data" / "imbalanced" / "raw"
    all_rows = _read_keel(raw / "winequality-red-4.dat")
    labels: dict[tuple[float, ...], set[str]] = {}

    def tag(features: list[str], label: str) -> None:
        labels.setdefault(_key(features), set()).add(label)

    for x, y in all_rows:
        if y == "positive":
            tag(x, "4")
    for x, y in _read_keel(raw / "winequality-red-3_vs_5.dat"):
        tag(x, "3" if y == "positive" else "5")
    sixes = set()
    for x, y in _read_keel(raw / "winequality-red-8_vs_6.dat"):
        tag(x, "8" if y == "positive" else "6")
        if y == "negative":
            sixes.add(_key(x))
    for x, y in _read_keel(raw / "winequality-red-8_vs_6-7.dat"):
        if y == "negative" and _key(x) not in sixes:
            tag(x, "7")

    out_rows = []
    for x, _ in all_rows:
        found = labels.get(_key(x), set())
        if len(found) != 1:
            raise SystemExit(f"cannot recover quality for row {x}: {sorted(found)}")
        out_rows.append([*x, next(iter(found))])

    counts = Counter(row[-1] for row in out_rows)
    if dict(counts) != WINE_CLASS_COUNTS:
        raise SystemExit(f"unexpected class counts {dict(counts)}")

    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(WINE_COLUMNS)
        writer.writerows(out_rows)


def build_breast_cancer(out: Path) -> None:
    from sklearn.datasets import load_breast_cancer

    bunch = load_breast_cancer()
    # sklearn encodes 0 = malignant, 1 = benign
    names = ["M", "B"]
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([*bunch.feature_names, "diagnosis"])
        for features, target in zip(bunch.data, bunch.target):
            writer.writerow([repr(float(v)) for v in features] + [names[target]])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--keel-dir", type=Path, required=True)
    parser.add_argument("--out-dir", type=Path, default=Path(__file__).resolve().parents[1] / "data")
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    build_breast_cancer(args.out_dir / "breast_cancer.csv")
    build_red_wine(args.keel_dir, args.out_dir / "winequality-red.csv")


if __name__ == "__main__":
    main()
