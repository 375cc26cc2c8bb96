"""Design-matrix container shared by the feature builders, selectors and learners."""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


def safe_div(num, den):
    """Division with zero denominators replaced by 1 (keeps rates finite)."""
    return num / (den if den != 0 else 1)


@dataclass(frozen=True)
class FeatureMatrix:
    columns: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    match_ids: tuple[str, ...]
    seasons: np.ndarray
    dates: tuple[dt.date, ...]
    # per-row note, e.g. which side used imputed values
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float).reshape(len(self.match_ids), len(self.columns))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", np.asarray(self.y, dtype=np.int64))
        object.__setattr__(self, "seasons", np.asarray(self.seasons, dtype=np.int64))
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "match_ids", tuple(self.match_ids))
        object.__setattr__(self, "dates", tuple(self.dates))
        if not self.flags:
            object.__setattr__(self, "flags", ("",) * len(self.match_ids))
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate column names")
        if not np.all(np.isfinite(X)):
            raise ValueError("feature matrix contains missing or non-finite values")

    def __len__(self):
        return len(self.match_ids)

    @property
    def n_features(self) -> int:
        return len(self.columns)

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.columns.index(name)]

    def select(self, columns: Sequence[str]) -> "FeatureMatrix":
        missing = [c for c in columns if c not in self.columns]
        if missing:
            raise KeyError(f"unknown feature(s): {', '.join(missing)}")
        idx = [self.columns.index(c) for c in columns]
        return FeatureMatrix(tuple(columns), self.X[:, idx], self.y, self.match_ids,
                             self.seasons, self.dates, self.flags)

    def take(self, rows) -> "FeatureMatrix":
        rows = np.asarray(rows)
        if rows.dtype == bool:
            rows = np.flatnonzero(rows)
        return FeatureMatrix(
            self.columns, self.X[rows], self.y[rows],
            tuple(self.match_ids[i] for i in rows), self.seasons[rows],
            tuple(self.dates[i] for i in rows), tuple(self.flags[i] for i in rows),
        )

    def where_season(self, seasons) -> "FeatureMatrix":
        return self.take(np.isin(self.seasons, list(seasons)))

    def hstack(self, other: "FeatureMatrix") -> "FeatureMatrix":
        """Join columns of two matrices over their common match ids (order of ``self``)."""
        pos = {m: i for i, m in enumerate(other.match_ids)}
        keep = [i for i, m in enumerate(self.match_ids) if m in pos]
        left = self.take(keep)
        right = other.X[[pos[m] for m in left.match_ids]]
        flags = tuple(
            ";".join(f for f in (a, other.flags[pos[m]]) if f)
            for a, m in zip(left.flags, left.match_ids)
        )
        return FeatureMatrix(left.columns + other.columns, np.hstack([left.X, right]), left.y,
                             left.match_ids, left.seasons, left.dates, flags)

    def to_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["match_id", "season", "date", "label", *self.columns])
            for i, mid in enumerate(self.match_ids):
                w.writerow([mid, int(self.seasons[i]), self.dates[i].isoformat(), int(self.y[i]),
                            *(repr(float(v)) for v in self.X[i])])
        return path

    @classmethod
    def from_csv(cls, path) -> "FeatureMatrix":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
        columns = tuple(header[4:])
        return cls(
            columns=columns,
            X=np.array([[float(v) for v in r[4:]] for r in rows], dtype=float).reshape(len(rows), len(columns)),
            y=np.array([int(r[3]) for r in rows], dtype=np.int64),
            match_ids=tuple(r[0] for r in rows),
            seasons=np.array([int(r[1]) for r in rows], dtype=np.int64),
            dates=tuple(dt.date.fromisoformat(r[2]) for r in rows),
        )
