"""Feature scoring (Pearson, mutual information, chi-square), per-season stability,
quantile bucketing and greedy backward feature elimination."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .features import FeatureMatrix

METRICS = ("pearson", "mutual_information", "chi_square_p")
# extra metric: the chi-square statistic itself, reported next to its p-value on request
EXTRA_METRICS = ("chi_square",)


class UndefinedScore(ValueError):
    """The score is mathematically undefined for this input (e.g. constant vector)."""


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise UndefinedScore("need at least 2 observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedScore("zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


@dataclass(frozen=True)
class Buckets:
    codes: np.ndarray
    edges: np.ndarray
    degenerate: bool

    def apply(self, x) -> np.ndarray:
        """Bucket new values with the same edges (boundary ties go low)."""
        return np.searchsorted(self.edges, np.asarray(x, dtype=float), side="left")


def bucketize(x, bins: int = 5) -> Buckets:
    """Equal-frequency bins; a value equal to an edge falls in the lower bin."""
    if bins < 2:
        raise ValueError("bins must be >= 2")
    x = np.asarray(x, dtype=float)
    n = x.size
    if n == 0:
        return Buckets(np.zeros(0, dtype=np.int64), np.zeros(0), True)
    xs = np.sort(x)
    # edge k is the ceil(k*n/bins)-th smallest value
    ranks = [-(-k * n // bins) - 1 for k in range(1, bins)]
    edges = np.unique(xs[ranks])
    edges = edges[edges < xs[-1]]
    codes = np.searchsorted(edges, x, side="left").astype(np.int64)
    return Buckets(codes, edges, degenerate=bool(xs[0] == xs[-1]))


def _joint_table(xb, yb) -> np.ndarray:
    xb = np.asarray(xb)
    yb = np.asarray(yb)
    if xb.shape != yb.shape:
        raise ValueError(f"length mismatch: {xb.shape} vs {yb.shape}")
    _, xi = np.unique(xb, return_inverse=True)
    _, yi = np.unique(yb, return_inverse=True)
    table = np.zeros((xi.max(initial=-1) + 1, yi.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (xi.ravel(), yi.ravel()), 1)
    return table


def mutual_information(xb, yb) -> float:
    """Mutual information in bits of the empirical joint distribution."""
    table = _joint_table(xb, yb).astype(float)
    n = table.sum()
    if n == 0:
        return 0.0
    px = table.sum(axis=1) / n
    py = table.sum(axis=0) / n
    mi = 0.0
    for i in range(table.shape[0]):
        for j in range(table.shape[1]):
            if table[i, j] > 0:
                pij = table[i, j] / n
                mi += pij * math.log2(pij / (px[i] * py[j]))
    return max(mi, 0.0)


# regularized incomplete gamma -------------------------------------------------

_EPS = 1e-16


def _gamma_p_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(10_000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_contfrac(a: float, x: float) -> float:
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma function Q(a, x)."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _gamma_p_series(a, x))
    return _gamma_q_contfrac(a, x)


def chi2_sf(statistic: float, df: int) -> float:
    return gamma_q(df / 2.0, statistic / 2.0)


def chi_square(xb, yb) -> tuple[float, float]:
    """Pearson chi-square test of independence on the K x 2 contingency table.

    Returns (statistic, p_value). Empty rows/columns are dropped first; a table
    with fewer than two rows or columns left is undefined.
    """
    table = _joint_table(xb, yb).astype(float)
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    if table.shape[0] < 2 or table.shape[1] < 2:
        raise UndefinedScore("contingency table is degenerate")
    n = table.sum()
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / n
    stat = float(((table - expected) ** 2 / expected).sum())
    df = (table.shape[0] - 1) * (table.shape[1] - 1)
    return stat, chi2_sf(stat, df)


def score_feature(x, y, metric: str, bins: int = 5) -> float:
    if metric == "pearson":
        return pearson(x, y)
    xb = bucketize(x, bins)
    if xb.degenerate:
        raise UndefinedScore("constant feature")
    if metric == "mutual_information":
        if np.unique(np.asarray(y)).size < 2:
            raise UndefinedScore("constant label")
        return mutual_information(xb.codes, y)
    if metric == "chi_square_p":
        return chi_square(xb.codes, y)[1]
    if metric == "chi_square":
        return chi_square(xb.codes, y)[0]
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


@dataclass(frozen=True)
class FeatureScore:
    feature: str
    metric: str
    per_year: Mapping[int, float | None]
    mean: float | None
    variance: float | None


def summarize(per_year: Mapping[int, float | None]) -> tuple[float | None, float | None]:
    """Mean and population variance over the defined yearly values."""
    vals = [v for v in per_year.values() if v is not None]
    if not vals:
        return None, None
    mean = sum(vals) / len(vals)
    var = sum((v - mean) ** 2 for v in vals) / len(vals)
    return mean, var


def score_by_year(matrix: FeatureMatrix, metric: str = "pearson", bins: int = 5) -> dict[str, FeatureScore]:
    """Score every feature within each season separately."""
    if metric not in METRICS + EXTRA_METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS + EXTRA_METRICS}")
    seasons = sorted(set(int(s) for s in matrix.seasons))
    if len(seasons) < 2:
        raise ValueError("per-season scoring needs at least 2 seasons")
    masks = {s: matrix.seasons == s for s in seasons}
    out = {}
    for j, name in enumerate(matrix.columns):
        per_year: dict[int, float | None] = {}
        for s in seasons:
            x = matrix.X[masks[s], j]
            y = matrix.y[masks[s]]
            try:
                per_year[s] = score_feature(x, y, metric, bins)
            except UndefinedScore:
                per_year[s] = None
        mean, var = summarize(per_year)
        out[name] = FeatureScore(name, metric, per_year, mean, var)
    return out


def write_scores(scores: Sequence[FeatureScore], path) -> Path:
    path = Path(path)
    years = sorted({y for s in scores for y in s.per_year})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature", "metric", "mean", "variance", *years])
        for s in scores:
            fmt = lambda v: "" if v is None else f"{v:.12g}"
            w.writerow([s.feature, s.metric, fmt(s.mean), fmt(s.variance),
                        *(fmt(s.per_year.get(y)) for y in years)])
    return path


def shortlist(scores: Mapping[str, FeatureScore], top: int) -> list[str]:
    """Most relevant features first, undefined scores last.

    Pearson and MI rank by descending |mean|; chi-square p-values ascending.
    """
    def key(s):
        if s.mean is None:
            return (1, 0.0, s.feature)
        return (0, s.mean if s.metric == "chi_square_p" else -abs(s.mean), s.feature)

    ranked = sorted(scores.values(), key=key)
    return [s.feature for s in ranked[:top]]


# ---------------------------------------------------------------------------
# recursive feature elimination


@dataclass(frozen=True)
class RFETrace:
    eliminated: tuple[str, ...]  # removal order; the last entry is the survivor
    sizes: tuple[int, ...]
    accuracies: tuple[float, ...]
    subsets: tuple[tuple[str, ...], ...]
    selected: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "eliminated": list(self.eliminated),
            "steps": [
                {"size": n, "accuracy": a, "features": list(f)}
                for n, a, f in zip(self.sizes, self.accuracies, self.subsets)
            ],
            "selected": list(self.selected),
        }


def _abs_pearson(matrix: FeatureMatrix, name: str) -> float:
    try:
        return abs(pearson(matrix.column(name), matrix.y))
    except UndefinedScore:
        return 0.0


def rfe(matrix: FeatureMatrix, model_spec=None, eval_protocol: str = "loso",
        evaluate: Callable[[FeatureMatrix], float] | None = None) -> RFETrace:
    """Greedy backward elimination.

    Subsets are scored with ``evaluate`` (a column-restricted matrix -> accuracy);
    by default that is ``eval_protocol`` accuracy of ``model_spec``. Each step drops
    the feature whose removal leaves the best accuracy; ties drop the feature
    with the weaker |Pearson| correlation, then the later name.
    """
    if matrix.n_features < 2:
        raise ValueError("feature elimination needs at least 2 features")
    if evaluate is None:
        from .learn import evaluate_accuracy

        if model_spec is None:
            raise ValueError("pass a model_spec or an evaluate callable")
        evaluate = lambda m: evaluate_accuracy(m, model_spec, eval_protocol)
    current = list(matrix.columns)
    strength = {c: _abs_pearson(matrix, c) for c in current}
    subsets = [tuple(current)]
    accuracies = [evaluate(matrix)]
    eliminated = []
    while len(current) > 1:
        best = None
        for name in current:
            remaining = [c for c in current if c != name]
            try:
                acc = evaluate(matrix.select(remaining))
            except Exception as exc:
                raise RuntimeError(f"evaluation failed at size {len(remaining)} without {name!r}: {exc}") from exc
            key = (acc, -strength[name], name)
            if best is None or key > best[0]:
                best = (key, name, acc)
        _, name, acc = best
        current.remove(name)
        eliminated.append(name)
        subsets.append(tuple(current))
        accuracies.append(acc)
    eliminated.append(current[0])
    top = max(accuracies)
    # largest index with the best accuracy = smallest subset
    pick = max(i for i, a in enumerate(accuracies) if a == top)
    return RFETrace(tuple(eliminated), tuple(len(s) for s in subsets), tuple(accuracies),
                    tuple(subsets), subsets[pick])


def write_rfe_trace(trace: RFETrace, path, extra: Mapping | None = None) -> Path:
    path = Path(path)
    doc = trace.to_json()
    if extra:
        doc = {**extra, **doc}
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return path
