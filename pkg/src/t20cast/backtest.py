"""Rolling-season backtests, accuracy bookkeeping and the bookmaker-favourite benchmark."""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Corpus, MatchRecord, OddsRecord
from .features import FeatureMatrix
from .learn import ModelSpec, fit, predict_proba
from .playerfeat import PlayerConfig, build_player_matrix
from .teamfeat import build_team_matrix

log = logging.getLogger(__name__)


class SplitError(ValueError):
    """A test season cannot be evaluated (e.g. no earlier data to train on)."""


# ---------------------------------------------------------------------------
# features


@dataclass(frozen=True)
class FeatureConfig:
    """Which design matrix to build.

    kind: "team" (one of the six sets, or "all"), "player" (the 506 player
    columns) or "combined" (team set plus player columns). ``columns``
    optionally restricts the result to a named subset.
    """

    kind: str = "team"
    team_set: int | str = 6
    window: int | str = "all"
    min_history: int = 4
    impute: str = "league_mean"
    columns: tuple[str, ...] | None = None
    player: PlayerConfig = PlayerConfig()

    def __post_init__(self):
        if self.kind not in ("team", "player", "combined"):
            raise ValueError(f"feature kind must be team, player or combined, got {self.kind!r}")
        if self.columns is not None:
            object.__setattr__(self, "columns", tuple(self.columns))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["columns"] = list(self.columns) if self.columns is not None else None
        return d


def build_feature_matrix(corpus: Corpus, config: FeatureConfig) -> FeatureMatrix:
    if config.kind == "player":
        matrix = build_player_matrix(corpus, config.player)
    else:
        matrix = build_team_matrix(corpus, config.team_set, config.window, config.min_history, config.impute)
        if config.kind == "combined":
            matrix = matrix.hstack(build_player_matrix(corpus, config.player))
    if config.columns is not None:
        matrix = matrix.select(config.columns)
    return matrix


# ---------------------------------------------------------------------------
# splits


@dataclass(frozen=True)
class SplitPair:
    test_season: int
    train_seasons: tuple[int, ...]
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]


@dataclass(frozen=True)
class SplitPlan:
    pairs: tuple[SplitPair, ...]
    window_policy: int | str = "all"

    def to_dict(self) -> dict:
        return {
            "window_policy": self.window_policy,
            "pairs": [{"test_season": p.test_season, "train_seasons": list(p.train_seasons),
                       "n_train": len(p.train_ids), "n_test": len(p.test_ids)} for p in self.pairs],
        }


def _matches_of(matchset) -> list[MatchRecord]:
    if isinstance(matchset, Corpus):
        return list(matchset.included.matches)
    return sorted(matchset, key=lambda m: m.sort_key)


def rolling_splits(matchset, test_seasons: Iterable[int], window_policy: int | str = "all") -> SplitPlan:
    """Train on earlier seasons (all of them, or the last ``window_policy``), test on each season."""
    matches = _matches_of(matchset)
    by_season: dict[int, list[MatchRecord]] = {}
    for m in matches:
        by_season.setdefault(m.season, []).append(m)
    if window_policy != "all" and int(window_policy) < 1:
        raise ValueError("window policy must be 'all' or a positive season count")
    pairs = []
    for season in sorted(set(int(s) for s in test_seasons)):
        if season not in by_season:
            raise SplitError(f"test season {season} has no included matches")
        prior = [s for s in sorted(by_season) if s < season]
        if window_policy != "all":
            prior = prior[-int(window_policy):]
        if not prior:
            raise SplitError(f"test season {season} has no earlier season to train on")
        train = [m for s in prior for m in by_season[s]]
        test = by_season[season]
        pairs.append(SplitPair(season, tuple(prior), tuple(m.match_id for m in train),
                               tuple(m.match_id for m in test)))
    return SplitPlan(tuple(pairs), window_policy)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class MatchPrediction:
    match_id: str
    season: int
    date: dt.date
    p_home: float
    predicted: int
    actual: int

    @property
    def correct(self) -> bool:
        return self.predicted == self.actual


def cumulative_accuracy(records: Sequence) -> list[float]:
    """Running accuracy: element k is correct-among-first-(k+1) / (k+1).

    Accepts MatchPrediction-like records or plain booleans, in date order.
    """
    out, hits = [], 0
    for k, r in enumerate(records, start=1):
        hits += int(r if isinstance(r, (bool, np.bool_)) else r.correct)
        out.append(hits / k)
    return out


@dataclass
class SeasonBenchmark:
    season: int
    included: int
    scored: int
    correct: int

    @property
    def coverage(self) -> float:
        return self.scored / self.included if self.included else 0.0

    @property
    def accuracy(self) -> float | None:
        return self.correct / self.scored if self.scored else None


@dataclass
class Benchmark:
    seasons: dict[int, SeasonBenchmark]
    # match_id -> did the favourite win (only scored matches)
    favourite_correct: dict[str, bool]

    def to_dict(self) -> dict:
        return {
            str(s): {"accuracy": b.accuracy, "coverage": b.coverage, "scored": b.scored,
                     "included": b.included, "correct": b.correct}
            for s, b in sorted(self.seasons.items())
        }

    def overall(self) -> float | None:
        scored = sum(b.scored for b in self.seasons.values())
        return sum(b.correct for b in self.seasons.values()) / scored if scored else None


def odds_benchmark(matchset, odds: Mapping[str, OddsRecord]) -> Benchmark:
    """How often the side with strictly shorter decimal odds won.

    Matches with missing or equal odds are skipped and lower the coverage.
    """
    seasons: dict[int, SeasonBenchmark] = {}
    fav: dict[str, bool] = {}
    for m in _matches_of(matchset):
        sb = seasons.setdefault(m.season, SeasonBenchmark(m.season, 0, 0, 0))
        sb.included += 1
        o = odds.get(m.match_id)
        if o is None or o.home_odds == o.away_odds:
            continue
        home_fav = o.home_odds < o.away_odds
        ok = home_fav == m.home_won
        sb.scored += 1
        sb.correct += int(ok)
        fav[m.match_id] = ok
    return Benchmark(dict(sorted(seasons.items())), fav)


@dataclass
class BacktestReport:
    config: dict
    predictions: list[MatchPrediction]
    benchmark: Benchmark | None = None

    def season_accuracy(self) -> dict[int, float]:
        out: dict[int, list[int]] = {}
        for p in self.predictions:
            acc = out.setdefault(p.season, [0, 0])
            acc[0] += int(p.correct)
            acc[1] += 1
        return {s: c / n for s, (c, n) in sorted(out.items())}

    def overall_accuracy(self) -> float:
        if not self.predictions:
            raise ValueError("report has no predictions")
        return sum(p.correct for p in self.predictions) / len(self.predictions)

    def cumulative(self) -> dict[int, list[float]]:
        series: dict[int, list[MatchPrediction]] = {}
        for p in sorted(self.predictions, key=lambda p: (p.date, p.match_id)):
            series.setdefault(p.season, []).append(p)
        return {s: cumulative_accuracy(v) for s, v in sorted(series.items())}

    def to_dict(self) -> dict:
        seasons = {}
        for s, acc in self.season_accuracy().items():
            n = sum(1 for p in self.predictions if p.season == s)
            seasons[str(s)] = {"accuracy": acc, "n": n, "correct": sum(p.correct for p in self.predictions if p.season == s)}
        doc = {
            "config": self.config,
            "seasons": seasons,
            "overall": {"accuracy": self.overall_accuracy(), "n": len(self.predictions),
                        "correct": sum(p.correct for p in self.predictions)},
            "predictions": [
                {"match_id": p.match_id, "season": p.season, "date": p.date.isoformat(), "p_home": p.p_home,
                 "predicted": p.predicted, "actual": p.actual, "correct": p.correct}
                for p in self.predictions
            ],
            "cumulative": {str(s): v for s, v in self.cumulative().items()},
            "benchmark": None,
        }
        if self.benchmark is not None:
            doc["benchmark"] = {"seasons": self.benchmark.to_dict(),
                                "comparison": compare(self, self.benchmark, strict=False).to_dict()}
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: Mapping) -> "BacktestReport":
        preds = [
            MatchPrediction(p["match_id"], int(p["season"]), dt.date.fromisoformat(p["date"]),
                            float(p["p_home"]), int(p["predicted"]), int(p["actual"]))
            for p in d["predictions"]
        ]
        return cls(dict(d["config"]), preds)

    def write_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["match_id", "season", "date", "p_home", "predicted", "actual", "correct"])
            for p in self.predictions:
                w.writerow([p.match_id, p.season, p.date.isoformat(), repr(p.p_home), p.predicted, p.actual,
                            int(p.correct)])
        return path


def run_backtest(corpus: Corpus, feature_config: FeatureConfig, model_spec: ModelSpec, split_plan: SplitPlan,
                 matrix: FeatureMatrix | None = None, with_benchmark: bool = True) -> BacktestReport:
    """Fit on each pair's training seasons and predict its test season.

    Every feature row is computed as-of its own match date, so a single matrix
    serves all pairs without leaking later results.
    """
    if matrix is None:
        matrix = build_feature_matrix(corpus, feature_config)
    row_of = {m: i for i, m in enumerate(matrix.match_ids)}
    predictions: list[MatchPrediction] = []
    for pair in split_plan.pairs:
        train_rows = [row_of[m] for m in pair.train_ids if m in row_of]
        test_rows = [row_of[m] for m in pair.test_ids if m in row_of]
        if not train_rows or not test_rows:
            raise SplitError(f"test season {pair.test_season}: no usable feature rows "
                             f"(train={len(train_rows)}, test={len(test_rows)})")
        train = matrix.take(train_rows)
        test = matrix.take(test_rows)
        try:
            model = fit(model_spec, train)
        except Exception as exc:
            raise RuntimeError(f"training failed for test season {pair.test_season} "
                               f"(train seasons {list(pair.train_seasons)}): {exc}") from exc
        p = predict_proba(model, test)
        for i, mid in enumerate(test.match_ids):
            predictions.append(MatchPrediction(mid, int(test.seasons[i]), test.dates[i], float(p[i]),
                                               int(p[i] >= 0.5), int(test.y[i])))
        log.info("season %d: accuracy %.3f over %d matches", pair.test_season,
                 np.mean([q.correct for q in predictions if q.season == pair.test_season]), len(test_rows))

    config = {
        "features": feature_config.to_dict(),
        "model": model_spec.to_dict(),
        "splits": split_plan.to_dict(),
        "seed": int(model_spec.seed),
        "n_rows": len(matrix),
        "columns": list(matrix.columns),
    }
    bench = None
    if with_benchmark and corpus.odds:
        tested = {p.match_id for p in predictions}
        bench = odds_benchmark([m for m in corpus.included.matches if m.match_id in tested], corpus.odds)
    return BacktestReport(config, predictions, bench)


# ---------------------------------------------------------------------------
# comparison


@dataclass
class ComparisonRow:
    season: int
    model_accuracy: float
    favourite_accuracy: float | None
    difference: float | None
    n: int


@dataclass
class Comparison:
    paired: list[ComparisonRow]
    all_matches: list[ComparisonRow]

    def to_dict(self) -> dict:
        return {"paired": [asdict(r) for r in self.paired], "all_matches": [asdict(r) for r in self.all_matches]}


def compare(report: BacktestReport, benchmark: Benchmark, strict: bool = True) -> Comparison:
    """Model vs favourite accuracy per season.

    The paired view scores both on exactly the matches the benchmark covers;
    the all-matches view uses every prediction for the model column.
    """
    by_season: dict[int, list[MatchPrediction]] = {}
    for p in report.predictions:
        by_season.setdefault(p.season, []).append(p)
    overlap = sorted(set(by_season) & set(benchmark.seasons))
    if strict and not overlap:
        raise ValueError("report and benchmark share no season")
    paired, unpaired = [], []
    for s in overlap:
        preds = by_season[s]
        sb = benchmark.seasons[s]
        model_acc = sum(p.correct for p in preds) / len(preds)
        unpaired.append(ComparisonRow(s, model_acc, sb.accuracy,
                                      None if sb.accuracy is None else model_acc - sb.accuracy, len(preds)))
        covered = [p for p in preds if p.match_id in benchmark.favourite_correct]
        if not covered:
            continue
        m_acc = sum(p.correct for p in covered) / len(covered)
        f_acc = sum(benchmark.favourite_correct[p.match_id] for p in covered) / len(covered)
        paired.append(ComparisonRow(s, m_acc, f_acc, m_acc - f_acc, len(covered)))
    return Comparison(paired, unpaired)


# ---------------------------------------------------------------------------
# plot-ready series


def write_series(path, rows: Iterable[tuple], header=("season", "x", "value")) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return path


def cumulative_series(report: BacktestReport, benchmark: Benchmark | None = None) -> list[tuple]:
    """(season, k, model running accuracy, favourite running accuracy or '') rows."""
    rows = []
    ordered = sorted(report.predictions, key=lambda p: (p.date, p.match_id))
    for season in sorted({p.season for p in ordered}):
        preds = [p for p in ordered if p.season == season]
        model = cumulative_accuracy(preds)
        fav_hits = fav_n = 0
        for k, (p, acc) in enumerate(zip(preds, model), start=1):
            fav = ""
            if benchmark is not None and p.match_id in benchmark.favourite_correct:
                fav_n += 1
                fav_hits += int(benchmark.favourite_correct[p.match_id])
            if benchmark is not None and fav_n:
                fav = fav_hits / fav_n
            rows.append((season, k, acc, fav))
    return rows
