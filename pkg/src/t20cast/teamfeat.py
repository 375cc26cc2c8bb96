"""Hierarchical team features: base statistics, net features and home-minus-away differences."""

from __future__ import annotations

import datetime as dt
from dataclasses import asdict, dataclass

import numpy as np

from .corpus import Corpus, MatchIndex, TeamTotals
from .features import FeatureMatrix, safe_div

LEVEL1_STATS = (
    "win_pct",
    "batting_run_rate",
    "bowling_economy",
    "batting_avg",
    "bowling_avg",
    "batting_wicket_rate",
    "bowling_strike_rate",
    "batting_index",
    "bowling_index",
)
LEVEL2_STATS = ("net_run_rate", "net_avg", "net_wicket_rate", "net_index")
LEVEL3_STATS = ("win_diff", "run_rate_diff", "avg_diff", "wicket_rate_diff", "index_diff")
SIDES = ("home", "away")


class InsufficientHistory(LookupError):
    """Raised when a team has no prior games to compute statistics from."""


@dataclass(frozen=True)
class TeamLevel1:
    win_pct: float
    batting_run_rate: float
    bowling_economy: float
    batting_avg: float
    bowling_avg: float
    batting_wicket_rate: float
    bowling_strike_rate: float
    batting_index: float
    bowling_index: float
    floored: bool = False

    @classmethod
    def from_totals(cls, t: TeamTotals) -> "TeamLevel1":
        if t.games == 0:
            raise InsufficientHistory("no games to pool")
        run_rate = 6 * safe_div(t.runs_for, t.balls_for)
        economy = 6 * safe_div(t.runs_against, t.balls_against)
        bat_avg = safe_div(t.runs_for, t.wickets_lost)
        bowl_avg = safe_div(t.runs_against, t.wickets_taken)
        floored = 0 in (t.balls_for, t.balls_against, t.wickets_lost, t.wickets_taken)
        return cls(
            win_pct=t.wins / t.games,
            batting_run_rate=run_rate,
            bowling_economy=economy,
            batting_avg=bat_avg,
            bowling_avg=bowl_avg,
            batting_wicket_rate=safe_div(t.wickets_lost, t.balls_for),
            bowling_strike_rate=safe_div(t.wickets_taken, t.balls_against),
            batting_index=run_rate * bat_avg,
            bowling_index=economy * bowl_avg,
            floored=floored,
        )


@dataclass(frozen=True)
class TeamLevel2:
    net_run_rate: float
    net_avg: float
    net_wicket_rate: float
    net_index: float


@dataclass(frozen=True)
class TeamLevel3:
    win_diff: float
    run_rate_diff: float
    avg_diff: float
    wicket_rate_diff: float
    index_diff: float


# Used when the league itself has no history yet: two innings of 150/6 off 20 overs.
COLD_START_TOTALS = TeamTotals(
    games=2, wins=1, runs_for=300, balls_for=240, wickets_lost=12,
    runs_against=300, balls_against=240, wickets_taken=12,
)


def team_level1(source, team: str, as_of: dt.date, window="all") -> TeamLevel1:
    """Pooled base statistics over the team's games before ``as_of``.

    Raises InsufficientHistory when there are none.
    """
    index = source.index if isinstance(source, Corpus) else source
    return TeamLevel1.from_totals(index.totals_before(team, as_of, window))


def team_level2(l1: TeamLevel1) -> TeamLevel2:
    return TeamLevel2(
        net_run_rate=l1.batting_run_rate - l1.bowling_economy,
        net_avg=l1.batting_avg - l1.bowling_avg,
        # wickets taken minus wickets lost, so bigger is better like the other nets
        net_wicket_rate=l1.bowling_strike_rate - l1.batting_wicket_rate,
        net_index=l1.batting_index - l1.bowling_index,
    )


def team_level3(home_l1: TeamLevel1, home_l2: TeamLevel2, away_l1: TeamLevel1, away_l2: TeamLevel2) -> TeamLevel3:
    return TeamLevel3(
        win_diff=home_l1.win_pct - away_l1.win_pct,
        run_rate_diff=home_l2.net_run_rate - away_l2.net_run_rate,
        avg_diff=home_l2.net_avg - away_l2.net_avg,
        wicket_rate_diff=home_l2.net_wicket_rate - away_l2.net_wicket_rate,
        index_diff=home_l2.net_index - away_l2.net_index,
    )


# ---------------------------------------------------------------------------
# feature registry

LEVEL1_COLUMNS = tuple(f"{side}_{s}" for s in LEVEL1_STATS for side in SIDES)
LEVEL2_COLUMNS = tuple(f"{side}_{s}" for s in LEVEL2_STATS for side in SIDES)
LEVEL3_COLUMNS = LEVEL3_STATS
ALL_TEAM_COLUMNS = LEVEL1_COLUMNS + LEVEL2_COLUMNS + LEVEL3_COLUMNS

TEAM_FEATURE_LEVEL = {
    **{c: 1 for c in LEVEL1_COLUMNS},
    **{c: 2 for c in LEVEL2_COLUMNS},
    **{c: 3 for c in LEVEL3_COLUMNS},
}


def _paired(*stats):
    return tuple(f"{side}_{s}" for s in stats for side in SIDES)


FEATURE_SETS: dict[int, tuple[str, ...]] = {
    1: _paired("win_pct", "batting_run_rate", "bowling_economy", "batting_avg", "bowling_avg",
               "batting_wicket_rate", "bowling_strike_rate"),
    2: _paired("win_pct", "batting_run_rate", "bowling_economy", "batting_avg", "bowling_avg",
               "batting_wicket_rate", "bowling_strike_rate", "batting_index", "bowling_index"),
    3: _paired("win_pct", "net_run_rate", "net_avg", "net_wicket_rate"),
    4: _paired("win_pct", "net_run_rate", "net_avg", "net_wicket_rate", "net_index"),
    5: ("win_diff", "run_rate_diff", "avg_diff", "wicket_rate_diff"),
    6: ("win_diff", "run_rate_diff", "avg_diff", "wicket_rate_diff", "index_diff"),
}


def feature_set_columns(feature_set) -> tuple[str, ...]:
    if feature_set == "all":
        return ALL_TEAM_COLUMNS
    try:
        return FEATURE_SETS[int(feature_set)]
    except (KeyError, ValueError):
        raise ValueError(f"unknown team feature set {feature_set!r}; valid sets are 1-6 or 'all'") from None


# ---------------------------------------------------------------------------
# rows and matrices


@dataclass(frozen=True)
class TeamConfig:
    window: int | str = "all"
    min_history: int = 4
    impute: str = "league_mean"  # or "drop"

    def __post_init__(self):
        if self.impute not in ("league_mean", "drop"):
            raise ValueError(f"impute must be 'league_mean' or 'drop', got {self.impute!r}")
        if self.window != "all" and int(self.window) < 1:
            raise ValueError("window must be >= 1 or 'all'")
        if self.min_history < 0:
            raise ValueError("min_history must be >= 0")


def league_level1(index: MatchIndex, as_of: dt.date) -> TeamLevel1:
    totals = index.league_totals_before(as_of)
    return TeamLevel1.from_totals(totals if totals.games else COLD_START_TOTALS)


def team_feature_row(index: MatchIndex, home: str, away: str, as_of: dt.date,
                     config: TeamConfig = TeamConfig()) -> tuple[dict[str, float], list[str]]:
    """All 31 team features for a fixture, using only games before ``as_of``."""
    flags = []
    level1 = {}
    for side, team in (("home", home), ("away", away)):
        if index.n_before(team, as_of, config.window) < max(config.min_history, 1):
            level1[side] = league_level1(index, as_of)
            flags.append(f"{side}_imputed")
        else:
            level1[side] = team_level1(index, team, as_of, config.window)
            if level1[side].floored:
                flags.append(f"{side}_floored")
    level2 = {side: team_level2(level1[side]) for side in SIDES}
    level3 = team_level3(level1["home"], level2["home"], level1["away"], level2["away"])

    row: dict[str, float] = {}
    for s in LEVEL1_STATS:
        for side in SIDES:
            row[f"{side}_{s}"] = getattr(level1[side], s)
    for s in LEVEL2_STATS:
        for side in SIDES:
            row[f"{side}_{s}"] = getattr(level2[side], s)
    row.update(asdict(level3))
    return row, flags


def build_team_matrix(corpus: Corpus, feature_set=6, window="all", min_history: int = 4,
                      impute: str = "league_mean") -> FeatureMatrix:
    """One row per included match with the columns of ``feature_set`` (1-6 or "all")."""
    columns = feature_set_columns(feature_set)
    config = TeamConfig(window=window, min_history=min_history, impute=impute)
    index = corpus.index
    rows, keep, flags = [], [], []
    for m in index.matches:
        values, row_flags = team_feature_row(index, m.home_team, m.away_team, m.date, config)
        if config.impute == "drop" and any(f.endswith("_imputed") for f in row_flags):
            continue
        rows.append([values[c] for c in columns])
        keep.append(m)
        flags.append(";".join(row_flags))
    return FeatureMatrix(
        columns=columns,
        X=np.array(rows, dtype=float).reshape(len(rows), len(columns)),
        y=np.array([int(m.home_won) for m in keep], dtype=np.int64),
        match_ids=tuple(m.match_id for m in keep),
        seasons=np.array([m.season for m in keep], dtype=np.int64),
        dates=tuple(m.date for m in keep),
        flags=tuple(flags),
    )


def home_advantage_by_season(corpus: Corpus) -> dict[int, float]:
    """Fraction of included matches won by the home side, per season."""
    wins: dict[int, int] = {}
    games: dict[int, int] = {}
    for m in corpus.included.matches:
        games[m.season] = games.get(m.season, 0) + 1
        wins[m.season] = wins.get(m.season, 0) + int(m.home_won)
    return {s: wins[s] / games[s] for s in sorted(games)}
