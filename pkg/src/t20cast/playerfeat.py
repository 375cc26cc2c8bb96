"""Player-derived features: batting groups by lineup position, ranked bowling slots,
combination indices and home-minus-away differences, with new-player imputation."""

from __future__ import annotations

import datetime as dt
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import BattingLine, Corpus
from .features import FeatureMatrix, safe_div

log = logging.getLogger(__name__)

SIDES = ("home", "away")

BATTING_GROUPS: tuple[tuple[str, tuple[int, ...]], ...] = (
    *((f"p{i}", (i,)) for i in range(1, 12)),
    *((f"top{k}", tuple(range(1, k + 1))) for k in range(2, 11)),
    ("all11", tuple(range(1, 12))),
    ("p5to8", (5, 6, 7, 8)),
    ("p4to6", (4, 5, 6)),
    ("p7to9", (7, 8, 9)),
    ("p3to4", (3, 4)),
    ("p5to6", (5, 6)),
    ("p7to8", (7, 8)),
    ("p9to10", (9, 10)),
)
BOWLING_GROUPS: tuple[tuple[str, tuple[int, ...]], ...] = (
    *((f"s{i}", (i,)) for i in range(1, 7)),
    *((f"top{k}", tuple(range(1, k + 1))) for k in range(2, 6)),
    ("all6", tuple(range(1, 7))),
)
BATTING_STATS = ("avg", "sr")
BOWLING_STATS = ("avg", "econ", "sr")
BATTING_COMBOS = ("sky", "prod")  # avg + sr, avg * sr
BOWLING_COMBOS = ("sky", "prod3", "sum2", "prod2")  # A+E+S, A*E*S, A+E, A*E
_BOWL_ATTR = {"avg": "average", "econ": "economy", "sr": "strike_rate"}

assert len(BATTING_GROUPS) == 28 and len({g for g, _ in BATTING_GROUPS}) == 28
assert len(BOWLING_GROUPS) == 11 and len({g for g, _ in BOWLING_GROUPS}) == 11


@dataclass(frozen=True)
class BattingStats:
    average: float
    strike_rate: float


@dataclass(frozen=True)
class BowlingStats:
    average: float
    economy: float
    strike_rate: float

    def get(self, statistic: str) -> float:
        return getattr(self, _BOWL_ATTR.get(statistic, statistic))


@dataclass(frozen=True)
class BattingTally:
    runs: float = 0.0
    outs: float = 0.0
    balls: float = 0.0

    def __add__(self, other: "BattingTally") -> "BattingTally":
        return BattingTally(self.runs + other.runs, self.outs + other.outs, self.balls + other.balls)

    def stats(self) -> BattingStats:
        return BattingStats(safe_div(self.runs, self.outs), 100 * safe_div(self.runs, self.balls))


def bowling_stats(balls: float, runs: float, wickets: float) -> BowlingStats:
    return BowlingStats(
        average=safe_div(runs, wickets),
        economy=6 * safe_div(runs, balls),
        strike_rate=safe_div(balls, wickets),
    )


@dataclass(frozen=True)
class PlayerConfig:
    new_player_games: int = 4
    min_balls: int = 24
    # fallback constants when no prior-season data exists at all
    fallback_batting_average: float = 20.0
    fallback_batting_strike_rate: float = 110.0
    fallback_bowling_average: float = 28.0
    fallback_bowling_economy: float = 8.0
    fallback_bowling_strike_rate: float = 21.0
    diff_mode: str = "batting_average"  # or "all_level1"

    def __post_init__(self):
        if self.diff_mode not in ("batting_average", "all_level1"):
            raise ValueError(f"diff_mode must be 'batting_average' or 'all_level1', got {self.diff_mode!r}")

    def fallback_batting_tally(self) -> BattingTally:
        avg, sr = self.fallback_batting_average, self.fallback_batting_strike_rate
        return BattingTally(runs=avg, outs=1.0, balls=100 * avg / sr)

    def fallback_bowling(self) -> BowlingStats:
        return BowlingStats(self.fallback_bowling_average, self.fallback_bowling_economy,
                            self.fallback_bowling_strike_rate)


# ---------------------------------------------------------------------------
# career index


class PlayerIndex:
    """Per-player chronological prefix sums over included matches."""

    def __init__(self, corpus: Corpus):
        inc = corpus.included
        self.corpus = inc
        self._overseas = {pid: p.overseas for pid, p in corpus.players.items()}
        order = {m.match_id: i for i, m in enumerate(inc.matches)}
        ordinal = {m.match_id: m.date.toordinal() for m in inc.matches}

        bat: dict[str, list] = defaultdict(list)
        for b in inc.batting:
            bat[b.player_id].append((order[b.match_id], ordinal[b.match_id], b.runs, int(b.dismissed), b.balls_faced))
        bowl: dict[str, list] = defaultdict(list)
        for b in inc.bowling:
            bowl[b.player_id].append((order[b.match_id], ordinal[b.match_id], b.balls_bowled, b.runs_conceded, b.wickets))

        self._bat = {pid: self._prefix(rows) for pid, rows in bat.items()}
        self._bowl = {pid: self._prefix(rows) for pid, rows in bowl.items()}

        self.lineups: dict[str, dict[str, list[BattingLine]]] = {}
        for mid, lines in inc.batting_by_match.items():
            per_team: dict[str, list[BattingLine]] = defaultdict(list)
            for b in lines:
                per_team[b.team].append(b)
            self.lineups[mid] = {t: sorted(ls, key=lambda b: b.position) for t, ls in per_team.items()}

        # squad of bowlers per (team, season) for the slot imputation table
        season_of = {m.match_id: m.season for m in inc.matches}
        self.bowlers_by_team_season: dict[tuple[str, int], set[str]] = defaultdict(set)
        for b in inc.bowling:
            self.bowlers_by_team_season[(b.team, season_of[b.match_id])].add(b.player_id)

    @staticmethod
    def _prefix(rows):
        rows.sort()
        arr = np.array(rows, dtype=np.int64)
        dates = arr[:, 1]
        cum = np.vstack([np.zeros((1, 3), np.int64), np.cumsum(arr[:, 2:], axis=0)])
        return dates, cum

    def is_overseas(self, pid: str) -> bool:
        return bool(self._overseas.get(pid, False))

    def batting_before(self, pid: str, as_of: dt.date) -> tuple[int, BattingTally]:
        """(prior appearances, career batting tally) strictly before ``as_of``."""
        entry = self._bat.get(pid)
        if entry is None:
            return 0, BattingTally()
        dates, cum = entry
        k = int(np.searchsorted(dates, as_of.toordinal(), side="left"))
        r, o, b = (int(v) for v in cum[k])
        return k, BattingTally(r, o, b)

    def bowling_before(self, pid: str, as_of: dt.date) -> tuple[int, int, int]:
        """(balls, runs conceded, wickets) strictly before ``as_of``."""
        entry = self._bowl.get(pid)
        if entry is None:
            return 0, 0, 0
        dates, cum = entry
        k = int(np.searchsorted(dates, as_of.toordinal(), side="left"))
        balls, runs, wkts = (int(v) for v in cum[k])
        return balls, runs, wkts

    def lineup(self, match_id: str, team: str) -> list[BattingLine] | None:
        """The team's batting XI for the match, or None if it is not a clean 1-11 lineup."""
        lines = self.lineups.get(match_id, {}).get(team)
        if not lines or sorted(b.position for b in lines) != list(range(1, 12)):
            return None
        return lines


# ---------------------------------------------------------------------------
# imputation


@dataclass(frozen=True)
class ImputationTable:
    """Values substituted for new batsmen and unfilled bowling slots in ``year``.

    Batting cells hold per-innings mean tallies of new players (fewer than
    ``new_player_games`` prior games) split by overseas/homegrown and batting
    position, pooled over every season before ``year``.
    """

    year: int
    batting_cells: Mapping[tuple[str, int], BattingTally]
    bowling_slots: Mapping[int, BowlingStats]
    sources: Mapping[tuple[str, int], str] = field(default_factory=dict)

    def batting_tally(self, player_class: str, position: int) -> BattingTally:
        return self.batting_cells[(player_class, position)]

    def batting(self, player_class: str, position: int) -> BattingStats:
        return self.batting_tally(player_class, position).stats()

    def bowling(self, slot: int) -> BowlingStats:
        return self.bowling_slots[slot]


class ImputationBook:
    """Builds and caches one ImputationTable per season."""

    def __init__(self, pindex: PlayerIndex, config: PlayerConfig = PlayerConfig()):
        self.pindex = pindex
        self.config = config
        self._tables: dict[int, ImputationTable] = {}
        inc = pindex.corpus
        season_of = {m.match_id: m.season for m in inc.matches}
        date_of = {m.match_id: m.date for m in inc.matches}

        # innings by players who were new at the time
        newcomer = []
        for b in inc.batting:
            prior, _ = pindex.batting_before(b.player_id, date_of[b.match_id])
            if prior < config.new_player_games:
                cls = "overseas" if pindex.is_overseas(b.player_id) else "homegrown"
                newcomer.append((season_of[b.match_id], cls, b.position, b.runs, int(b.dismissed), b.balls_faced))
        self._newcomer = newcomer

        # ranked bowling values of each (team, season) squad at season end
        self._slot_entries: list[tuple[int, dict[str, list[float]]]] = []
        for (team, season), squad in sorted(pindex.bowlers_by_team_season.items()):
            season_end = dt.date(season + 1, 1, 1)
            ranked = rank_bowlers(pindex, sorted(squad), season_end, config.min_balls)
            if ranked:
                self._slot_entries.append((season, {s: [v for v, _, _ in ranked[s]] for s in BOWLING_STATS}))

    def table(self, year: int) -> ImputationTable:
        if year not in self._tables:
            self._tables[year] = self._build(year)
        return self._tables[year]

    def _build(self, year: int) -> ImputationTable:
        cfg = self.config
        sums: dict[tuple[str, int], list[int]] = defaultdict(lambda: [0, 0, 0, 0])
        for season, cls, pos, runs, out, balls in self._newcomer:
            if season >= year:
                continue
            for key in ((cls, pos), ("any", pos)):
                acc = sums[key]
                acc[0] += runs
                acc[1] += out
                acc[2] += balls
                acc[3] += 1

        def per_innings(key):
            r, o, b, n = sums[key]
            return BattingTally(r / n, o / n, b / n)

        cells, sources = {}, {}
        for cls in ("overseas", "homegrown"):
            for pos in range(1, 12):
                if sums.get((cls, pos), [0, 0, 0, 0])[3] > 0:
                    cells[(cls, pos)], sources[(cls, pos)] = per_innings((cls, pos)), "class_position"
                elif sums.get(("any", pos), [0, 0, 0, 0])[3] > 0:
                    cells[(cls, pos)], sources[(cls, pos)] = per_innings(("any", pos)), "position"
                else:
                    cells[(cls, pos)], sources[(cls, pos)] = cfg.fallback_batting_tally(), "constant"

        slot_sum = {s: [0.0] * 6 for s in BOWLING_STATS}
        slot_n = {s: [0] * 6 for s in BOWLING_STATS}
        for season, values in self._slot_entries:
            if season >= year:
                continue
            for s in BOWLING_STATS:
                for k, v in enumerate(values[s][:6]):
                    slot_sum[s][k] += v
                    slot_n[s][k] += 1
        fallback = cfg.fallback_bowling()
        slots = {}
        for k in range(6):
            vals = {
                s: slot_sum[s][k] / slot_n[s][k] if slot_n[s][k] else fallback.get(s)
                for s in BOWLING_STATS
            }
            slots[k + 1] = BowlingStats(vals["avg"], vals["econ"], vals["sr"])
        return ImputationTable(year, cells, slots, sources)


def build_imputation_table(corpus: Corpus, up_to_year: int, config: PlayerConfig = PlayerConfig()) -> ImputationTable:
    """Imputation values for ``up_to_year`` built only from earlier seasons."""
    return ImputationBook(PlayerIndex(corpus), config).table(up_to_year)


# ---------------------------------------------------------------------------
# level 1


def player_class(pindex: PlayerIndex, pid: str) -> str:
    return "overseas" if pindex.is_overseas(pid) else "homegrown"


def batting_contributions(pindex: PlayerIndex, lineup: Sequence[BattingLine], as_of: dt.date,
                          imputation: ImputationTable, new_player_games: int = 4) -> dict[int, BattingTally]:
    """Tally each lineup position contributes to group pooling; new players
    are replaced by their imputation cell."""
    out = {}
    for b in lineup:
        prior, tally = pindex.batting_before(b.player_id, as_of)
        if prior < new_player_games:
            tally = imputation.batting_tally(player_class(pindex, b.player_id), b.position)
        out[b.position] = tally
    return out


def batting_group_stats(pindex: PlayerIndex, lineup: Sequence[BattingLine], group, as_of: dt.date,
                        imputation: ImputationTable, new_player_games: int = 4) -> BattingStats:
    """Pooled average and strike rate of the lineup positions in ``group``
    (a group name such as ``"top3"`` or an explicit position tuple)."""
    positions = dict(BATTING_GROUPS)[group] if isinstance(group, str) else tuple(group)
    contrib = batting_contributions(pindex, lineup, as_of, imputation, new_player_games)
    total = BattingTally()
    for p in positions:
        total = total + contrib[p]
    return total.stats()


def rank_bowlers(pindex: PlayerIndex, players: Sequence[str], as_of: dt.date,
                 min_balls: int = 24) -> dict[str, list[tuple[float, int, str]]]:
    """Eligible bowlers sorted best-first per statistic.

    Lower is better for all three statistics; ties go to the bowler with more
    career balls, then to the smaller player id.
    """
    careers = []
    for pid in players:
        balls, runs, wkts = pindex.bowling_before(pid, as_of)
        if balls >= min_balls:
            careers.append((pid, balls, bowling_stats(balls, runs, wkts)))
    ranked = {}
    for s in BOWLING_STATS:
        entries = [(st.get(s), -balls, pid) for pid, balls, st in careers]
        entries.sort()
        ranked[s] = entries
    return ranked if careers else {}


def bowling_slot_stats(pindex: PlayerIndex, players: Sequence[str], as_of: dt.date, statistic: str,
                       imputation: ImputationTable, min_balls: int = 24) -> list[float]:
    """Six slot values for ``statistic`` ("avg", "econ" or "sr"), best first;
    empty slots take the league per-slot value."""
    if statistic not in BOWLING_STATS:
        raise ValueError(f"statistic must be one of {BOWLING_STATS}, got {statistic!r}")
    ranked = rank_bowlers(pindex, players, as_of, min_balls)
    values = [v for v, _, _ in ranked.get(statistic, [])][:6]
    for slot in range(len(values) + 1, 7):
        values.append(imputation.bowling(slot).get(statistic))
    return values


# ---------------------------------------------------------------------------
# level 2 / 3


def batting_combos(stats: BattingStats) -> dict[str, float]:
    return {"sky": stats.average + stats.strike_rate, "prod": stats.average * stats.strike_rate}


def bowling_combos(stats: BowlingStats) -> dict[str, float]:
    a, e, s = stats.average, stats.economy, stats.strike_rate
    return {"sky": a + e + s, "prod3": a * e * s, "sum2": a + e, "prod2": a * e}


@dataclass
class TeamPlayerLevel1:
    batting: dict[str, BattingStats]
    bowling: dict[str, BowlingStats]

    def values(self) -> dict[str, float]:
        out = {}
        for g, _ in BATTING_GROUPS:
            out[f"bat_{g}_avg"] = self.batting[g].average
            out[f"bat_{g}_sr"] = self.batting[g].strike_rate
        for g, _ in BOWLING_GROUPS:
            for s in BOWLING_STATS:
                out[f"bowl_{g}_{s}"] = self.bowling[g].get(s)
        return out

    def combos(self) -> dict[str, float]:
        out = {}
        for g, _ in BATTING_GROUPS:
            for k, v in batting_combos(self.batting[g]).items():
                out[f"bat_{g}_{k}"] = v
        for g, _ in BOWLING_GROUPS:
            for k, v in bowling_combos(self.bowling[g]).items():
                out[f"bowl_{g}_{k}"] = v
        return out


def team_player_level1(pindex: PlayerIndex, lineup: Sequence[BattingLine], as_of: dt.date,
                       imputation: ImputationTable, config: PlayerConfig = PlayerConfig()) -> TeamPlayerLevel1:
    contrib = batting_contributions(pindex, lineup, as_of, imputation, config.new_player_games)
    batting = {}
    for g, positions in BATTING_GROUPS:
        total = BattingTally()
        for p in positions:
            total = total + contrib[p]
        batting[g] = total.stats()
    players = [b.player_id for b in lineup]
    slots = {s: bowling_slot_stats(pindex, players, as_of, s, imputation, config.min_balls) for s in BOWLING_STATS}
    bowling = {}
    for g, group_slots in BOWLING_GROUPS:
        vals = {s: sum(slots[s][k - 1] for k in group_slots) / len(group_slots) for s in BOWLING_STATS}
        bowling[g] = BowlingStats(vals["avg"], vals["econ"], vals["sr"])
    return TeamPlayerLevel1(batting, bowling)


def player_level2_features(home: TeamPlayerLevel1, away: TeamPlayerLevel1,
                           diff_mode: str = "batting_average") -> dict[str, float]:
    """Difference features plus each side's combination metrics."""
    out = {}
    if diff_mode == "batting_average":
        for g, _ in BATTING_GROUPS:
            out[f"diff_bat_{g}_avg"] = home.batting[g].average - away.batting[g].average
    else:
        hv, av = home.values(), away.values()
        for k in hv:
            out[f"diff_{k}"] = hv[k] - av[k]
    for side, lvl in (("home", home), ("away", away)):
        for k, v in lvl.combos().items():
            out[f"{side}_{k}"] = v
    return out


def player_level3_features(home_combos: Mapping[str, float], away_combos: Mapping[str, float]) -> dict[str, float]:
    return {f"diff_{k}": home_combos[k] - away_combos[k] for k in home_combos}


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class FeatureInfo:
    level: int
    side: str
    kind: str  # "bat" or "bowl"
    group: str
    statistic: str


def _per_team_level1():
    for g, _ in BATTING_GROUPS:
        for s in BATTING_STATS:
            yield "bat", g, s
    for g, _ in BOWLING_GROUPS:
        for s in BOWLING_STATS:
            yield "bowl", g, s


def _per_team_combos():
    for g, _ in BATTING_GROUPS:
        for s in BATTING_COMBOS:
            yield "bat", g, s
    for g, _ in BOWLING_GROUPS:
        for s in BOWLING_COMBOS:
            yield "bowl", g, s


def player_feature_registry(diff_mode: str = "batting_average") -> dict[str, FeatureInfo]:
    """Ordered column name -> (level, side, kind, group, statistic)."""
    reg: dict[str, FeatureInfo] = {}
    for side in SIDES:
        for kind, g, s in _per_team_level1():
            reg[f"{side}_{kind}_{g}_{s}"] = FeatureInfo(1, side, kind, g, s)
    if diff_mode == "batting_average":
        for g, _ in BATTING_GROUPS:
            reg[f"diff_bat_{g}_avg"] = FeatureInfo(2, "diff", "bat", g, "avg")
    else:
        for kind, g, s in _per_team_level1():
            reg[f"diff_{kind}_{g}_{s}"] = FeatureInfo(2, "diff", kind, g, s)
    for side in SIDES:
        for kind, g, s in _per_team_combos():
            reg[f"{side}_{kind}_{g}_{s}"] = FeatureInfo(2, side, kind, g, s)
    for kind, g, s in _per_team_combos():
        reg[f"diff_{kind}_{g}_{s}"] = FeatureInfo(3, "diff", kind, g, s)
    return reg


PLAYER_COLUMNS = tuple(player_feature_registry())


def write_registry(path, diff_mode: str = "batting_average") -> Path:
    path = Path(path)
    reg = {
        name: {"level": i.level, "side": i.side, "kind": i.kind, "group": i.group, "statistic": i.statistic}
        for name, i in player_feature_registry(diff_mode).items()
    }
    path.write_text(json.dumps(reg, indent=1) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# rows and matrix


def player_feature_row(pindex: PlayerIndex, home_lineup: Sequence[BattingLine], away_lineup: Sequence[BattingLine],
                       as_of: dt.date, imputation: ImputationTable,
                       config: PlayerConfig = PlayerConfig()) -> dict[str, float]:
    home = team_player_level1(pindex, home_lineup, as_of, imputation, config)
    away = team_player_level1(pindex, away_lineup, as_of, imputation, config)
    row = {}
    for side, lvl in (("home", home), ("away", away)):
        for k, v in lvl.values().items():
            row[f"{side}_{k}"] = v
    row.update(player_level2_features(home, away, config.diff_mode))
    row.update(player_level3_features(home.combos(), away.combos()))
    return row


class PlayerFeatureBuilder:
    """Computes player feature rows for any fixture against one corpus."""

    def __init__(self, corpus: Corpus, config: PlayerConfig = PlayerConfig()):
        self.config = config
        self.pindex = PlayerIndex(corpus)
        self.book = ImputationBook(self.pindex, config)
        self.columns = tuple(player_feature_registry(config.diff_mode))

    def row(self, home_lineup, away_lineup, as_of: dt.date, season: int) -> dict[str, float]:
        return player_feature_row(self.pindex, home_lineup, away_lineup, as_of, self.book.table(season), self.config)


def build_player_matrix(corpus: Corpus, config: PlayerConfig = PlayerConfig()) -> FeatureMatrix:
    """One row per included match whose two lineups are complete."""
    builder = PlayerFeatureBuilder(corpus, config)
    pindex = builder.pindex
    rows, keep = [], []
    for m in pindex.corpus.matches:
        home_xi = pindex.lineup(m.match_id, m.home_team)
        away_xi = pindex.lineup(m.match_id, m.away_team)
        if home_xi is None or away_xi is None:
            log.warning("match %s: lineup not derivable (need 11 batting lines per side); row skipped", m.match_id)
            continue
        values = builder.row(home_xi, away_xi, m.date, m.season)
        rows.append([values[c] for c in builder.columns])
        keep.append(m)
    return FeatureMatrix(
        columns=builder.columns,
        X=np.array(rows, dtype=float).reshape(len(rows), len(builder.columns)),
        y=np.array([int(m.home_won) for m in keep], dtype=np.int64),
        match_ids=tuple(m.match_id for m in keep),
        seasons=np.array([m.season for m in keep], dtype=np.int64),
        dates=tuple(m.date for m in keep),
    )
