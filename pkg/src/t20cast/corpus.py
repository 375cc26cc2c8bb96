"""Match, scorecard and odds data: loading, validation and chronological lookup."""

from __future__ import annotations

import csv
import datetime as dt
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field, fields
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

log = logging.getLogger(__name__)

STAGES = ("group", "quarter_final", "semi_final", "finals_day")
OUTCOMES = ("home_win", "away_win", "tie", "no_result")

# default allowance for extras (byes, wides, ...) per innings
EXTRAS_SLACK = 30

FILE_NAMES = {
    "matches": "matches.csv",
    "batting": "batting.csv",
    "bowling": "bowling.csv",
    "players": "players.csv",
    "odds": "odds.csv",
}


class CorpusError(ValueError):
    """Base class for data problems."""


class SchemaError(CorpusError):
    def __init__(self, path, line: int, column: str, message: str):
        self.path = str(path)
        self.line = line
        self.column = column
        super().__init__(f"{self.path}:{line}: column {column!r}: {message}")


class IntegrityError(CorpusError):
    pass


class ValidationError(CorpusError):
    def __init__(self, findings: Sequence[str]):
        self.findings = list(findings)
        body = "\n".join(f"  - {f}" for f in self.findings)
        super().__init__(f"{len(self.findings)} validation finding(s):\n{body}")


@dataclass(frozen=True)
class MatchRecord:
    match_id: str
    season: int
    date: dt.date
    stage: str
    home_team: str
    away_team: str
    outcome: str
    home_runs: int
    home_balls: int
    home_wickets_lost: int
    away_runs: int
    away_balls: int
    away_wickets_lost: int

    @property
    def sort_key(self) -> tuple[dt.date, str]:
        return (self.date, self.match_id)

    @property
    def home_won(self) -> bool:
        return self.outcome == "home_win"

    def swapped(self) -> "MatchRecord":
        """Same fixture with the home/away labels exchanged."""
        flip = {"home_win": "away_win", "away_win": "home_win"}
        return MatchRecord(
            match_id=self.match_id,
            season=self.season,
            date=self.date,
            stage=self.stage,
            home_team=self.away_team,
            away_team=self.home_team,
            outcome=flip.get(self.outcome, self.outcome),
            home_runs=self.away_runs,
            home_balls=self.away_balls,
            home_wickets_lost=self.away_wickets_lost,
            away_runs=self.home_runs,
            away_balls=self.home_balls,
            away_wickets_lost=self.home_wickets_lost,
        )


@dataclass(frozen=True)
class BattingLine:
    match_id: str
    team: str
    player_id: str
    position: int
    runs: int
    balls_faced: int
    dismissed: bool


@dataclass(frozen=True)
class BowlingLine:
    match_id: str
    team: str
    player_id: str
    balls_bowled: int
    runs_conceded: int
    wickets: int


@dataclass(frozen=True)
class PlayerProfile:
    player_id: str
    overseas: bool


@dataclass(frozen=True)
class OddsRecord:
    match_id: str
    home_odds: float
    away_odds: float


@dataclass(frozen=True, eq=True)
class Corpus:
    """Immutable bundle of all loaded tables.

    ``matches`` is kept sorted by (date, match_id); ties and no-results stay
    in here and are only dropped by :func:`filter_matches`.
    """

    matches: tuple[MatchRecord, ...] = ()
    batting: tuple[BattingLine, ...] = ()
    bowling: tuple[BowlingLine, ...] = ()
    players: Mapping[str, PlayerProfile] = field(default_factory=dict)
    odds: Mapping[str, OddsRecord] = field(default_factory=dict)

    def __post_init__(self):
        ordered = tuple(sorted(self.matches, key=lambda m: m.sort_key))
        object.__setattr__(self, "matches", ordered)
        object.__setattr__(self, "batting", tuple(self.batting))
        object.__setattr__(self, "bowling", tuple(self.bowling))
        object.__setattr__(self, "players", dict(self.players))
        object.__setattr__(self, "odds", dict(self.odds))

    def __hash__(self):
        return hash(self.matches)

    @cached_property
    def by_id(self) -> dict[str, MatchRecord]:
        return {m.match_id: m for m in self.matches}

    @cached_property
    def batting_by_match(self) -> dict[str, list[BattingLine]]:
        out: dict[str, list[BattingLine]] = defaultdict(list)
        for line in self.batting:
            out[line.match_id].append(line)
        return dict(out)

    @cached_property
    def bowling_by_match(self) -> dict[str, list[BowlingLine]]:
        out: dict[str, list[BowlingLine]] = defaultdict(list)
        for line in self.bowling:
            out[line.match_id].append(line)
        return dict(out)

    @cached_property
    def included(self) -> "Corpus":
        return filter_matches(self)

    @cached_property
    def index(self) -> "MatchIndex":
        """History index over the *included* matches."""
        return MatchIndex(self.included.matches)

    @property
    def seasons(self) -> list[int]:
        return sorted({m.season for m in self.matches})

    def is_overseas(self, player_id: str) -> bool:
        profile = self.players.get(player_id)
        return bool(profile and profile.overseas)

    def restrict(self, match_ids: Iterable[str]) -> "Corpus":
        keep = set(match_ids)
        return Corpus(
            matches=tuple(m for m in self.matches if m.match_id in keep),
            batting=tuple(b for b in self.batting if b.match_id in keep),
            bowling=tuple(b for b in self.bowling if b.match_id in keep),
            players=self.players,
            odds={k: v for k, v in self.odds.items() if k in keep},
        )

    def truncate(self, before: dt.date) -> "Corpus":
        """Everything dated strictly before ``before``."""
        return self.restrict(m.match_id for m in self.matches if m.date < before)


# ---------------------------------------------------------------------------
# overs notation


def overs_to_balls(overs) -> int:
    """Convert cricket overs notation ("12.3" = 12 overs and 3 balls) to balls."""
    text = str(overs).strip()
    whole, _, frac = text.partition(".")
    if not whole.isdigit() or not (frac == "" or (frac.isdigit() and len(frac) == 1)):
        raise ValueError(f"invalid overs value {overs!r}")
    extra = int(frac or 0)
    if extra > 5:
        raise ValueError(f"invalid overs value {overs!r}: ball count {extra} exceeds 5")
    return int(whole) * 6 + extra


def balls_to_overs(balls: int) -> str:
    return f"{balls // 6}.{balls % 6}"


# ---------------------------------------------------------------------------
# CSV parsing

_MATCH_COLUMNS = [
    "match_id", "season", "date", "stage", "home_team", "away_team", "outcome",
    "home_runs", "home_balls", "home_wickets", "away_runs", "away_balls", "away_wickets",
]
_BATTING_COLUMNS = ["match_id", "team", "player_id", "position", "runs", "balls_faced", "dismissed"]
_BOWLING_COLUMNS = ["match_id", "team", "player_id", "balls_bowled", "runs_conceded", "wickets"]
_PLAYER_COLUMNS = ["player_id", "overseas"]
_ODDS_COLUMNS = ["match_id", "home_odds", "away_odds"]


class _Row:
    """Field accessor that turns conversion failures into SchemaErrors."""

    def __init__(self, path, line, raw):
        self.path, self.line, self.raw = path, line, raw

    def _fail(self, col, msg):
        raise SchemaError(self.path, self.line, col, msg)

    def text(self, col) -> str:
        value = (self.raw.get(col) or "").strip()
        if not value:
            self._fail(col, "missing value")
        return value

    def int(self, col) -> int:
        value = self.text(col)
        try:
            return int(value)
        except ValueError:
            self._fail(col, f"expected integer, got {value!r}")

    def float(self, col) -> float:
        value = self.text(col)
        try:
            out = float(value)
        except ValueError:
            self._fail(col, f"expected number, got {value!r}")
        if not math.isfinite(out):
            self._fail(col, f"non-finite value {value!r}")
        return out

    def flag(self, col) -> bool:
        value = self.text(col)
        if value not in ("0", "1"):
            self._fail(col, f"expected 0 or 1, got {value!r}")
        return value == "1"

    def choice(self, col, options) -> str:
        value = self.text(col)
        if value not in options:
            self._fail(col, f"expected one of {'|'.join(options)}, got {value!r}")
        return value

    def date(self, col) -> dt.date:
        value = self.text(col)
        try:
            return dt.date.fromisoformat(value)
        except ValueError:
            self._fail(col, f"expected YYYY-MM-DD, got {value!r}")


def _read_rows(path: Path, columns: Sequence[str]):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in columns if c not in header]
        if missing:
            raise SchemaError(path, 1, missing[0], "column missing from header")
        for raw in reader:
            # DictReader counts physical lines, header included
            row = _Row(path, reader.line_num, raw)
            if None in raw:
                raise SchemaError(path, reader.line_num, "<extra>", "too many fields")
            yield row


def _parse_match(r: _Row) -> MatchRecord:
    return MatchRecord(
        match_id=r.text("match_id"),
        season=r.int("season"),
        date=r.date("date"),
        stage=r.choice("stage", STAGES),
        home_team=r.text("home_team"),
        away_team=r.text("away_team"),
        outcome=r.choice("outcome", OUTCOMES),
        home_runs=r.int("home_runs"),
        home_balls=r.int("home_balls"),
        home_wickets_lost=r.int("home_wickets"),
        away_runs=r.int("away_runs"),
        away_balls=r.int("away_balls"),
        away_wickets_lost=r.int("away_wickets"),
    )


def _resolve_paths(paths) -> dict[str, Path]:
    if isinstance(paths, (str, Path)):
        root = Path(paths)
        if root.is_dir():
            return {k: root / v for k, v in FILE_NAMES.items() if (root / v).exists()}
        return {"matches": root}
    if isinstance(paths, Mapping):
        return {k: Path(v) for k, v in paths.items()}
    resolved = {}
    for p in paths:
        p = Path(p)
        kind = next((k for k, v in FILE_NAMES.items() if p.name == v), None)
        if kind is None:
            raise CorpusError(f"cannot tell which table {p} holds; expected one of {sorted(FILE_NAMES.values())}")
        resolved[kind] = p
    return resolved


def load_corpus(paths) -> Corpus:
    """Load a corpus from a directory, a list of csv paths or a ``{table: path}`` mapping.

    Only ``matches.csv`` is mandatory. Batting/bowling/odds rows must refer to a
    known match id.
    """
    files = _resolve_paths(paths)
    if "matches" not in files:
        raise CorpusError("matches.csv is required")
    for kind, path in files.items():
        if kind not in FILE_NAMES:
            raise CorpusError(f"unknown table {kind!r}")
        if not path.exists():
            raise CorpusError(f"{path}: file not found")

    matches = []
    seen = set()
    for r in _read_rows(files["matches"], _MATCH_COLUMNS):
        m = _parse_match(r)
        if m.match_id in seen:
            raise SchemaError(r.path, r.line, "match_id", f"duplicate match id {m.match_id!r}")
        seen.add(m.match_id)
        matches.append(m)

    def check_ref(r: _Row, match_id: str):
        if match_id not in seen:
            raise IntegrityError(f"{r.path}:{r.line}: match_id {match_id!r} does not exist in matches.csv")

    batting = []
    if "batting" in files:
        for r in _read_rows(files["batting"], _BATTING_COLUMNS):
            line = BattingLine(
                match_id=r.text("match_id"),
                team=r.text("team"),
                player_id=r.text("player_id"),
                position=r.int("position"),
                runs=r.int("runs"),
                balls_faced=r.int("balls_faced"),
                dismissed=r.flag("dismissed"),
            )
            check_ref(r, line.match_id)
            batting.append(line)

    bowling = []
    if "bowling" in files:
        for r in _read_rows(files["bowling"], _BOWLING_COLUMNS):
            line = BowlingLine(
                match_id=r.text("match_id"),
                team=r.text("team"),
                player_id=r.text("player_id"),
                balls_bowled=r.int("balls_bowled"),
                runs_conceded=r.int("runs_conceded"),
                wickets=r.int("wickets"),
            )
            check_ref(r, line.match_id)
            bowling.append(line)

    players = {}
    if "players" in files:
        for r in _read_rows(files["players"], _PLAYER_COLUMNS):
            pid = r.text("player_id")
            if pid in players:
                raise SchemaError(r.path, r.line, "player_id", f"duplicate player id {pid!r}")
            players[pid] = PlayerProfile(pid, r.flag("overseas"))

    odds = {}
    if "odds" in files:
        for r in _read_rows(files["odds"], _ODDS_COLUMNS):
            rec = OddsRecord(r.text("match_id"), r.float("home_odds"), r.float("away_odds"))
            check_ref(r, rec.match_id)
            for col, val in (("home_odds", rec.home_odds), ("away_odds", rec.away_odds)):
                if val <= 1.0:
                    raise SchemaError(r.path, r.line, col, f"decimal odds must exceed 1.0, got {val}")
            odds[rec.match_id] = rec

    return Corpus(tuple(matches), tuple(batting), tuple(bowling), players, odds)


def write_corpus(corpus: Corpus, directory) -> dict[str, Path]:
    """Write the corpus back out in the csv schemas :func:`load_corpus` reads."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = {}

    def dump(kind, header, rows):
        path = out / FILE_NAMES[kind]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        written[kind] = path

    dump("matches", _MATCH_COLUMNS, (
        [m.match_id, m.season, m.date.isoformat(), m.stage, m.home_team, m.away_team, m.outcome,
         m.home_runs, m.home_balls, m.home_wickets_lost, m.away_runs, m.away_balls, m.away_wickets_lost]
        for m in corpus.matches
    ))
    dump("batting", _BATTING_COLUMNS, (
        [b.match_id, b.team, b.player_id, b.position, b.runs, b.balls_faced, int(b.dismissed)]
        for b in corpus.batting
    ))
    dump("bowling", _BOWLING_COLUMNS, (
        [b.match_id, b.team, b.player_id, b.balls_bowled, b.runs_conceded, b.wickets]
        for b in corpus.bowling
    ))
    dump("players", _PLAYER_COLUMNS, (
        [p.player_id, int(p.overseas)] for p in sorted(corpus.players.values(), key=lambda p: p.player_id)
    ))
    if corpus.odds:
        dump("odds", _ODDS_COLUMNS, (
            [o.match_id, repr(o.home_odds), repr(o.away_odds)]
            for o in sorted(corpus.odds.values(), key=lambda o: o.match_id)
        ))
    return written


# ---------------------------------------------------------------------------
# inclusion rules


@dataclass(frozen=True)
class SeasonExclusions:
    season: int
    games: int
    finals_day: int
    tied: int
    no_result: int

    @property
    def included(self) -> int:
        return self.games - self.finals_day - self.tied - self.no_result


def _exclusion_reason(m: MatchRecord) -> str | None:
    if m.stage == "finals_day":
        return "finals_day"
    if m.outcome == "tie":
        return "tied"
    if m.outcome == "no_result":
        return "no_result"
    return None


def exclusion_report(corpus: Corpus) -> dict[int, SeasonExclusions]:
    """Per-season games and exclusion counts; each match lands in one bucket
    (finals day first, then tie, then no result)."""
    counts: dict[int, Counter] = defaultdict(Counter)
    for m in corpus.matches:
        c = counts[m.season]
        c["games"] += 1
        reason = _exclusion_reason(m)
        if reason:
            c[reason] += 1
    return {
        s: SeasonExclusions(s, c["games"], c["finals_day"], c["tied"], c["no_result"])
        for s, c in sorted(counts.items())
    }


def filter_matches(corpus: Corpus) -> Corpus:
    """Drop finals-day games, ties and no-results (and their scorecard rows)."""
    keep = [m.match_id for m in corpus.matches if _exclusion_reason(m) is None]
    if len(keep) == len(corpus.matches):
        return corpus
    for row in exclusion_report(corpus).values():
        log.debug(
            "season %d: %d games, excluded finals=%d tied=%d no_result=%d, included %d",
            row.season, row.games, row.finals_day, row.tied, row.no_result, row.included,
        )
    return corpus.restrict(keep)


# ---------------------------------------------------------------------------
# validation


def validate_corpus(corpus: Corpus, strict: bool = False, extras_slack: int = EXTRAS_SLACK) -> list[str]:
    """Check scorecard invariants; returns the findings, or raises in strict mode."""
    findings: list[str] = []
    for m in corpus.matches:
        where = f"match {m.match_id}"
        for side in ("home", "away"):
            runs = getattr(m, f"{side}_runs")
            balls = getattr(m, f"{side}_balls")
            wkts = getattr(m, f"{side}_wickets_lost")
            if not 0 <= wkts <= 10:
                findings.append(f"{where}: {side}_wickets {wkts} outside 0-10")
            if balls < 0:
                findings.append(f"{where}: {side}_balls {balls} negative")
            if runs < 0:
                findings.append(f"{where}: {side}_runs {runs} negative")
        if m.home_team == m.away_team:
            findings.append(f"{where}: team plays itself ({m.home_team})")
        if m.outcome == "tie" and m.home_runs != m.away_runs:
            findings.append(f"{where}: tie with unequal runs {m.home_runs} v {m.away_runs}")
        if m.date.year != m.season:
            findings.append(f"{where}: date {m.date} outside season {m.season}")

    for match_id, lines in corpus.batting_by_match.items():
        m = corpus.by_id[match_id]
        per_team: dict[str, list[BattingLine]] = defaultdict(list)
        for b in lines:
            per_team[b.team].append(b)
            if b.team not in (m.home_team, m.away_team):
                findings.append(f"match {match_id}: batting line for {b.player_id} names team {b.team} not in fixture")
            if not 1 <= b.position <= 11:
                findings.append(f"match {match_id}: {b.player_id} batting position {b.position} outside 1-11")
            if b.balls_faced < 0 or b.runs < 0:
                findings.append(f"match {match_id}: {b.player_id} negative runs/balls")
        for team, team_lines in per_team.items():
            dup = [p for p, n in Counter(b.position for b in team_lines).items() if n > 1]
            for p in dup:
                findings.append(f"match {match_id}: {team} has duplicate batting position {p}")
            if team == m.home_team:
                total = m.home_runs
            elif team == m.away_team:
                total = m.away_runs
            else:
                continue
            gap = total - sum(b.runs for b in team_lines)
            if not 0 <= gap <= extras_slack:
                findings.append(
                    f"match {match_id}: {team} batting lines sum to {total - gap}, innings total {total} "
                    f"(extras allowance 0-{extras_slack})"
                )

    for b in corpus.bowling:
        if not 0 <= b.wickets <= 10:
            findings.append(f"match {b.match_id}: bowler {b.player_id} wickets {b.wickets} outside 0-10")
        if b.balls_bowled < 0 or b.runs_conceded < 0:
            findings.append(f"match {b.match_id}: bowler {b.player_id} negative balls/runs")

    if strict and findings:
        raise ValidationError(findings)
    return findings


# ---------------------------------------------------------------------------
# chronological lookup


def _ordinal(d: dt.date) -> int:
    return d.toordinal()


@dataclass(frozen=True)
class TeamTotals:
    """Integer totals pooled over a run of games."""

    games: int = 0
    wins: int = 0
    runs_for: int = 0
    balls_for: int = 0
    wickets_lost: int = 0
    runs_against: int = 0
    balls_against: int = 0
    wickets_taken: int = 0


_TOTAL_FIELDS = [f.name for f in fields(TeamTotals)]


class MatchIndex:
    """Per-team chronological index with prefix sums, for O(log n) as-of lookups.

    Totals are integer prefix sums, so any window's pooled totals are exact and
    independent of how much later data the index holds.
    """

    def __init__(self, matches: Sequence[MatchRecord]):
        self.matches = tuple(sorted(matches, key=lambda m: m.sort_key))
        self._dates = np.array([_ordinal(m.date) for m in self.matches], dtype=np.int64)
        per_team: dict[str, list[tuple[int, list[int]]]] = defaultdict(list)
        # league totals over both innings of every match
        league_rows = []
        for i, m in enumerate(self.matches):
            home = [1, int(m.home_won), m.home_runs, m.home_balls, m.home_wickets_lost,
                    m.away_runs, m.away_balls, m.away_wickets_lost]
            away = [1, int(m.outcome == "away_win"), m.away_runs, m.away_balls, m.away_wickets_lost,
                    m.home_runs, m.home_balls, m.home_wickets_lost]
            per_team[m.home_team].append((i, home))
            per_team[m.away_team].append((i, away))
            league_rows.append([a + b for a, b in zip(home, away)])
        self._team_pos: dict[str, np.ndarray] = {}
        self._team_dates: dict[str, np.ndarray] = {}
        self._team_cum: dict[str, np.ndarray] = {}
        width = len(_TOTAL_FIELDS)
        for team, rows in per_team.items():
            pos = np.array([i for i, _ in rows], dtype=np.int64)
            vals = np.array([r for _, r in rows], dtype=np.int64).reshape(-1, width)
            self._team_pos[team] = pos
            self._team_dates[team] = self._dates[pos]
            self._team_cum[team] = np.vstack([np.zeros((1, width), np.int64), np.cumsum(vals, axis=0)])
        league = np.array(league_rows, dtype=np.int64).reshape(-1, width)
        self._league_cum = np.vstack([np.zeros((1, width), np.int64), np.cumsum(league, axis=0)])

    @property
    def teams(self) -> list[str]:
        return sorted(self._team_pos)

    def _span(self, team: str, as_of: dt.date, window) -> tuple[int, int]:
        dates = self._team_dates.get(team)
        if dates is None:
            return 0, 0
        end = int(np.searchsorted(dates, _ordinal(as_of), side="left"))
        if window == "all" or window is None:
            return 0, end
        if int(window) < 1:
            raise ValueError(f"window must be a positive integer or 'all', got {window!r}")
        return max(0, end - int(window)), end

    def history_before(self, team: str, as_of: dt.date, window="all") -> list[MatchRecord]:
        lo, hi = self._span(team, as_of, window)
        if hi == lo:
            return []
        return [self.matches[i] for i in self._team_pos[team][lo:hi]]

    def n_before(self, team: str, as_of: dt.date, window="all") -> int:
        lo, hi = self._span(team, as_of, window)
        return hi - lo

    def totals_before(self, team: str, as_of: dt.date, window="all") -> TeamTotals:
        lo, hi = self._span(team, as_of, window)
        if hi == lo:
            return TeamTotals()
        cum = self._team_cum[team]
        return TeamTotals(*(int(v) for v in cum[hi] - cum[lo]))

    def league_totals_before(self, as_of: dt.date) -> TeamTotals:
        """Pooled totals of every included match strictly before ``as_of``
        (each match contributes both sides' perspectives)."""
        end = int(np.searchsorted(self._dates, _ordinal(as_of), side="left"))
        return TeamTotals(*(int(v) for v in self._league_cum[end]))


def history_before(corpus: Corpus, team: str, as_of: dt.date, window="all") -> list[MatchRecord]:
    """The team's most recent ``window`` included matches dated strictly before
    ``as_of``, oldest first."""
    return corpus.index.history_before(team, as_of, window)
