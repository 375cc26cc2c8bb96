"""Synthetic multi-season corpora with known latent skills.

Outcomes are drawn from ``sigmoid(skill_home - skill_away + home_advantage)``;
scorecards are then built backwards from the drawn result so that every
table is internally consistent. Realism is secondary.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import NormalDist
from typing import Iterable, Mapping

import numpy as np

from .corpus import (
    BattingLine,
    BowlingLine,
    Corpus,
    MatchRecord,
    OddsRecord,
    PlayerProfile,
    write_corpus,
)


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    n_teams: int = 18
    seasons: tuple[int, ...] = tuple(range(2003, 2015))
    matches_per_team: int = 14
    home_advantage: float = 0.3
    team_skill_spread: float = 1.1
    skill_drift: float = 0.0
    player_skill_spread: float = 0.5
    overseas_boost: float = 0.6
    overseas_per_team: int = 2
    squad_size: int = 16
    turnover: int = 3
    anomaly_seasons: frozenset[int] = frozenset()
    # seasons where the skill gap acts in reverse (concept-drift stress test)
    flip_seasons: frozenset[int] = frozenset()
    tie_rate: float = 0.01
    no_result_rate: float = 0.03
    finals_day: bool = True
    odds_noise: float = 0.3
    overround: float = 0.05
    odds_from_season: int | None = None

    def __post_init__(self):
        if self.n_teams < 2:
            raise ValueError("n_teams must be >= 2")
        if self.team_skill_spread < 0 or self.player_skill_spread < 0 or self.skill_drift < 0:
            raise ValueError("spreads must be >= 0")
        if self.squad_size < 11:
            raise ValueError("squad_size must be >= 11")
        if not self.seasons:
            raise ValueError("at least one season is required")
        if not 0 <= self.tie_rate + self.no_result_rate < 1:
            raise ValueError("tie_rate + no_result_rate must lie in [0, 1)")
        object.__setattr__(self, "seasons", tuple(sorted(int(s) for s in self.seasons)))
        object.__setattr__(self, "anomaly_seasons", frozenset(int(s) for s in self.anomaly_seasons))
        object.__setattr__(self, "flip_seasons", frozenset(int(s) for s in self.flip_seasons))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seasons"] = list(self.seasons)
        d["anomaly_seasons"] = sorted(self.anomaly_seasons)
        d["flip_seasons"] = sorted(self.flip_seasons)
        return d


@dataclass
class GroundTruth:
    team_skill: dict[int, dict[str, float]] = field(default_factory=dict)
    player_skill: dict[str, dict[str, float]] = field(default_factory=dict)
    match_prob: dict[str, float] = field(default_factory=dict)
    match_season: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {
            "team_skill": {str(s): v for s, v in self.team_skill.items()},
            "player_skill": self.player_skill,
            "match_prob": self.match_prob,
            "match_season": self.match_season,
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GroundTruth":
        d = json.loads(text)
        return cls(
            team_skill={int(s): v for s, v in d["team_skill"].items()},
            player_skill=d["player_skill"],
            match_prob=d["match_prob"],
            match_season={k: int(v) for k, v in d["match_season"].items()},
        )


def bayes_ceiling(truth: GroundTruth | Mapping[str, float], match_ids: Iterable[str] | None = None) -> float:
    """Best achievable expected accuracy: mean of max(p, 1 - p)."""
    probs = truth.match_prob if isinstance(truth, GroundTruth) else truth
    ids = list(probs) if match_ids is None else list(match_ids)
    if not ids:
        raise ValueError("no matches")
    return sum(max(probs[m], 1.0 - probs[m]) for m in ids) / len(ids)


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@dataclass
class _Player:
    pid: str
    batting: float
    bowling: float
    overseas: bool


class _Generator:
    def __init__(self, config: GeneratorConfig):
        self.cfg = config
        self.rng = np.random.default_rng(np.random.SeedSequence(config.seed))
        self.teams = [f"T{i + 1:02d}" for i in range(config.n_teams)]
        self.truth = GroundTruth()
        self.players: dict[str, _Player] = {}
        self.squads: dict[str, list[str]] = {}
        # evenly spaced normal quantiles, shuffled: the realised spread (and so
        # the accuracy ceiling) does not swing with the seed
        nd = NormalDist(0.0, config.team_skill_spread) if config.team_skill_spread > 0 else None
        levels = [nd.inv_cdf((i + 0.5) / config.n_teams) if nd else 0.0 for i in range(config.n_teams)]
        order = self.rng.permutation(config.n_teams)
        self.skill = {t: float(levels[j]) for t, j in zip(self.teams, order)}
        self.matches: list[MatchRecord] = []
        self.batting: list[BattingLine] = []
        self.bowling: list[BowlingLine] = []
        self.odds: dict[str, OddsRecord] = {}

    def _new_player(self, overseas: bool) -> str:
        pid = f"P{len(self.players) + 1:05d}"
        spread = self.cfg.player_skill_spread
        boost = self.cfg.overseas_boost if overseas else 0.0
        self.players[pid] = _Player(
            pid,
            float(self.rng.normal(0.0, spread) + boost),
            float(self.rng.normal(0.0, spread) + boost),
            overseas,
        )
        return pid

    def _init_squads(self):
        for t in self.teams:
            n_over = min(self.cfg.overseas_per_team, self.cfg.squad_size)
            self.squads[t] = [self._new_player(i < n_over) for i in range(self.cfg.squad_size)]

    def _season_turnover(self):
        for t in self.teams:
            squad = self.squads[t]
            k = min(self.cfg.turnover, len(squad))
            leaving = sorted(self.rng.choice(len(squad), size=k, replace=False).tolist())
            for i in leaving:
                squad[i] = self._new_player(self.players[squad[i]].overseas)

    def _pick_xi(self, team: str) -> list[_Player]:
        squad = [self.players[p] for p in self.squads[team]]
        merit = np.array([p.batting + p.bowling for p in squad]) + self.rng.normal(0.0, 0.6, len(squad))
        xi = [squad[i] for i in np.argsort(-merit, kind="stable")[:11]]
        order = np.array([p.batting for p in xi]) + self.rng.normal(0.0, 0.4, 11)
        return [xi[i] for i in np.argsort(-order, kind="stable")]

    # scorecards ---------------------------------------------------------

    def _batting_lines(self, match_id, team, xi, runs, balls, wickets):
        rng = self.rng
        extras = int(min(runs, rng.integers(0, 17)))
        bat_runs = runs - extras
        batted = 0 if balls == 0 else (11 if wickets >= 10 else min(11, wickets + 2))
        run_split = np.zeros(11, dtype=np.int64)
        ball_split = np.zeros(11, dtype=np.int64)
        if batted:
            w = np.array([math.exp(0.8 * p.batting) * 0.9**i for i, p in enumerate(xi[:batted])])
            w = w * rng.gamma(2.0, 1.0, batted)
            w = w / w.sum()
            run_split[:batted] = rng.multinomial(bat_runs, w)
            share = 0.7 * (run_split[:batted] / max(bat_runs, 1)) + 0.3 / batted
            ball_split[:batted] = rng.multinomial(balls, share / share.sum())
        lines = []
        for i, p in enumerate(xi):
            lines.append(BattingLine(match_id, team, p.pid, i + 1, int(run_split[i]), int(ball_split[i]),
                                     dismissed=i < min(wickets, batted)))
        self.batting.extend(lines)

    def _bowling_lines(self, match_id, team, xi, runs, balls, wickets):
        if balls == 0:
            return
        rng = self.rng
        k = 5 if rng.random() < 0.5 else 6
        merit = np.array([p.bowling for p in xi]) + rng.normal(0.0, 0.4, 11)
        bowlers = [xi[i] for i in np.argsort(-merit, kind="stable")[:k]]
        overs, rem = divmod(balls, 6)
        quota = [0] * k
        j = 0
        for _ in range(overs):
            while quota[j % k] >= 24:
                j += 1
            quota[j % k] += 6
            j += 1
        if rem:
            while quota[j % k] >= 24:
                j += 1
            quota[j % k] += rem
        q = np.array(quota, dtype=float)
        run_w = q * np.exp(-0.5 * np.array([b.bowling for b in bowlers]))
        wkt_w = q * np.exp(0.5 * np.array([b.bowling for b in bowlers]))
        run_split = rng.multinomial(runs, run_w / run_w.sum())
        wkt_split = rng.multinomial(wickets, wkt_w / wkt_w.sum())
        for b, nb, r, w in zip(bowlers, quota, run_split, wkt_split):
            if nb > 0:
                self.bowling.append(BowlingLine(match_id, team, b.pid, int(nb), int(r), int(w)))

    def _innings_pair(self, outcome_first: str, s_first: float, s_second: float, xi_first, xi_second):
        """Totals (runs, balls, wickets) for the side batting first and second.

        ``outcome_first`` is 'win', 'loss', 'tie' or 'no_result' from the first
        batting side's perspective.
        """
        rng = self.rng
        players_edge = (np.mean([p.batting for p in xi_first]) - np.mean([p.bowling for p in xi_second]))
        r1 = int(np.clip(round(rng.normal(155 + 8 * (s_first - s_second) + 6 * players_edge, 20)), 70, 250))
        if rng.random() < 0.2:
            w1, b1 = 10, int(rng.integers(85, 121))
        else:
            w1, b1 = int(rng.integers(2, 10)), 120
        if outcome_first == "no_result":
            b1 = int(rng.integers(30, 121))
            r1 = int(round(r1 * b1 / 120))
            w1 = min(w1, int(rng.integers(0, 8)))
            b2 = int(rng.integers(0, 61))
            r2 = int(round(r1 / max(b1, 1) * b2 * rng.uniform(0.7, 1.2))) if b2 else 0
            w2 = int(rng.integers(0, 5)) if b2 else 0
            return (r1, b1, w1), (r2, b2, w2)
        if outcome_first == "win":
            r2 = max(0, r1 - 1 - int(rng.exponential(18)))
            if rng.random() < 0.4:
                w2, b2 = 10, int(rng.integers(80, 121))
            else:
                w2, b2 = int(rng.integers(3, 10)), 120
        elif outcome_first == "loss":
            r2 = r1 + int(rng.integers(1, 7))
            w2 = int(min(9, rng.poisson(4)))
            b2 = int(rng.integers(70, 121))
        else:  # tie
            r2 = r1
            w2, b2 = int(rng.integers(4, 11)), 120
        return (r1, b1, w1), (r2, b2, w2)

    # fixtures -----------------------------------------------------------

    def _play(self, match_id, season, date, stage, home, away, allow_draws: bool):
        cfg = self.cfg
        rng = self.rng
        ha = cfg.home_advantage * (-1.0 if season in cfg.anomaly_seasons else 1.0)
        gap = self.skill[home] - self.skill[away]
        if season in cfg.flip_seasons:
            gap = -gap
        p = _sigmoid(gap + (ha if stage != "finals_day" else 0.0))
        self.truth.match_prob[match_id] = p
        self.truth.match_season[match_id] = season

        u = rng.random()
        if allow_draws and u < cfg.no_result_rate:
            outcome = "no_result"
        elif allow_draws and u < cfg.no_result_rate + cfg.tie_rate:
            outcome = "tie"
        else:
            outcome = "home_win" if rng.random() < p else "away_win"

        xi = {home: self._pick_xi(home), away: self._pick_xi(away)}
        first, second = (home, away) if rng.random() < 0.5 else (away, home)
        if outcome in ("tie", "no_result"):
            res_first = outcome
        else:
            winner = home if outcome == "home_win" else away
            res_first = "win" if winner == first else "loss"
        inn1, inn2 = self._innings_pair(res_first, self.skill[first], self.skill[second], xi[first], xi[second])
        totals = {first: inn1, second: inn2}
        self.matches.append(MatchRecord(
            match_id=match_id, season=season, date=date, stage=stage,
            home_team=home, away_team=away, outcome=outcome,
            home_runs=totals[home][0], home_balls=totals[home][1], home_wickets_lost=totals[home][2],
            away_runs=totals[away][0], away_balls=totals[away][1], away_wickets_lost=totals[away][2],
        ))
        for bat, bowl in ((first, second), (second, first)):
            runs, balls, wkts = totals[bat]
            self._batting_lines(match_id, bat, xi[bat], runs, balls, wkts)
            self._bowling_lines(match_id, bowl, xi[bowl], runs, balls, wkts)

        if cfg.odds_from_season is None or season >= cfg.odds_from_season:
            z = math.log(p / (1.0 - p)) + cfg.odds_noise * float(rng.normal())
            q = _sigmoid(z)
            home_odds = max(1.01, round(1.0 / (q * (1.0 + cfg.overround)), 2))
            away_odds = max(1.01, round(1.0 / ((1.0 - q) * (1.0 + cfg.overround)), 2))
            self.odds[match_id] = OddsRecord(match_id, home_odds, away_odds)

    def run(self) -> tuple[Corpus, GroundTruth]:
        cfg = self.cfg
        self._init_squads()
        for si, season in enumerate(cfg.seasons):
            if si > 0:
                self._season_turnover()
                if cfg.skill_drift > 0:
                    for t in self.teams:
                        self.skill[t] += float(self.rng.normal(0.0, cfg.skill_drift))
            self.truth.team_skill[season] = dict(self.skill)
            start = dt.date(season, 5, 15)
            k = 0
            for rnd in range(cfg.matches_per_team):
                order = self.rng.permutation(len(self.teams))
                date = start + dt.timedelta(days=4 * rnd)
                for a, b in zip(order[0::2], order[1::2]):
                    home, away = self.teams[a], self.teams[b]
                    k += 1
                    self._play(f"{season}-{k:03d}", season, date, "group", home, away, allow_draws=True)
            if cfg.finals_day and len(self.teams) >= 4:
                date = start + dt.timedelta(days=4 * cfg.matches_per_team + 10)
                four = [self.teams[i] for i in self.rng.choice(len(self.teams), size=4, replace=False)]
                winners = []
                for home, away in ((four[0], four[1]), (four[2], four[3])):
                    k += 1
                    self._play(f"{season}-{k:03d}", season, date, "finals_day", home, away, allow_draws=False)
                    winners.append(home if self.matches[-1].outcome == "home_win" else away)
                k += 1
                self._play(f"{season}-{k:03d}", season, date, "finals_day", winners[0], winners[1], allow_draws=False)

        for pid, p in self.players.items():
            self.truth.player_skill[pid] = {"batting": p.batting, "bowling": p.bowling, "overseas": p.overseas}
        profiles = {pid: PlayerProfile(pid, p.overseas) for pid, p in self.players.items()}
        corpus = Corpus(tuple(self.matches), tuple(self.batting), tuple(self.bowling), profiles, self.odds)
        return corpus, self.truth


def generate_corpus(config: GeneratorConfig = GeneratorConfig()) -> tuple[Corpus, GroundTruth]:
    return _Generator(config).run()


def write_synthetic(config: GeneratorConfig, directory) -> tuple[Corpus, GroundTruth]:
    """Generate and write the corpus csv files plus ground_truth.json."""
    corpus, truth = generate_corpus(config)
    out = Path(directory)
    write_corpus(corpus, out)
    (out / "ground_truth.json").write_text(truth.to_json(), encoding="utf-8")
    (out / "generator_config.json").write_text(json.dumps(config.to_dict(), indent=1, sort_keys=True) + "\n",
                                               encoding="utf-8")
    return corpus, truth
