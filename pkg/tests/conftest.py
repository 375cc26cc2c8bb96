import datetime as dt

import pytest

from t20cast.corpus import Corpus, MatchRecord
from t20cast.synthgen import GeneratorConfig, generate_corpus


def match(mid, date, home, away, outcome="home_win", stage="group", hr=160, hb=120, hw=6, ar=150, ab=120, aw=8,
          season=None):
    date = dt.date.fromisoformat(date) if isinstance(date, str) else date
    return MatchRecord(mid, season or date.year, date, stage, home, away, outcome, hr, hb, hw, ar, ab, aw)


@pytest.fixture
def tiny_corpus():
    """Three teams, five dated games with hand-checkable totals."""
    ms = [
        match("m1", "2010-05-01", "A", "B", "home_win", hr=180, hb=120, hw=5, ar=150, ab=120, aw=9),
        match("m2", "2010-05-05", "B", "C", "away_win", hr=120, hb=120, hw=10, ar=121, ab=96, aw=3),
        match("m3", "2010-05-09", "C", "A", "home_win", hr=200, hb=120, hw=4, ar=190, ab=120, aw=7),
        match("m4", "2010-05-09", "A", "B", "tie", hr=150, hb=120, hw=7, ar=150, ab=120, aw=8),
        match("m5", "2010-05-13", "B", "A", "away_win", hr=99, hb=100, hw=10, ar=100, ab=60, aw=1),
    ]
    return Corpus(tuple(ms))


@pytest.fixture(scope="session")
def small_synth():
    cfg = GeneratorConfig(seed=11, n_teams=8, seasons=(2003, 2004, 2005, 2006), matches_per_team=8)
    return generate_corpus(cfg)


@pytest.fixture(scope="session")
def small_corpus(small_synth):
    return small_synth[0]
