import datetime as dt
import shutil
from pathlib import Path

import pytest

from conftest import match
from t20cast.corpus import (
    Corpus,
    IntegrityError,
    SchemaError,
    ValidationError,
    exclusion_report,
    filter_matches,
    history_before,
    load_corpus,
    overs_to_balls,
    balls_to_overs,
    validate_corpus,
    write_corpus,
)

DATA = Path(__file__).parent / "data"

SEASON_COUNTS_INCLUDED = {2003: 45, 2004: 45, 2005: 56, 2006: 64, 2007: 46, 2008: 81, 2009: 91,
                   2010: 140, 2011: 123, 2012: 73, 2013: 91, 2014: 117}


@pytest.mark.parametrize("overs,balls", [("19.4", 118), (20, 120), ("0.5", 5), (3.2, 20), ("7", 42)])
def test_overs_to_balls(overs, balls):
    assert overs_to_balls(overs) == balls
    assert overs_to_balls(balls_to_overs(balls)) == balls


@pytest.mark.parametrize("bad", ["19.6", "1.9", "-1", "x"])
def test_overs_to_balls_rejects_bad_notation(bad):
    with pytest.raises(ValueError):
        overs_to_balls(bad)


def test_season_counts_fixture_included_counts():
    corpus = load_corpus(DATA / "season_counts")
    report = exclusion_report(corpus)
    assert {s: r.included for s, r in report.items()} == SEASON_COUNTS_INCLUDED
    assert sum(r.games for r in report.values()) == 1133
    assert len(filter_matches(corpus).matches) == 972


def test_filter_is_idempotent(tiny_corpus):
    once = filter_matches(tiny_corpus)
    assert [m.match_id for m in once.matches] == ["m1", "m2", "m3", "m5"]
    assert filter_matches(once) is once


def test_exclusion_priority_finals_day_first():
    c = Corpus((match("f", "2011-08-20", "A", "B", "tie", stage="finals_day"),
                match("g", "2011-06-01", "A", "B", "no_result")))
    r = exclusion_report(c)[2011]
    assert (r.games, r.finals_day, r.tied, r.no_result, r.included) == (2, 1, 0, 1, 0)


def test_round_trip(tmp_path, small_corpus):
    write_corpus(small_corpus, tmp_path)
    again = load_corpus(tmp_path)
    assert again.matches == small_corpus.matches
    assert sorted(again.batting, key=repr) == sorted(small_corpus.batting, key=repr)
    assert again.odds == small_corpus.odds


def test_load_accepts_mapping_and_missing_odds(tmp_path, small_corpus):
    write_corpus(small_corpus, tmp_path)
    (tmp_path / "odds.csv").unlink()
    c = load_corpus({"matches": tmp_path / "matches.csv", "batting": tmp_path / "batting.csv"})
    assert c.odds == {} and len(c.matches) == len(small_corpus.matches)
    assert c.bowling == ()


def _copy(tmp_path):
    shutil.copytree(DATA / "season_counts", tmp_path / "c")
    return tmp_path / "c" / "matches.csv"


def test_schema_error_names_line_and_column(tmp_path):
    path = _copy(tmp_path)
    lines = path.read_text().splitlines()
    parts = lines[5].split(",")
    parts[7] = "lots"
    lines[5] = ",".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError) as err:
        load_corpus(path.parent)
    assert err.value.line == 6 and err.value.column == "home_runs"


def test_duplicate_match_id_rejected(tmp_path):
    path = _copy(tmp_path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines + [lines[1]]) + "\n")
    with pytest.raises(SchemaError, match="duplicate"):
        load_corpus(path.parent)


def test_scorecard_row_for_unknown_match(tmp_path):
    path = _copy(tmp_path)
    (path.parent / "batting.csv").write_text(
        "match_id,team,player_id,position,runs,balls_faced,dismissed\nnope,C01,P1,1,10,8,1\n")
    with pytest.raises(IntegrityError):
        load_corpus(path.parent)


def test_odds_must_exceed_one(tmp_path):
    path = _copy(tmp_path)
    (path.parent / "odds.csv").write_text("match_id,home_odds,away_odds\n2003-001,1.0,3.5\n")
    with pytest.raises(CorpusErrorTypes):
        load_corpus(path.parent)


CorpusErrorTypes = (SchemaError, IntegrityError)


def test_synthetic_corpus_validates_clean(small_corpus):
    assert validate_corpus(small_corpus) == []


def test_validation_flags_inconsistent_scorecard(small_corpus):
    m = small_corpus.included.matches[0]
    bad = [b for b in small_corpus.batting if not (b.match_id == m.match_id and b.position == 1)]
    c = Corpus(small_corpus.matches, tuple(bad), small_corpus.bowling, small_corpus.players, small_corpus.odds)
    findings = validate_corpus(c)
    assert findings and any(m.match_id in f for f in findings)
    with pytest.raises(ValidationError):
        validate_corpus(c, strict=True)


def test_history_before_is_strict_and_windowed(tiny_corpus):
    hist = history_before(tiny_corpus, "A", dt.date(2010, 5, 13))
    assert [m.match_id for m in hist] == ["m1", "m3"]  # m4 is a tie, m5 is on the date
    assert [m.match_id for m in history_before(tiny_corpus, "A", dt.date(2010, 5, 14), window=1)] == ["m5"]
    assert history_before(tiny_corpus, "A", dt.date(2010, 5, 1)) == []


def test_totals_before_matches_brute_force(small_corpus):
    idx = small_corpus.index
    inc = small_corpus.included.matches
    for m in inc[::17]:
        for team in (m.home_team, m.away_team):
            for window in ("all", 3):
                t = idx.totals_before(team, m.date, window)
                hist = [x for x in inc if x.date < m.date and team in (x.home_team, x.away_team)]
                if window != "all":
                    hist = hist[-window:]
                runs = sum(x.home_runs if x.home_team == team else x.away_runs for x in hist)
                wins = sum((x.home_team == team) == x.home_won for x in hist)
                taken = sum(x.away_wickets_lost if x.home_team == team else x.home_wickets_lost for x in hist)
                assert (t.games, t.wins, t.runs_for, t.wickets_taken) == (len(hist), wins, runs, taken)


def test_truncate_keeps_only_earlier_matches(small_corpus):
    cut = small_corpus.matches[len(small_corpus.matches) // 2].date
    t = small_corpus.truncate(cut)
    assert all(m.date < cut for m in t.matches)
    assert {b.match_id for b in t.batting} <= {m.match_id for m in t.matches}
