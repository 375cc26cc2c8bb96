"""Regenerates season_counts/matches.csv: one synthetic fixture per historic game,
with stage/outcome chosen so each season carries the published exclusion counts.

Run from the repository root: python3 tests/data/make_season_counts.py
"""

import csv
import datetime as dt
from pathlib import Path

# season: (games, finals day, tied, no result, included)
SEASON_COUNTS = {
    2003: (48, 3, 0, 0, 45),
    2004: (52, 3, 0, 4, 45),
    2005: (70, 3, 0, 11, 56),
    2006: (70, 3, 1, 2, 64),
    2007: (70, 3, 1, 20, 46),
    2008: (97, 3, 3, 10, 81),
    2009: (97, 3, 0, 3, 91),
    2010: (151, 3, 3, 5, 140),
    2011: (151, 3, 2, 23, 123),
    2012: (97, 3, 1, 20, 73),
    2013: (97, 3, 2, 1, 91),
    2014: (133, 3, 1, 12, 117),
}

HEADER = ["match_id", "season", "date", "stage", "home_team", "away_team", "outcome",
          "home_runs", "home_balls", "home_wickets", "away_runs", "away_balls", "away_wickets"]


def rows():
    teams = [f"C{i:02d}" for i in range(1, 19)]
    for season, (games, finals, tied, no_result, _) in SEASON_COUNTS.items():
        group = games - finals
        kinds = ["tie"] * tied + ["no_result"] * no_result
        kinds += ["win"] * (group - len(kinds))
        # spread the exclusions through the season
        kinds = kinds[::2] + kinds[1::2]
        for k in range(games):
            date = dt.date(season, 5, 20) + dt.timedelta(days=k // 9)
            home, away = teams[k % 18], teams[(k * 7 + 3) % 18]
            if home == away:
                away = teams[(k + 1) % 18]
            if k < group:
                stage, kind = "group", kinds[k]
            else:
                stage, kind = "finals_day", "win"
            if kind == "tie":
                yield [f"{season}-{k + 1:03d}", season, date.isoformat(), stage, home, away, "tie",
                       150, 120, 7, 150, 120, 9]
            elif kind == "no_result":
                yield [f"{season}-{k + 1:03d}", season, date.isoformat(), stage, home, away, "no_result",
                       40, 30, 1, 0, 0, 0]
            elif k % 3:
                yield [f"{season}-{k + 1:03d}", season, date.isoformat(), stage, home, away, "home_win",
                       170, 120, 6, 150, 120, 8]
            else:
                yield [f"{season}-{k + 1:03d}", season, date.isoformat(), stage, home, away, "away_win",
                       140, 120, 9, 141, 110, 4]


if __name__ == "__main__":
    out = Path(__file__).with_name("season_counts")
    out.mkdir(exist_ok=True)
    with open(out / "matches.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        w.writerows(rows())
