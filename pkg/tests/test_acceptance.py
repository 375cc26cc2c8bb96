"""Acceptance suite: one test per acceptance criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict lines.
"""

import itertools
import math
import random
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from t20cast.backtest import FeatureConfig, odds_benchmark, rolling_splits, run_backtest
from t20cast.cli import run as cli_run
from t20cast.corpus import exclusion_report, filter_matches, load_corpus
from t20cast.features import FeatureMatrix
from t20cast.learn import ModelSpec, evaluate_accuracy, fit, fit_pca, predict, PCAConfig
from t20cast.learn.logistic import gradient, objective
from t20cast.playerfeat import PLAYER_COLUMNS, PlayerFeatureBuilder, build_player_matrix, player_feature_registry
from t20cast.selection import chi_square, mutual_information, pearson, rfe, score_by_year
from t20cast.synthgen import GeneratorConfig, bayes_ceiling, generate_corpus
from t20cast.teamfeat import (
    ALL_TEAM_COLUMNS,
    FEATURE_SETS,
    TEAM_FEATURE_LEVEL,
    TeamConfig,
    build_team_matrix,
    team_feature_row,
)

DATA = Path(__file__).parent / "data"


def verdict(number: int, ok: bool, detail: str):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def synth_small():
    cfg = GeneratorConfig(seed=21, n_teams=8, seasons=(2003, 2004, 2005, 2006), matches_per_team=8)
    return generate_corpus(cfg)[0]


# 1 ---------------------------------------------------------------------------


def test_criterion_1_feature_counts(synth_small):
    levels = Counter(TEAM_FEATURE_LEVEL[c] for c in ALL_TEAM_COLUMNS)
    team_ok = len(set(ALL_TEAM_COLUMNS)) == 31 and levels == {1: 18, 2: 8, 3: 5}
    set_sizes = [len(FEATURE_SETS[k]) for k in range(1, 7)]
    team_matrix = build_team_matrix(synth_small, "all")
    player = build_player_matrix(synth_small)
    plevels = Counter(info.level for info in player_feature_registry().values())
    ok = (team_ok and set_sizes == [14, 18, 8, 10, 4, 5] and team_matrix.n_features == 31
          and player.n_features == len(set(player.columns)) == 506 and player.columns == PLAYER_COLUMNS
          and plevels == {1: 178, 2: 228, 3: 100})
    verdict(1, ok, f"team {team_matrix.n_features} ({levels[1]}/{levels[2]}/{levels[3]}), sets {set_sizes}, "
                   f"player {player.n_features} ({plevels[1]}/{plevels[2]}/{plevels[3]})")


# 2 ---------------------------------------------------------------------------

SEASON_COUNTS = {  # season: (games, finals day, tied, no result, included)
    2003: (48, 3, 0, 0, 45), 2004: (52, 3, 0, 4, 45), 2005: (70, 3, 0, 11, 56), 2006: (70, 3, 1, 2, 64),
    2007: (70, 3, 1, 20, 46), 2008: (97, 3, 3, 10, 81), 2009: (97, 3, 0, 3, 91), 2010: (151, 3, 3, 5, 140),
    2011: (151, 3, 2, 23, 123), 2012: (97, 3, 1, 20, 73), 2013: (97, 3, 2, 1, 91), 2014: (133, 3, 1, 12, 117),
}


def test_criterion_2_season_counts_filter():
    corpus = load_corpus(DATA / "season_counts")
    report = exclusion_report(corpus)
    got = {s: (r.games, r.finals_day, r.tied, r.no_result, r.included) for s, r in report.items()}
    total = len(filter_matches(corpus).matches)
    ok = got == SEASON_COUNTS and total == 972 and got[2010][4] == 140 and got[2009][4] == 91
    verdict(2, ok, f"included per season match the published counts; total {total} (expected 972)")


# 3 ---------------------------------------------------------------------------


def brute_chi_square(x, y):
    rows, cols = sorted(set(x)), sorted(set(y))
    n = len(x)
    stat = 0.0
    for a in rows:
        for b in cols:
            obs = sum(1 for u, v in zip(x, y) if u == a and v == b)
            exp = sum(1 for u in x if u == a) * sum(1 for v in y if v == b) / n
            stat += (obs - exp) ** 2 / exp
    return stat, float(stats.chi2.sf(stat, (len(rows) - 1) * (len(cols) - 1)))


def brute_mi(x, y):
    n = len(x)
    joint = Counter(zip(x, y))
    px, py = Counter(x), Counter(y)
    return sum(c / n * math.log2(c * n / (px[a] * py[b])) for (a, b), c in joint.items())


def test_criterion_3_numerical_oracles():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)

    worst_grad = 0.0
    for _ in range(50):
        n, d = int(rng.integers(10, 60)), int(rng.integers(1, 8))
        X = rng.normal(size=(n, d)) * rng.uniform(0.5, 3, size=d)
        y = rng.integers(0, 2, n).astype(float)
        p = rng.normal(size=d + 1)
        l2 = float(rng.uniform(0, 0.5))
        h = 1e-6
        fd = np.array([(objective(p + h * e, X, y, l2) - objective(p - h * e, X, y, l2)) / (2 * h)
                       for e in np.eye(d + 1)])
        g = gradient(p, X, y, l2)
        worst_grad = max(worst_grad, float(np.max(np.abs(g - fd) / np.maximum(np.abs(fd), 1e-8))))

    worst_orth, ordered = 0.0, True
    for _ in range(10):
        d = int(rng.integers(2, 9))
        X = rng.normal(size=(150, d)) @ rng.normal(size=(d, d))
        pca = fit_pca(X, PCAConfig(n_components=d))
        C = pca.components
        worst_orth = max(worst_orth, float(np.max(np.abs(C @ C.T - np.eye(C.shape[0])))))
        ordered &= bool(np.all(np.diff(pca.explained_variance_ratio) <= 0))

    worst_chi = worst_p = worst_mi = 0.0
    for _ in range(40):
        k = int(rng.integers(2, 7))
        n = int(rng.integers(20, 200))
        x = rng.integers(0, k, n).tolist()
        y = rng.integers(0, 2, n).tolist()
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        stat, pval = chi_square(x, y)
        bstat, bp = brute_chi_square(x, y)
        worst_chi = max(worst_chi, abs(stat - bstat) / max(1.0, bstat))
        worst_p = max(worst_p, abs(pval - bp))
        worst_mi = max(worst_mi, abs(mutual_information(x, y) - brute_mi(x, y)))

    worst_r = 0.0
    for _ in range(50):
        n = int(rng.integers(3, 100))
        a, b = rng.normal(size=n), rng.normal(size=n)
        ma, mb = sum(a) / n, sum(b) / n
        direct = sum((u - ma) * (v - mb) for u, v in zip(a, b)) / math.sqrt(
            sum((u - ma) ** 2 for u in a) * sum((v - mb) ** 2 for v in b))
        worst_r = max(worst_r, abs(pearson(a, b) - direct))

    elapsed = time.perf_counter() - t0
    ok = (worst_grad < 1e-4 and worst_orth < 1e-8 and ordered and worst_chi < 1e-10 and worst_p < 1e-10
          and worst_mi < 1e-10 and worst_r < 1e-12 and elapsed < 30)
    verdict(3, ok, f"grad rel err {worst_grad:.1e}, PCA orth {worst_orth:.1e}, chi2 {worst_chi:.1e}/p {worst_p:.1e}, "
                   f"MI {worst_mi:.1e}, pearson {worst_r:.1e}, {elapsed:.1f}s")


# 4 ---------------------------------------------------------------------------


def test_criterion_4_learner_sanity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)

    def two_gaussians(n):
        y = rng.integers(0, 2, n)
        return rng.normal(size=(n, 1)) + np.where(y == 1, 3.0, -3.0)[:, None], y

    Xtr, ytr = two_gaussians(10_000)
    Xte, yte = two_gaussians(10_000)
    nb = fit(ModelSpec("naive_bayes"), Xtr, ytr, ["x"])
    nb_acc = float(np.mean(predict(nb, Xte, ["x"]) == yte))
    bayes_rate = float(stats.norm.cdf(3.0))

    # XOR on the square, each point reflected into all four quadrants so the
    # sample carries no accidental linear trend (see the iid figure below)
    base = rng.uniform(0, 1, size=(500, 2))
    X = np.vstack([base * [sx, sy] for sx in (1, -1) for sy in (1, -1)])
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0)).astype(int)
    acc = {}
    for kind in ("random_forest", "gradient_boosting", "logistic_regression"):
        model = fit(ModelSpec(kind, seed=1), X, y, ["a", "b"])
        acc[kind] = float(np.mean(predict(model, X, ["a", "b"]) == y))
    Xi = rng.uniform(-1, 1, size=(2000, 2))
    yi = ((Xi[:, 0] > 0) ^ (Xi[:, 1] > 0)).astype(int)
    lr_iid = float(np.mean(predict(fit(ModelSpec("logistic_regression"), Xi, yi, ["a", "b"]), Xi, ["a", "b"]) == yi))
    elapsed = time.perf_counter() - t0
    ok = (abs(nb_acc - bayes_rate) <= 0.01 and acc["random_forest"] >= 0.95 and acc["gradient_boosting"] >= 0.95
          and acc["logistic_regression"] <= 0.60 and elapsed < 60)
    verdict(4, ok, f"NB {nb_acc:.4f} vs Bayes {bayes_rate:.5f}; XOR RF {acc['random_forest']:.3f}, "
                   f"GBT {acc['gradient_boosting']:.3f}, LR {acc['logistic_regression']:.3f} "
                   f"(LR on an unreflected iid XOR draw: {lr_iid:.3f}); {elapsed:.1f}s")


# 5 ---------------------------------------------------------------------------


def test_criterion_5_end_to_end_backtest():
    t0 = time.perf_counter()
    corpus, truth = generate_corpus(GeneratorConfig(seed=0, odds_noise=0.05))
    included = [m.match_id for m in corpus.included.matches]
    corpus_ceiling = bayes_ceiling(truth, included)

    seasons = sorted({m.season for m in corpus.included.matches})
    plan = rolling_splits(corpus, seasons[-6:])
    report = run_backtest(corpus, FeatureConfig("team", 6), ModelSpec("naive_bayes"), plan)
    tested = [p.match_id for p in report.predictions]
    ceiling = bayes_ceiling(truth, tested)
    probs = np.array([truth.match_prob[m] for m in tested])
    sigma = math.sqrt(float(np.sum(probs * (1 - probs)))) / len(probs)
    acc = report.overall_accuracy()

    bench = odds_benchmark(corpus, corpus.odds)
    scored = list(bench.favourite_correct)
    bench_acc = bench.overall()
    bench_ceiling = bayes_ceiling(truth, scored)
    elapsed = time.perf_counter() - t0

    ok = (abs(corpus_ceiling - 0.75) <= 0.02 and len(seasons) == 12 and acc >= 0.65
          and acc <= ceiling + 3 * sigma and abs(bench_acc - bench_ceiling) <= 0.03 and elapsed < 120)
    verdict(5, ok, f"ceiling {corpus_ceiling:.3f}; NB set6 accuracy {acc:.3f} over {len(tested)} "
                   f"(test ceiling {ceiling:.3f} + 3 sigma = {ceiling + 3 * sigma:.3f}); favourite "
                   f"{bench_acc:.3f} vs ceiling {bench_ceiling:.3f}; {elapsed:.1f}s")


# 6 ---------------------------------------------------------------------------


def test_criterion_6_no_leakage():
    corpus, _ = generate_corpus(GeneratorConfig(seed=4, seasons=tuple(range(2003, 2008))))
    team = build_team_matrix(corpus, "all")
    player = build_player_matrix(corpus)
    both = team.hstack(player)
    rows = random.Random(6).sample(range(len(both)), 20)
    mismatches = []
    for i in rows:
        mid = both.match_ids[i]
        m = corpus.by_id[mid]
        cut = corpus.truncate(m.date)
        assert all(x.date < m.date for x in cut.matches)
        trow, _ = team_feature_row(cut.index, m.home_team, m.away_team, m.date, TeamConfig())
        # the teams' batting orders for this match are the only inputs taken from the match itself
        xi = {t: sorted((b for b in corpus.batting if b.match_id == mid and b.team == t), key=lambda b: b.position)
              for t in (m.home_team, m.away_team)}
        prow = PlayerFeatureBuilder(cut).row(xi[m.home_team], xi[m.away_team], m.date, m.season)
        recomputed = np.array([trow[c] for c in team.columns] + [prow[c] for c in player.columns])
        if not np.array_equal(recomputed, both.X[i]):
            mismatches.append(mid)
    verdict(6, not mismatches, f"{20 - len(mismatches)}/20 sampled rows ({both.n_features} features) reproduced "
                               f"bit-exactly from the truncated corpus")


# 7 ---------------------------------------------------------------------------


def test_criterion_7_determinism(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("T20CAST_CONFIG", raising=False)
    assert cli_run(["synth", "--seed", "3", "--seasons", "2003-2007", "--n-teams", "10"]) == 0
    runs = {
        "naive_bayes": [],
        "random_forest": ["--hp", "n_trees=25", "--hp", "max_features=sqrt"],
        "gradient_boosting": ["--hp", "n_rounds=25", "--hp", "subsample=0.7"],
    }
    same = {}
    for kind, extra in runs.items():
        args = ["backtest", "--model", kind, "--seed", "11", "--set", "4", *extra]
        assert cli_run([*args, "--out", f"a_{kind}"]) == 0
        assert cli_run([*args, "--out", f"b_{kind}"]) == 0
        same[kind] = (tmp_path / f"a_{kind}" / "report.json").read_bytes() == \
            (tmp_path / f"b_{kind}" / "report.json").read_bytes()
    # a different seed must change a stochastic learner's report
    cli_run(["backtest", "--model", "random_forest", "--seed", "12", "--set", "4", *runs["random_forest"],
             "--out", "c"])
    seed_matters = (tmp_path / "c" / "report.json").read_bytes() != (tmp_path / "a_random_forest" / "report.json").read_bytes()
    verdict(7, all(same.values()) and seed_matters,
            f"byte-identical report.json: {same}; changing the seed changes the RF report: {seed_matters}")


# 8 ---------------------------------------------------------------------------


def test_criterion_8_per_year_outlier():
    flipped = 2009
    corpus, _ = generate_corpus(GeneratorConfig(seed=8, flip_seasons=frozenset({flipped})))
    scores = score_by_year(build_team_matrix(corpus, 6), "pearson")
    planted = scores["win_diff"]
    per_year = planted.per_year
    median = float(np.median(list(per_year.values())))
    # the planted reversal shows up as a season whose correlation has the opposite sign to the typical season
    outliers = [s for s, v in per_year.items() if v is not None and np.sign(v) != np.sign(median)]
    furthest = max(per_year, key=lambda s: abs(per_year[s] - median))

    vals = [Fraction(v) for v in per_year.values()]
    mean = sum(vals) / len(vals)
    var = sum((v - mean) ** 2 for v in vals) / len(vals)
    exact = abs(planted.mean - float(mean)) <= 1e-15 and abs(planted.variance - float(var)) <= 1e-15
    ok = outliers == [flipped] and furthest == flipped and exact
    verdict(8, ok, f"outlier seasons {outliers} (planted {flipped}, r={per_year[flipped]:.3f} vs median "
                   f"{median:.3f}); mean/variance recomputed from per_year: {exact}")


# 9 ---------------------------------------------------------------------------


def test_criterion_9_rfe_matches_exhaustive():
    rng = np.random.default_rng(17)
    n_per, seasons = 150, [2001, 2002, 2003, 2004]
    n = n_per * len(seasons)
    y = rng.integers(0, 2, n)
    X = np.column_stack([y * 1.2 + rng.normal(size=n), rng.normal(size=n), rng.normal(size=n), rng.normal(size=n)])
    names = ("signal", "noise1", "noise2", "noise3")
    matrix = FeatureMatrix(names, X, y, tuple(f"r{i}" for i in range(n)), np.repeat(seasons, n_per),
                           tuple(None for _ in range(n)))
    spec = ModelSpec("naive_bayes")
    trace = rfe(matrix, spec, "loso")

    exhaustive = {}
    for k in range(1, 5):
        for subset in itertools.combinations(names, k):
            exhaustive[subset] = evaluate_accuracy(matrix.select(subset), spec, "loso")
    best = max(exhaustive.values())
    optimal = [s for s, a in exhaustive.items() if a == best]
    ok = trace.selected in optimal
    verdict(9, ok, f"greedy selected {list(trace.selected)}; exhaustive optimum {[list(s) for s in optimal]} "
                   f"at accuracy {best:.4f}")
