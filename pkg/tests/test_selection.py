import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from t20cast.features import FeatureMatrix
from t20cast.selection import (
    UndefinedScore,
    bucketize,
    chi_square,
    gamma_q,
    mutual_information,
    pearson,
    rfe,
    score_by_year,
    shortlist,
    summarize,
    write_rfe_trace,
    write_scores,
)


def brute_mi(x, y):
    n = len(x)
    total = 0.0
    for a in set(x):
        for b in set(y):
            nab = sum(1 for u, v in zip(x, y) if u == a and v == b)
            if nab:
                na = sum(1 for u in x if u == a)
                nb = sum(1 for v in y if v == b)
                total += nab / n * math.log2(nab * n / (na * nb))
    return total


def test_bucketize_equal_frequency():
    b = bucketize(np.arange(10.0), 5)
    assert b.codes.tolist() == [0, 0, 1, 1, 2, 2, 3, 3, 4, 4]
    assert b.apply([1.0, 1.5]).tolist() == [0, 1]


def test_bucketize_ties_collapse_bins():
    b = bucketize([1, 1, 1, 1, 1, 1, 2, 3], 4)
    assert b.codes.tolist() == [0, 0, 0, 0, 0, 0, 1, 1]
    assert bucketize([4.0] * 6).degenerate


def test_pearson_matches_direct_formula():
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=50), rng.normal(size=50)
    direct = np.sum((x - x.mean()) * (y - y.mean())) / np.sqrt(np.sum((x - x.mean()) ** 2) * np.sum((y - y.mean()) ** 2))
    assert abs(pearson(x, y) - direct) < 1e-12
    with pytest.raises(UndefinedScore):
        pearson(np.ones(5), x[:5])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 1)), min_size=2, max_size=80))
def test_mi_matches_brute_force(pairs):
    x, y = [p[0] for p in pairs], [p[1] for p in pairs]
    assert abs(mutual_information(x, y) - brute_mi(x, y)) < 1e-10


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 1)), min_size=4, max_size=120))
def test_chi_square_matches_scipy(pairs):
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    if len(set(x)) < 2 or len(set(y)) < 2:
        with pytest.raises(UndefinedScore):
            chi_square(x, y)
        return
    stat, p = chi_square(x, y)
    table = np.zeros((6, 2))
    np.add.at(table, (x, y), 1)
    table = table[table.sum(1) > 0]
    ref = stats.chi2_contingency(table, correction=False)
    assert abs(stat - ref.statistic) < 1e-10 * max(1.0, ref.statistic)
    assert abs(p - ref.pvalue) < 1e-10


@pytest.mark.parametrize("a", [0.5, 1.0, 2.5, 7.0, 30.0])
@pytest.mark.parametrize("x", [0.01, 0.7, 3.0, 12.0, 80.0])
def test_gamma_q_matches_scipy(a, x):
    assert gamma_q(a, x) == pytest.approx(special.gammaincc(a, x), abs=1e-13)


def _matrix(X, y, seasons, names):
    X = np.asarray(X, dtype=float)
    n = len(y)
    return FeatureMatrix(tuple(names), X, np.asarray(y), tuple(f"m{i}" for i in range(n)), np.asarray(seasons),
                         tuple(None for _ in range(n)))


def test_score_by_year_and_summary(tmp_path):
    rng = np.random.default_rng(3)
    n = 300
    seasons = np.repeat([2001, 2002, 2003], n // 3)
    y = rng.integers(0, 2, n)
    X = np.column_stack([y + rng.normal(0, 1, n), rng.normal(size=n), np.ones(n)])
    m = _matrix(X, y, seasons, ["signal", "noise", "const"])
    scores = score_by_year(m, "pearson")
    for s, v in scores["signal"].per_year.items():
        mask = seasons == s
        assert v == pytest.approx(np.corrcoef(X[mask, 0], y[mask])[0, 1], abs=1e-12)
    vals = list(scores["signal"].per_year.values())
    assert scores["signal"].mean == pytest.approx(np.mean(vals), abs=1e-15)
    assert scores["signal"].variance == pytest.approx(np.var(vals), abs=1e-15)
    assert scores["const"].per_year == {2001: None, 2002: None, 2003: None}
    assert summarize({1: None}) == (None, None)
    assert shortlist(scores, 2) == ["signal", "noise"]
    chi = score_by_year(m, "chi_square_p")
    assert shortlist(chi, 1) == ["signal"]
    stat = score_by_year(m, "chi_square")
    assert shortlist(stat, 1) == ["signal"]
    for s in (2001, 2002, 2003):
        codes = bucketize(X[seasons == s, 0], 5).codes
        expected = stats.chi2_contingency(np.histogram2d(codes, y[seasons == s], bins=[5, 2])[0],
                                          correction=False)
        assert stat["signal"].per_year[s] == pytest.approx(expected[0], rel=1e-12)
        assert chi["signal"].per_year[s] == pytest.approx(expected[1], rel=1e-9)
    write_scores(list(scores.values()), tmp_path / "s.csv")
    assert (tmp_path / "s.csv").read_text().splitlines()[0] == "feature,metric,mean,variance,2001,2002,2003"


def test_score_by_year_needs_two_seasons():
    m = _matrix(np.zeros((4, 1)), [0, 1, 0, 1], [2001] * 4, ["a"])
    with pytest.raises(ValueError):
        score_by_year(m)


def test_rfe_with_scripted_evaluator(tmp_path):
    m = _matrix(np.random.default_rng(0).normal(size=(20, 3)), [0, 1] * 10, [1, 2] * 10, ["a", "b", "c"])
    table = {("a", "b", "c"): 0.6, ("a", "b"): 0.7, ("a", "c"): 0.5, ("b", "c"): 0.55, ("a",): 0.65, ("b",): 0.7}
    trace = rfe(m, evaluate=lambda sub: table[sub.columns])
    assert trace.eliminated == ("c", "a", "b")
    assert trace.sizes == (3, 2, 1)
    assert trace.accuracies == (0.6, 0.7, 0.7)
    assert trace.selected == ("b",)
    doc = json.loads(write_rfe_trace(trace, tmp_path / "t.json").read_text())
    assert doc["selected"] == ["b"] and len(doc["steps"]) == 3


def test_pearson_reference_cases():
    y = np.array([0, 1, 1, 0, 1, 0, 0, 1], dtype=float)
    assert pearson(y, y) == pytest.approx(1.0, abs=1e-15)
    assert pearson(1 - y, y) == pytest.approx(-1.0, abs=1e-15)
    rng = np.random.default_rng(5)
    x, yy = rng.uniform(size=10_000), rng.integers(0, 2, 10_000)
    assert abs(pearson(x, yy)) < 0.05
    with pytest.raises(UndefinedScore):
        pearson(np.ones(5), [0, 1, 0, 1, 1])


def test_bucketize_reference_cases():
    b = bucketize(np.random.default_rng(1).permutation(100).astype(float), 5)
    assert np.bincount(b.codes).tolist() == [20] * 5
    assert bucketize([1.0, 2.0, 3.0, 4.0], 2).codes.tolist() == [0, 0, 1, 1]
    c = bucketize(np.full(6, 2.5), 5)
    assert c.degenerate and c.codes.tolist() == [0] * 6


def test_mi_and_chi_square_reference_cases():
    yb = [0, 1] * 50
    assert mutual_information(yb, yb) == pytest.approx(1.0, abs=1e-12)
    # product empirical table: every (x, y) cell count equals its margin product / n
    x = [0, 0, 1, 1, 2, 2] * 10
    y = [0, 1] * 30
    assert mutual_information(x, y) == 0.0
    assert chi_square(x, y) == (0.0, 1.0)
    table_x = [0] * 40 + [1] * 40
    table_y = [0] * 30 + [1] * 10 + [0] * 10 + [1] * 30
    stat, p = chi_square(table_x, table_y)
    assert stat == pytest.approx(20.0, abs=1e-12)
    assert p == pytest.approx(float(stats.chi2.sf(20.0, 1)), rel=1e-10)
    assert p == pytest.approx(7.74e-6, rel=1e-2)


def test_score_by_year_reference_cases():
    y = np.array([0, 1, 1, 0] * 4)
    seasons = np.repeat([2001, 2002, 2003, 2004], 4)
    same = score_by_year(_matrix(y[:, None].astype(float), y, seasons, ["f"]), "pearson")["f"]
    assert same.mean == pytest.approx(1.0) and same.variance == pytest.approx(0.0, abs=1e-15)
    flip = np.where(seasons <= 2002, y, 1 - y).astype(float)
    half = score_by_year(_matrix(flip[:, None], y, seasons, ["f"]), "pearson")["f"]
    assert half.mean == pytest.approx(0.0, abs=1e-15) and half.variance == pytest.approx(1.0)


def test_rfe_identical_copies_and_informative_survivor():
    from t20cast.learn import ModelSpec

    rng = np.random.default_rng(8)
    n = 400
    seasons = np.repeat([2001, 2002, 2003, 2004], n // 4)
    y = rng.integers(0, 2, n)
    base = y + rng.normal(0, 1, n)
    copies = _matrix(np.column_stack([base] * 3), y, seasons, ["c1", "c2", "c3"])
    # tree split search ignores duplicated columns, so the trace is exactly flat
    trace = rfe(copies, ModelSpec("gradient_boosting", {"n_rounds": 10}), "loso")
    assert len(trace.sizes) == 3 and len(trace.eliminated) == 3
    assert len(set(trace.accuracies)) == 1
    assert len(trace.selected) == 1
    # naive Bayes counts the copied evidence three times; its trace is only approximately flat
    nb = rfe(copies, ModelSpec("naive_bayes"), "loso")
    assert max(nb.accuracies) - min(nb.accuracies) < 0.02

    X = np.column_stack([base, rng.normal(size=(n, 3))])
    mixed = _matrix(X, y, seasons, ["signal", "n1", "n2", "n3"])
    trace = rfe(mixed, ModelSpec("naive_bayes"), "loso")
    assert trace.eliminated[-1] == "signal" and "signal" in trace.selected
    assert len(trace.sizes) == 4


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 1)), min_size=6, max_size=80),
       st.permutations(range(5)), st.floats(0.1, 50), st.floats(-100, 100))
def test_score_invariants(pairs, perm, scale, shift):
    x = [a for a, _ in pairs]
    y = [b for _, b in pairs]
    relabeled = [perm[a] for a in x]
    assert mutual_information(relabeled, y) == pytest.approx(mutual_information(x, y), abs=1e-12)
    if len(set(x)) > 1 and len(set(y)) > 1:
        s1, p1 = chi_square(x, y)
        s2, p2 = chi_square(relabeled, y)
        assert s2 == pytest.approx(s1, rel=1e-10, abs=1e-12) and p2 == pytest.approx(p1, abs=1e-12)
        xf = np.asarray(x, dtype=float)
        r = pearson(xf, y)
        assert pearson(scale * xf + shift, y) == pytest.approx(r, abs=1e-9)
        assert pearson(-xf, y) == pytest.approx(-r, abs=1e-12)


def test_rfe_accuracies_match_reevaluation():
    from t20cast.learn import ModelSpec, evaluate_accuracy

    rng = np.random.default_rng(12)
    n = 240
    seasons = np.repeat([2001, 2002, 2003], n // 3)
    y = rng.integers(0, 2, n)
    X = np.column_stack([y + rng.normal(0, 1, n), 0.5 * y + rng.normal(0, 1, n), rng.normal(size=(n, 2))])
    m = _matrix(X, y, seasons, ["a", "b", "c", "d"])
    spec = ModelSpec("naive_bayes")
    trace = rfe(m, spec, "loso")
    for subset, acc in zip(trace.subsets, trace.accuracies):
        assert evaluate_accuracy(m.select(subset), spec, "loso") == acc
    for big, small in zip(trace.subsets, trace.subsets[1:]):
        assert set(small) < set(big) and len(small) == len(big) - 1
