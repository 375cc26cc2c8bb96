import datetime as dt

import numpy as np
import pytest

from t20cast.features import FeatureMatrix, safe_div


def make(n=4, cols=("a", "b"), start=0):
    X = np.arange(n * len(cols), dtype=float).reshape(n, len(cols)) / 7.0
    return FeatureMatrix(cols, X, np.arange(n) % 2, tuple(f"m{i + start}" for i in range(n)),
                         np.array([2001, 2001, 2002, 2002][:n]), tuple(dt.date(2001, 5, i + 1) for i in range(n)))


def test_safe_div():
    assert safe_div(5, 0) == 5 and safe_div(6, 3) == 2


def test_rejects_non_finite_and_duplicates():
    with pytest.raises(ValueError, match="non-finite"):
        FeatureMatrix(("a",), [[np.nan]], [1], ("m",), [2001], (dt.date(2001, 1, 1),))
    with pytest.raises(ValueError, match="duplicate"):
        FeatureMatrix(("a", "a"), [[1, 2]], [1], ("m",), [2001], (dt.date(2001, 1, 1),))


def test_select_take_where():
    m = make()
    assert m.select(["b"]).X[:, 0].tolist() == m.column("b").tolist()
    with pytest.raises(KeyError):
        m.select(["zz"])
    assert m.where_season([2002]).match_ids == ("m2", "m3")
    assert m.take([True, False, False, True]).match_ids == ("m0", "m3")


def test_hstack_joins_on_match_id():
    left = make()
    right = make(cols=("c",), start=1)
    j = left.hstack(right)
    assert j.columns == ("a", "b", "c") and j.match_ids == ("m1", "m2", "m3")
    assert j.column("c").tolist() == right.column("c")[:3].tolist()


def test_csv_round_trip_is_exact(tmp_path):
    m = make()
    back = FeatureMatrix.from_csv(m.to_csv(tmp_path / "f.csv"))
    assert np.array_equal(back.X, m.X) and back.match_ids == m.match_ids and back.dates == m.dates
    assert back.y.tolist() == m.y.tolist()
