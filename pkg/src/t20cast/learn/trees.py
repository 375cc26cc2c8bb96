"""Binary decision trees, bagged random forests and gradient-boosted trees."""

from __future__ import annotations

import math

import numpy as np

from .logistic import log_loss_terms, sigmoid


def tree_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for tree ``index``; depends only on (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(index,)))


class Tree:
    """Array-backed binary tree; a row goes left when x[feature] <= threshold."""

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=float)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        active = self.feature[node] >= 0
        while active.any():
            idx = rows[active]
            n = node[idx]
            go_left = X[idx, self.feature[n]] <= self.threshold[n]
            node[idx] = np.where(go_left, self.left[n], self.right[n])
            active = self.feature[node] >= 0
        return node

    def predict(self, X) -> np.ndarray:
        return self.value[self.apply(X)]

    def get_state(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_state(cls, s: dict) -> "Tree":
        return cls(s["feature"], s["threshold"], s["left"], s["right"], s["value"])


def _best_split(X, target, idx, features, criterion, min_leaf, max_features):
    """Scan features (in the given order) for the lowest-impurity split.

    Stops after ``max_features`` non-constant features have been examined.
    Returns (feature, threshold, left_idx, right_idx) or None.
    """
    best_score = math.inf
    best = None
    examined = 0
    n = len(idx)
    for f in features:
        if examined >= max_features:
            break
        x = X[idx, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        if xs[0] == xs[-1]:
            continue
        examined += 1
        ts = target[idx][order]
        csum = np.cumsum(ts)[:-1]
        n_left = np.arange(1, n)
        n_right = n - n_left
        total = csum[-1] + ts[-1]
        if criterion == "gini":
            # n_L*gini_L + n_R*gini_R up to a factor 2, symmetric in the label coding
            c_right = total - csum
            score = csum * (n_left - csum) / n_left + c_right * (n_right - c_right) / n_right
        else:
            # SSE up to a constant: -(S_L^2/n_L + S_R^2/n_R)
            s_right = total - csum
            score = -(csum * csum / n_left + s_right * s_right / n_right)
        valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not valid.any():
            continue
        score = np.where(valid, score, np.inf)
        i = int(np.argmin(score))
        if score[i] < best_score:
            best_score = score[i]
            lo, hi = xs[i], xs[i + 1]
            thr = lo + (hi - lo) / 2.0
            if not lo <= thr < hi:
                thr = lo
            best = (f, thr, idx[order[: i + 1]], idx[order[i + 1:]])
    return best


def grow_tree(X, target, idx, *, criterion: str, max_depth: int | None, min_samples_leaf: int,
              max_features: int, rng: np.random.Generator | None, leaf_value, hessian=None) -> Tree:
    """Grow a tree on rows ``idx``.

    ``criterion`` is "gini" (0/1 target) or "mse". ``leaf_value(rows)`` gives the
    stored value of a leaf. Features are visited in a fresh random order at
    every node when ``rng`` is given, otherwise in column order.
    """
    d = X.shape[1]
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    root = new_node()
    stack = [(root, np.asarray(idx), 0)]
    while stack:
        node, rows, depth = stack.pop()
        value[node] = float(leaf_value(rows))
        t = target[rows]
        pure = t.min() == t.max()
        if pure or len(rows) < 2 * min_samples_leaf or (max_depth is not None and depth >= max_depth):
            continue
        order = rng.permutation(d) if rng is not None else np.arange(d)
        split = _best_split(X, target, rows, order, criterion, min_samples_leaf, max_features)
        if split is None:
            continue
        f, thr, lrows, rrows = split
        feature[node], threshold[node] = int(f), float(thr)
        lnode, rnode = new_node(), new_node()
        left[node], right[node] = lnode, rnode
        # right pushed first so the left subtree is numbered first
        stack.append((rnode, rrows, depth + 1))
        stack.append((lnode, lrows, depth + 1))
    return Tree(feature, threshold, left, right, value)


def _resolve_max_features(max_features, d: int) -> int:
    if max_features is None or max_features == "all":
        return d
    if max_features == "sqrt":
        return max(1, math.ceil(math.sqrt(d)))
    k = int(max_features)
    if not 1 <= k <= d:
        raise ValueError(f"max_features must be in 1..{d}, got {k}")
    return k


class DecisionTreeClassifier:
    """Gini tree; leaves store the fraction of class-1 training rows."""

    def __init__(self, max_depth: int | None = None, min_samples_leaf: int = 1, max_features=None, seed: int = 0):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.seed = seed

    def fit(self, X, y, rows=None, rng=None) -> "DecisionTreeClassifier":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        rows = np.arange(len(X)) if rows is None else rows
        k = _resolve_max_features(self.max_features, X.shape[1])
        if rng is None and k < X.shape[1]:
            rng = tree_rng(self.seed, 0)
        self.tree_ = grow_tree(
            X, y, rows, criterion="gini", max_depth=self.max_depth, min_samples_leaf=self.min_samples_leaf,
            max_features=k, rng=rng, leaf_value=lambda r: y[r].mean(),
        )
        return self

    def predict_proba(self, X) -> np.ndarray:
        return self.tree_.predict(X)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)


class RandomForest:
    def __init__(self, n_trees: int = 200, max_features="sqrt", min_samples_leaf: int = 1,
                 max_depth: int | None = None, bootstrap: bool = True, seed: int = 0):
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if max_depth is not None and max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        self.n_trees = n_trees
        self.max_features = max_features
        self.min_samples_leaf = min_samples_leaf
        self.max_depth = max_depth
        self.bootstrap = bootstrap
        self.seed = seed

    def fit(self, X, y) -> "RandomForest":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        n, d = X.shape
        if n < 2:
            raise ValueError("need at least 2 rows")
        k = _resolve_max_features(self.max_features, d)
        self.trees_ = []
        for t in range(self.n_trees):
            rng = tree_rng(self.seed, t)
            rows = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTreeClassifier(self.max_depth, self.min_samples_leaf, k)
            tree.fit(X, y, rows=rows, rng=rng if k < d else None)
            self.trees_.append(tree.tree_)
        return self

    def predict_proba(self, X) -> np.ndarray:
        """Fraction of trees voting for class 1 (a leaf at exactly 0.5 votes 1)."""
        votes = np.zeros(len(np.asarray(X)))
        for tree in self.trees_:
            votes += tree.predict(X) >= 0.5
        return votes / len(self.trees_)

    def get_state(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_features": self.max_features,
            "min_samples_leaf": self.min_samples_leaf,
            "max_depth": self.max_depth,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
            "trees": [t.get_state() for t in self.trees_],
        }

    @classmethod
    def from_state(cls, s: dict) -> "RandomForest":
        m = cls(s["n_trees"], s["max_features"], s["min_samples_leaf"], s["max_depth"], s["bootstrap"], s["seed"])
        m.trees_ = [Tree.from_state(t) for t in s["trees"]]
        return m


class GradientBoosting:
    """Additive log-odds model; each round fits a depth-limited regression tree to
    the negative gradient of the log-loss and sets leaf values by one Newton step."""

    def __init__(self, n_rounds: int = 200, learning_rate: float = 0.1, max_depth: int = 3,
                 subsample: float = 1.0, min_samples_leaf: int = 1, seed: int = 0):
        if n_rounds < 0:
            raise ValueError("n_rounds must be >= 0")
        if not learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not 0.0 < subsample <= 1.0:
            raise ValueError("subsample must lie in (0, 1]")
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.subsample = subsample
        self.min_samples_leaf = min_samples_leaf
        self.seed = seed

    def fit(self, X, y) -> "GradientBoosting":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        n = len(y)
        if n < 2:
            raise ValueError("need at least 2 rows")
        n1 = float(y.sum())
        if n1 == 0 or n1 == n:
            raise ValueError("training set contains a single class")
        self.init_ = math.log(n1) - math.log(n - n1)
        F = np.full(n, self.init_)
        self.trees_ = []
        self.train_loss_ = [float(np.mean(log_loss_terms(F, y)))]
        for r in range(self.n_rounds):
            p = sigmoid(F)
            g = y - p
            h = p * (1.0 - p)
            if self.subsample < 1.0:
                rng = tree_rng(self.seed, r)
                m = max(2, int(round(self.subsample * n)))
                rows = np.sort(rng.choice(n, size=m, replace=False))
            else:
                rows = np.arange(n)

            def newton(leaf_rows):
                den = h[leaf_rows].sum()
                return g[leaf_rows].sum() / den if den > 1e-12 else 0.0

            tree = grow_tree(
                X, g, rows, criterion="mse", max_depth=self.max_depth, min_samples_leaf=self.min_samples_leaf,
                max_features=X.shape[1], rng=None, leaf_value=newton,
            )
            tree.value *= self.learning_rate
            F = F + tree.predict(X)
            self.trees_.append(tree)
            self.train_loss_.append(float(np.mean(log_loss_terms(F, y))))
        return self

    def decision_function(self, X) -> np.ndarray:
        F = np.full(len(np.asarray(X)), self.init_)
        for tree in self.trees_:
            F = F + tree.predict(X)
        return F

    def predict_proba(self, X) -> np.ndarray:
        return sigmoid(self.decision_function(X))

    def get_state(self) -> dict:
        return {
            "n_rounds": self.n_rounds,
            "learning_rate": self.learning_rate,
            "max_depth": self.max_depth,
            "subsample": self.subsample,
            "min_samples_leaf": self.min_samples_leaf,
            "seed": self.seed,
            "init": self.init_,
            "trees": [t.get_state() for t in self.trees_],
        }

    @classmethod
    def from_state(cls, s: dict) -> "GradientBoosting":
        m = cls(s["n_rounds"], s["learning_rate"], s["max_depth"], s["subsample"], s["min_samples_leaf"], s["seed"])
        m.init_ = s["init"]
        m.trees_ = [Tree.from_state(t) for t in s["trees"]]
        return m
