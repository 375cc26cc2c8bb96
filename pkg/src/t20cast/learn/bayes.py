"""Naive Bayes: Gaussian by default, with a bucketed categorical variant."""

from __future__ import annotations

import numpy as np


def _check_binary(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.int64)
    if y.size == 0 or set(np.unique(y)) - {0, 1}:
        raise ValueError("labels must be 0/1")
    if np.unique(y).size < 2:
        raise ValueError("training set contains a single class")
    return y


def _posterior_from_logs(log0: np.ndarray, log1: np.ndarray) -> np.ndarray:
    # P(y=1) = 1 / (1 + exp(log0 - log1)), written to keep p(flip) == 1 - p
    diff = log1 - log0
    out = np.empty_like(diff)
    pos = diff >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-diff[pos]))
    e = np.exp(diff[~pos])
    out[~pos] = e / (1.0 + e)
    return out


class GaussianNB:
    def __init__(self, var_smoothing: float = 1e-9):
        self.var_smoothing = var_smoothing

    def fit(self, X, y) -> "GaussianNB":
        X = np.asarray(X, dtype=float)
        y = _check_binary(y)
        col_var = X.var(axis=0)
        max_var = float(col_var.max()) if col_var.size else 0.0
        self.epsilon_ = self.var_smoothing * (max_var if max_var > 0 else 1.0)
        self.log_prior_ = np.empty(2)
        self.theta_ = np.empty((2, X.shape[1]))
        self.var_ = np.empty((2, X.shape[1]))
        for c in (0, 1):
            Xc = X[y == c]
            self.log_prior_[c] = np.log(len(Xc) / len(X))
            self.theta_[c] = Xc.mean(axis=0)
            self.var_[c] = Xc.var(axis=0) + self.epsilon_
        return self

    def _joint_log_likelihood(self, X) -> tuple[np.ndarray, np.ndarray]:
        X = np.asarray(X, dtype=float)
        out = []
        for c in (0, 1):
            ll = -0.5 * np.sum(np.log(2.0 * np.pi * self.var_[c]))
            ll = ll - 0.5 * np.sum((X - self.theta_[c]) ** 2 / self.var_[c], axis=1)
            out.append(self.log_prior_[c] + ll)
        return out[0], out[1]

    def predict_proba(self, X) -> np.ndarray:
        """Posterior probability of class 1 for each row."""
        return _posterior_from_logs(*self._joint_log_likelihood(X))

    def get_state(self) -> dict:
        return {
            "event_model": "gaussian",
            "var_smoothing": self.var_smoothing,
            "epsilon": self.epsilon_,
            "log_prior": self.log_prior_.tolist(),
            "theta": self.theta_.tolist(),
            "var": self.var_.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "GaussianNB":
        m = cls(state["var_smoothing"])
        m.epsilon_ = state["epsilon"]
        m.log_prior_ = np.array(state["log_prior"], dtype=float)
        m.theta_ = np.array(state["theta"], dtype=float).reshape(2, -1)
        m.var_ = np.array(state["var"], dtype=float).reshape(2, -1)
        return m


class BucketedNB:
    """Categorical naive Bayes over equal-frequency buckets of each feature,
    with Laplace smoothing ``alpha``."""

    def __init__(self, bins: int = 5, alpha: float = 1.0):
        self.bins = bins
        self.alpha = alpha

    def fit(self, X, y) -> "BucketedNB":
        from ..selection import bucketize

        X = np.asarray(X, dtype=float)
        y = _check_binary(y)
        self.edges_ = []
        self.log_prob_ = []
        for j in range(X.shape[1]):
            b = bucketize(X[:, j], self.bins)
            self.edges_.append(b.edges)
            k = len(b.edges) + 1
            counts = np.zeros((2, k))
            np.add.at(counts, (y, b.codes), 1)
            smoothed = counts + self.alpha
            self.log_prob_.append(np.log(smoothed / smoothed.sum(axis=1, keepdims=True)))
        self.log_prior_ = np.log(np.bincount(y, minlength=2) / len(y))
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        log0 = np.full(len(X), self.log_prior_[0])
        log1 = np.full(len(X), self.log_prior_[1])
        for j, (edges, lp) in enumerate(zip(self.edges_, self.log_prob_)):
            codes = np.searchsorted(edges, X[:, j], side="left")
            log0 = log0 + lp[0, codes]
            log1 = log1 + lp[1, codes]
        return _posterior_from_logs(log0, log1)

    def get_state(self) -> dict:
        return {
            "event_model": "bucketed",
            "bins": self.bins,
            "alpha": self.alpha,
            "edges": [e.tolist() for e in self.edges_],
            "log_prob": [lp.tolist() for lp in self.log_prob_],
            "log_prior": self.log_prior_.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "BucketedNB":
        m = cls(state["bins"], state["alpha"])
        m.edges_ = [np.array(e, dtype=float) for e in state["edges"]]
        m.log_prob_ = [np.array(lp, dtype=float) for lp in state["log_prob"]]
        m.log_prior_ = np.array(state["log_prior"], dtype=float)
        return m
