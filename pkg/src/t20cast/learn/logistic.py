"""L2-regularized logistic regression trained by full-batch gradient descent."""

from __future__ import annotations

import numpy as np


def log_loss_terms(z: np.ndarray, y: np.ndarray) -> np.ndarray:
    # log(1 + exp(z)) - y z, stable for large |z|
    return np.logaddexp(0.0, z) - y * z


def sigmoid(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def objective(params: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float) -> float:
    """Mean log-loss plus (l2/2)·|w|²; ``params`` is [intercept, w...]."""
    b, w = params[0], params[1:]
    z = X @ w + b
    return float(np.mean(log_loss_terms(z, y)) + 0.5 * l2 * (w @ w))


def gradient(params: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float) -> np.ndarray:
    b, w = params[0], params[1:]
    r = sigmoid(X @ w + b) - y
    g = np.empty_like(params)
    g[0] = r.mean()
    g[1:] = X.T @ r / len(y) + l2 * w
    return g


class LogisticRegressionGD:
    """Features are standardized internally; ``coef_``/``intercept_`` are reported
    in original units. Step sizes come from Armijo backtracking, so each accepted
    step lowers the objective."""

    def __init__(self, l2: float = 1e-4, tol: float = 1e-8, max_iter: int = 10_000):
        if l2 < 0:
            raise ValueError("l2 must be >= 0")
        self.l2 = l2
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y) -> "LogisticRegressionGD":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if not np.all(np.isfinite(X)):
            raise ValueError("non-finite feature values")
        if np.unique(y).size < 2:
            raise ValueError("training set contains a single class")
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 0, std, 1.0)
        Z = (X - self.mean_) / self.scale_

        params = np.zeros(Z.shape[1] + 1)
        f = objective(params, Z, y, self.l2)
        history = [f]
        step = 1.0
        converged = False
        g = gradient(params, Z, y, self.l2)
        it = 0
        for it in range(1, self.max_iter + 1):
            if np.max(np.abs(g)) < self.tol:
                converged = True
                break
            gg = float(g @ g)
            step *= 2.0
            while True:
                cand = params - step * g
                f_new = objective(cand, Z, y, self.l2)
                if f_new <= f - 0.5 * step * gg:
                    break
                step *= 0.5
                if step < 1e-20:
                    break
            if f_new > f:
                # no descent possible at machine precision
                break
            params, f = cand, f_new
            history.append(f)
            g = gradient(params, Z, y, self.l2)
        else:
            converged = bool(np.max(np.abs(g)) < self.tol)

        self.n_iter_ = it
        self.converged_ = converged or bool(np.max(np.abs(g)) < self.tol)
        self.grad_norm_ = float(np.max(np.abs(g)))
        self.objective_history_ = history
        self.std_params_ = params
        self.coef_ = params[1:] / self.scale_
        self.intercept_ = float(params[0] - np.sum(params[1:] * self.mean_ / self.scale_))
        return self

    def decision_function(self, X) -> np.ndarray:
        Z = (np.asarray(X, dtype=float) - self.mean_) / self.scale_
        return Z @ self.std_params_[1:] + self.std_params_[0]

    def predict_proba(self, X) -> np.ndarray:
        return sigmoid(self.decision_function(X))

    def get_state(self) -> dict:
        return {
            "l2": self.l2,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "mean": self.mean_.tolist(),
            "scale": self.scale_.tolist(),
            "std_params": self.std_params_.tolist(),
            "coef": self.coef_.tolist(),
            "intercept": self.intercept_,
            "converged": self.converged_,
            "grad_norm": self.grad_norm_,
            "n_iter": self.n_iter_,
        }

    @classmethod
    def from_state(cls, state: dict) -> "LogisticRegressionGD":
        m = cls(state["l2"], state["tol"], state["max_iter"])
        m.mean_ = np.array(state["mean"], dtype=float)
        m.scale_ = np.array(state["scale"], dtype=float)
        m.std_params_ = np.array(state["std_params"], dtype=float)
        m.coef_ = np.array(state["coef"], dtype=float)
        m.intercept_ = state["intercept"]
        m.converged_ = state["converged"]
        m.grad_norm_ = state["grad_norm"]
        m.n_iter_ = state["n_iter"]
        m.objective_history_ = []
        return m
