"""Principal component analysis on standardized columns."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PCAConfig:
    n_components: int | None = None
    variance: float = 0.95

    def __post_init__(self):
        if self.n_components is not None and self.n_components < 1:
            raise ValueError("n_components must be >= 1")
        if not 0.0 < self.variance <= 1.0:
            raise ValueError("variance fraction must lie in (0, 1]")


@dataclass(frozen=True)
class PCATransform:
    mean: np.ndarray
    scale: np.ndarray
    components: np.ndarray  # (k, d), rows orthonormal
    explained_variance_ratio: np.ndarray
    rank_deficient: bool = False

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def transform(self, X) -> np.ndarray:
        Z = (np.asarray(X, dtype=float) - self.mean) / self.scale
        return Z @ self.components.T

    def inverse_transform(self, T) -> np.ndarray:
        return (np.asarray(T, dtype=float) @ self.components) * self.scale + self.mean

    def to_state(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "components": self.components.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
            "rank_deficient": self.rank_deficient,
        }

    @classmethod
    def from_state(cls, state: dict) -> "PCATransform":
        d = len(state["mean"])
        return cls(
            mean=np.array(state["mean"], dtype=float),
            scale=np.array(state["scale"], dtype=float),
            components=np.array(state["components"], dtype=float).reshape(-1, d),
            explained_variance_ratio=np.array(state["explained_variance_ratio"], dtype=float),
            rank_deficient=bool(state["rank_deficient"]),
        )


def fit_pca(X, config: PCAConfig = PCAConfig()) -> PCATransform:
    """Eigendecomposition of the correlation matrix, components by descending eigenvalue.

    Keeps ``config.n_components`` components, or else the fewest reaching
    ``config.variance`` of the total. Directions with (numerically) zero
    eigenvalue are never kept; ``rank_deficient`` records that this happened.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 1:
        raise ValueError("PCA needs a 2-D array with at least 2 rows and 1 column")
    n, d = X.shape
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    Z = (X - mean) / scale
    cov = (Z.T @ Z) / n
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals, kind="stable")[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order].T
    # deterministic sign: largest-magnitude loading positive
    for i in range(d):
        j = int(np.argmax(np.abs(evecs[i])))
        if evecs[i, j] < 0:
            evecs[i] = -evecs[i]
    total = evals.sum()
    if total <= 0:
        ratios = np.zeros(d)
        usable = 1
    else:
        ratios = evals / total
        usable = int(np.sum(evals > max(1e-10 * evals[0], 1e-12)))
    if config.n_components is not None:
        k = min(config.n_components, usable, d)
    else:
        cum = np.cumsum(ratios)
        k = int(np.searchsorted(cum, config.variance - 1e-12) + 1)
        k = min(max(k, 1), usable)
    k = max(k, 1)
    return PCATransform(mean, scale, evecs[:k].copy(), ratios[:k].copy(), rank_deficient=usable < d)
