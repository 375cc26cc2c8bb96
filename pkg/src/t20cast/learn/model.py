"""Uniform train/predict contract over the four learners, plus JSON persistence."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .bayes import BucketedNB, GaussianNB
from .logistic import LogisticRegressionGD
from .pca import PCAConfig, PCATransform, fit_pca
from .trees import GradientBoosting, RandomForest

KINDS = ("naive_bayes", "logistic_regression", "random_forest", "gradient_boosting")

DEFAULT_HYPERPARAMETERS: dict[str, dict[str, Any]] = {
    "naive_bayes": {"event_model": "gaussian", "var_smoothing": 1e-9, "bins": 5, "alpha": 1.0},
    "logistic_regression": {"l2": 1e-4, "tol": 1e-8, "max_iter": 10_000},
    "random_forest": {"n_trees": 200, "max_features": "sqrt", "min_samples_leaf": 1,
                      "max_depth": None, "bootstrap": True},
    "gradient_boosting": {"n_rounds": 200, "learning_rate": 0.1, "max_depth": 3,
                          "subsample": 1.0, "min_samples_leaf": 1},
}


class FeatureMismatch(ValueError):
    """Prediction input columns differ from the training columns."""


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    hyperparameters: Mapping[str, Any] = field(default_factory=dict)
    use_pca: bool = False
    pca_config: PCAConfig = PCAConfig()
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        allowed = DEFAULT_HYPERPARAMETERS[self.kind]
        unknown = sorted(set(self.hyperparameters) - set(allowed))
        if unknown:
            raise ValueError(f"{self.kind} does not accept hyperparameter(s) {', '.join(unknown)}; "
                             f"valid: {', '.join(sorted(allowed))}")
        merged = {**allowed, **self.hyperparameters}
        if self.kind == "naive_bayes" and merged["event_model"] not in ("gaussian", "bucketed"):
            raise ValueError("naive_bayes event_model must be 'gaussian' or 'bucketed'")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "hyperparameters", merged)
        # instantiate once so constructor-level checks fire here
        _make_estimator(self)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "hyperparameters": dict(sorted(self.hyperparameters.items())),
            "use_pca": self.use_pca,
            "pca": {"n_components": self.pca_config.n_components, "variance": self.pca_config.variance},
            "seed": int(self.seed),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ModelSpec":
        pca = d.get("pca") or {}
        return cls(
            kind=d["kind"],
            hyperparameters=dict(d.get("hyperparameters", {})),
            use_pca=bool(d.get("use_pca", False)),
            pca_config=PCAConfig(pca.get("n_components"), pca.get("variance", 0.95)),
            seed=int(d.get("seed", 0)),
        )


def _make_estimator(spec: ModelSpec):
    hp = spec.hyperparameters
    if spec.kind == "naive_bayes":
        if hp["event_model"] == "bucketed":
            return BucketedNB(bins=int(hp["bins"]), alpha=float(hp["alpha"]))
        return GaussianNB(var_smoothing=float(hp["var_smoothing"]))
    if spec.kind == "logistic_regression":
        return LogisticRegressionGD(l2=float(hp["l2"]), tol=float(hp["tol"]), max_iter=int(hp["max_iter"]))
    if spec.kind == "random_forest":
        return RandomForest(n_trees=int(hp["n_trees"]), max_features=hp["max_features"],
                            min_samples_leaf=int(hp["min_samples_leaf"]), max_depth=hp["max_depth"],
                            bootstrap=bool(hp["bootstrap"]), seed=spec.seed)
    return GradientBoosting(n_rounds=int(hp["n_rounds"]), learning_rate=float(hp["learning_rate"]),
                            max_depth=int(hp["max_depth"]), subsample=float(hp["subsample"]),
                            min_samples_leaf=int(hp["min_samples_leaf"]), seed=spec.seed)


def _estimator_from_state(kind: str, state: dict):
    if kind == "naive_bayes":
        return BucketedNB.from_state(state) if state["event_model"] == "bucketed" else GaussianNB.from_state(state)
    return {
        "logistic_regression": LogisticRegressionGD,
        "random_forest": RandomForest,
        "gradient_boosting": GradientBoosting,
    }[kind].from_state(state)


@dataclass(frozen=True)
class TrainedModel:
    spec: ModelSpec
    estimator: Any
    feature_names: tuple[str, ...]
    pca: PCATransform | None = None

    def _prepare(self, X, feature_names: Sequence[str] | None) -> np.ndarray:
        if feature_names is None:
            feature_names = getattr(X, "columns", None)
            X = getattr(X, "X", X)
        if feature_names is None:
            raise FeatureMismatch("feature names are required for prediction")
        names = tuple(feature_names)
        if names != self.feature_names:
            missing = [c for c in self.feature_names if c not in names]
            extra = [c for c in names if c not in self.feature_names]
            detail = []
            if missing:
                detail.append(f"missing: {', '.join(missing)}")
            if extra:
                detail.append(f"extra: {', '.join(extra)}")
            if not detail:
                detail.append("columns are in a different order than at training time")
            raise FeatureMismatch("; ".join(detail))
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if self.pca is not None:
            X = self.pca.transform(X)
        return X

    def to_dict(self) -> dict:
        return {
            "format": "t20cast.model/1",
            "spec": self.spec.to_dict(),
            "feature_names": list(self.feature_names),
            "pca": self.pca.to_state() if self.pca is not None else None,
            "parameters": self.estimator.get_state(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: Mapping) -> "TrainedModel":
        spec = ModelSpec.from_dict(d["spec"])
        return cls(
            spec=spec,
            estimator=_estimator_from_state(spec.kind, d["parameters"]),
            feature_names=tuple(d["feature_names"]),
            pca=PCATransform.from_state(d["pca"]) if d.get("pca") else None,
        )

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        return cls.from_dict(json.loads(text))


def fit(spec: ModelSpec, X, y=None, feature_names: Sequence[str] | None = None) -> TrainedModel:
    """Train ``spec`` on a FeatureMatrix, or on an array plus ``y`` and names."""
    if y is None:
        feature_names, y, X = X.columns, X.y, X.X
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if feature_names is None:
        feature_names = tuple(f"x{i}" for i in range(X.shape[1]))
    if len(feature_names) != X.shape[1]:
        raise ValueError("feature_names length does not match the number of columns")
    pca = None
    if spec.use_pca:
        pca = fit_pca(X, spec.pca_config)
        X = pca.transform(X)
    est = _make_estimator(spec).fit(X, y)
    return TrainedModel(spec, est, tuple(feature_names), pca)


def predict_proba(model: TrainedModel, X, feature_names: Sequence[str] | None = None) -> np.ndarray:
    """P(home win) per row."""
    Xp = model._prepare(X, feature_names)
    return np.clip(model.estimator.predict_proba(Xp), 0.0, 1.0)


def predict(model: TrainedModel, X, feature_names: Sequence[str] | None = None) -> np.ndarray:
    """1 (home win) when P >= 0.5, so an exact 0.5 goes to the home side."""
    return (predict_proba(model, X, feature_names) >= 0.5).astype(np.int64)


def fit_naive_bayes(X, y, feature_names=None, **hyper) -> TrainedModel:
    return fit(ModelSpec("naive_bayes", hyper), X, y, feature_names)


def fit_logistic_regression(X, y, feature_names=None, **hyper) -> TrainedModel:
    return fit(ModelSpec("logistic_regression", hyper), X, y, feature_names)


def fit_random_forest(X, y, feature_names=None, seed: int = 0, **hyper) -> TrainedModel:
    return fit(ModelSpec("random_forest", hyper, seed=seed), X, y, feature_names)


def fit_gradient_boosting(X, y, feature_names=None, seed: int = 0, **hyper) -> TrainedModel:
    return fit(ModelSpec("gradient_boosting", hyper, seed=seed), X, y, feature_names)


# ---------------------------------------------------------------------------
# evaluation protocols used by feature elimination


def evaluate_accuracy(matrix, spec: ModelSpec, protocol: str = "loso") -> float:
    """Pooled accuracy over folds.

    "loso": each season is predicted by a model trained on every other season.
    "rolling": each season after the first is predicted from all earlier ones.
    """
    seasons = sorted(set(int(s) for s in matrix.seasons))
    if len(seasons) < 2:
        raise ValueError("evaluation needs at least 2 seasons")
    correct = total = 0
    for s in seasons:
        test = matrix.seasons == s
        if protocol == "loso":
            train = ~test
        elif protocol == "rolling":
            train = matrix.seasons < s
        else:
            raise ValueError(f"unknown evaluation protocol {protocol!r}")
        if not train.any() or np.unique(matrix.y[train]).size < 2:
            continue
        model = fit(spec, matrix.X[train], matrix.y[train], matrix.columns)
        pred = predict(model, matrix.X[test], matrix.columns)
        correct += int(np.sum(pred == matrix.y[test]))
        total += int(test.sum())
    if total == 0:
        raise ValueError("no fold could be evaluated")
    return correct / total
