from .bayes import BucketedNB, GaussianNB
from .logistic import LogisticRegressionGD
from .model import (
    DEFAULT_HYPERPARAMETERS,
    KINDS,
    FeatureMismatch,
    ModelSpec,
    TrainedModel,
    evaluate_accuracy,
    fit,
    fit_gradient_boosting,
    fit_logistic_regression,
    fit_naive_bayes,
    fit_random_forest,
    predict,
    predict_proba,
)
from .pca import PCAConfig, PCATransform, fit_pca
from .trees import DecisionTreeClassifier, GradientBoosting, RandomForest

__all__ = [
    "BucketedNB", "GaussianNB", "LogisticRegressionGD", "DecisionTreeClassifier", "RandomForest",
    "GradientBoosting", "PCAConfig", "PCATransform", "fit_pca", "DEFAULT_HYPERPARAMETERS", "KINDS",
    "FeatureMismatch", "ModelSpec", "TrainedModel", "evaluate_accuracy", "fit", "fit_naive_bayes",
    "fit_logistic_regression", "fit_random_forest", "fit_gradient_boosting", "predict", "predict_proba",
]
