"""Twenty20 match outcome prediction: team and player features, feature
selection, four classifiers and a rolling-season backtest."""

__version__ = "0.1.0"
