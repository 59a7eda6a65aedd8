"""Estimator-style wrappers over the network core.

GestureNetClassifier exposes fit/predict/decision_function and get_params so
the trainable core composes with standard tooling (clone, grid search,
pipelines). LagPairFeatures turns a (n, 22) frame matrix into the (n, 44)
lag-paired features the networks consume, with the same stream-start
substitution rule the online pipeline uses.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .network import TrainConfig, forward, init_network, train


class GestureNetClassifier(BaseEstimator, ClassifierMixin):
    """Sigmoid feedforward classifier trained by online backprop with momentum.

    y may be a 1-D vector of class labels (encoded one-hot internally) or a
    2-D target matrix, one row per sample; the matrix form admits all-zero
    rows, used to teach a rejector that certain inputs belong to no class.

    Attributes after fit: network_ (the trained Network), classes_,
    loss_history_ (per-epoch mean pattern loss), n_features_in_.
    """

    def __init__(
        self,
        hidden_layers=(44,),
        learning_rate: float = 0.1,
        momentum: float = 0.1,
        epochs: int = 10000,
        seed: int = 0,
        shuffle: bool = True,
        stop_loss: Optional[float] = None,
    ):
        self.hidden_layers = hidden_layers
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.epochs = epochs
        self.seed = seed
        self.shuffle = shuffle
        self.stop_loss = stop_loss

    def fit(self, X, y):
        X = check_array(X, dtype=float)
        y = np.asarray(y)
        if y.ndim == 1:
            if y.shape[0] != X.shape[0]:
                raise ValueError(f"X has {X.shape[0]} samples but y has {y.shape[0]}")
            self.classes_ = np.unique(y)
            targets = np.zeros((X.shape[0], len(self.classes_)))
            col = {c: i for i, c in enumerate(self.classes_)}
            for row, label in enumerate(y):
                targets[row, col[label]] = 1.0
        elif y.ndim == 2:
            if y.shape[0] != X.shape[0]:
                raise ValueError(f"X has {X.shape[0]} samples but y has {y.shape[0]} rows")
            targets = np.asarray(y, dtype=float)
            self.classes_ = np.arange(1, targets.shape[1] + 1)
        else:
            raise ValueError("y must be 1-D labels or a 2-D target matrix")

        layer_sizes = [X.shape[1], *[int(h) for h in self.hidden_layers], targets.shape[1]]
        net = init_network(layer_sizes, self.seed)
        config = TrainConfig(
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            epochs=self.epochs,
            rng_seed=self.seed,
            shuffle=self.shuffle,
            stop_loss=self.stop_loss,
        )
        self.network_, self.loss_history_ = train(net, (X, targets), config)
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        """Raw sigmoid output vectors, shape (n_samples, n_classes).

        These are independent per-class scores, not a distribution; they do
        not sum to 1, so there is deliberately no predict_proba.
        """
        check_is_fitted(self, "network_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return np.vstack([forward(self.network_, row).output for row in X])

    def predict(self, X):
        scores = self.decision_function(X)
        return self.classes_[np.argmax(scores, axis=1)]


class LagPairFeatures(BaseEstimator, TransformerMixin):
    """Pair each frame row with the row `lag` steps earlier.

    Rows are treated as consecutive stream frames; the first rows, which have
    no frame lag steps back, pair with the earliest row available. Output is
    (n, 2*d) for (n, d) input: past frame first, current frame second.
    """

    def __init__(self, lag: int = 1):
        self.lag = lag

    def fit(self, X, y=None):
        if self.lag < 1:
            raise ValueError(f"lag must be >= 1, got {self.lag}")
        X = check_array(X, dtype=float)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        if self.lag < 1:
            raise ValueError(f"lag must be >= 1, got {self.lag}")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        idx = np.maximum(np.arange(X.shape[0]) - self.lag, 0)
        return np.hstack([X[idx], X])
