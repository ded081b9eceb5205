"""Uniform fit/score front end over LDA, QDA, LR and NLR."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .discriminant import fit_lda, fit_qda, scores_to_proba
from .neuralnet import ScgOptions, train_nn

KINDS = ("lda", "qda", "lr", "nlr")


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str = "lda"
    n_hidden: int | None = None  # NLR only; None means "one unit per input feature"
    scg: ScgOptions = field(default_factory=ScgOptions)
    ridge: float = 0.0
    covariance: str = "population"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown classifier {self.kind!r}; choose from {KINDS}")
        if self.covariance not in ("population", "sample"):
            raise ValueError("covariance must be 'population' or 'sample'")
        if self.n_hidden is not None and self.n_hidden < 1:
            raise ValueError("n_hidden must be >= 1 when given")
        if isinstance(self.scg, dict):
            object.__setattr__(self, "scg", ScgOptions(**self.scg))

    def hidden_units(self, n_features):
        if self.kind == "lr":
            return 0
        return self.n_hidden if self.n_hidden is not None else n_features

    def to_dict(self):
        d = asdict(self)
        d["scg"] = asdict(self.scg)
        return d


def fit_classifier(spec: ClassifierSpec, X, y, seed=0):
    bias = spec.covariance == "population"
    if spec.kind == "lda":
        return fit_lda(X, y, bias=bias, ridge=spec.ridge)
    if spec.kind == "qda":
        return fit_qda(X, y, bias=bias, ridge=spec.ridge)
    return train_nn(X, y, spec.hidden_units(np.shape(X)[1]), spec.scg, seed)


def class_probabilities(model, X):
    """Per-row class probabilities; softmax of the discriminants for LDA/QDA."""
    if hasattr(model, "predict_proba"):
        return np.atleast_2d(model.predict_proba(X))
    return scores_to_proba(model.discriminants(np.atleast_2d(X)))
