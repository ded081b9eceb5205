"""Principal components of a training matrix via thin SVD."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimError, InsufficientDataError


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # d x r, columns ordered by singular value
    singular_values: np.ndarray
    n_train: int

    @property
    def n_components(self):
        return self.components.shape[1]

    def to_dict(self):
        return {
            "mean": self.mean.tolist(),
            "components": self.components.T.tolist(),  # column-major: one list per component
            "singular_values": self.singular_values.tolist(),
            "n_train": int(self.n_train),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            np.asarray(d["mean"], dtype=float),
            np.asarray(d["components"], dtype=float).T.reshape(len(d["mean"]), -1),
            np.asarray(d["singular_values"], dtype=float),
            int(d["n_train"]),
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def fit_pca(X_train):
    """Fit components on mean-centred ``X_train`` (rows are samples).

    Each component's largest-magnitude entry is made positive so that
    component identities are stable across platforms.
    """
    X = np.asarray(X_train, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise InsufficientDataError("PCA needs at least two samples")
    mean = X.mean(axis=0)
    _, s, vt = np.linalg.svd(X - mean, full_matrices=False)
    V = vt.T
    pivot = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[pivot, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return PcaModel(mean, V * signs, s, X.shape[0])


def project(model: PcaModel, X, component_indices=None):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.mean.size:
        raise DimError(f"expected {model.mean.size} features, got {X.shape[1]}")
    if component_indices is None:
        component_indices = range(model.n_components)
    idx = [int(i) for i in component_indices]
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate component indices {idx}")
    for i in idx:
        if not 0 <= i < model.n_components:
            raise IndexError(f"component {i} out of range (model has {model.n_components})")
    return (X - model.mean) @ model.components[:, idx]


def reconstruct(model: PcaModel, scores, component_indices=None):
    if component_indices is None:
        component_indices = range(model.n_components)
    return np.asarray(scores) @ model.components[:, list(component_indices)].T + model.mean


def explained_variance(model: PcaModel):
    return model.singular_values**2 / model.n_train
