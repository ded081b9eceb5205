"""Gaussian generative classifiers: LDA (shared covariance) and QDA.

Discriminants
    LDA: d_k(x) = x' S^-1 m_k - 1/2 m_k' S^-1 m_k + ln p_k
    QDA: d_k(x) = -1/2 ln|S_k| - 1/2 (x - m_k)' S_k^-1 (x - m_k) + ln p_k

Covariances are Cholesky-factorised once at fit time; nothing here forms an
explicit inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DimError, InsufficientDataError, SingularCovarianceError

RCOND_LIMIT = 1e-12


@dataclass(frozen=True)
class GaussianClassParams:
    prior: float
    mean: np.ndarray
    covariance: np.ndarray
    n: int


def _class_params(X, y, bias=True, min_per_class=2):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DimError("X must be n x d with one label per row")
    classes = np.unique(y)
    if classes.size < 2:
        raise InsufficientDataError("need samples from at least two classes")
    params = []
    for k in classes:
        Xk = X[y == k]
        if Xk.shape[0] < min_per_class:
            raise InsufficientDataError(f"class {k} has {Xk.shape[0]} samples")
        mu = Xk.mean(axis=0)
        D = Xk - mu
        denom = Xk.shape[0] if bias else Xk.shape[0] - 1
        cov = D.T @ D / denom
        cov = 0.5 * (cov + cov.T)
        params.append(GaussianClassParams(Xk.shape[0] / X.shape[0], mu, cov, Xk.shape[0]))
    return classes, params


def _factor(cov, what):
    ev = np.linalg.eigvalsh(cov)
    top = ev[-1]
    if not top > 0 or ev[0] / top < RCOND_LIMIT:
        rc = 0.0 if not top > 0 else ev[0] / top
        raise SingularCovarianceError(f"{what} covariance is singular (reciprocal condition {rc:.3g})")
    try:
        return linalg.cho_factor(cov, lower=True)
    except linalg.LinAlgError as exc:
        raise SingularCovarianceError(f"{what} covariance is not positive definite") from exc


def _check_dim(X, d):
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != d:
        raise DimError(f"expected {d} features, got {X.shape[1]}")
    return X, single


class LdaModel:
    """Fitted LDA classifier; immutable after construction."""

    kind = "lda"

    def __init__(self, classes, params, ridge=0.0):
        self.classes = np.asarray(classes)
        self.params = tuple(params)
        self.ridge = float(ridge)
        d = self.params[0].mean.size
        pooled = sum(p.prior * p.covariance for p in self.params)
        if ridge:
            pooled = pooled + ridge * np.eye(d)
        self.pooled_covariance = pooled
        self._chol = _factor(pooled, "pooled")
        means = np.column_stack([p.mean for p in self.params])
        self._coef = linalg.cho_solve(self._chol, means)  # S^-1 m_k as columns
        self._intercept = -0.5 * np.sum(means * self._coef, axis=0) + np.log([p.prior for p in self.params])

    @property
    def n_features(self):
        return self.params[0].mean.size

    def discriminants(self, X):
        X, single = _check_dim(X, self.n_features)
        out = X @ self._coef + self._intercept
        return out[0] if single else out

    def to_dict(self):
        return {
            "kind": self.kind,
            "classes": self.classes.tolist(),
            "ridge": self.ridge,
            "params": [
                {"prior": p.prior, "n": p.n, "mean": p.mean.tolist(), "covariance": p.covariance.tolist()}
                for p in self.params
            ],
        }


class QdaModel:
    kind = "qda"

    def __init__(self, classes, params, ridge=0.0):
        self.classes = np.asarray(classes)
        self.params = tuple(params)
        self.ridge = float(ridge)
        d = self.params[0].mean.size
        self._chols = []
        self._logdets = []
        for k, p in zip(self.classes, self.params):
            cov = p.covariance + ridge * np.eye(d) if ridge else p.covariance
            if p.n <= d and not ridge:
                raise SingularCovarianceError(
                    f"class {k}: {p.n} samples for {d} features, covariance is singular"
                )
            c, lower = _factor(cov, f"class {k}")
            self._chols.append(c)
            self._logdets.append(2.0 * np.sum(np.log(np.diag(c))))
        self._log_priors = np.log([p.prior for p in self.params])

    @property
    def n_features(self):
        return self.params[0].mean.size

    def discriminants(self, X):
        X, single = _check_dim(X, self.n_features)
        out = np.empty((X.shape[0], len(self.params)))
        for j, p in enumerate(self.params):
            z = linalg.solve_triangular(self._chols[j], (X - p.mean).T, lower=True)
            out[:, j] = -0.5 * self._logdets[j] - 0.5 * np.sum(z * z, axis=0) + self._log_priors[j]
        return out[0] if single else out

    to_dict = LdaModel.to_dict


def fit_lda(X, y, bias=True, ridge=0.0):
    classes, params = _class_params(X, y, bias)
    return LdaModel(classes, params, ridge)


def fit_qda(X, y, bias=True, ridge=0.0):
    classes, params = _class_params(X, y, bias)
    return QdaModel(classes, params, ridge)


def model_from_dict(d):
    params = [
        GaussianClassParams(p["prior"], np.asarray(p["mean"], float), np.asarray(p["covariance"], float), p["n"])
        for p in d["params"]
    ]
    cls = LdaModel if d["kind"] == "lda" else QdaModel
    return cls(d["classes"], params, d.get("ridge", 0.0))


def lda_discriminants(model: LdaModel, x):
    return model.discriminants(x)


def qda_discriminants(model: QdaModel, x):
    return model.discriminants(x)


def scores_to_proba(scores):
    """Softmax over discriminant values (per row)."""
    s = np.atleast_2d(scores)
    s = s - s.max(axis=1, keepdims=True)
    e = np.exp(s)
    return e / e.sum(axis=1, keepdims=True)


def predict(model, X):
    """Argmax of the discriminants; exact ties go to the lowest class index."""
    scores = np.atleast_2d(model.discriminants(np.atleast_2d(X)))
    return model.classes[np.argmax(scores, axis=1)]
