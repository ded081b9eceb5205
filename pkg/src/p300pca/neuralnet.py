"""Softmax network with at most one sigmoid hidden layer, trained by SCG.

``n_hidden == 0`` gives linear logistic regression (inputs feed the softmax
directly); ``n_hidden > 0`` gives the nonlinear single-hidden-layer model.

Flat parameter ordering: hidden biases, hidden weights (column-major,
d x M), output biases, output weights (column-major, M x K or d x K).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimError, InsufficientDataError, NumericalError, TargetError
from .rng import derive_rng


@dataclass(frozen=True)
class NetworkWeights:
    hidden_biases: np.ndarray
    hidden_weights: np.ndarray
    output_biases: np.ndarray
    output_weights: np.ndarray

    @property
    def n_inputs(self):
        if self.n_hidden:
            return self.hidden_weights.shape[0]
        return self.output_weights.shape[0]

    @property
    def n_hidden(self):
        return self.hidden_biases.size

    @property
    def n_outputs(self):
        return self.output_biases.size

    def flatten(self):
        return np.concatenate([
            self.hidden_biases,
            self.hidden_weights.ravel(order="F"),
            self.output_biases,
            self.output_weights.ravel(order="F"),
        ])

    @classmethod
    def unflatten(cls, theta, d, M, K):
        theta = np.asarray(theta, dtype=float)
        if theta.size != parameter_count(d, M, K):
            raise DimError(f"expected {parameter_count(d, M, K)} parameters, got {theta.size}")
        fan = M if M else d
        i = 0
        a0 = theta[i:i + M]; i += M
        a = theta[i:i + d * M].reshape((d, M), order="F"); i += d * M
        b0 = theta[i:i + K]; i += K
        b = theta[i:i + fan * K].reshape((fan, K), order="F")
        return cls(a0, a, b0, b)


def parameter_count(d, M, K):
    if M == 0:
        return K * (d + 1)
    return M * (d + 1) + K * (M + 1)


def init_network(d, M, K, seed=0):
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases."""
    if d < 1 or K < 1 or M < 0:
        raise DimError("need d >= 1, K >= 1 and M >= 0")
    rng = derive_rng(seed, "init")
    a = rng.uniform(-1, 1, size=(d, M)) / np.sqrt(d)
    fan = M if M else d
    b = rng.uniform(-1, 1, size=(fan, K)) / np.sqrt(fan)
    return NetworkWeights(np.zeros(M), a, np.zeros(K), b)


def softmax(Y):
    Y = np.atleast_2d(Y)
    Y = Y - Y.max(axis=1, keepdims=True)
    e = np.exp(Y)
    return e / e.sum(axis=1, keepdims=True)


def _sigmoid(v):
    # tanh form: exact to rounding and much faster than expit here
    return 0.5 + 0.5 * np.tanh(0.5 * v)


def _hidden(w, X):
    if w.n_hidden == 0:
        return X
    return _sigmoid(X @ w.hidden_weights + w.hidden_biases)


def forward_weights(w: NetworkWeights, X):
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != w.n_inputs:
        raise DimError(f"expected {w.n_inputs} inputs, got {X.shape[1]}")
    P = softmax(_hidden(w, X) @ w.output_weights + w.output_biases)
    return P[0] if single else P


def one_hot(y, classes):
    y = np.asarray(y)
    T = (y[:, None] == np.asarray(classes)[None, :]).astype(float)
    if np.any(T.sum(axis=1) != 1):
        raise TargetError("label outside the class list")
    return T


def nll_loss_and_gradient(w: NetworkWeights, X, T):
    """Negative log-likelihood summed over samples, and its flat gradient."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = np.atleast_2d(np.asarray(T, dtype=float))
    if X.shape[1] != w.n_inputs or T.shape != (X.shape[0], w.n_outputs):
        raise DimError("X / T shapes do not match the network")
    if not (np.all((T == 0) | (T == 1)) and np.all(T.sum(axis=1) == 1)):
        raise TargetError("target rows must be one-hot")
    return _nll_flat(w.flatten(), X, T, w.n_hidden)


def _nll_flat(theta, X, T, M):
    # unchecked path: no validation, shapes trusted
    X1 = np.column_stack([np.ones(X.shape[0]), X])
    return _nll_augmented(theta, X1, T, M)


def _nll_augmented(theta, X1, T, M):
    """Loss and gradient with a leading column of ones in ``X1``.

    Biases ride along as the first weight row, so each layer is one matmul.
    Row reductions are written as products with ones, which is markedly
    cheaper than axis sums for the tall, narrow arrays seen in training.
    """
    n, d1 = X1.shape
    d = d1 - 1
    K = T.shape[1]
    if M:
        A1 = np.vstack([theta[:M], theta[M:M + d * M].reshape((d, M), order="F")])
        off = M + d * M
        Z = 0.5 + 0.5 * np.tanh(0.5 * (X1 @ A1))
        fan = M
    else:
        off = 0
        Z = X1[:, 1:]
        fan = d
    b0 = theta[off:off + K]
    b = theta[off + K:].reshape((fan, K), order="F")
    Y = Z @ b + b0
    top = Y[:, 0].copy()
    for k in range(1, K):
        np.maximum(top, Y[:, k], out=top)
    Y -= top[:, None]
    E = np.exp(Y)
    S = E @ np.ones(K)
    loss = float(np.log(S) @ np.ones(n) - T.ravel() @ Y.ravel())
    dY = E / S[:, None] - T
    grad = np.empty_like(theta)
    ones = np.ones(n)
    grad[off:off + K] = ones @ dY
    grad[off + K:] = (Z.T @ dY).ravel(order="F")
    if M:
        dA = (dY @ b.T) * Z * (1.0 - Z)
        G = X1.T @ dA
        grad[:M] = G[0]
        grad[M:off] = G[1:].ravel(order="F")
    return loss, grad


@dataclass(frozen=True)
class ScgOptions:
    max_iterations: int = 500
    grad_tol: float = 1e-5
    lambda_init: float = 1e-6
    sigma: float = 1e-4
    loss_tol: float = 1e-9

    def __post_init__(self):
        for name in ("max_iterations", "grad_tol", "lambda_init", "sigma", "loss_tol"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass
class ScgResult:
    x: np.ndarray
    loss: float
    iterations: int
    n_evaluations: int
    reason: str
    accepted_losses: list = field(default_factory=list)


def scg_minimize(objective, theta0, opts: ScgOptions | None = None):
    """Scaled conjugate gradient minimisation (Moller, 1993).

    ``objective(theta)`` returns ``(loss, gradient)``. The curvature along
    the search direction is estimated from a forward difference of the
    gradient, and a Levenberg-Marquardt style scale ``lam`` replaces the line
    search. The direction restarts to steepest descent every ``n``
    successful steps, ``n`` being the number of parameters.
    """
    opts = opts or ScgOptions()
    w = np.array(theta0, dtype=float)
    n = w.size
    nfev = 0

    def evaluate(x, it):
        nonlocal nfev
        nfev += 1
        f, g = objective(x)
        g = np.asarray(g, dtype=float)
        if not np.isfinite(f) or not np.all(np.isfinite(g)):
            raise NumericalError(f"non-finite loss or gradient at iteration {it}", iteration=it)
        return float(f), g

    f, g = evaluate(w, 0)
    r = -g
    p = r.copy()
    lam = opts.lambda_init
    lam_bar = 0.0
    success = True
    n_success = 0
    accepted = [f]
    reason = "max_iterations"
    it = 0
    if np.linalg.norm(r) <= opts.grad_tol:
        return ScgResult(w, f, 0, nfev, "grad_tol", accepted)

    while it < opts.max_iterations:
        it += 1
        p2 = p @ p
        if success:
            sigma_k = opts.sigma / np.sqrt(p2)
            _, g_sig = evaluate(w + sigma_k * p, it)
            s = (g_sig - g) / sigma_k
            delta = p @ s
        # scale the curvature estimate; force it positive
        delta += (lam - lam_bar) * p2
        if delta <= 0:
            lam_bar = 2.0 * (lam - delta / p2)
            delta = -delta + lam * p2
            lam = lam_bar
        mu = p @ r
        alpha = mu / delta
        w_new = w + alpha * p
        f_new, g_new = evaluate(w_new, it)
        comparison = 2.0 * delta * (f - f_new) / (mu * mu)
        if comparison >= 0 and f_new <= f:
            df = f - f_new
            w, f = w_new, f_new
            r_new = -g_new
            g = g_new
            accepted.append(f)
            lam_bar = 0.0
            success = True
            n_success += 1
            if np.linalg.norm(r_new) <= opts.grad_tol:
                r = r_new
                reason = "grad_tol"
                break
            if df < opts.loss_tol:
                r = r_new
                reason = "loss_tol"
                break
            if n_success % n == 0:
                p = r_new.copy()
            else:
                beta = (r_new @ r_new - r_new @ r) / mu
                p = r_new + beta * p
            r = r_new
            if comparison >= 0.75:
                lam = 0.25 * lam
        else:
            lam_bar = lam
            success = False
        if comparison < 0.25:
            lam = lam + delta * (1.0 - comparison) / p2
        if mu == 0 or not np.isfinite(lam):
            reason = "stalled"
            break
    return ScgResult(w, f, it, nfev, reason, accepted)


@dataclass(frozen=True)
class NnModel:
    weights: NetworkWeights
    classes: np.ndarray
    final_loss: float = float("nan")
    iterations: int = 0

    kind = "nn"

    @property
    def n_hidden(self):
        return self.weights.n_hidden

    @property
    def n_features(self):
        return self.weights.n_inputs

    def predict_proba(self, X):
        return forward_weights(self.weights, X)

    def discriminants(self, X):
        return np.log(np.maximum(self.predict_proba(X), np.finfo(float).tiny))

    def predict(self, X):
        return self.classes[np.argmax(np.atleast_2d(self.predict_proba(X)), axis=1)]

    def to_dict(self):
        w = self.weights
        return {
            "kind": "nn",
            "n_inputs": w.n_inputs,
            "n_hidden": w.n_hidden,
            "classes": self.classes.tolist(),
            "theta": w.flatten().tolist(),
            "final_loss": self.final_loss,
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, d):
        K = len(d["classes"])
        w = NetworkWeights.unflatten(d["theta"], d["n_inputs"], d["n_hidden"], K)
        return cls(w, np.asarray(d["classes"]), d.get("final_loss", float("nan")), d.get("iterations", 0))


def forward(model: NnModel, x):
    return model.predict_proba(x)


def train_nn(X, y, n_hidden, opts: ScgOptions | None = None, seed=0, return_result=False):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size < 2:
        raise InsufficientDataError("training needs both classes")
    d, K = X.shape[1], classes.size
    T = one_hot(y, classes)
    w0 = init_network(d, n_hidden, K, seed)

    X1 = np.column_stack([np.ones(X.shape[0]), X])

    def objective(theta):
        return _nll_augmented(theta, X1, T, n_hidden)

    res = scg_minimize(objective, w0.flatten(), opts)
    model = NnModel(NetworkWeights.unflatten(res.x, d, n_hidden, K), classes, res.loss, res.iterations)
    return (model, res) if return_result else model
