"""Independent oracles shared by several test modules."""

import numpy as np
from scipy.stats import ortho_group

from p300pca.data_model import ChannelSubtrialDataset


def central_diff(f, theta, h=1e-6):
    g = np.empty_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = h
        g[i] = (f(theta + e) - f(theta - e)) / (2 * h)
    return g


def brute_force_vote(S):
    """Majority of per-row argmax; ties to the larger column sum, then lowest index."""
    counts = np.bincount(np.argmax(S, axis=1), minlength=S.shape[1])
    leaders = [k for k in range(S.shape[1]) if counts[k] == counts.max()]
    if len(leaders) == 1:
        return leaders[0]
    sums = S.sum(axis=0)
    return max(leaders, key=lambda k: (sums[k], -k))


def make_selection_dataset(seed, n_groups=12, n_channels=2, spreads=(5.0, 3.0, 1.5, 1.0, 0.7, 0.5), signal=None, offset=1.0):
    """Latent coordinates with descending spread, rotated into feature space.

    ``signal`` is the latent axis carrying the class offset.
    """
    r = np.random.default_rng(seed)
    d = len(spreads)
    n = 2 * n_groups * n_channels
    y = np.repeat([0, 1], n_groups * n_channels)
    Z = r.standard_normal((n, d)) * spreads
    if signal is None:
        Z += np.outer(y - 0.5, r.uniform(0, offset, d))
    else:
        Z[:, signal] = 0.3 * r.standard_normal(n) + np.where(y == 1, offset, -offset)
    X = Z @ ortho_group.rvs(d, random_state=seed).T
    g = np.arange(n) // n_channels
    c = np.arange(n) % n_channels
    return ChannelSubtrialDataset(X, y, g, c, n_channels, provenance=("train",))


def oracle_single_component_counts(ds, fold_groups, n_candidates):
    """Correct subtrial votes per single component, by a separate code path."""
    counts = np.zeros(n_candidates, dtype=int)
    for tr_ids, va_ids in fold_groups:
        tr = np.isin(ds.group_id, tr_ids)
        va = np.isin(ds.group_id, va_ids)
        Xtr = ds.X[tr]
        mean = Xtr.mean(axis=0)
        _, _, Vt = np.linalg.svd(Xtr - mean, full_matrices=False)
        for j in range(n_candidates):
            ztr = (Xtr - mean) @ Vt[j]
            zva = (ds.X[va] - mean) @ Vt[j]
            ytr = ds.y[tr]
            mus = [ztr[ytr == k].mean() for k in (0, 1)]
            var = sum(np.sum((ztr[ytr == k] - mus[k]) ** 2) for k in (0, 1)) / ztr.size
            pri = [np.mean(ytr == k) for k in (0, 1)]
            disc = np.column_stack([zva * m / var - m * m / (2 * var) + np.log(p) for m, p in zip(mus, pri)])
            prob = np.exp(disc - disc.max(axis=1, keepdims=True))
            prob /= prob.sum(axis=1, keepdims=True)
            gva, yva = ds.group_id[va], ds.y[va]
            for gid in np.unique(gva):
                rows = gva == gid
                counts[j] += int(brute_force_vote(prob[rows]) == yva[rows][0])
    return counts
