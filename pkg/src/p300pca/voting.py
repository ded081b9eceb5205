"""Channel-to-subtrial vote aggregation and accuracy."""

import numpy as np

from .errors import GroupError


def vote_aggregate(channel_scores, group_ids, channel_count=8):
    """Combine per-channel class scores into one decision per subtrial.

    Each row votes for its argmax class and the majority wins. A tied vote
    goes to the tied class with the larger summed score over the group's
    rows; a remaining tie goes to the lowest class index.

    Returns ``(group_ids, class_indices)`` with groups in first-appearance
    order.
    """
    S = np.atleast_2d(np.asarray(channel_scores, dtype=float))
    g = np.asarray(group_ids).reshape(-1)
    if g.size != S.shape[0]:
        raise GroupError("one group id per score row is required")
    ids, first, inverse, counts = np.unique(g, return_index=True, return_inverse=True, return_counts=True)
    bad = counts != channel_count
    if np.any(bad):
        raise GroupError(f"group {ids[bad][0]} has {counts[bad][0]} rows, expected {channel_count}")
    K = S.shape[1]
    votes = np.zeros((ids.size, K))
    np.add.at(votes, (inverse, np.argmax(S, axis=1)), 1.0)
    summed = np.zeros((ids.size, K))
    np.add.at(summed, inverse, S)
    leading = votes == votes.max(axis=1, keepdims=True)
    winner = np.argmax(np.where(leading, summed, -np.inf), axis=1)
    order = np.argsort(first)
    return ids[order], winner[order]


def accuracy(predictions, labels):
    p = np.asarray(predictions).reshape(-1)
    t = np.asarray(labels).reshape(-1)
    if p.size != t.size:
        raise ValueError(f"length mismatch: {p.size} predictions for {t.size} labels")
    if p.size == 0:
        raise ValueError("accuracy of an empty prediction set is undefined")
    return float(np.mean(p == t))


def group_accuracy(model_classes, channel_scores, group_ids, row_labels, channel_count):
    """Subtrial-level accuracy after voting; also returns the group ids."""
    gids, winners = vote_aggregate(channel_scores, group_ids, channel_count)
    row_labels = np.asarray(row_labels)
    group_ids = np.asarray(group_ids)
    truth = np.array([row_labels[np.argmax(group_ids == gid)] for gid in gids])
    return accuracy(np.asarray(model_classes)[winners], truth), gids
