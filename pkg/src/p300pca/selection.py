"""Cross-validated greedy forward selection of principal components."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifiers import ClassifierSpec, class_probabilities, fit_classifier
from .data_model import ChannelSubtrialDataset, stratified_group_folds
from .errors import P300Error, SplitError
from .pca import PcaModel, fit_pca, project
from .rng import derive_rng
from .voting import group_accuracy


@dataclass
class SelectionResult:
    chosen_indices: list
    greedy_order: list
    step_accuracies: list
    folds: int
    classifier: dict
    pool: list
    mode: str = "forward"
    failed_candidates: int = 0
    fold_groups: list = field(default_factory=list, repr=False)

    @property
    def best_accuracy(self):
        return max(self.step_accuracies)

    def to_dict(self):
        return {
            "chosen_indices": [int(i) for i in self.chosen_indices],
            "greedy_order": [int(i) for i in self.greedy_order],
            "step_accuracies": [float(a) for a in self.step_accuracies],
            "folds": self.folds,
            "classifier": self.classifier,
            "pool": [int(i) for i in self.pool],
            "mode": self.mode,
            "failed_candidates": self.failed_candidates,
        }


class _FoldScorer:
    """Holds per-fold projected data so each candidate set costs one fit per fold."""

    def __init__(self, train, spec, pool, n_folds, rng, pca_model=None, seed=0):
        self.spec = spec
        self.seed = seed
        self.channel_count = train.n_channels
        self.splits = stratified_group_folds(train, n_folds, rng)
        need = max(pool) + 1 if len(pool) else 0
        self.folds = []
        for tr_ids, va_ids in self.splits:
            tr = train.select_groups(tr_ids, "cv-train")
            va = train.select_groups(va_ids, "cv-val")
            model = pca_model if pca_model is not None else fit_pca(tr.X)
            if need > model.n_components:
                raise SplitError(
                    f"candidate pool needs {need} components, fold PCA has {model.n_components}"
                )
            cols = list(range(need))
            self.folds.append((project(model, tr.X, cols), tr.y, project(model, va.X, cols), va.y, va.group_id))

    def __call__(self, indices):
        # integer counts keep equal-accuracy candidates exactly tied
        correct = 0
        total = 0
        for Ztr, ytr, Zva, yva, gva in self.folds:
            model = fit_classifier(self.spec, Ztr[:, indices], ytr, self.seed)
            P = class_probabilities(model, Zva[:, indices])
            acc, gids = group_accuracy(model.classes, P, gva, yva, self.channel_count)
            correct += int(round(acc * gids.size))
            total += gids.size
        return correct / total


def _spec(classifier):
    if isinstance(classifier, ClassifierSpec):
        return classifier
    if isinstance(classifier, str):
        return ClassifierSpec(kind=classifier)
    return ClassifierSpec(**classifier)


def forward_select(train: ChannelSubtrialDataset, classifier, max_pool=50, folds=3, seed=0,
                   pca_model: PcaModel | None = None, pool=None, prefix_mode=False):
    """Greedy selection over component indices ``0..max_pool-1``.

    Folds are drawn once per call. PCA is refit on every fold's training
    part unless ``pca_model`` is given (shared-PCA mode). The loop runs until
    the pool is exhausted; the result is the shortest prefix of the greedy
    order reaching the best cross-validated subtrial accuracy. Ties between
    candidates go to the lower component index.

    With ``prefix_mode`` the greedy search is skipped and the prefixes
    ``[0], [0, 1], ...`` of the pool are scored instead.
    """
    spec = _spec(classifier)
    pool = list(range(max_pool)) if pool is None else [int(i) for i in pool]
    if not pool:
        raise ValueError("empty candidate pool")
    rng = derive_rng(seed, "folds")
    scorer = _FoldScorer(train, spec, pool, folds, rng, pca_model, seed)

    order, accs = [], []
    failed = 0
    if prefix_mode:
        for i in range(len(pool)):
            accs.append(scorer(pool[: i + 1]))
        order = list(pool)
    else:
        remaining = sorted(pool)
        last_error = None
        while remaining:
            best_idx, best_acc = None, -1.0
            for c in remaining:
                try:
                    acc = scorer(order + [c])
                except P300Error as exc:
                    failed += 1
                    last_error = exc
                    continue
                if acc > best_acc:
                    best_idx, best_acc = c, acc
            if best_idx is None:
                if not order:
                    raise last_error
                break
            order.append(best_idx)
            accs.append(best_acc)
            remaining.remove(best_idx)

    best = max(accs)
    k = next(i for i, a in enumerate(accs) if a == best) + 1
    return SelectionResult(
        chosen_indices=order[:k],
        greedy_order=order,
        step_accuracies=accs,
        folds=folds,
        classifier=spec.to_dict(),
        pool=pool,
        mode="prefix" if prefix_mode else "forward",
        failed_candidates=failed,
        fold_groups=[(tr.tolist(), va.tolist()) for tr, va in scorer.splits],
    )


def restricted_forward_select(train: ChannelSubtrialDataset, classifier, top_n=5, folds=3, seed=0,
                              pca_model: PcaModel | None = None, prefix_mode=False):
    """Forward selection restricted to the ``top_n`` highest-variance components."""
    return forward_select(train, classifier, max_pool=top_n, folds=folds, seed=seed,
                          pca_model=pca_model, prefix_mode=prefix_mode)
