"""Repeated split / fit / vote experiments and their reports."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .classifiers import ClassifierSpec, class_probabilities, fit_classifier
from .data_model import (
    ChannelSubtrialDataset,
    Recording,
    StimulusLog,
    balance_classes,
    grouped_split,
    slice_channel_subtrials,
)
from .errors import P300Error
from .neuralnet import ScgOptions
from .pca import fit_pca, project
from .preprocess import apply_filter, design_bandpass, zscore_normalize, zscore_recording
from .rng import derive_int, derive_rng
from .selection import forward_select
from .voting import accuracy, group_accuracy, vote_aggregate  # noqa: F401  (re-exported)

FEATURE_MODES = ("raw", "pca_explicit", "pca_fs", "pca_restricted_fs")
BALANCE_MODES = ("per_repetition", "once", "none")


@dataclass(frozen=True)
class PreprocessConfig:
    bandpass: bool = True
    bp_low: float = 0.23
    bp_high: float = 30.0
    bp_order: int = 4
    zero_phase: bool = True
    normalize: str = "row"  # row | recording | none
    window_s: float = 1.0

    def __post_init__(self):
        if self.normalize not in ("row", "recording", "none"):
            raise ValueError(f"normalize must be row, recording or none, got {self.normalize!r}")


@dataclass(frozen=True)
class FeatureConfig:
    mode: str = "raw"
    components: tuple = ()
    max_pool: int = 50
    top_n: int = 5
    folds: int = 3
    shared_pca: bool = False
    prefix_mode: bool = False

    def __post_init__(self):
        if self.mode not in FEATURE_MODES:
            raise ValueError(f"feature mode must be one of {FEATURE_MODES}, got {self.mode!r}")
        object.__setattr__(self, "components", tuple(int(c) for c in self.components))
        if self.mode == "pca_explicit" and not self.components:
            raise ValueError("pca_explicit needs a non-empty component list")
        if self.folds < 2:
            raise ValueError("need at least two cross-validation folds")


@dataclass(frozen=True)
class PipelineConfig:
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    classifier: str = "lda"
    n_hidden: int | None = None
    scg: ScgOptions = field(default_factory=ScgOptions)
    ridge: float = 0.0
    covariance: str = "population"
    n_repetitions: int = 20
    test_fraction: float = 0.2
    balance: str = "per_repetition"
    seed: int = 0
    label: str = "dataset"

    def __post_init__(self):
        for name, cls in (("preprocess", PreprocessConfig), ("features", FeatureConfig), ("scg", ScgOptions)):
            value = getattr(self, name)
            if isinstance(value, dict):
                object.__setattr__(self, name, cls(**value))
        if self.balance not in BALANCE_MODES:
            raise ValueError(f"balance must be one of {BALANCE_MODES}")
        if self.n_repetitions < 1:
            raise ValueError("n_repetitions must be >= 1")
        self.classifier_spec()  # validates classifier / n_hidden combination

    def classifier_spec(self):
        return ClassifierSpec(self.classifier, self.n_hidden, self.scg, self.ridge, self.covariance)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class EvalReport:
    config: dict
    repetitions: list
    error_tally: dict
    n_subtrials: int
    n_features: int

    @property
    def accuracies(self):
        return [r["accuracy"] for r in self.repetitions]

    @property
    def mean_accuracy(self):
        """Mean subtrial accuracy, or None if any repetition failed."""
        accs = self.accuracies
        if any(a is None for a in accs):
            return None
        return float(np.mean(accs))

    @property
    def mean_channel_accuracy(self):
        accs = [r["channel_accuracy"] for r in self.repetitions]
        if any(a is None for a in accs):
            return None
        return float(np.mean(accs))

    def chosen_component_counts(self):
        return [len(r["components"]) for r in self.repetitions if r.get("components") is not None]

    def to_dict(self):
        return {
            "config": self.config,
            "repetitions": self.repetitions,
            "accuracies": self.accuracies,
            "mean_accuracy": self.mean_accuracy,
            "mean_channel_accuracy": self.mean_channel_accuracy,
            "error_tally": dict(sorted(self.error_tally.items())),
            "n_subtrials": self.n_subtrials,
            "n_features": self.n_features,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def from_dict(cls, d):
        return cls(d["config"], d["repetitions"], d.get("error_tally", {}), d["n_subtrials"], d["n_features"])

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def prepare_dataset(rec: Recording, log: StimulusLog, cfg: PreprocessConfig | None = None):
    """Filter the continuous recording, slice channel-subtrials, normalize."""
    cfg = cfg or PreprocessConfig()
    if cfg.bandpass:
        coeffs = design_bandpass(cfg.bp_low, cfg.bp_high, cfg.bp_order, rec.sampling_rate_hz)
        rec = apply_filter(coeffs, rec, cfg.zero_phase)
    if cfg.normalize == "recording":
        rec, _ = zscore_recording(rec)
    ds = slice_channel_subtrials(rec, log, cfg.window_s)
    if cfg.normalize == "row":
        ds, _ = zscore_normalize(ds)
    return ds


def _features(train, test, cfg: PipelineConfig, rep_seed):
    """Return (train features, test features, chosen components, selection dict)."""
    fc = cfg.features
    if fc.mode == "raw":
        return train.X, test.X, None, None
    if fc.mode == "pca_explicit":
        pca = fit_pca(train.X)
        return project(pca, train.X, fc.components), project(pca, test.X, fc.components), list(fc.components), None
    pca = fit_pca(train.X)
    pool = fc.max_pool if fc.mode == "pca_fs" else fc.top_n
    sel = forward_select(
        train, cfg.classifier_spec(), max_pool=pool, folds=fc.folds,
        seed=derive_int(rep_seed, "select"),
        pca_model=pca if fc.shared_pca else None, prefix_mode=fc.prefix_mode,
    )
    idx = sel.chosen_indices
    return project(pca, train.X, idx), project(pca, test.X, idx), list(idx), sel.to_dict()


def run_repetition(ds: ChannelSubtrialDataset, cfg: PipelineConfig, rep: int, balanced=None):
    rep_seed = derive_int(cfg.seed, "repetition", rep)
    if cfg.balance == "per_repetition":
        data = balance_classes(ds, rng=derive_rng(rep_seed, "balance"))
    else:
        data = balanced if balanced is not None else ds
    train, test = grouped_split(data, cfg.test_fraction, rng=derive_rng(rep_seed, "split"))
    out = {"repetition": rep, "accuracy": None, "channel_accuracy": None, "components": None,
           "selection": None, "error": None,
           "n_train_subtrials": int(train.n_rows // ds.n_channels),
           "n_test_subtrials": int(test.n_rows // ds.n_channels)}
    try:
        Ftr, Fte, comps, sel = _features(train, test, cfg, rep_seed)
        out["components"], out["selection"] = comps, sel
        model = fit_classifier(cfg.classifier_spec(), Ftr, train.y, derive_int(rep_seed, "init"))
        P = class_probabilities(model, Fte)
        out["channel_accuracy"] = accuracy(model.classes[np.argmax(P, axis=1)], test.y)
        out["accuracy"], _ = group_accuracy(model.classes, P, test.group_id, test.y, ds.n_channels)
    except P300Error as exc:
        out["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return out


def _run_job(args):
    return run_repetition(*args)


def run_experiment(ds: ChannelSubtrialDataset, cfg: PipelineConfig, jobs=1):
    """Run ``cfg.n_repetitions`` independent split/train/test rounds.

    Classifier failures (e.g. singular covariance) are recorded per
    repetition instead of aborting the run.
    """
    balanced = None
    if cfg.balance == "once":
        balanced = balance_classes(ds, rng=derive_rng(cfg.seed, "balance"))
    args = [(ds, cfg, r, balanced) for r in range(cfg.n_repetitions)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            reps = list(ex.map(_run_job, args))
    else:
        reps = [_run_job(a) for a in args]
    tally = {}
    for r in reps:
        if r["error"]:
            tally[r["error"]["type"]] = tally.get(r["error"]["type"], 0) + 1
    return EvalReport(cfg.to_dict(), reps, tally, len(ds.groups()[0]), ds.n_features)
