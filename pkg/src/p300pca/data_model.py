"""EEG containers, file ingestion, channel-subtrial slicing and grouped splits.

On-disk format: a CSV with header ``time,<ch1>,...,<chN>`` (one row per
sample) plus a JSON sidecar with the same stem holding
``{"sampling_rate_hz": ..., "onsets": [...], "labels": [...]}``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyClassError, ParseError, RangeError, SchemaError, SplitError
from .rng import derive_rng

TARGET = 1
NONTARGET = 0


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Recording:
    samples: np.ndarray
    sampling_rate_hz: float
    channel_names: tuple

    def __post_init__(self):
        samples = _frozen(self.samples)
        if samples.ndim != 2 or samples.shape[0] < 1 or samples.shape[1] < 1:
            raise SchemaError(f"samples must be a non-empty 2-D array, got shape {samples.shape}")
        if not self.sampling_rate_hz > 0:
            raise SchemaError("sampling_rate_hz must be positive")
        names = tuple(str(n) for n in self.channel_names)
        if len(names) != samples.shape[0]:
            raise SchemaError(f"{len(names)} channel names for {samples.shape[0]} channels")
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate channel names in {names}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sampling_rate_hz", float(self.sampling_rate_hz))
        object.__setattr__(self, "channel_names", names)

    @property
    def n_channels(self):
        return self.samples.shape[0]

    @property
    def n_timepoints(self):
        return self.samples.shape[1]

    def with_samples(self, samples):
        return Recording(samples, self.sampling_rate_hz, self.channel_names)


@dataclass(frozen=True)
class StimulusLog:
    onsets: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        onsets = _frozen(self.onsets, dtype=np.int64).reshape(-1)
        labels = _frozen(self.labels, dtype=np.int64).reshape(-1)
        if onsets.shape != labels.shape:
            raise SchemaError("onsets and labels differ in length")
        if np.any(onsets < 0):
            raise RangeError("negative onset")
        if onsets.size > 1 and np.any(np.diff(onsets) <= 0):
            raise SchemaError("onsets must be strictly increasing")
        if not np.isin(labels, (NONTARGET, TARGET)).all():
            raise SchemaError("labels must be 0 (non-target) or 1 (target)")
        object.__setattr__(self, "onsets", onsets)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return int(self.onsets.size)


def window_samples(sampling_rate_hz, window_s=1.0):
    return int(round(window_s * sampling_rate_hz))


def check_log(rec: Recording, log: StimulusLog, window_s=1.0):
    """Raise RangeError unless every window fits inside the recording."""
    width = window_samples(rec.sampling_rate_hz, window_s)
    if len(log) and log.onsets[-1] + width > rec.n_timepoints:
        raise RangeError(
            f"onset {int(log.onsets[-1])} + window {width} exceeds recording length {rec.n_timepoints}"
        )


@dataclass(frozen=True)
class ChannelSubtrialDataset:
    """One row per (subtrial, channel) epoch.

    Rows of the same subtrial share ``group_id`` and are stored contiguously
    in channel order.
    """

    X: np.ndarray
    y: np.ndarray
    group_id: np.ndarray
    channel_index: np.ndarray
    n_channels: int
    sampling_rate_hz: float = 0.0
    provenance: tuple = field(default=(), compare=False)

    def __post_init__(self):
        X = _frozen(self.X)
        if X.ndim != 2:
            raise SchemaError("X must be 2-D")
        y = _frozen(self.y, dtype=np.int64)
        g = _frozen(self.group_id, dtype=np.int64)
        c = _frozen(self.channel_index, dtype=np.int64)
        n = X.shape[0]
        if not (y.shape == g.shape == c.shape == (n,)):
            raise SchemaError("per-row arrays must match the number of rows of X")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "group_id", g)
        object.__setattr__(self, "channel_index", c)
        object.__setattr__(self, "provenance", tuple(self.provenance))

    @property
    def n_rows(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    def groups(self):
        """Unique group ids (in row order) and their labels."""
        ids, first = np.unique(self.group_id, return_index=True)
        order = np.argsort(first)
        return ids[order], self.y[first[order]]

    def class_counts(self):
        _, labels = self.groups()
        return {int(k): int(np.sum(labels == k)) for k in (NONTARGET, TARGET)}

    def select_groups(self, group_ids, tag=None):
        mask = np.isin(self.group_id, np.asarray(group_ids, dtype=np.int64))
        prov = self.provenance + ((tag,) if tag else ())
        return ChannelSubtrialDataset(
            self.X[mask], self.y[mask], self.group_id[mask], self.channel_index[mask],
            self.n_channels, self.sampling_rate_hz, prov,
        )

    def with_X(self, X):
        return ChannelSubtrialDataset(
            X, self.y, self.group_id, self.channel_index, self.n_channels,
            self.sampling_rate_hz, self.provenance,
        )

    def validate(self):
        ids, counts = np.unique(self.group_id, return_counts=True)
        if np.any(counts != self.n_channels):
            raise SchemaError("every subtrial must contribute exactly n_channels rows")
        for gid in ids:
            if np.unique(self.y[self.group_id == gid]).size != 1:
                raise SchemaError(f"rows of subtrial {gid} disagree on the label")


def load_recording(path, sidecar=None):
    """Read a recording CSV and its JSON sidecar.

    Returns ``(Recording, StimulusLog)``. The sidecar defaults to the CSV path
    with a ``.json`` suffix.
    """
    path = Path(path)
    sidecar = Path(sidecar) if sidecar is not None else path.with_suffix(".json")
    with open(path, newline="") as fh:
        header = next(csv.reader(fh), None)
    if not header or header[0].strip() != "time" or len(header) < 2:
        raise ParseError(f"{path}: header must be 'time,<ch1>,...,<chN>'")
    names = [h.strip() for h in header[1:]]
    if any(not n for n in names):
        raise ParseError(f"{path}: empty channel name in header")
    if len(set(names)) != len(names):
        raise SchemaError(f"{path}: duplicate channel names")
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if data.shape[1] != len(header):
        raise ParseError(f"{path}: expected {len(header)} columns, found {data.shape[1]}")
    try:
        meta = json.loads(sidecar.read_text())
        fs = float(meta["sampling_rate_hz"])
        onsets = meta["onsets"]
        labels = meta["labels"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{sidecar}: malformed sidecar ({exc})") from exc
    rec = Recording(data[:, 1:].T, fs, names)
    log = StimulusLog(onsets, labels)
    check_log(rec, log, meta.get("window_s", 1.0))
    return rec, log


def save_recording(path, rec: Recording, log: StimulusLog, window_s=None):
    """Write ``rec`` and ``log`` in the CSV + JSON sidecar format (lossless)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    t = np.arange(rec.n_timepoints) / rec.sampling_rate_hz
    table = np.column_stack([t, rec.samples.T])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(("time",) + rec.channel_names) + "\n")
        np.savetxt(fh, table, delimiter=",", fmt="%.17g")
    meta = {
        "sampling_rate_hz": rec.sampling_rate_hz,
        "onsets": [int(o) for o in log.onsets],
        "labels": [int(v) for v in log.labels],
    }
    if window_s is not None:
        meta["window_s"] = window_s
    path.with_suffix(".json").write_text(json.dumps(meta, indent=1) + "\n")
    return path


def slice_channel_subtrials(rec: Recording, log: StimulusLog, window_s=1.0):
    check_log(rec, log, window_s)
    width = window_samples(rec.sampling_rate_hz, window_s)
    n_on, n_ch = len(log), rec.n_channels
    idx = log.onsets[:, None] + np.arange(width)[None, :]
    # (onsets, channels, width) -> onset-major, channel-minor rows
    X = rec.samples[:, idx].transpose(1, 0, 2).reshape(n_on * n_ch, width)
    return ChannelSubtrialDataset(
        X,
        np.repeat(log.labels, n_ch),
        np.repeat(np.arange(n_on), n_ch),
        np.tile(np.arange(n_ch), n_on),
        n_ch,
        rec.sampling_rate_hz,
    )


def balance_classes(ds: ChannelSubtrialDataset, seed=0, rng=None):
    """Subsample the majority class to the minority count, whole subtrials at a time."""
    rng = rng if rng is not None else derive_rng(seed, "balance")
    ids, labels = ds.groups()
    tgt, non = ids[labels == TARGET], ids[labels == NONTARGET]
    if tgt.size == 0 or non.size == 0:
        raise EmptyClassError("balancing needs at least one subtrial of each class")
    n = min(tgt.size, non.size)
    if tgt.size > n:
        tgt = rng.choice(tgt, size=n, replace=False)
    if non.size > n:
        non = rng.choice(non, size=n, replace=False)
    return ds.select_groups(np.concatenate([tgt, non]))


def _n_test(n, fraction):
    return int(math.floor(n * fraction + 0.5))


def grouped_split(ds: ChannelSubtrialDataset, test_fraction=0.2, seed=0, rng=None):
    """Stratified split by subtrial; returns ``(train, test)``."""
    if not 0 < test_fraction < 1:
        raise SplitError("test_fraction must lie strictly between 0 and 1")
    rng = rng if rng is not None else derive_rng(seed, "split")
    ids, labels = ds.groups()
    test_ids = []
    for k in (NONTARGET, TARGET):
        members = ids[labels == k]
        n_test = _n_test(members.size, test_fraction)
        if n_test < 1 or members.size - n_test < 1:
            raise SplitError(
                f"class {k}: {members.size} subtrials cannot be split at fraction {test_fraction}"
            )
        test_ids.append(rng.permutation(members)[:n_test])
    test_ids = np.concatenate(test_ids)
    train_ids = np.setdiff1d(ids, test_ids)
    return ds.select_groups(train_ids, "train"), ds.select_groups(test_ids, "test")


def stratified_group_folds(ds: ChannelSubtrialDataset, n_folds=3, rng=None):
    """Assign subtrials to ``n_folds`` stratified folds.

    Returns a list of ``(train_ids, val_ids)`` pairs.
    """
    ids, labels = ds.groups()
    fold_of = {}
    offset = 0
    for k in (NONTARGET, TARGET):
        members = ids[labels == k]
        if members.size < n_folds:
            raise SplitError(f"class {k} has {members.size} subtrials, fewer than {n_folds} folds")
        members = rng.permutation(members) if rng is not None else members
        for i, gid in enumerate(members):
            fold_of[int(gid)] = (offset + i) % n_folds
        offset += members.size
    assign = np.array([fold_of[int(g)] for g in ids])
    return [(ids[assign != f], ids[assign == f]) for f in range(n_folds)]


def save_dataset(path, ds: ChannelSubtrialDataset):
    np.savez(
        path, X=ds.X, y=ds.y, group_id=ds.group_id, channel_index=ds.channel_index,
        n_channels=ds.n_channels, sampling_rate_hz=ds.sampling_rate_hz,
    )


def load_dataset(path):
    with np.load(path) as z:
        ds = ChannelSubtrialDataset(
            z["X"], z["y"], z["group_id"], z["channel_index"],
            int(z["n_channels"]), float(z["sampling_rate_hz"]),
        )
    ds.validate()
    return ds
