import json
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from p300pca.data_model import (
    ChannelSubtrialDataset,
    Recording,
    StimulusLog,
    balance_classes,
    grouped_split,
    load_dataset,
    load_recording,
    save_dataset,
    save_recording,
    slice_channel_subtrials,
    stratified_group_folds,
)
from p300pca.errors import EmptyClassError, ParseError, RangeError, SchemaError, SplitError

from conftest import make_recording


def _write(tmp_path, n_timepoints, onsets, header=None, n_channels=8, fs=256):
    rng = np.random.default_rng(0)
    names = header or ["time"] + [f"ch{i}" for i in range(n_channels)]
    data = np.column_stack([np.arange(n_timepoints) / fs, rng.standard_normal((n_timepoints, n_channels))])
    csv = tmp_path / "rec.csv"
    with open(csv, "w") as fh:
        fh.write(",".join(names) + "\n")
        np.savetxt(fh, data, delimiter=",", fmt="%.17g")
    labels = [i % 2 for i in range(len(onsets))]
    (tmp_path / "rec.json").write_text(json.dumps({"sampling_rate_hz": fs, "onsets": list(onsets), "labels": labels}))
    return csv, data


def _dataset(n_target, n_nontarget, n_channels=8, d=4, seed=0):
    rng = np.random.default_rng(seed)
    labels = np.array([1] * n_target + [0] * n_nontarget)
    n = labels.size
    return ChannelSubtrialDataset(
        rng.standard_normal((n * n_channels, d)),
        np.repeat(labels, n_channels),
        np.repeat(np.arange(n), n_channels),
        np.tile(np.arange(n_channels), n),
        n_channels,
    )


class TestLoadRecording:
    def test_shape_preserved(self, tmp_path):
        onsets = list(range(0, 2560 - 256, 240))[:10]
        csv, data = _write(tmp_path, 2560, onsets)
        rec, log = load_recording(csv)
        assert rec.samples.shape == (8, 2560)
        assert len(log) == 10
        np.testing.assert_array_equal(rec.samples, data[:, 1:].T)

    def test_last_window_touching_end_is_ok(self, tmp_path):
        csv, _ = _write(tmp_path, 2560, [0, 2304])
        rec, log = load_recording(csv)
        assert log.onsets[-1] + 256 == rec.n_timepoints

    def test_one_sample_past_end(self, tmp_path):
        csv, _ = _write(tmp_path, 2560, [0, 2305])
        with pytest.raises(RangeError):
            load_recording(csv)

    def test_onset_past_end(self, tmp_path):
        csv, _ = _write(tmp_path, 2500, [0, 2400])
        with pytest.raises(RangeError):
            load_recording(csv)

    def test_malformed_header(self, tmp_path):
        csv, _ = _write(tmp_path, 300, [0], header=["t"] + [f"ch{i}" for i in range(8)])
        with pytest.raises(ParseError):
            load_recording(csv)

    def test_duplicate_channels(self, tmp_path):
        csv, _ = _write(tmp_path, 300, [0], header=["time"] + ["Cz"] * 8)
        with pytest.raises(SchemaError):
            load_recording(csv)

    def test_round_trip_lossless(self, tmp_path):
        rec, log = make_recording(n_timepoints=600, onsets=[10, 300], labels=[1, 0])
        save_recording(tmp_path / "r.csv", rec, log)
        rec2, log2 = load_recording(tmp_path / "r.csv")
        np.testing.assert_array_equal(rec2.samples, rec.samples)
        assert rec2.channel_names == rec.channel_names
        np.testing.assert_array_equal(log2.labels, log.labels)


class TestTypes:
    def test_recording_rejects_duplicates(self):
        with pytest.raises(SchemaError):
            Recording(np.zeros((2, 5)), 256, ["a", "a"])

    def test_recording_rejects_bad_rate(self):
        with pytest.raises(SchemaError):
            Recording(np.zeros((1, 5)), 0, ["a"])

    def test_log_labels_binary(self):
        with pytest.raises(SchemaError):
            StimulusLog([0, 10], [0, 2])

    def test_immutable(self):
        rec, _ = make_recording(n_timepoints=10)
        with pytest.raises(ValueError):
            rec.samples[0, 0] = 1.0


class TestSlice:
    def test_shape_256_samples(self):
        rec, log = make_recording(n_timepoints=80 * 256 + 256, onsets=range(0, 80 * 256, 256), labels=[1] * 20 + [0] * 60)
        ds = slice_channel_subtrials(rec, log)
        assert ds.X.shape == (640, 256)

    def test_shape_240_samples(self):
        rec, log = make_recording(n_timepoints=180 * 40 + 240, fs=240.0, onsets=range(0, 180 * 40, 40))
        ds = slice_channel_subtrials(rec, log)
        assert ds.X.shape == (1440, 240)

    def test_identity_slice(self):
        rec, log = make_recording(n_channels=1, n_timepoints=400, onsets=[17])
        ds = slice_channel_subtrials(rec, log)
        assert ds.X.shape == (1, 256)
        np.testing.assert_array_equal(ds.X[0], rec.samples[0, 17:17 + 256])

    def test_row_order_and_groups(self):
        rec, log = make_recording(n_channels=3, n_timepoints=1000, onsets=[0, 300, 600], labels=[1, 0, 1])
        ds = slice_channel_subtrials(rec, log)
        np.testing.assert_array_equal(ds.group_id, [0, 0, 0, 1, 1, 1, 2, 2, 2])
        np.testing.assert_array_equal(ds.channel_index, [0, 1, 2] * 3)
        np.testing.assert_array_equal(ds.y, [1, 1, 1, 0, 0, 0, 1, 1, 1])
        ds.validate()

    def test_window_past_end(self):
        rec, _ = make_recording(n_timepoints=300)
        with pytest.raises(RangeError):
            slice_channel_subtrials(rec, StimulusLog([100], [0]))

    def test_round_trip_per_channel(self):
        onsets = [0, 256, 512, 768]
        rec, log = make_recording(n_channels=4, n_timepoints=1024, onsets=onsets)
        ds = slice_channel_subtrials(rec, log)
        for c in range(4):
            joined = ds.X[ds.channel_index == c].reshape(-1)
            np.testing.assert_array_equal(joined, rec.samples[c, :1024])


class TestBalance:
    def test_twenty_sixty_counts(self):
        ds = _dataset(20, 60)
        out = balance_classes(ds, seed=1)
        assert out.class_counts() == {0: 20, 1: 20}
        assert out.n_rows == 320
        out.validate()

    def test_balanced_is_unchanged(self):
        ds = _dataset(30, 30)
        out = balance_classes(ds, seed=5)
        np.testing.assert_array_equal(np.sort(out.X, axis=0), np.sort(ds.X, axis=0))

    def test_deterministic(self):
        ds = _dataset(20, 60)
        a, b = balance_classes(ds, seed=9), balance_classes(ds, seed=9)
        np.testing.assert_array_equal(a.group_id, b.group_id)

    def test_keeps_all_targets(self):
        ds = _dataset(20, 60)
        out = balance_classes(ds, seed=2)
        assert set(out.group_id[out.y == 1]) == set(ds.group_id[ds.y == 1])

    def test_empty_class(self):
        with pytest.raises(EmptyClassError):
            balance_classes(_dataset(0, 10), seed=0)

    @given(st.integers(1, 15), st.integers(1, 15), st.integers(0, 2**32))
    @settings(max_examples=30, deadline=None)
    def test_equal_counts_property(self, nt, nn, seed):
        out = balance_classes(_dataset(nt, nn, n_channels=2, d=2), seed=seed)
        counts = out.class_counts()
        assert counts[0] == counts[1] == min(nt, nn)
        assert np.sum(out.y == 0) == np.sum(out.y == 1)


class TestGroupedSplit:
    def test_80_20_counts(self):
        ds = _dataset(20, 20)
        train, test = grouped_split(ds, 0.2, seed=0)
        assert train.class_counts() == {0: 16, 1: 16}
        assert test.class_counts() == {0: 4, 1: 4}

    def test_disjoint_and_complete_groups(self):
        ds = _dataset(20, 20)
        train, test = grouped_split(ds, 0.2, seed=3)
        assert not set(train.group_id) & set(test.group_id)
        train.validate()
        test.validate()
        assert train.n_rows + test.n_rows == ds.n_rows

    def test_seeds_differ(self):
        ds = _dataset(30, 30)
        a = grouped_split(ds, 0.2, seed=1)[1]
        b = grouped_split(ds, 0.2, seed=2)[1]
        assert set(a.group_id) != set(b.group_id)
        assert a.class_counts() == b.class_counts()

    def test_toy_enumeration(self):
        # 6 subtrials (3 per class): every seed must give a valid stratified partition
        ds = _dataset(3, 3, n_channels=2, d=1)
        ids, labels = ds.groups()
        valid = set()
        for t0 in itertools.combinations(ids[labels == 0], 1):
            for t1 in itertools.combinations(ids[labels == 1], 1):
                valid.add(frozenset(t0 + t1))
        assert len(valid) == 9
        seen = set()
        for seed in range(100):
            _, test = grouped_split(ds, 0.2, seed=seed)
            part = frozenset(np.unique(test.group_id).tolist())
            assert part in valid
            seen.add(part)
        assert len(seen) > 1

    def test_too_small(self):
        with pytest.raises(SplitError):
            grouped_split(_dataset(1, 5), 0.2, seed=0)

    def test_bad_fraction(self):
        with pytest.raises(SplitError):
            grouped_split(_dataset(5, 5), 1.0, seed=0)

    def test_folds_stratified(self):
        ds = _dataset(16, 16)
        folds = stratified_group_folds(ds, 3, np.random.default_rng(0))
        all_val = np.concatenate([v for _, v in folds])
        assert sorted(all_val.tolist()) == sorted(ds.groups()[0].tolist())
        for tr, va in folds:
            assert not set(tr) & set(va)
            sizes = [len(v) for _, v in folds]
            assert max(sizes) - min(sizes) <= 1


def test_dataset_npz_round_trip(tmp_path):
    ds = _dataset(3, 4)
    save_dataset(tmp_path / "d.npz", ds)
    back = load_dataset(tmp_path / "d.npz")
    np.testing.assert_array_equal(back.X, ds.X)
    np.testing.assert_array_equal(back.group_id, ds.group_id)
    assert back.n_channels == 8
