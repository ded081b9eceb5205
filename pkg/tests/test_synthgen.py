import numpy as np
import pytest
from scipy import signal as sps
from scipy.stats import ttest_ind

from p300pca.data_model import TARGET, load_recording, save_recording, slice_channel_subtrials
from p300pca.synthgen import SynthConfig, generate_oddball


def epochs(cfg):
    rec, log = generate_oddball(cfg)
    ds = slice_channel_subtrials(rec, log, cfg.window_s)
    return ds.X.reshape(-1, cfg.n_channels, ds.n_features), ds.y[:: cfg.n_channels]


def test_layout_and_determinism():
    cfg = SynthConfig(n_target=5, n_nontarget=15, seed=4)
    (rec, log), (rec2, log2) = generate_oddball(cfg), generate_oddball(cfg)
    np.testing.assert_array_equal(rec.samples, rec2.samples)
    assert np.sum(log.labels == TARGET) == 5 and len(log) == 20
    np.testing.assert_array_equal(np.diff(log.onsets), 256)
    assert rec.channel_names[:3] == ("Fz", "Cz", "Pz")
    other = generate_oddball(SynthConfig(n_target=5, n_nontarget=15, seed=5))[0]
    assert not np.array_equal(other.samples, rec.samples)


def test_zero_amplitude_classes_indistinguishable():
    E, y = epochs(SynthConfig(n_target=100, n_nontarget=100, p300_amplitude=0.0, seed=8))
    avg = E.mean(axis=(1, 2))
    assert ttest_ind(avg[y == 1], avg[y == 0]).pvalue > 0.01
    # the window where a bump would sit carries no signal either
    mid = E[:, :, 64:90].mean(axis=(1, 2))
    assert ttest_ind(mid[y == 1], mid[y == 0]).pvalue > 0.01


def test_noiseless_peak_latency():
    cfg = SynthConfig(n_target=10, n_nontarget=5, noise_std=0.0, latency_jitter_s=0.03, seed=2)
    E, y = epochs(cfg)
    t = np.arange(E.shape[2]) / 256.0
    peaks = t[np.argmax(E[y == 1], axis=2)]
    assert np.all(np.abs(peaks - 0.3) <= 0.1)
    assert not np.any(E[y == 0])
    assert E[y == 1].max() == pytest.approx(1.0, abs=1e-3)


def test_grand_average_deflection():
    E, y = epochs(SynthConfig(n_target=200, n_nontarget=200, p300_amplitude=1.0, noise_std=1.0, seed=6))
    diff = E[y == 1].mean(axis=(0, 1)) - E[y == 0].mean(axis=(0, 1))
    t = np.arange(diff.size) / 256.0
    peak = diff[np.abs(t - 0.3) < 0.02].max()
    baseline_std = diff[t > 0.7].std()
    assert peak > 5 * baseline_std
    assert abs(t[np.argmax(diff)] - 0.3) < 0.05


def test_averaging_shrinks_noise():
    E, _ = epochs(SynthConfig(n_target=0, n_nontarget=100, p300_amplitude=0.0, seed=9))
    single = E[:, 0, :].std()
    averaged = E[:, 0, :].mean(axis=0).std()
    assert averaged / single == pytest.approx(1 / np.sqrt(100), rel=0.2)


def test_channel_weights_scale_bump():
    w = (1.0, 0.5, 0.0, 2.0)
    E, y = epochs(SynthConfig(n_channels=4, channel_weights=w, noise_std=0.0, n_target=3, n_nontarget=1))
    np.testing.assert_allclose(E[y == 1].max(axis=2)[0], w, atol=1e-3)


def test_pink_noise_spectrum_tilts():
    rec, _ = generate_oddball(SynthConfig(noise="pink", p300_amplitude=0.0, n_target=10, n_nontarget=30, seed=1))
    f, p = sps.welch(rec.samples[0], fs=256.0, nperseg=1024)
    assert p[(f > 0.5) & (f < 2)].mean() > 10 * p[(f > 40) & (f < 80)].mean()
    assert rec.samples[0].std() == pytest.approx(1.0, rel=1e-9)


def test_csv_round_trip(tmp_path):
    rec, log = generate_oddball(SynthConfig(n_target=4, n_nontarget=8, seed=3))
    save_recording(tmp_path / "r.csv", rec, log)
    rec2, log2 = load_recording(tmp_path / "r.csv")
    np.testing.assert_allclose(rec2.samples, rec.samples, rtol=1e-15, atol=0)
    np.testing.assert_array_equal(log2.onsets, log.onsets)
    np.testing.assert_array_equal(log2.labels, log.labels)
    assert rec2.channel_names == rec.channel_names


@pytest.mark.parametrize("kw", [
    dict(p300_latency_s=0.8, p300_width_s=0.1),
    dict(noise="brown"),
    dict(channel_weights=(1.0, 2.0)),
    dict(channel_weights=(np.nan,) * 8),
    dict(isi_s=0.0),
])
def test_invalid_config(kw):
    with pytest.raises(ValueError):
        SynthConfig(**kw)
