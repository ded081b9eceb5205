import numpy as np
import pytest

from p300pca.data_model import Recording, StimulusLog
from p300pca.evaluation import prepare_dataset
from p300pca.synthgen import SynthConfig, generate_oddball


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_recording():
    cfg = SynthConfig(n_target=20, n_nontarget=60, p300_amplitude=1.0, seed=3)
    return generate_oddball(cfg)


@pytest.fixture(scope="session")
def signal_dataset(small_recording):
    rec, log = small_recording
    return prepare_dataset(rec, log)


def make_recording(n_channels=8, n_timepoints=2560, fs=256.0, onsets=(), labels=None, seed=0):
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((n_channels, n_timepoints))
    names = [f"c{i}" for i in range(n_channels)]
    labels = [0] * len(onsets) if labels is None else labels
    return Recording(samples, fs, names), StimulusLog(list(onsets), labels)
