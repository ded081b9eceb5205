"""Synthetic oddball EEG with a Gaussian-bump P300 on target epochs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .data_model import NONTARGET, TARGET, Recording, StimulusLog
from .rng import derive_rng

DEFAULT_CHANNELS = ("Fz", "Cz", "Pz", "Oz", "P3", "P4", "O1", "O2")


@dataclass(frozen=True)
class SynthConfig:
    n_channels: int = 8
    sampling_rate_hz: float = 256.0
    n_target: int = 20
    n_nontarget: int = 60
    p300_amplitude: float = 1.0
    p300_latency_s: float = 0.3
    p300_width_s: float = 0.1
    channel_weights: tuple | None = None
    latency_jitter_s: float = 0.0
    noise: str = "white"
    noise_std: float = 1.0
    isi_s: float = 1.0
    window_s: float = 1.0
    lead_s: float = 2.0
    seed: int = 0
    channel_names: tuple | None = field(default=None)

    def __post_init__(self):
        if self.n_channels < 1 or self.n_target < 0 or self.n_nontarget < 0:
            raise ValueError("channel and subtrial counts must be non-negative (channels >= 1)")
        if self.p300_latency_s + 3 * self.p300_width_s >= self.window_s:
            raise ValueError("latency + 3 * width must fall inside the epoch window")
        if self.noise not in ("white", "pink"):
            raise ValueError(f"unknown noise model {self.noise!r}")
        if self.channel_weights is not None:
            w = np.asarray(self.channel_weights, dtype=float)
            if w.shape != (self.n_channels,) or not np.all(np.isfinite(w)):
                raise ValueError("channel_weights must be finite, one per channel")
        if self.noise_std < 0 or self.sampling_rate_hz <= 0 or self.isi_s <= 0:
            raise ValueError("noise_std, sampling rate and ISI must be valid")

    def weights(self):
        if self.channel_weights is None:
            return np.ones(self.n_channels)
        return np.asarray(self.channel_weights, dtype=float)

    def names(self):
        if self.channel_names is not None:
            return tuple(self.channel_names)
        if self.n_channels <= len(DEFAULT_CHANNELS):
            return DEFAULT_CHANNELS[: self.n_channels]
        return tuple(f"ch{i + 1}" for i in range(self.n_channels))


def _pink_approx(rng, shape, fs):
    # sum of first-order lowpass stages with poles spread over decades
    white = rng.standard_normal(shape)
    out = np.zeros(shape)
    for corner in (0.5, 2.0, 8.0, 32.0):
        a = np.exp(-2 * np.pi * corner / fs)
        out += signal.lfilter([1 - a], [1, -a], white, axis=-1) / np.sqrt((1 - a) / (1 + a))
    return out / out.std(axis=-1, keepdims=True)


def generate_oddball(cfg: SynthConfig):
    """Return ``(Recording, StimulusLog)`` for ``cfg``.

    Stimuli are spaced ``isi_s`` apart after a ``lead_s`` lead-in, in a
    seeded random order. Each target onset adds
    ``amplitude * weight_c * exp(-(t - latency_c)^2 / (2 width^2))`` to
    channel ``c``, where ``latency_c`` is jittered per channel and epoch.
    """
    fs = cfg.sampling_rate_hz
    n_on = cfg.n_target + cfg.n_nontarget
    labels = np.array([TARGET] * cfg.n_target + [NONTARGET] * cfg.n_nontarget)
    labels = derive_rng(cfg.seed, "labels").permutation(labels)
    lead = int(round(cfg.lead_s * fs))
    isi = cfg.isi_s * fs
    onsets = lead + np.round(np.arange(n_on) * isi).astype(np.int64)
    win = int(round(cfg.window_s * fs))
    n_t = int((onsets[-1] if n_on else lead) + win + lead)

    noise_rng = derive_rng(cfg.seed, "noise")
    if cfg.noise == "white":
        x = noise_rng.standard_normal((cfg.n_channels, n_t))
    else:
        x = _pink_approx(noise_rng, (cfg.n_channels, n_t), fs)
    x *= cfg.noise_std

    if cfg.p300_amplitude:
        jit_rng = derive_rng(cfg.seed, "jitter")
        t = np.arange(win) / fs
        w = cfg.weights()
        for on in onsets[labels == TARGET]:
            lat = cfg.p300_latency_s + cfg.latency_jitter_s * jit_rng.standard_normal(cfg.n_channels)
            bump = np.exp(-((t[None, :] - lat[:, None]) ** 2) / (2 * cfg.p300_width_s**2))
            x[:, on:on + win] += cfg.p300_amplitude * w[:, None] * bump
    return Recording(x, fs, cfg.names()), StimulusLog(onsets, labels)
