"""Butterworth bandpass filtering and z-score normalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .data_model import ChannelSubtrialDataset, Recording
from .errors import DegenerateRowError, DesignError, RateError


@dataclass(frozen=True)
class FilterCoefficients:
    """Second-order sections, one row ``(b0, b1, b2, 1, a1, a2)`` per stage."""

    sos: np.ndarray
    low_cut_hz: float
    high_cut_hz: float
    order: int
    sampling_rate_hz: float

    @property
    def n_sections(self):
        return self.sos.shape[0]

    def poles(self):
        return np.concatenate([np.roots(s[3:]) for s in self.sos])


@dataclass(frozen=True)
class NormStats:
    mean: np.ndarray
    std: np.ndarray


def design_bandpass(low_hz=0.23, high_hz=30.0, order=4, fs=256.0):
    """Digital Butterworth bandpass as a cascade of biquads.

    ``order`` is the order of the lowpass prototype; the bandpass has twice
    as many poles (``order`` sections). Design goes through the analog
    prototype and the bilinear transform with pre-warped band edges.
    """
    if int(order) != order or order < 2 or order % 2:
        raise DesignError(f"order must be an even integer >= 2, got {order}")
    if not 0 < low_hz < high_hz:
        raise DesignError(f"need 0 < low ({low_hz}) < high ({high_hz})")
    if high_hz >= fs / 2:
        raise DesignError(f"high cut {high_hz} Hz must lie below Nyquist ({fs / 2} Hz)")
    sos = signal.butter(int(order), [low_hz, high_hz], btype="bandpass", fs=fs, output="sos")
    coeffs = FilterCoefficients(np.asarray(sos, dtype=float), float(low_hz), float(high_hz), int(order), float(fs))
    if np.any(np.abs(coeffs.poles()) >= 1.0):
        raise DesignError("designed filter is unstable; band edge too close to DC or Nyquist")
    return coeffs


def frequency_response(coeffs: FilterCoefficients, freqs_hz):
    """Complex response of the cascade at ``freqs_hz``."""
    _, h = signal.sosfreqz(coeffs.sos, worN=np.asarray(freqs_hz, dtype=float), fs=coeffs.sampling_rate_hz)
    return h


def filter_array(coeffs: FilterCoefficients, x, zero_phase=True, axis=-1):
    """Filter ``x`` along ``axis``.

    The zero-phase path averages a forward-backward and a backward-forward
    pass. Each alone has the squared magnitude response and no phase shift
    away from the edges; the average also makes the edge handling symmetric,
    so filtering a time-reversed signal gives the time-reversed output.
    """
    x = np.asarray(x, dtype=float)
    if not zero_phase:
        return signal.sosfilt(coeffs.sos, x, axis=axis)
    # reflect-pad by three cascade lengths at each edge
    padlen = min(3 * (2 * coeffs.n_sections + 1), x.shape[axis] - 1)
    fb = signal.sosfiltfilt(coeffs.sos, x, axis=axis, padtype="even", padlen=padlen)
    xr = np.flip(x, axis=axis)
    bf = np.flip(signal.sosfiltfilt(coeffs.sos, xr, axis=axis, padtype="even", padlen=padlen), axis=axis)
    return 0.5 * (fb + bf)


def apply_filter(coeffs: FilterCoefficients, rec: Recording, zero_phase=True):
    if not np.isclose(coeffs.sampling_rate_hz, rec.sampling_rate_hz):
        raise RateError(
            f"filter designed for {coeffs.sampling_rate_hz} Hz, recording is {rec.sampling_rate_hz} Hz"
        )
    return rec.with_samples(filter_array(coeffs, rec.samples, zero_phase, axis=1))


def _zscore_rows(X):
    mean = X.mean(axis=1)
    std = X.std(axis=1)
    bad = np.flatnonzero(~(std > 0))
    if bad.size:
        raise DegenerateRowError(f"row {int(bad[0])} has zero variance")
    return (X - mean[:, None]) / std[:, None], NormStats(mean, std)


def zscore_normalize(ds: ChannelSubtrialDataset):
    """Scale every row to zero mean and unit population variance."""
    Z, stats = _zscore_rows(ds.X)
    return ds.with_X(Z), stats


def zscore_recording(rec: Recording):
    """Per-channel normalization of a continuous recording."""
    Z, stats = _zscore_rows(rec.samples)
    return rec.with_samples(Z), stats
