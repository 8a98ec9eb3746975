"""Epoching and zero-phase band-pass filtering of EEG signals."""

from collections.abc import Sequence
from dataclasses import replace
from typing import TypeVar

import numpy as np
from scipy.signal import butter, sosfiltfilt

from s3t_decoder.config import constants
from s3t_decoder.errors import ConfigurationError, DataError, SegmentationError
from s3t_decoder.preprocess.trials import Recording, Trial

Signal = TypeVar("Signal", Trial, Recording)


def window_length(window: tuple[float, float], fs: float) -> int:
    """Number of samples T in an epoching window."""
    start, end = window
    return int(round((end - start) * fs))


def segment(
    raw: Recording,
    events: Sequence[tuple[int, int]],
    window: tuple[float, float],
) -> list[Trial]:
    """Cut one trial per event out of a continuous recording.

    Args:
        raw: Continuous recording, channels x samples
        events: ``(onset_sample, label)`` pairs
        window: ``(t0, t1)`` in seconds relative to each onset

    Returns:
        One Trial per event with ``data = raw[:, onset + t0*fs : onset + t1*fs]``

    Raises:
        SegmentationError: If the window is empty or exceeds the recording for any event
    """
    n_samples = window_length(window, raw.fs)
    if n_samples <= 0:
        raise SegmentationError(f"Empty epoching window {window[0]}:{window[1]} s")

    offset = int(round(window[0] * raw.fs))
    offending = [
        (int(onset), int(label))
        for onset, label in events
        if onset + offset < 0 or onset + offset + n_samples > raw.n_samples
    ]
    if offending:
        raise SegmentationError(
            f"Window {window[0]}:{window[1]} s exceeds the recording "
            f"({raw.n_samples} samples) for events {offending}",
            events=offending,
        )

    return [
        Trial(
            data=raw.data[:, onset + offset : onset + offset + n_samples].copy(),
            label=int(label),
            subject_id=raw.subject_id,
            fs=raw.fs,
        )
        for onset, label in events
    ]


def design_bandpass(
    low: float, high: float, fs: float, order: int = constants.FILTER_ORDER
) -> np.ndarray:
    """Butterworth band-pass as second-order sections.

    Raises:
        ConfigurationError: If the band is empty or reaches the Nyquist frequency
    """
    nyquist = fs / 2.0
    if not 0 < low < high:
        raise ConfigurationError(f"Invalid band {low}:{high} Hz; need 0 < low < high")
    if high >= nyquist:
        raise ConfigurationError(
            f"Nyquist violation: high cutoff {high} Hz must be below fs/2 = {nyquist} Hz"
        )
    return butter(order, [low, high], btype="bandpass", fs=fs, output="sos")


def bandpass(
    signal: Signal,
    low: float = constants.BAND_LOW_HZ,
    high: float = constants.BAND_HIGH_HZ,
    order: int = constants.FILTER_ORDER,
) -> Signal:
    """Zero-phase (forward-backward) Butterworth band-pass of every channel.

    Accepts a Trial or a continuous Recording and returns the same type.
    """
    sos = design_bandpass(low, high, signal.fs, order)
    try:
        filtered = sosfiltfilt(sos, signal.data, axis=-1)
    except ValueError as exc:
        raise DataError(
            f"Signal of {signal.data.shape[-1]} samples is too short for zero-phase filtering"
        ) from exc
    return replace(signal, data=filtered)


def drop_channels(raw: Recording, channels: Sequence[int]) -> Recording:
    """Remove channels (e.g. electrooculogram) from a recording."""
    if not channels:
        return raw
    keep = [i for i in range(raw.n_channels) if i not in set(channels)]
    return replace(raw, data=raw.data[keep])
