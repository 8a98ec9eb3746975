"""Conversion of continuous recordings stored as ``.npz`` into trial sets.

Expected arrays:

- ``data``: channels x samples, float
- ``fs``: sampling rate in Hz (scalar)
- ``events``: K x 2 integer array of ``(onset_sample, label)``
- ``eog`` (optional): indices of electrooculogram channels to drop
- ``subject_id`` (optional): string
"""

from collections.abc import Sequence
from pathlib import Path

import numpy as np

from s3t_decoder.config.config_loader import PreprocessConfig
from s3t_decoder.errors import DataError
from s3t_decoder.preprocess import (
    Recording,
    TrialSet,
    bandpass,
    drop_channels,
    segment,
    window_length,
)


def load_recording(path: str | Path) -> tuple[Recording, np.ndarray, list[int]]:
    """Read a recording, its events and its EOG channel indices.

    Raises:
        DataError: If a required array is missing or malformed
    """
    with np.load(path, allow_pickle=False) as archive:
        missing = [key for key in ("data", "fs", "events") if key not in archive]
        if missing:
            raise DataError(f"{path} lacks array(s) {missing}")
        data = np.asarray(archive["data"], dtype=np.float64)
        events = np.asarray(archive["events"], dtype=np.int64)
        eog = archive["eog"].astype(int).tolist() if "eog" in archive else []
        subject_id = str(archive["subject_id"]) if "subject_id" in archive else Path(path).stem
        fs = float(archive["fs"])
    if data.ndim != 2:
        raise DataError(f"Recording must be channels x samples, got shape {data.shape}")
    if events.ndim != 2 or events.shape[1] != 2:
        raise DataError(f"events must be a K x 2 array of (onset, label), got {events.shape}")
    return Recording(data=data, fs=fs, subject_id=subject_id), events, eog


def convert_recording(
    path: str | Path,
    preprocess: PreprocessConfig,
    n_classes: int | None = None,
    extra_drop: Sequence[int] = (),
) -> TrialSet:
    """Drop EOG channels, band-pass the continuous signal and segment it into trials."""
    preprocess.validate()
    recording, events, eog = load_recording(path)
    dropped = sorted(set(eog) | set(extra_drop) | set(preprocess.drop_channels))
    recording = drop_channels(recording, dropped)
    recording = bandpass(recording, preprocess.low, preprocess.high, preprocess.order)
    trials = segment(recording, [tuple(event) for event in events], preprocess.window)
    if n_classes is None:
        n_classes = int(events[:, 1].max()) + 1 if len(events) else 2
    return TrialSet(
        fs=recording.fs,
        n_classes=n_classes,
        trials=trials,
        subject_id=recording.subject_id,
        n_channels=recording.n_channels,
        n_samples=window_length(preprocess.window, recording.fs),
    )
