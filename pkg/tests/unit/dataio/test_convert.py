"""Unit tests for converting continuous recordings into trial sets."""

import numpy as np
import pytest

from s3t_decoder.config import PreprocessConfig
from s3t_decoder.dataio import convert_recording, load_recording
from s3t_decoder.errors import DataError, SegmentationError

FS = 250.0


@pytest.fixture
def recording_path(tmp_path):
    rng = np.random.default_rng(0)
    path = tmp_path / "A01T.npz"
    np.savez(
        path,
        data=rng.standard_normal((5, 2000)),
        fs=np.array(FS),
        events=np.array([[300, 0], [800, 1], [1300, 0]]),
        eog=np.array([4]),
    )
    return path


def test_load_recording(recording_path):
    recording, events, eog = load_recording(recording_path)
    assert recording.data.shape == (5, 2000)
    assert recording.fs == FS
    assert recording.subject_id == "A01T"
    assert events.shape == (3, 2)
    assert eog == [4]


def test_convert_drops_eog_and_segments(recording_path):
    trial_set = convert_recording(recording_path, PreprocessConfig(window=(0.5, 2.5)))
    assert len(trial_set) == 3
    assert trial_set.n_channels == 4
    assert trial_set.n_samples == 500
    assert trial_set.n_classes == 2
    assert trial_set.labels.tolist() == [0, 1, 0]


def test_extra_channels_dropped(recording_path):
    trial_set = convert_recording(
        recording_path, PreprocessConfig(window=(0.5, 2.5)), n_classes=4, extra_drop=[0]
    )
    assert trial_set.n_channels == 3
    assert trial_set.n_classes == 4


def test_window_past_recording_end(recording_path):
    with pytest.raises(SegmentationError):
        convert_recording(recording_path, PreprocessConfig(window=(0.5, 4.0)))


def test_missing_arrays(tmp_path):
    path = tmp_path / "broken.npz"
    np.savez(path, data=np.zeros((2, 10)))
    with pytest.raises(DataError, match="lacks"):
        load_recording(path)


def test_malformed_events(tmp_path):
    path = tmp_path / "events.npz"
    np.savez(path, data=np.zeros((2, 10)), fs=np.array(FS), events=np.array([1, 2, 3]))
    with pytest.raises(DataError, match="events"):
        load_recording(path)
