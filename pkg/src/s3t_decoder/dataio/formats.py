"""Versioned on-disk formats for trials, statistics, filters, checkpoints and reports.

Binary formats are little-endian: a magic line, a fixed ``struct`` header, then
row-major float64 payloads. Readers account for every byte and report the offset
of the first inconsistency. Reports are UTF-8 key-value text with matrix blocks.
"""

import json
import math
import os
import struct
import tempfile
from dataclasses import asdict
from pathlib import Path

import numpy as np

from s3t_decoder.config.config_loader import ModelConfig
from s3t_decoder.csp import OvrSubfilter, SpatialFilter
from s3t_decoder.errors import ConfigurationError, CorruptionError, FormatError
from s3t_decoder.log_messages import LOG_FILE_READ, LOG_FILE_WRITTEN
from s3t_decoder.logger import Logger
from s3t_decoder.model import ModelParams, parameter_shapes
from s3t_decoder.preprocess import StandardizationStats, Trial, TrialSet
from s3t_decoder.training.metrics import ClassMetrics, EvalReport

TRIALS_MAGIC = b"S3T-TRIALS v1\n"
STATS_MAGIC = b"S3T-STATS v1\n"
FILTER_MAGIC = b"S3T-FILTER v1\n"
CHECKPOINT_MAGIC = b"S3T-CKPT v1\n"
REPORT_MAGIC = "S3T-REPORT v1"

_TRIALS_HEADER = struct.Struct("<dIIII")
_FILTER_HEADER = struct.Struct("<III")
_U32 = struct.Struct("<I")
_LABEL = struct.Struct("<B")
_FLOAT = np.dtype("<f8")


class _Reader:
    """Cursor over a byte payload that raises CorruptionError on any overrun."""

    def __init__(self, payload: bytes, kind: str):
        self.payload = payload
        self.kind = kind
        self.offset = 0

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.payload):
            raise CorruptionError(
                f"Truncated {self.kind}: needed {size} bytes, "
                f"{len(self.payload) - self.offset} remain",
                self.offset,
            )
        chunk = self.payload[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, layout: struct.Struct) -> tuple:
        return layout.unpack(self.take(layout.size))

    def u32(self) -> int:
        return self.unpack(_U32)[0]

    def floats(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(count * _FLOAT.itemsize), dtype=_FLOAT).astype(np.float64)

    def string(self) -> str:
        length = self.u32()
        start = self.offset
        try:
            return self.take(length).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptionError(f"Invalid UTF-8 text in {self.kind}", start) from exc

    def finish(self) -> None:
        if self.offset != len(self.payload):
            raise CorruptionError(
                f"{len(self.payload) - self.offset} unexpected trailing bytes in {self.kind}",
                self.offset,
            )


def _pack_string(text: str) -> bytes:
    encoded = text.encode("utf-8")
    return _U32.pack(len(encoded)) + encoded


def _pack_floats(values: np.ndarray) -> bytes:
    return np.ascontiguousarray(values, dtype=_FLOAT).tobytes()


def _check_magic(payload: bytes, magic: bytes, kind: str) -> _Reader:
    if payload.startswith(magic):
        reader = _Reader(payload, kind)
        reader.take(len(magic))
        return reader
    family = magic.split(b" ")[0] + b" "
    if payload.startswith(family):
        found = payload[: payload.find(b"\n")].decode("ascii", errors="replace")
        raise FormatError(f"Unsupported {kind} version '{found}'")
    raise FormatError(f"Not a {kind} (magic {magic.strip().decode()!r} not found)")


def _file_mode() -> int:
    """Permissions a plain ``open(path, "w")`` would give under the current umask."""
    umask = os.umask(0)
    os.umask(umask)
    return 0o666 & ~umask


def _write_atomic(path: str | Path, payload: bytes, kind: str) -> None:
    path = Path(path)
    handle, temp_name = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(handle, "wb") as temp_file:
            temp_file.write(payload)
        os.chmod(temp_name, _file_mode())
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
    Logger.print_debug(LOG_FILE_WRITTEN.format(kind=kind, path=path))


def _read(path: str | Path, kind: str) -> bytes:
    payload = Path(path).read_bytes()
    Logger.print_debug(LOG_FILE_READ.format(kind=kind, path=path))
    return payload


# Trial sets


def encode_trial_set(trial_set: TrialSet) -> bytes:
    n_channels, n_samples = trial_set.n_channels or 0, trial_set.n_samples or 0
    parts = [
        TRIALS_MAGIC,
        _TRIALS_HEADER.pack(
            trial_set.fs, n_channels, n_samples, trial_set.n_classes, len(trial_set)
        ),
        _pack_string(trial_set.subject_id),
    ]
    for trial in trial_set:
        parts.append(_LABEL.pack(trial.label))
        parts.append(_pack_floats(trial.data))
    return b"".join(parts)


def decode_trial_set(payload: bytes) -> TrialSet:
    """Parse a TrialSetFile.

    Raises:
        FormatError: On a foreign magic line or version
        CorruptionError: If the payload length or a label disagrees with the header
    """
    reader = _check_magic(payload, TRIALS_MAGIC, "TrialSetFile")
    fs, n_channels, n_samples, n_classes, count = reader.unpack(_TRIALS_HEADER)
    subject_id = reader.string()
    expected = count * (_LABEL.size + n_channels * n_samples * _FLOAT.itemsize)
    if len(payload) - reader.offset != expected:
        raise CorruptionError(
            f"TrialSetFile declares {count} trials of {n_channels}x{n_samples} "
            f"({expected} bytes) but {len(payload) - reader.offset} bytes follow the header",
            reader.offset,
        )
    trials = []
    for _ in range(count):
        label_offset = reader.offset
        (label,) = reader.unpack(_LABEL)
        if label >= n_classes:
            raise CorruptionError(f"Label {label} is not below N={n_classes}", label_offset)
        data = reader.floats(n_channels * n_samples).reshape(n_channels, n_samples)
        trials.append(Trial(data=data, label=label, subject_id=subject_id, fs=fs))
    reader.finish()
    return TrialSet(
        fs=fs,
        n_classes=n_classes,
        trials=trials,
        subject_id=subject_id,
        n_channels=n_channels,
        n_samples=n_samples,
    )


def write_trial_set(path: str | Path, trial_set: TrialSet) -> None:
    _write_atomic(path, encode_trial_set(trial_set), "TrialSetFile")


def read_trial_set(path: str | Path) -> TrialSet:
    return decode_trial_set(_read(path, "TrialSetFile"))


# Standardization statistics


def encode_stats(stats: StandardizationStats) -> bytes:
    return b"".join(
        [
            STATS_MAGIC,
            _U32.pack(stats.n_channels),
            _pack_string(stats.source),
            _pack_floats(stats.mean),
            _pack_floats(stats.variance),
        ]
    )


def decode_stats(payload: bytes) -> StandardizationStats:
    reader = _check_magic(payload, STATS_MAGIC, "StatsFile")
    n_channels = reader.u32()
    source = reader.string()
    mean = reader.floats(n_channels)
    variance = reader.floats(n_channels)
    reader.finish()
    return StandardizationStats(mean=mean, variance=variance, source=source)


def write_stats(path: str | Path, stats: StandardizationStats) -> None:
    _write_atomic(path, encode_stats(stats), "StatsFile")


def read_stats(path: str | Path) -> StandardizationStats:
    return decode_stats(_read(path, "StatsFile"))


# Spatial filters


def encode_filter(spatial_filter: SpatialFilter) -> bytes:
    first = spatial_filter.subfilters[0]
    parts = [
        FILTER_MAGIC,
        _FILTER_HEADER.pack(len(spatial_filter.subfilters), first.n_rows, spatial_filter.n_channels),
    ]
    for subfilter in spatial_filter.subfilters:
        parts.append(_U32.pack(subfilter.one_class))
        parts.append(_pack_floats(subfilter.eigvals_one))
        parts.append(_pack_floats(subfilter.projection))
    return b"".join(parts)


def decode_filter(payload: bytes) -> SpatialFilter:
    """Parse a FilterFile; W is rebuilt by stacking the stored sub-filters."""
    reader = _check_magic(payload, FILTER_MAGIC, "FilterFile")
    header_offset = reader.offset
    n_subfilters, n_rows, n_channels = reader.unpack(_FILTER_HEADER)
    if n_subfilters == 0 or n_rows == 0:
        raise CorruptionError("FilterFile declares an empty filter", header_offset)
    subfilters = []
    for _ in range(n_subfilters):
        one_class = reader.u32()
        eigvals_one = reader.floats(n_rows)
        projection = reader.floats(n_rows * n_channels).reshape(n_rows, n_channels)
        subfilters.append(
            OvrSubfilter(projection=projection, one_class=one_class, eigvals_one=eigvals_one)
        )
    reader.finish()
    return SpatialFilter.from_subfilters(subfilters)


def write_filter(path: str | Path, spatial_filter: SpatialFilter) -> None:
    _write_atomic(path, encode_filter(spatial_filter), "FilterFile")


def read_filter(path: str | Path) -> SpatialFilter:
    return decode_filter(_read(path, "FilterFile"))


# Checkpoints


def encode_checkpoint(config: ModelConfig, params: ModelParams) -> bytes:
    parts = [
        CHECKPOINT_MAGIC,
        _pack_string(json.dumps(asdict(config), sort_keys=True)),
        _U32.pack(len(params)),
    ]
    for name, tensor in params.items():
        parts.append(_pack_string(name))
        parts.append(_U32.pack(tensor.ndim))
        parts.extend(_U32.pack(dim) for dim in tensor.shape)
        parts.append(_pack_floats(tensor.values))
    return b"".join(parts)


def decode_checkpoint(payload: bytes) -> tuple[ModelConfig, ModelParams]:
    """Parse a CheckpointFile into its configuration and parameters.

    Raises:
        FormatError: If the stored tensors do not match the stored configuration
    """
    reader = _check_magic(payload, CHECKPOINT_MAGIC, "CheckpointFile")
    config_offset = reader.offset
    try:
        config = ModelConfig(**json.loads(reader.string()))
        config.validate()
    except (json.JSONDecodeError, TypeError, ConfigurationError) as exc:
        raise CorruptionError(f"Invalid model configuration in checkpoint: {exc}", config_offset) from exc

    arrays = {}
    for _ in range(reader.u32()):
        name = reader.string()
        shape = tuple(reader.u32() for _ in range(reader.u32()))
        # Exact integer count: an absurd shape becomes a truncation error, not an overflow.
        arrays[name] = reader.floats(math.prod(shape)).reshape(shape)
    reader.finish()

    expected = parameter_shapes(config)
    found = {name: values.shape for name, values in arrays.items()}
    if found != expected:
        missing = sorted(set(expected) - set(found))
        extra = sorted(set(found) - set(expected))
        raise FormatError(
            f"Checkpoint tensors do not match its configuration (missing {missing}, "
            f"unexpected {extra}, or shapes differ)"
        )
    return config, ModelParams.from_arrays(arrays)


def write_checkpoint(path: str | Path, config: ModelConfig, params: ModelParams) -> None:
    _write_atomic(path, encode_checkpoint(config, params), "CheckpointFile")


def read_checkpoint(path: str | Path) -> tuple[ModelConfig, ModelParams]:
    return decode_checkpoint(_read(path, "CheckpointFile"))


# Reports

_METRIC_FIELDS = ("accuracy", "precision", "recall", "specificity", "f_score")


def _format_value(value: float | None) -> str:
    return "undefined" if value is None else repr(float(value))


def _parse_value(token: str) -> float | None:
    return None if token == "undefined" else float(token)


def encode_report(report: EvalReport) -> bytes:
    """Serialize a report; floats use ``repr`` so they read back exactly."""
    lines = [
        REPORT_MAGIC,
        f"n_classes: {report.n_classes}",
        f"n_trials: {report.n_trials}",
        f"overall_accuracy: {_format_value(report.overall_accuracy)}",
        f"mean_accuracy: {_format_value(report.mean_accuracy)}",
        f"std_accuracy: {_format_value(report.std_accuracy)}",
        "fold_accuracies:" + "".join(f" {_format_value(a)}" for a in report.fold_accuracies),
        "confusion:",
    ]
    lines.extend(" ".join(str(int(count)) for count in row) for row in report.confusion)
    lines.append("per_class: " + " ".join(_METRIC_FIELDS))
    for k, metrics in enumerate(report.per_class):
        values = " ".join(_format_value(getattr(metrics, name)) for name in _METRIC_FIELDS)
        lines.append(f"c{k}: {values}")
    lines.append("end")
    return ("\n".join(lines) + "\n").encode("utf-8")


class _LineReader:
    def __init__(self, payload: bytes):
        self.lines = payload.decode("utf-8").split("\n")
        self.offsets = []
        position = 0
        for line in self.lines:
            self.offsets.append(position)
            position += len(line.encode("utf-8")) + 1
        self.index = 0
        self.last_offset = 0

    @property
    def offset(self) -> int:
        return self.offsets[min(self.index, len(self.offsets) - 1)]

    def next(self) -> str:
        if self.index >= len(self.lines):
            raise CorruptionError("ReportFile ends early", self.offsets[-1])
        self.last_offset = self.offsets[self.index]
        line = self.lines[self.index]
        self.index += 1
        return line

    def field(self, key: str) -> str:
        offset = self.offset
        name, sep, value = self.next().partition(":")
        if name != key or not sep:
            raise CorruptionError(f"ReportFile expected '{key}:'", offset)
        return value.strip()


def decode_report(payload: bytes) -> EvalReport:
    """Parse a ReportFile.

    Raises:
        FormatError: On a foreign magic line or version
        CorruptionError: At the byte offset of the first malformed line
    """
    if not payload.startswith(REPORT_MAGIC.encode() + b"\n"):
        _check_magic(payload, REPORT_MAGIC.encode() + b"\n", "ReportFile")
    try:
        lines = _LineReader(payload)
    except UnicodeDecodeError as exc:
        raise CorruptionError("ReportFile is not valid UTF-8", exc.start) from exc
    lines.next()
    try:
        n_classes = int(lines.field("n_classes"))
        n_trials = int(lines.field("n_trials"))
        overall_accuracy = float(lines.field("overall_accuracy"))
        lines.field("mean_accuracy")
        lines.field("std_accuracy")
        fold_accuracies = [float(token) for token in lines.field("fold_accuracies").split()]
        lines.field("confusion")
        rows = []
        for _ in range(n_classes):
            offset = lines.offset
            row = [int(token) for token in lines.next().split()]
            if len(row) != n_classes:
                raise CorruptionError(f"Confusion row has {len(row)} entries, expected {n_classes}", offset)
            rows.append(row)
        lines.field("per_class")
        per_class = []
        for k in range(n_classes):
            offset = lines.offset
            tokens = lines.field(f"c{k}").split()
            if len(tokens) != len(_METRIC_FIELDS):
                raise CorruptionError(f"Class c{k} has {len(tokens)} metrics", offset)
            per_class.append(ClassMetrics(*(_parse_value(token) for token in tokens)))
        offset = lines.offset
        if lines.next() != "end" or any(lines.lines[lines.index :]):
            raise CorruptionError("ReportFile does not end with a single 'end' line", offset)
    except ValueError as exc:
        if isinstance(exc, CorruptionError):
            raise
        raise CorruptionError(f"Malformed number in ReportFile: {exc}", lines.last_offset) from exc

    confusion = np.array(rows, dtype=np.int64).reshape(n_classes, n_classes)
    if confusion.sum() != n_trials:
        raise CorruptionError(
            f"Confusion matrix holds {confusion.sum()} trials, header says {n_trials}", 0
        )
    return EvalReport(
        confusion=confusion,
        per_class=per_class,
        overall_accuracy=overall_accuracy,
        fold_accuracies=fold_accuracies,
    )


def write_report(path: str | Path, report: EvalReport) -> None:
    _write_atomic(path, encode_report(report), "ReportFile")


def read_report(path: str | Path) -> EvalReport:
    return decode_report(_read(path, "ReportFile"))
