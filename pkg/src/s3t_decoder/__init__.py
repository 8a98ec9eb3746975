"""S3T Decoder - spatial-temporal attention EEG decoding pipeline."""

__version__ = "0.1.0"
