"""File formats, synthetic data and recording conversion."""

from s3t_decoder.dataio.convert import convert_recording, load_recording
from s3t_decoder.dataio.formats import (
    decode_checkpoint,
    decode_filter,
    decode_report,
    decode_stats,
    decode_trial_set,
    encode_checkpoint,
    encode_filter,
    encode_report,
    encode_stats,
    encode_trial_set,
    read_checkpoint,
    read_filter,
    read_report,
    read_stats,
    read_trial_set,
    write_checkpoint,
    write_filter,
    write_report,
    write_stats,
    write_trial_set,
)
from s3t_decoder.dataio.synthetic import SynthSpec, generate_synthetic
