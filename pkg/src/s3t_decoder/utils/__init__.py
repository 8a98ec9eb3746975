"""Host inspection helpers."""

from s3t_decoder.utils.system import get_system_info, get_worker_count
