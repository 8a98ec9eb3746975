from s3t_decoder.config.config_loader import (
    ModelConfig,
    PipelineConfig,
    PreprocessConfig,
    TrainConfig,
    config_to_dict,
    load_config,
    preset,
)
