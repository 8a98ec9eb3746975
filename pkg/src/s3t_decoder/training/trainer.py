"""Mini-batch Adam training of the S3T network."""

from dataclasses import dataclass, field

import numpy as np

from s3t_decoder.config.config_loader import ModelConfig, TrainConfig
from s3t_decoder.errors import DimensionError, TrainingError
from s3t_decoder.log_messages import LOG_EPOCH_LOSS, LOG_TRAIN_START
from s3t_decoder.logger import Logger
from s3t_decoder.model import ModelParams, count_params, forward, init_params
from s3t_decoder.numcore import AdamState, adam_step, backward
from s3t_decoder.training.loss import cross_entropy, validate_labels


@dataclass
class TrainResult:
    """Final parameters, the per-epoch mean loss, and the optimizer state."""

    params: ModelParams
    loss_curve: list[float] = field(default_factory=list)
    adam_state: AdamState | None = None


def training_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent generators for initialization and for shuffling plus dropout."""
    init_seq, loop_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(init_seq), np.random.default_rng(loop_seq)


def train(
    data: np.ndarray,
    labels,
    model_config: ModelConfig,
    train_config: TrainConfig,
    *,
    params: ModelParams | None = None,
) -> TrainResult:
    """Fit S3T with shuffled mini-batches, dropout active and one Adam step per batch.

    Args:
        data: Spatially filtered trials, shape (M, C_f, T)
        labels: M class indices
        model_config: Network configuration
        train_config: Optimizer, batching and seed settings
        params: Starting parameters; freshly initialized from the seed when omitted

    Returns:
        TrainResult with the final parameters and the mean loss of every epoch

    Raises:
        TrainingError: If there are no training trials
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 3 or data.shape[0] == 0:
        raise TrainingError(f"Training needs a non-empty (M, C_f, T) array, got shape {data.shape}")
    labels = validate_labels(labels, model_config.n_classes)
    if labels.shape[0] != data.shape[0]:
        raise DimensionError(f"{labels.shape[0]} labels for {data.shape[0]} trials")
    train_config.validate()

    init_rng, loop_rng = training_streams(train_config.seed)
    if params is None:
        params = init_params(model_config, init_rng)
    state = AdamState.for_params(
        params,
        learning_rate=train_config.learning_rate,
        beta1=train_config.beta1,
        beta2=train_config.beta2,
        epsilon=train_config.epsilon,
    )

    n_trials = data.shape[0]
    Logger.print_debug(
        LOG_TRAIN_START.format(
            n_params=count_params(params), n_trials=n_trials, epochs=train_config.epochs
        )
    )
    loss_curve: list[float] = []
    for epoch in range(1, train_config.epochs + 1):
        order = loop_rng.permutation(n_trials)
        total = 0.0
        for start in range(0, n_trials, train_config.batch_size):
            batch = order[start : start + train_config.batch_size]
            params.zero_grad()
            probabilities = forward(
                data[batch], params, model_config, training=True, rng=loop_rng
            )
            loss = cross_entropy(probabilities, labels[batch])
            backward(loss)
            adam_step(params, state)
            total += loss.item() * len(batch)
        loss_curve.append(total / n_trials)

        message = LOG_EPOCH_LOSS.format(epoch=epoch, epochs=train_config.epochs, loss=loss_curve[-1])
        if train_config.log_every and epoch % train_config.log_every == 0:
            Logger.print_info(message)
        else:
            Logger.print_debug(message)

    return TrainResult(params=params, loss_curve=loss_curve, adam_state=state)
