"""Ablation and sensitivity sweeps: repeated cross-validation under modified settings."""

from collections.abc import Sequence
from dataclasses import replace
from math import gcd
from typing import Any

from s3t_decoder.config import constants
from s3t_decoder.config.config_loader import PipelineConfig
from s3t_decoder.errors import ConfigurationError
from s3t_decoder.logger import Logger
from s3t_decoder.preprocess import TrialSet
from s3t_decoder.training.cross_validation import CVResult, run_cv

Setting = tuple[str, dict[str, Any]]


def ablation_settings(components: Sequence[str]) -> list[Setting]:
    """The full model followed by one setting per removed component.

    Raises:
        ConfigurationError: If a component name is unknown
    """
    settings: list[Setting] = [("full", {})]
    for component in components:
        if component not in constants.ABLATIONS:
            raise ConfigurationError(
                f"Unknown ablation '{component}'. "
                f"Available options: {', '.join(constants.ABLATIONS)}"
            )
        settings.append((f"without {component}", {f"use_{component}": False}))
    return settings


def sweep_settings(param: str, values: Sequence[int], n_heads: int = constants.N_HEADS) -> list[Setting]:
    """One setting per value of ``slice_d`` or ``k_c``.

    A slice width the head count does not divide runs with
    ``gcd(n_heads, slice_d)`` heads instead.
    """
    if param not in constants.SWEEP_PARAMS:
        raise ConfigurationError(
            f"Unknown sweep parameter '{param}'. "
            f"Available options: {', '.join(constants.SWEEP_PARAMS)}"
        )
    settings: list[Setting] = []
    for value in values:
        overrides: dict[str, Any] = {param: int(value)}
        if param == "slice_d" and value % n_heads:
            overrides["n_heads"] = gcd(n_heads, int(value))
            Logger.print_warning(
                f"slice_d={value} is not divisible by h={n_heads}; "
                f"using h={overrides['n_heads']}"
            )
        settings.append((f"{param}={value}", overrides))
    return settings


def run_settings(
    trial_set: TrialSet,
    config: PipelineConfig,
    settings: Sequence[Setting],
    *,
    workers: int | None = None,
) -> list[CVResult]:
    """Cross-validate once per setting, each overriding the base model settings."""
    results = []
    for label, overrides in settings:
        Logger.print_info(f"Cross-validating setting '{label}'")
        variant = replace(config, model={**config.model, **overrides})
        results.append(run_cv(trial_set, variant, workers=workers))
    return results
