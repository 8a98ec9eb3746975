#!/usr/bin/env python3
"""Command-line interface for s3t-decoder."""

import argparse
import json
import logging
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd

from s3t_decoder.config import constants
from s3t_decoder.config.config_loader import PipelineConfig, load_config, preset
from s3t_decoder.csp import apply_filter, fit_ovr_filter
from s3t_decoder.dataio import (
    SynthSpec,
    convert_recording,
    decode_report,
    generate_synthetic,
    read_checkpoint,
    read_filter,
    read_stats,
    read_trial_set,
    write_checkpoint,
    write_filter,
    write_report,
    write_stats,
    write_trial_set,
)
from s3t_decoder.dataio.formats import REPORT_MAGIC
from s3t_decoder.errors import (
    EXIT_DATA,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    ConfigurationError,
    DataError,
    S3TError,
)
from s3t_decoder.logger import Logger
from s3t_decoder.model import count_params, init_params
from s3t_decoder.preprocess import (
    TrialSet,
    bandpass,
    fit_standardization,
    standardize,
    window_length,
)
from s3t_decoder.training import (
    ablation_settings,
    check_model_gradients,
    evaluate,
    run_cv,
    run_settings,
    sweep_settings,
    train,
    wilcoxon_signed_rank,
)
from s3t_decoder.training.gradients import GRADIENT_TOLERANCE
from s3t_decoder.training.reporting import (
    comparison_table,
    fold_table,
    format_report,
    subject_summary,
)


def _parse_range(value: str) -> tuple[float, float]:
    try:
        low, high = value.split(":")
        return float(low), float(high)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'start:end', got '{value}'") from exc


def _parse_ints(value: str) -> list[int]:
    try:
        return [int(token) for token in value.split(",") if token]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{value}'") from exc


def _parse_floats(value: str) -> list[float]:
    try:
        return [float(token) for token in value.split(",") if token]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{value}'") from exc


def _parse_names(value: str) -> list[str]:
    return [token for token in value.split(",") if token]


# Flags left unset keep the preset, config-file or built-in default.
_MODEL_FLAGS = {
    "slice": "slice_d",
    "heads": "n_heads",
    "kc": "k_c",
    "nf": "n_f",
    "na": "n_a",
    "dropout_spatial": "dropout_spatial",
    "dropout_temporal": "dropout_temporal",
}
_TRAIN_FLAGS = {
    "lr": "learning_rate",
    "beta1": "beta1",
    "beta2": "beta2",
    "batch": "batch_size",
    "epochs": "epochs",
    "folds": "folds",
    "seed": "seed",
    "workers": "workers",
}


def _pipeline_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("pipeline settings")
    group.add_argument("--preset", choices=constants.PRESETS, help="Dataset preset")
    group.add_argument("--config", help="Path to a pipeline config JSON")
    group.add_argument("--classes", type=int, help="Number of classes N")
    group.add_argument("--rows", type=int, help="CSP rows S per sub-filter (4 for 2a, 3 for 2b)")
    group.add_argument("--band", type=_parse_range, help="Band-pass in Hz (default 4:40)")
    group.add_argument(
        "--window", type=_parse_range, help="Epoching window in s (2:6 for 2a, 3:7 for 2b)"
    )
    group.add_argument("--slice", type=int, help="Slice width d (default 10)")
    group.add_argument("--heads", type=int, help="Attention heads h (default 5)")
    group.add_argument("--kc", type=int, help="Position-encoding kernel size (default 51)")
    group.add_argument("--nf", type=int, help="Feed-forward expansion (default 4)")
    group.add_argument("--na", type=int, help="Temporal blocks N_a (default 3)")
    group.add_argument("--lr", type=float, help="Adam learning rate (default 2e-4)")
    group.add_argument("--beta1", type=float, help="Adam beta1 (default 0.5)")
    group.add_argument("--beta2", type=float, help="Adam beta2 (default 0.9)")
    group.add_argument("--batch", type=int, help="Batch size (default 50)")
    group.add_argument("--epochs", type=int, help="Training epochs (default 500)")
    group.add_argument("--dropout-temporal", type=float, help="Temporal dropout (default 0.5)")
    group.add_argument("--dropout-spatial", type=float, help="Spatial dropout (default 0.3)")
    group.add_argument("--folds", type=int, help="Cross-validation folds (default 10)")
    group.add_argument("--seed", type=int, help="Seed for splits, init, shuffling and dropout")
    group.add_argument("--workers", type=int, help="Parallel fold workers")
    return parent


def _flag_values(args: argparse.Namespace, flags: dict[str, str]) -> dict:
    return {
        field: getattr(args, flag) for flag, field in flags.items() if getattr(args, flag) is not None
    }


def build_pipeline_config(
    args: argparse.Namespace, trial_set: TrialSet | None = None
) -> PipelineConfig:
    """Resolve defaults < preset < config file < flags."""
    if args.preset:
        config = preset(args.preset)
    else:
        n_classes = args.classes or (trial_set.n_classes if trial_set else 4)
        rows = constants.ROWS_2B if n_classes == 2 else constants.ROWS_2A
        config = PipelineConfig(n_classes=n_classes, n_rows=rows)
    if args.config:
        config = load_config(args.config, base=config)

    preprocess = config.preprocess
    if args.band:
        preprocess = replace(preprocess, low=args.band[0], high=args.band[1])
    if args.window:
        preprocess = replace(preprocess, window=args.window)
    model = {**config.model, **_flag_values(args, _MODEL_FLAGS)}
    train_config = replace(config.train, **_flag_values(args, _TRAIN_FLAGS))
    config = replace(
        config,
        n_classes=args.classes or config.n_classes,
        n_rows=args.rows or config.n_rows,
        preprocess=preprocess,
        model=model,
        train=train_config,
    )
    config.validate()
    if trial_set is not None and trial_set.n_classes != config.n_classes:
        raise DataError(
            f"Trial set has {trial_set.n_classes} classes but the pipeline expects {config.n_classes}"
        )
    return config


def _emit(text: str) -> None:
    print(text)


def _write_table(table: pd.DataFrame, path: str | None) -> None:
    _emit(table.to_string(index=False))
    if path:
        table.to_csv(path, index=False)


def cmd_synth(args) -> int:
    spec = SynthSpec(
        n_classes=args.classes,
        trials_per_class=args.trials_per_class,
        n_channels=args.channels,
        n_samples=args.samples,
        fs=args.fs,
        frequencies=args.frequencies,
        amplitude=args.amplitude,
        mixing_seed=args.mixing_seed,
        noise_sigma=args.noise,
        seed=args.seed,
    )
    trial_set = generate_synthetic(spec)
    write_trial_set(args.out, trial_set)
    _emit(f"{len(trial_set)} trials written to {args.out}")
    return EXIT_OK


def cmd_convert(args) -> int:
    config = build_pipeline_config(args)
    trial_set = convert_recording(
        args.input, config.preprocess, n_classes=args.classes, extra_drop=args.drop or ()
    )
    write_trial_set(args.out, trial_set)
    _emit(f"{len(trial_set)} trials written to {args.out}")
    return EXIT_OK


def _crop(trial_set: TrialSet, window: tuple[float, float]) -> TrialSet:
    start = int(round(window[0] * trial_set.fs))
    stop = start + window_length(window, trial_set.fs)
    if start < 0 or stop > trial_set.n_samples or stop <= start:
        raise DataError(
            f"Window {window[0]}:{window[1]} s does not fit trials of {trial_set.n_samples} samples"
        )
    return TrialSet.from_arrays(
        trial_set.data[:, :, start:stop],
        trial_set.labels,
        fs=trial_set.fs,
        n_classes=trial_set.n_classes,
        subject_id=trial_set.subject_id,
    )


def _filter_and_crop(trial_set: TrialSet, args) -> TrialSet:
    """Band-pass and crop epoched trials when --band or --window is given."""
    if args.band:
        trials = [bandpass(trial, args.band[0], args.band[1]) for trial in trial_set]
        trial_set = replace(trial_set, trials=trials)
    if args.window:
        trial_set = _crop(trial_set, args.window)
    return trial_set


def cmd_preprocess(args) -> int:
    trial_set = _filter_and_crop(read_trial_set(args.input), args)
    if args.stats_in:
        stats = read_stats(args.stats_in)
    else:
        stats = fit_standardization(trial_set.trials, source=Path(args.input).name)
    standardized = replace(trial_set, trials=[standardize(trial, stats) for trial in trial_set])
    write_trial_set(args.out, standardized)
    if args.stats_out:
        write_stats(args.stats_out, stats)
    _emit(f"{len(standardized)} standardized trials written to {args.out}")
    return EXIT_OK


def cmd_fit_csp(args) -> int:
    trial_set = read_trial_set(args.input)
    spatial_filter = fit_ovr_filter(trial_set.trials, args.classes, args.rows)
    write_filter(args.out, spatial_filter)
    _emit(f"Filter W {spatial_filter.W.shape} written to {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    trial_set = _filter_and_crop(read_trial_set(args.input), args)
    config = build_pipeline_config(args, trial_set)
    if args.filter:
        spatial_filter = read_filter(args.filter)
    else:
        spatial_filter = fit_ovr_filter(trial_set.trials, config.n_classes, config.n_rows)
        if args.filter_out:
            write_filter(args.filter_out, spatial_filter)
    model_config = config.model_config(trial_set.n_samples)
    result = train(
        apply_filter(spatial_filter, trial_set.data), trial_set.labels, model_config, config.train
    )
    write_checkpoint(args.out, model_config, result.params)
    if args.loss_out:
        pd.DataFrame(
            {"epoch": np.arange(1, len(result.loss_curve) + 1), "loss": result.loss_curve}
        ).to_csv(args.loss_out, index=False)
    final = f"{result.loss_curve[-1]:.6f}" if result.loss_curve else "n/a"
    _emit(f"Trained {count_params(result.params)} parameters; final loss {final}")
    return EXIT_OK


def cmd_eval(args) -> int:
    model_config, params = read_checkpoint(args.checkpoint)
    spatial_filter = read_filter(args.filter)
    trial_set = read_trial_set(args.input)
    report = evaluate(params, model_config, apply_filter(spatial_filter, trial_set.data), trial_set.labels)
    if args.out:
        write_report(args.out, report)
    _emit(format_report(report))
    return EXIT_OK


def cmd_cv(args) -> int:
    trial_set = _filter_and_crop(read_trial_set(args.input), args)
    config = build_pipeline_config(args, trial_set)
    result = run_cv(trial_set, config)
    if args.out:
        write_report(args.out, result.aggregate)
    _write_table(fold_table(result), args.folds_out)
    _emit(format_report(result.aggregate))
    return EXIT_OK


def cmd_ablate(args) -> int:
    trial_set = _filter_and_crop(read_trial_set(args.input), args)
    config = build_pipeline_config(args, trial_set)
    settings = ablation_settings(args.drop)
    results = run_settings(trial_set, config, settings)
    _write_table(comparison_table([label for label, _ in settings], results), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    trial_set = _filter_and_crop(read_trial_set(args.input), args)
    config = build_pipeline_config(args, trial_set)
    settings = sweep_settings(args.param, args.values, config.model.get("n_heads", constants.N_HEADS))
    results = run_settings(trial_set, config, settings)
    _write_table(comparison_table([label for label, _ in settings], results), args.out)
    return EXIT_OK


def cmd_params(args) -> int:
    config = build_pipeline_config(args)
    n_samples = args.samples or window_length(config.preprocess.window, constants.SAMPLING_RATE_HZ)
    model_config = config.model_config(n_samples)
    params = init_params(model_config, np.random.default_rng(config.train.seed))
    _emit(str(count_params(params)))
    return EXIT_OK


def _load_accuracies(path: str) -> list[float]:
    """Per-subject accuracies from a ReportFile (its fold list) or a CSV column."""
    payload = Path(path).read_bytes()
    if payload.startswith(REPORT_MAGIC.encode()):
        return decode_report(payload).fold_accuracies
    table = pd.read_csv(path)
    column = "accuracy" if "accuracy" in table.columns else table.columns[-1]
    return table[column].astype(float).tolist()


def cmd_compare(args) -> int:
    a, b = _load_accuracies(args.a), _load_accuracies(args.b)
    names = tuple(args.names) if args.names else (Path(args.a).stem, Path(args.b).stem)
    if len(names) != 2:
        raise ConfigurationError("--names takes exactly two comma-separated labels")
    result = wilcoxon_signed_rank(a, b)
    if len(a) == len(b):
        _emit(subject_summary(a, b, names).to_string())
    flag = " (all differences zero)" if result.degenerate else ""
    _emit(
        f"Wilcoxon signed-rank ({result.method}, n={result.n_used}): "
        f"W+={result.statistic:g}, p={result.p_value:.4g}{flag}"
    )
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    errors = check_model_gradients(n_coordinates=args.coordinates, seed=args.seed)
    table = pd.DataFrame({"parameter": list(errors), "relative_error": list(errors.values())})
    _emit(table.to_string(index=False))
    worst = max(errors.values())
    if worst >= GRADIENT_TOLERANCE:
        Logger.print_error(f"Worst relative gradient error {worst:.3e} exceeds {GRADIENT_TOLERANCE}")
        return EXIT_NUMERIC
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="s3t-decoder", description="S3T - EEG motor imagery decoding"
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Log debug messages")
    verbosity.add_argument("--quiet", action="store_true", help="Log warnings and errors only")
    subparsers = parser.add_subparsers(dest="command", required=True, help="Command to run")
    pipeline = _pipeline_parent()

    synth = subparsers.add_parser("synth", help="Generate a synthetic TrialSetFile")
    synth.add_argument("--out", required=True)
    synth.add_argument("--classes", type=int, default=4)
    synth.add_argument("--trials-per-class", type=int, default=40)
    synth.add_argument("--channels", type=int, default=8)
    synth.add_argument("--samples", type=int, default=200)
    synth.add_argument("--fs", type=float, default=100.0)
    synth.add_argument("--frequencies", type=_parse_floats, help="Class rhythms in Hz")
    synth.add_argument("--amplitude", type=float, default=3.0)
    synth.add_argument("--noise", type=float, default=0.1)
    synth.add_argument("--mixing-seed", type=int)
    synth.add_argument("--seed", type=int, default=constants.SEED)
    synth.set_defaults(handler=cmd_synth)

    convert = subparsers.add_parser(
        "convert", parents=[pipeline], help="Segment a continuous .npz recording"
    )
    convert.add_argument("--input", required=True)
    convert.add_argument("--out", required=True)
    convert.add_argument("--drop", type=_parse_ints, help="Extra channel indices to drop")
    convert.set_defaults(handler=cmd_convert)

    preprocess = subparsers.add_parser("preprocess", help="Band-pass, crop and standardize trials")
    preprocess.add_argument("--input", required=True)
    preprocess.add_argument("--out", required=True)
    preprocess.add_argument("--band", type=_parse_range, help="Band-pass in Hz, e.g. 4:40")
    preprocess.add_argument("--window", type=_parse_range, help="Crop in s from trial start")
    preprocess.add_argument("--stats-in", help="Reuse statistics from a StatsFile")
    preprocess.add_argument("--stats-out", help="Write the fitted statistics")
    preprocess.set_defaults(handler=cmd_preprocess)

    fit_csp = subparsers.add_parser("fit-csp", help="Fit an OVR-CSP FilterFile")
    fit_csp.add_argument("--input", required=True)
    fit_csp.add_argument("--out", required=True)
    fit_csp.add_argument("--classes", type=int, required=True)
    fit_csp.add_argument("--rows", type=int, required=True)
    fit_csp.set_defaults(handler=cmd_fit_csp)

    train_parser = subparsers.add_parser("train", parents=[pipeline], help="Train and checkpoint")
    train_parser.add_argument("--input", required=True)
    train_parser.add_argument("--out", required=True, help="CheckpointFile path")
    train_parser.add_argument("--filter", help="Use this FilterFile instead of fitting one")
    train_parser.add_argument("--filter-out", help="Write the fitted FilterFile")
    train_parser.add_argument("--loss-out", help="Write the loss curve as CSV")
    train_parser.set_defaults(handler=cmd_train)

    eval_parser = subparsers.add_parser("eval", help="Evaluate a checkpoint")
    eval_parser.add_argument("--checkpoint", required=True)
    eval_parser.add_argument("--filter", required=True)
    eval_parser.add_argument("--input", required=True)
    eval_parser.add_argument("--out", help="ReportFile path")
    eval_parser.set_defaults(handler=cmd_eval)

    cv = subparsers.add_parser("cv", parents=[pipeline], help="Cross-validate the full pipeline")
    cv.add_argument("--input", required=True)
    cv.add_argument("--out", help="ReportFile path")
    cv.add_argument("--folds-out", help="Write fold accuracies as CSV")
    cv.set_defaults(handler=cmd_cv)

    ablate = subparsers.add_parser("ablate", parents=[pipeline], help="Ablation study")
    ablate.add_argument("--input", required=True)
    ablate.add_argument(
        "--drop",
        type=_parse_names,
        required=True,
        help=f"Comma-separated components: {', '.join(constants.ABLATIONS)}",
    )
    ablate.add_argument("--out", help="Write the result table as CSV")
    ablate.set_defaults(handler=cmd_ablate)

    sweep = subparsers.add_parser("sweep", parents=[pipeline], help="Sensitivity sweep")
    sweep.add_argument("--input", required=True)
    sweep.add_argument("--param", choices=constants.SWEEP_PARAMS, required=True)
    sweep.add_argument("--values", type=_parse_ints, required=True)
    sweep.add_argument("--out", help="Write the result table as CSV")
    sweep.set_defaults(handler=cmd_sweep)

    params = subparsers.add_parser("params", parents=[pipeline], help="Count trainable parameters")
    params.add_argument("--samples", type=int, help="Samples per trial T (default from the window)")
    params.set_defaults(handler=cmd_params)

    compare = subparsers.add_parser("compare", help="Wilcoxon test on paired accuracies")
    compare.add_argument("--a", required=True, help="ReportFile or CSV with an accuracy column")
    compare.add_argument("--b", required=True, help="ReportFile or CSV with an accuracy column")
    compare.add_argument("--names", type=_parse_names, help="Two labels for the summary table")
    compare.set_defaults(handler=cmd_compare)

    gradcheck = subparsers.add_parser("gradcheck", help="Finite-difference gradient check")
    gradcheck.add_argument("--coordinates", type=int, default=10)
    gradcheck.add_argument("--seed", type=int, default=constants.SEED)
    gradcheck.set_defaults(handler=cmd_gradcheck)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    if args.verbose:
        Logger.configure(logging.DEBUG)
    elif args.quiet:
        Logger.configure(logging.WARNING)
    else:
        Logger.configure(logging.INFO)

    try:
        return args.handler(args)
    except S3TError as error:
        Logger.print_error(str(error))
        return error.exit_code
    except json.JSONDecodeError as error:
        Logger.print_error(f"Invalid JSON: {error}")
        return EXIT_USAGE
    except OSError as error:
        Logger.print_error(str(error))
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
