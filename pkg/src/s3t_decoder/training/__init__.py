"""Loss, training loop, metrics, cross-validation and significance testing."""

from s3t_decoder.training.cross_validation import (
    CVResult,
    FoldResult,
    run_cv,
    run_fold,
    stratified_folds,
)
from s3t_decoder.training.experiments import ablation_settings, run_settings, sweep_settings
from s3t_decoder.training.gradients import check_model_gradients, tiny_config
from s3t_decoder.training.loss import cross_entropy, validate_labels
from s3t_decoder.training.metrics import (
    ClassMetrics,
    EvalReport,
    class_metrics,
    confusion_matrix,
    evaluate,
    f_score,
    per_class_metrics,
    report_from_confusion,
)
from s3t_decoder.training.stats import WilcoxonResult, wilcoxon_signed_rank
from s3t_decoder.training.trainer import TrainResult, train
