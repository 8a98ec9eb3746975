"""Constants for log messages used throughout the decoding pipeline."""

# Cross-validation
LOG_FOLD_START = "Fold {fold}/{folds}: {n_train} train trials, {n_test} test trials"
LOG_FOLD_DONE = "Fold {fold}/{folds} accuracy: {accuracy:.2f}%"
LOG_CV_DONE = "Cross-validation mean accuracy: {mean:.2f}% (std {std:.2f})"

# Spatial filter
LOG_CSP_FIT = "Fitted OVR-CSP filter: {n_subfilters} sub-filter(s), W shape {shape}"
LOG_CSP_ILL_CONDITIONED = "Trial has T={n_samples} <= C_eeg={n_channels}; covariance is rank deficient"
LOG_CSP_REGULARIZED = "Composite covariance is near-singular; adding ridge {ridge:.3e}"

# Training
LOG_EPOCH_LOSS = "Epoch {epoch}/{epochs} mean loss {loss:.6f}"
LOG_TRAIN_START = "Training {n_params} parameters on {n_trials} trials for {epochs} epochs"

# Files
LOG_FILE_WRITTEN = "Wrote {kind} to {path}"
LOG_FILE_READ = "Read {kind} from {path}"
