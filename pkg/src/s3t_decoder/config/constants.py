"""Default hyperparameters for preprocessing, the S3T network and training."""

# Preprocessing
BAND_LOW_HZ = 4.0
BAND_HIGH_HZ = 40.0
FILTER_ORDER = 4
SAMPLING_RATE_HZ = 250.0
WINDOW_2A = (2.0, 6.0)
WINDOW_2B = (3.0, 7.0)

# Spatial filter
ROWS_2A = 4
ROWS_2B = 3
CSP_REGULARIZATION = 1e-8

# Network
SLICE_WIDTH = 10
N_HEADS = 5
POS_KERNEL = 51
FF_EXPANSION = 4
N_BLOCKS = 3
DROPOUT_SPATIAL = 0.3
DROPOUT_TEMPORAL = 0.5
LAYER_NORM_EPS = 1e-5

# Optimizer and training
LEARNING_RATE = 2e-4
BETA1 = 0.5
BETA2 = 0.9
ADAM_EPS = 1e-8
BATCH_SIZE = 50
EPOCHS = 500
FOLDS = 10
SEED = 0
LOG_EVERY = 50

# Loss
LOG_FLOOR = 1e-12

ABLATIONS = ("spatial", "temporal", "posenc", "ff")
SWEEP_PARAMS = ("slice_d", "k_c")
PRESETS = ("bci-iv-2a", "bci-iv-2b")
