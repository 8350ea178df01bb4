""" Default parameters
"""

DEFAULT_TOPK = 5
DEFAULT_DENSE_LIMIT = 4096
EPS = 1e-8

DEFAULT_HOP = 2
DEFAULT_OUTER_ITERS = 10
DEFAULT_BISECTION_TOL = 1e-8
DEFAULT_BISECTION_MAX_STEPS = 100
DEFAULT_ROW_BLOCK = 512

HIDDEN_DIM = 128
CODE_DIM = 16
DEFAULT_DROPOUT = 0.5
DEFAULT_BETA = 2.0
DEFAULT_EPOCHS = 300
DEFAULT_LR = 5e-4
DEFAULT_WEIGHT_DECAY = 5e-4

FALLBACK_MU1 = 0.1
FALLBACK_MU2 = 0.1
FALLBACK_HOP = 4
