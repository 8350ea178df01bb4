from .filter import (
    FilterCache,
    filter_pair,
    high_pass,
    high_pass_power,
    low_pass,
    low_pass_power,
    normalize_structure,
    structure_laplacian,
)
from .adaptive import AdaptiveFilter, cache_tensors
