from .config import (
    ABLATION_TAGS,
    FilterConfig,
    HomophilicSolveConfig,
    LossWeights,
    RunConfig,
)
from .tasks import SHIPPED_TASKS, canonical_task_name, shipped_configs, task_config
