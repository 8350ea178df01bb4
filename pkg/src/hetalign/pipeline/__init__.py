from .ablation import AblationPlan, ablation_variant
from .diagnostics import (
    HomophilyRow,
    format_report,
    homophily_report,
    laplacian_gap,
    structural_difference,
)
from .metrics import RunMetrics, evaluate_accuracy, majority_baseline_accuracy
from .run import run_transfer, training_step
