""" Tuned settings for the public transfer tasks.

Each entry maps a task `SRC→TGT` to `(mu1, mu2, l)`.
"""

from .config import LossWeights, RunConfig
from ..common import default

SHIPPED_TASKS: dict[str, tuple[float, float, int]] = {
    "U→B": (0.5, 0.5, 4),
    "U→E": (0.1, 0.1, 2),
    "B→U": (0.1, 0.1, 4),
    "B→E": (0.5, 0.1, 3),
    "E→U": (0.5, 0.5, 4),
    "E→B": (0.5, 0.5, 4),
    "A3→A4": (0.1, 0.1, 5),
    "A4→A3": (0.1, 0.1, 4),
    "B1→B2": (0.1, 0.1, 2),
    "B2→B1": (0.1, 0.1, 3),
    "A→D": (0.1, 0.1, 3),
    "D→A": (0.1, 0.1, 4),
    "A→C": (0.5, 0.5, 4),
    "C→A": (0.1, 0.1, 3),
    "C→D": (0.1, 0.1, 4),
    "D→C": (0.1, 0.1, 4),
    "CO→WI": (0.1, 0.1, 7),
    "TX→CO": (0.1, 0.1, 4),
    "TX→WI": (0.1, 0.1, 6),
    "WI→TX": (0.1, 0.1, 8),
}


def canonical_task_name(name: str) -> str:
    """Normalize `"wi->tx"`, `"WI → TX"` and `"WI→TX"` to `"WI→TX"`."""
    name = name.replace("->", "→").replace(" ", "")
    return "→".join(part.upper() for part in name.split("→"))


def _make_config(mu1: float, mu2: float, l: int) -> RunConfig:
    return RunConfig(l=l, weights=LossWeights(mu1=mu1, mu2=mu2))


def shipped_configs() -> dict[str, RunConfig]:
    """Run configurations of all shipped transfer tasks."""
    return {name: _make_config(*values) for name, values in SHIPPED_TASKS.items()}


def task_config(name: str) -> RunConfig:
    """Run configuration of a task, or the fallback defaults for unknown tasks."""
    values = SHIPPED_TASKS.get(canonical_task_name(name))
    if values is None:
        return _make_config(default.FALLBACK_MU1, default.FALLBACK_MU2, default.FALLBACK_HOP)
    return _make_config(*values)
