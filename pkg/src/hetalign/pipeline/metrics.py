from ..common.exception import InvalidSetting

from dataclasses import dataclass, field, asdict, fields
import math
import numpy as np
import numpy.typing as npt


def evaluate_accuracy(predictions: npt.ArrayLike, labels: npt.ArrayLike) -> float:
    """Fraction of correct predictions."""
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape:
        raise InvalidSetting(
            f"Predictions {predictions.shape} and labels {labels.shape} differ in shape."
        )
    if predictions.size == 0:
        raise InvalidSetting("Accuracy is undefined for empty input.")
    return float(np.mean(predictions == labels))


def majority_baseline_accuracy(
    source_labels: npt.ArrayLike, target_labels: npt.ArrayLike
) -> float:
    """Accuracy on the target of always predicting the most frequent source class."""
    source_labels = np.asarray(source_labels)
    target_labels = np.asarray(target_labels)
    majority = int(np.argmax(np.bincount(source_labels)))
    return evaluate_accuracy(np.full_like(target_labels, majority), target_labels)


@dataclass(kw_only=True)
class RunMetrics:
    """Record of one run.

    Attributes:
        cr: Correlation reduction loss per epoch.
        re: Reconstruction loss per epoch.
        a: Alignment loss per epoch.
        ce: Source classification loss per epoch.
        total: Weighted total loss per epoch.
        gamma: Value of `gamma` after each epoch.
        final_accuracy: Target accuracy, or `None` when the target is unlabeled.
        predictions: Predicted class of every target node.
        homophily: `H^(1)` of the original graph and of both structures, per domain.
        structural_difference: Laplacian gap between the domains' structures.
        seconds: Wall-clock duration. Excluded from equality.
        ablation: Ablation tag of the run.
        seed: Run seed.
    """

    cr: list[float] = field(default_factory=list)
    re: list[float] = field(default_factory=list)
    a: list[float] = field(default_factory=list)
    ce: list[float] = field(default_factory=list)
    total: list[float] = field(default_factory=list)
    gamma: list[float] = field(default_factory=list)
    final_accuracy: float | None = None
    predictions: list[int] = field(default_factory=list)
    homophily: dict[str, dict[str, float]] = field(default_factory=dict)
    structural_difference: float | None = None
    seconds: float = field(default=0.0, compare=False)
    ablation: str = "full"
    seed: int = 0

    def record_epoch(self, losses: dict[str, float], total: float, gamma: float):
        self.cr.append(losses["cr"])
        self.re.append(losses["re"])
        self.a.append(losses["a"])
        self.ce.append(losses["ce"])
        self.total.append(total)
        self.gamma.append(gamma)

    @property
    def epochs(self) -> int:
        return len(self.total)

    def validate(self):
        if self.final_accuracy is not None and not 0.0 <= self.final_accuracy <= 1.0:
            raise InvalidSetting(f"Accuracy {self.final_accuracy} outside [0, 1].")
        for name in ("cr", "re", "a", "ce", "total"):
            if not all(math.isfinite(v) for v in getattr(self, name)):
                raise InvalidSetting(f"Loss series '{name}' has non-finite values.")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunMetrics":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})
