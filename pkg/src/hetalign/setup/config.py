from ..common import default
from ..common.exception import InvalidSetting

from dataclasses import dataclass, field, asdict
from typing import Literal
import math

AblationTag = Literal["full", "no_cr", "no_re", "random_split", "source_only"]
ABLATION_TAGS: tuple[str, ...] = ("full", "no_cr", "no_re", "random_split", "source_only")


@dataclass(kw_only=True, slots=True)
class HomophilicSolveConfig:
    """Settings of the homophilic structure solver.

    Attributes:
        l: Hop order of the coupling term `A^(l)`.
        outer_iters: Alternations between the row solves and the `A^(l)` update.
        bisection_tol: Allowed deviation of a row sum from 1 during the multiplier search.
        bisection_max_steps: Maximum bisection steps per row.
        standardize: Z-score features per dimension before computing distances.
        row_block: Rows solved together in one vectorized block.
    """

    l: int = default.DEFAULT_HOP
    outer_iters: int = default.DEFAULT_OUTER_ITERS
    bisection_tol: float = default.DEFAULT_BISECTION_TOL
    bisection_max_steps: int = default.DEFAULT_BISECTION_MAX_STEPS
    standardize: bool = True
    row_block: int = default.DEFAULT_ROW_BLOCK

    def validate(self):
        if self.l < 1:
            raise InvalidSetting(f"Hop order l must be >= 1, got {self.l}.")
        if self.outer_iters < 0:
            raise InvalidSetting("outer_iters must be nonnegative.")
        if not self.bisection_tol > 0:
            raise InvalidSetting("bisection_tol must be positive.")
        if self.bisection_max_steps < 1:
            raise InvalidSetting("bisection_max_steps must be positive.")
        if self.row_block < 1:
            raise InvalidSetting("row_block must be positive.")


@dataclass(kw_only=True, slots=True)
class FilterConfig:
    """Settings of the low/high-pass filter pair.

    Attributes:
        k: Filter order.
        gamma_logit: Unconstrained balance parameter; `gamma = sigmoid(gamma_logit)`.
    """

    k: int = default.DEFAULT_HOP
    gamma_logit: float = 0.0

    @property
    def gamma(self) -> float:
        if self.gamma_logit >= 0:
            return 1.0 / (1.0 + math.exp(-self.gamma_logit))
        z = math.exp(self.gamma_logit)
        return z / (1.0 + z)

    def validate(self):
        if self.k < 0:
            raise InvalidSetting(f"Filter order k must be >= 0, got {self.k}.")


@dataclass(kw_only=True, slots=True)
class LossWeights:
    """Trade-off weights of the training objective.

    Attributes:
        mu1: Weight of the reconstruction loss.
        mu2: Weight of the alignment loss.
        beta: Sharpening exponent of the scaled cosine error, at least 1.
        mu_ce: Weight of the source classification loss. Zero gives the pure unsupervised
            objective.
    """

    mu1: float = default.FALLBACK_MU1
    mu2: float = default.FALLBACK_MU2
    beta: float = default.DEFAULT_BETA
    mu_ce: float = 1.0

    def validate(self):
        if self.mu1 < 0 or self.mu2 < 0 or self.mu_ce < 0:
            raise InvalidSetting("Loss weights must be nonnegative.")
        if self.beta < 1:
            raise InvalidSetting(f"beta must be >= 1, got {self.beta}.")


@dataclass(kw_only=True, slots=True)
class RunConfig:
    """Configuration of one source to target run.

    Attributes:
        l: Hop order of the homophilic reconstruction.
        k: Filter order. `None` reuses `l`.
        weights: Loss trade-off weights.
        lr: Adam learning rate, in `[1e-4, 5e-4]`.
        weight_decay: Decoupled weight decay, in `[1e-4, 5e-3]`.
        dropout: Dropout rate of the MLPs.
        epochs: Number of full-batch training epochs.
        seed: Seed of every random substream of the run.
        ablation: One of `full`, `no_cr`, `no_re`, `random_split`, `source_only`.
        topk: Edges kept per node in the heterophilic structure.
        outer_iters: Alternations of the homophilic solver.
        dense_limit: Largest node count stored densely.
        log_every: Epochs between debug loss logs.
        strict_ranges: Reject learning rates and weight decays outside the tuned ranges.
    """

    l: int = default.FALLBACK_HOP
    k: int | None = None
    weights: LossWeights = field(default_factory=LossWeights)
    lr: float = default.DEFAULT_LR
    weight_decay: float = default.DEFAULT_WEIGHT_DECAY
    dropout: float = default.DEFAULT_DROPOUT
    epochs: int = default.DEFAULT_EPOCHS
    seed: int = 0
    ablation: str = "full"
    topk: int = default.DEFAULT_TOPK
    outer_iters: int = default.DEFAULT_OUTER_ITERS
    dense_limit: int = default.DEFAULT_DENSE_LIMIT
    log_every: int = 50
    strict_ranges: bool = True

    @property
    def filter_order(self) -> int:
        return self.l if self.k is None else self.k

    def solve_config(self) -> HomophilicSolveConfig:
        return HomophilicSolveConfig(l=self.l, outer_iters=self.outer_iters)

    def filter_config(self) -> FilterConfig:
        return FilterConfig(k=self.filter_order)

    def validate(self):
        self.weights.validate()
        self.solve_config().validate()
        self.filter_config().validate()
        if self.ablation not in ABLATION_TAGS:
            raise InvalidSetting(
                f"Unknown ablation tag '{self.ablation}', expected one of {ABLATION_TAGS}."
            )
        if self.strict_ranges:
            if not 1e-4 <= self.lr <= 5e-4:
                raise InvalidSetting(f"Learning rate {self.lr} outside [1e-4, 5e-4].")
            if not 1e-4 <= self.weight_decay <= 5e-3:
                raise InvalidSetting(
                    f"Weight decay {self.weight_decay} outside [1e-4, 5e-3]."
                )
        elif self.lr < 0 or self.weight_decay < 0:
            raise InvalidSetting("Learning rate and weight decay must be nonnegative.")
        if not 0 <= self.dropout < 1:
            raise InvalidSetting(f"Dropout {self.dropout} outside [0, 1).")
        if self.epochs < 0:
            raise InvalidSetting("epochs must be nonnegative.")
        if self.topk < 1:
            raise InvalidSetting("topk must be positive.")

    def to_dict(self) -> dict:
        return asdict(self)
