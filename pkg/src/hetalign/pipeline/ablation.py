from ..common.exception import InvalidSetting
from ..common.random import numpy_rng
from ..graph import Graph
from ..reconstruct import (
    ReconstructedStructures,
    original_structures,
    random_split_structures,
    reconstruct_structures,
)
from ..setup import ABLATION_TAGS, LossWeights, RunConfig

from dataclasses import dataclass, replace
from typing import Callable


@dataclass(frozen=True, slots=True)
class AblationPlan:
    """How a run deviates from the full method.

    Attributes:
        tag: Ablation tag.
        build_structures: Maps `(graph, domain)` to its structures.
        weights: Loss weights actually used.
        use_cr: Whether the correlation reduction term is computed.
        filter_order: Filter order actually used.
    """

    tag: str
    build_structures: Callable[[Graph, str], ReconstructedStructures]
    weights: LossWeights
    use_cr: bool
    filter_order: int


def ablation_variant(cfg: RunConfig) -> AblationPlan:
    """Training plan for `cfg.ablation`.

    * `full`: reconstructed structures, every loss term.
    * `no_cr`: drops the correlation reduction term.
    * `no_re`: drops the reconstruction term (`mu1 = 0`).
    * `random_split`: replaces reconstruction by a seeded random split of the edge set.
    * `source_only`: low-pass filtering over the original graph trained with the
      classification loss alone.
    """
    if cfg.ablation not in ABLATION_TAGS:
        raise InvalidSetting(f"Unknown ablation tag '{cfg.ablation}'.")

    def reconstructed(g: Graph, domain: str) -> ReconstructedStructures:
        return reconstruct_structures(g, cfg.solve_config(), cfg.topk, cfg.dense_limit)

    def random_split(g: Graph, domain: str) -> ReconstructedStructures:
        return random_split_structures(
            g, numpy_rng(cfg.seed, f"split/{domain}"), cfg.dense_limit
        )

    def original(g: Graph, domain: str) -> ReconstructedStructures:
        return original_structures(g, cfg.dense_limit)

    match cfg.ablation:
        case "full":
            return AblationPlan(
                tag="full",
                build_structures=reconstructed,
                weights=cfg.weights,
                use_cr=True,
                filter_order=cfg.filter_order,
            )
        case "no_cr":
            return AblationPlan(
                tag="no_cr",
                build_structures=reconstructed,
                weights=cfg.weights,
                use_cr=False,
                filter_order=cfg.filter_order,
            )
        case "no_re":
            return AblationPlan(
                tag="no_re",
                build_structures=reconstructed,
                weights=replace(cfg.weights, mu1=0.0),
                use_cr=True,
                filter_order=cfg.filter_order,
            )
        case "random_split":
            return AblationPlan(
                tag="random_split",
                build_structures=random_split,
                weights=cfg.weights,
                use_cr=True,
                filter_order=cfg.filter_order,
            )
        case "source_only":
            return AblationPlan(
                tag="source_only",
                build_structures=original,
                weights=replace(cfg.weights, mu1=0.0, mu2=0.0),
                use_cr=False,
                filter_order=cfg.filter_order,
            )
    raise InvalidSetting(f"Unknown ablation tag '{cfg.ablation}'.")
