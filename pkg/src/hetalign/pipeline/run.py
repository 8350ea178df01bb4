from .ablation import AblationPlan, ablation_variant
from .diagnostics import homophily_report, structural_difference
from .metrics import RunMetrics, evaluate_accuracy
from ..common import logger
from ..common.exception import HetalignError, InvalidGraph, PipelineError
from ..filters import FilterCache, cache_tensors
from ..graph import Graph
from ..model import (
    LossParts,
    ModelState,
    alignment_loss,
    backward_and_step,
    classifier_loss,
    correlation_reduction_loss,
    init_model_state,
    reconstruction_loss,
    total_loss,
)
from ..reconstruct import ReconstructedStructures
from ..setup import RunConfig

from contextlib import contextmanager
from dataclasses import dataclass
import time
import torch

STRUCTURAL_DIFFERENCE_LIMIT = 2048
"""Largest node count for which the dense-spectrum structural difference is computed."""


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except (HetalignError, ValueError, FloatingPointError, RuntimeError) as e:
        raise PipelineError(str(e), stage=name) from e


@dataclass(slots=True)
class _Domain:
    graph: Graph
    structures: ReconstructedStructures
    high: torch.Tensor
    low: torch.Tensor


def _prepare_domain(
    g: Graph, name: str, plan: AblationPlan, dtype: torch.dtype
) -> _Domain:
    with _stage("reconstruct"):
        structures = plan.build_structures(g, name)
        logger.info(f"Built {plan.tag} structures for the {name} graph ({g.n} nodes).")
    with _stage("filter"):
        cache = FilterCache.build(structures, g.features, plan.filter_order)
        high, low = cache_tensors(cache, dtype)
    return _Domain(graph=g, structures=structures, high=high, low=low)


def training_step(
    state: ModelState,
    source: _Domain,
    target: _Domain,
    source_labels: torch.Tensor,
    plan: AblationPlan,
) -> tuple[LossParts, torch.Tensor]:
    """One full-batch forward pass over both domains. Returns the loss parts and total."""
    network = state.network
    network.train()
    out_s = network(source.high, source.low)
    out_t = network(target.high, target.low)
    zero = out_s.logits.new_zeros(())
    weights = plan.weights

    cr = zero
    if plan.use_cr:
        cr = correlation_reduction_loss(out_s.h_e, out_s.h_o) + correlation_reduction_loss(
            out_t.h_e, out_t.h_o
        )
    re = zero
    if weights.mu1 > 0:
        re = reconstruction_loss(
            out_s.filtered, out_s.decoded, weights.beta
        ) + reconstruction_loss(out_t.filtered, out_t.decoded, weights.beta)
    a = zero
    if weights.mu2 > 0:
        a = alignment_loss(out_s.h_e, out_t.h_e, out_s.h_o, out_t.h_o)
    ce = zero
    if weights.mu_ce > 0:
        ce = classifier_loss(out_s.logits, source_labels)

    parts = LossParts(cr=cr, re=re, a=a, ce=ce)
    return parts, total_loss(parts, weights)


def _homophily_stats(domain: _Domain, topk: int) -> dict[str, float | None]:
    rows = homophily_report(domain.graph, domain.structures, max_hop=1, topk=topk)
    return {row.structure: row.ratio for row in rows}


def run_transfer(
    source: Graph,
    target: Graph,
    cfg: RunConfig | None = None,
    *,
    dtype: torch.dtype = torch.float32,
) -> RunMetrics:
    """Train on the labeled source graph and classify every node of the target graph.

    Stages: reconstruct both graphs, filter them, train for `cfg.epochs` full-batch epochs,
    then predict the target with the classifier head. Target labels, when present, are only
    used for reporting.

    Args:
        source: Labeled source graph.
        target: Target graph with the same feature dimension.
        cfg: Run configuration.
        dtype: Floating point type of the network.

    Returns:
        (RunMetrics): Loss curves, `gamma` trajectory, accuracy and diagnostics.

    Raises:
        PipelineError: Naming the failing stage.
    """
    cfg = cfg or RunConfig()
    start = time.perf_counter()

    with _stage("input"):
        cfg.validate()
        if source.labels is None:
            raise InvalidGraph("Source graph must be labeled.")
        if source.num_features != target.num_features:
            raise InvalidGraph(
                f"Feature dimensions differ: source {source.num_features}, "
                f"target {target.num_features}."
            )
        plan = ablation_variant(cfg)
        num_classes = int(source.num_classes or 0)

    src = _prepare_domain(source, "source", plan, dtype)
    tgt = _prepare_domain(target, "target", plan, dtype)

    metrics = RunMetrics(ablation=cfg.ablation, seed=cfg.seed)
    with _stage("train"):
        state = init_model_state(
            source.num_features,
            num_classes,
            seed=cfg.seed,
            lr=cfg.lr,
            weight_decay=cfg.weight_decay,
            dropout=cfg.dropout,
            dtype=dtype,
        )
        source_labels = torch.as_tensor(source.labels, dtype=torch.long)
        for epoch in range(cfg.epochs):
            parts, loss = training_step(state, src, tgt, source_labels, plan)
            backward_and_step(state, loss)
            gamma = float(state.network.filter.gamma.detach())
            metrics.record_epoch(parts.as_floats(), float(loss.detach()), gamma)
            if cfg.log_every > 0 and (epoch + 1) % cfg.log_every == 0:
                losses = " ".join(f"{k}={v:.4f}" for k, v in parts.as_floats().items())
                logger.debug(f"Epoch {epoch + 1}: total={float(loss):.4f} {losses}")

    if metrics.epochs > 1 and metrics.total[-1] > metrics.total[0]:
        logger.warning(
            f"Total loss increased over training ({metrics.total[0]:.4f} -> "
            f"{metrics.total[-1]:.4f})."
        )

    with _stage("evaluate"):
        predictions = state.network.predict(tgt.high, tgt.low).numpy()
        metrics.predictions = [int(p) for p in predictions]
        if target.labels is not None:
            metrics.final_accuracy = evaluate_accuracy(predictions, target.labels)
        for name, domain in (("source", src), ("target", tgt)):
            if domain.graph.labels is not None:
                metrics.homophily[name] = _homophily_stats(domain, cfg.topk)
        if max(source.n, target.n) <= STRUCTURAL_DIFFERENCE_LIMIT:
            metrics.structural_difference = structural_difference(
                src.structures, tgt.structures
            )
        else:
            logger.warning(
                f"Skipping the structural difference: graphs above "
                f"{STRUCTURAL_DIFFERENCE_LIMIT} nodes need a dense spectrum."
            )

    metrics.seconds = time.perf_counter() - start
    if metrics.final_accuracy is not None:
        logger.info(f"Run finished: target accuracy {metrics.final_accuracy:.4f}.")
    else:
        logger.info("Run finished.")
    return metrics
