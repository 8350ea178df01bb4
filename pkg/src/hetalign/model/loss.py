from ..common.default import EPS
from ..common.exception import NumericalAbort
from ..setup import LossWeights

from dataclasses import dataclass, fields
import torch
import torch.nn.functional as F


def cross_correlation(h_e: torch.Tensor, h_o: torch.Tensor) -> torch.Tensor:
    """Cosine similarity between every code dimension of `h_e` and of `h_o`.

    `K_ij = <h_e[:, i], h_o[:, j]> / (|h_e[:, i]| |h_o[:, j]| + eps)`.
    """
    dots = h_e.T @ h_o
    norms = torch.outer(torch.linalg.norm(h_e, dim=0), torch.linalg.norm(h_o, dim=0))
    return dots / (norms + EPS)


def correlation_reduction_loss(h_e: torch.Tensor, h_o: torch.Tensor) -> torch.Tensor:
    """Push the cross-correlation of the two codes towards the identity."""
    assert h_e.shape == h_o.shape
    k = cross_correlation(h_e, h_o)
    d = k.shape[0]
    on_diagonal = torch.diagonal(k)
    off_diagonal = k - torch.diag_embed(on_diagonal)
    loss = ((on_diagonal - 1.0) ** 2).sum() / d**2
    if d > 1:
        loss = loss + (off_diagonal**2).sum() / (d**2 - d)
    return loss


def reconstruction_loss(
    target: torch.Tensor, decoded: torch.Tensor, beta: float = 2.0
) -> torch.Tensor:
    """Scaled cosine error `sum_i (1 - cos(target_i, decoded_i))^beta`."""
    assert target.shape == decoded.shape
    dots = (target * decoded).sum(dim=1)
    norms = torch.linalg.norm(target, dim=1) * torch.linalg.norm(decoded, dim=1)
    cosine = dots / (norms + EPS)
    return ((1.0 - cosine).clamp_min(0.0) ** beta).sum()


def code_distribution(h: torch.Tensor) -> torch.Tensor:
    """Mean of the row-wise softmax of a code matrix."""
    return torch.softmax(h, dim=1).mean(dim=0)


def kl_divergence(p: torch.Tensor, q: torch.Tensor) -> torch.Tensor:
    """`KL(p || q)` with both distributions floored at `eps` inside the logarithm."""
    return (p * (torch.log(p.clamp_min(EPS)) - torch.log(q.clamp_min(EPS)))).sum()


def alignment_loss(
    h_e_source: torch.Tensor,
    h_e_target: torch.Tensor,
    h_o_source: torch.Tensor,
    h_o_target: torch.Tensor,
) -> torch.Tensor:
    """Sum of the source to target KL divergences of both code paths."""
    assert h_e_source.shape[1] == h_e_target.shape[1]
    assert h_o_source.shape[1] == h_o_target.shape[1]
    return kl_divergence(
        code_distribution(h_e_source), code_distribution(h_e_target)
    ) + kl_divergence(code_distribution(h_o_source), code_distribution(h_o_target))


def classifier_loss(logits: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    """Mean cross-entropy of the source predictions."""
    return F.cross_entropy(logits, labels)


@dataclass(slots=True)
class LossParts:
    """Individual loss terms of one training step.

    Attributes:
        cr: Correlation reduction loss.
        re: Reconstruction loss.
        a: Alignment loss.
        ce: Source classification loss.
    """

    cr: torch.Tensor
    re: torch.Tensor
    a: torch.Tensor
    ce: torch.Tensor

    def items(self) -> list[tuple[str, torch.Tensor]]:
        return [(f.name, getattr(self, f.name)) for f in fields(self)]

    def as_floats(self) -> dict[str, float]:
        return {name: float(value.detach()) for name, value in self.items()}


def total_loss(parts: LossParts, weights: LossWeights) -> torch.Tensor:
    """`L_CR + mu1 L_RE + mu2 L_A + mu_ce L_CE`.

    Raises:
        NumericalAbort: If any part is NaN or infinite.
    """
    for name, value in parts.items():
        if not bool(torch.isfinite(torch.as_tensor(value)).all()):
            raise NumericalAbort("Non-finite loss part", name=name)
    return (
        parts.cr
        + weights.mu1 * parts.re
        + weights.mu2 * parts.a
        + weights.mu_ce * parts.ce
    )
