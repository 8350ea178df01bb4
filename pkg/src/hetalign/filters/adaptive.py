from .filter import FilterCache

import torch
from torch import nn


class AdaptiveFilter(nn.Module):
    """Learnable balance between the high-pass and low-pass branches.

    `gamma = sigmoid(gamma_logit)` scales the cached high-pass output and `1 - gamma` the cached
    low-pass output, so gradients reach `gamma_logit` through both branches.
    """

    def __init__(self, gamma_logit: float = 0.0, dtype: torch.dtype = torch.float32):
        super().__init__()
        self.gamma_logit = nn.Parameter(torch.tensor(float(gamma_logit), dtype=dtype))

    @property
    def gamma(self) -> torch.Tensor:
        return torch.sigmoid(self.gamma_logit)

    def forward(
        self, high: torch.Tensor, low: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        gamma = self.gamma
        return gamma * high, (1.0 - gamma) * low


def cache_tensors(
    cache: FilterCache, dtype: torch.dtype = torch.float32
) -> tuple[torch.Tensor, torch.Tensor]:
    """Convert a `FilterCache` to `(high, low)` tensors."""
    return (
        torch.as_tensor(cache.high, dtype=dtype),
        torch.as_tensor(cache.low, dtype=dtype),
    )
