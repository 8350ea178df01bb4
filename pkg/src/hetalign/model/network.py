from ..common.default import CODE_DIM, DEFAULT_DROPOUT, HIDDEN_DIM
from ..filters import AdaptiveFilter

from dataclasses import dataclass
import math
import torch
from torch import nn


class SeededDropout(nn.Module):
    """Inverted dropout drawing its masks from a dedicated generator.

    Masks are drawn in call order, so replaying the generator state replays the masks.
    """

    def __init__(self, p: float, generator: torch.Generator | None = None):
        super().__init__()
        self.p = p
        self.generator = generator

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if not self.training or self.p == 0:
            return x
        keep = torch.rand(x.shape, generator=self.generator, dtype=x.dtype) >= self.p
        return x * keep.to(x.dtype) / (1.0 - self.p)


def init_uniform_(linear: nn.Linear, generator: torch.Generator | None = None):
    """Initialize weight and bias uniformly in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`."""
    bound = 1.0 / math.sqrt(linear.in_features)
    with torch.no_grad():
        for p in (linear.weight, linear.bias):
            values = torch.rand(p.shape, generator=generator, dtype=torch.float64)
            p.copy_((2.0 * values - 1.0) * bound)


class MLP(nn.Module):
    """Two-layer perceptron `in -> hidden -> out` with ReLU and dropout on the hidden layer."""

    def __init__(
        self,
        in_dim: int,
        hidden_dim: int,
        out_dim: int,
        *,
        dropout: float = DEFAULT_DROPOUT,
        init_generator: torch.Generator | None = None,
        dropout_generator: torch.Generator | None = None,
    ):
        super().__init__()
        self.hidden = nn.Linear(in_dim, hidden_dim)
        self.dropout = SeededDropout(dropout, dropout_generator)
        self.output = nn.Linear(hidden_dim, out_dim)
        init_uniform_(self.hidden, init_generator)
        init_uniform_(self.output, init_generator)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.output(self.dropout(torch.relu(self.hidden(x))))


@dataclass(slots=True)
class DomainOutput:
    """Forward pass of one graph.

    Attributes:
        filtered: Concatenated filtered features `[Z_E, Z_O]`, the reconstruction target.
        h_e: Heterophilic code.
        h_o: Homophilic code.
        decoded: Decoder output, same shape as `filtered`.
        logits: Classifier output on `[h_e, h_o]`.
    """

    filtered: torch.Tensor
    h_e: torch.Tensor
    h_o: torch.Tensor
    decoded: torch.Tensor
    logits: torch.Tensor

    @property
    def code(self) -> torch.Tensor:
        return torch.cat([self.h_e, self.h_o], dim=1)


class AlignmentNetwork(nn.Module):
    """Two unshared encoders, a decoder and a classifier on top of the adaptive filter.

    Attributes:
        filter: Holds the learnable `gamma`.
        encoder_e: Encoder of the high-pass (heterophilic) branch.
        encoder_o: Encoder of the low-pass (homophilic) branch.
        decoder: Maps the concatenated code back to the concatenated filtered features.
        classifier: Linear head on the concatenated code.
    """

    def __init__(
        self,
        in_dim: int,
        num_classes: int,
        *,
        hidden_dim: int = HIDDEN_DIM,
        code_dim: int = CODE_DIM,
        dropout: float = DEFAULT_DROPOUT,
        gamma_logit: float = 0.0,
        init_generator: torch.Generator | None = None,
        dropout_generator: torch.Generator | None = None,
        dtype: torch.dtype = torch.float32,
    ):
        super().__init__()
        mlp_args = dict(
            dropout=dropout,
            init_generator=init_generator,
            dropout_generator=dropout_generator,
        )
        self.filter = AdaptiveFilter(gamma_logit)
        self.encoder_e = MLP(in_dim, hidden_dim, code_dim, **mlp_args)
        self.encoder_o = MLP(in_dim, hidden_dim, code_dim, **mlp_args)
        self.decoder = MLP(2 * code_dim, hidden_dim, 2 * in_dim, **mlp_args)
        self.classifier = nn.Linear(2 * code_dim, num_classes)
        init_uniform_(self.classifier, init_generator)
        self.to(dtype)

    def encode(
        self, z_e: torch.Tensor, z_o: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        return self.encoder_e(z_e), self.encoder_o(z_o)

    def forward(self, high: torch.Tensor, low: torch.Tensor) -> DomainOutput:
        z_e, z_o = self.filter(high, low)
        h_e, h_o = self.encode(z_e, z_o)
        code = torch.cat([h_e, h_o], dim=1)
        return DomainOutput(
            filtered=torch.cat([z_e, z_o], dim=1),
            h_e=h_e,
            h_o=h_o,
            decoded=self.decoder(code),
            logits=self.classifier(code),
        )

    @torch.no_grad()
    def predict(self, high: torch.Tensor, low: torch.Tensor) -> torch.Tensor:
        """Class predictions in evaluation mode."""
        was_training = self.training
        self.eval()
        logits = self.forward(high, low).logits
        self.train(was_training)
        return torch.argmax(logits, dim=1)


def encode(
    z_e: torch.Tensor, z_o: torch.Tensor, network: AlignmentNetwork
) -> tuple[torch.Tensor, torch.Tensor]:
    """Run both encoders on already-filtered features. Returns `(H_E, H_O)`."""
    return network.encode(z_e, z_o)
