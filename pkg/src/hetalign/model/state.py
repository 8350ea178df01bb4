from .network import AlignmentNetwork
from ..common import default
from ..common.exception import NumericalAbort
from ..common.random import torch_rng

from dataclasses import dataclass
import torch


@dataclass(kw_only=True, slots=True)
class ModelState:
    """Trainable state of a run.

    Attributes:
        network: Encoders, decoder, classifier and `gamma_logit`.
        optimizer: AdamW optimizer holding the moment estimates.
        step: Number of optimizer steps taken.
    """

    network: AlignmentNetwork
    optimizer: torch.optim.Optimizer
    step: int = 0

    def named_parameters(self) -> dict[str, torch.nn.Parameter]:
        return dict(self.network.named_parameters())


def init_model_state(
    in_dim: int,
    num_classes: int,
    *,
    seed: int = 0,
    lr: float = default.DEFAULT_LR,
    weight_decay: float = default.DEFAULT_WEIGHT_DECAY,
    dropout: float = default.DEFAULT_DROPOUT,
    hidden_dim: int = default.HIDDEN_DIM,
    code_dim: int = default.CODE_DIM,
    dtype: torch.dtype = torch.float32,
) -> ModelState:
    """Build a freshly initialized network and its optimizer.

    Weights come from the `init` substream of `seed` and dropout masks from the `dropout`
    substream, so equal seeds give equal trajectories.
    """
    network = AlignmentNetwork(
        in_dim,
        num_classes,
        hidden_dim=hidden_dim,
        code_dim=code_dim,
        dropout=dropout,
        init_generator=torch_rng(seed, "init"),
        dropout_generator=torch_rng(seed, "dropout"),
        dtype=dtype,
    )
    optimizer = torch.optim.AdamW(
        network.parameters(), lr=lr, weight_decay=weight_decay, foreach=False
    )
    return ModelState(network=network, optimizer=optimizer)


def backward_and_step(
    state: ModelState,
    loss: torch.Tensor,
    lr: float | None = None,
    weight_decay: float | None = None,
) -> ModelState:
    """Back-propagate `loss` and take one AdamW step.

    Parameters that receive no gradient (e.g. the decoder when the reconstruction term is
    disabled) are left untouched, including by weight decay.

    Raises:
        NumericalAbort: If any gradient is NaN or infinite. No parameter is updated then.
    """
    state.optimizer.zero_grad(set_to_none=True)
    loss.backward()
    for name, p in state.network.named_parameters():
        if p.grad is not None and not bool(torch.isfinite(p.grad).all()):
            raise NumericalAbort("Non-finite gradient", name=name)

    for group in state.optimizer.param_groups:
        if lr is not None:
            group["lr"] = lr
        if weight_decay is not None:
            group["weight_decay"] = weight_decay
    state.optimizer.step()
    state.step += 1
    return state
