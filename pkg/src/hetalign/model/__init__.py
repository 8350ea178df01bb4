from .network import MLP, AlignmentNetwork, DomainOutput, SeededDropout, encode
from .loss import (
    LossParts,
    alignment_loss,
    classifier_loss,
    code_distribution,
    correlation_reduction_loss,
    cross_correlation,
    kl_divergence,
    reconstruction_loss,
    total_loss,
)
from .state import ModelState, backward_and_step, init_model_state
