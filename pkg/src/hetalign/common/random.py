"""Named random substreams derived from a single run seed."""

import zlib

import numpy as np
import torch


def substream_seed(seed: int, name: str) -> int:
    """Derive a 63-bit seed for the substream `name` of run `seed`."""
    sequence = np.random.SeedSequence([int(seed), zlib.crc32(name.encode("utf-8"))])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def numpy_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(substream_seed(seed, name))


def torch_rng(seed: int, name: str) -> torch.Generator:
    generator = torch.Generator(device="cpu")
    generator.manual_seed(substream_seed(seed, name))
    return generator
