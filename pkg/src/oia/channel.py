"""Seeded generation of the four channel matrices of one interference-channel trial.

Stream derivation: the triple (master_seed, grid_index, trial_index) is fed as
the entropy list of a ``numpy.random.SeedSequence``, which mixes it
collision-resistantly into a PCG64 generator state. A trial's draws therefore
depend only on the triple, never on execution order or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class TrialSeed:
    """Identifies one Monte Carlo trial's random stream."""

    master_seed: int
    grid_index: int
    trial_index: int

    def __post_init__(self):
        if self.grid_index < 0 or self.trial_index < 0:
            raise InvalidInputError("grid_index and trial_index must be nonnegative")


@dataclass(frozen=True)
class ChannelSet:
    """The four complex channel matrices of one trial, all nr x nt.

    hij is the channel from transmitter j to receiver i; link 1 is the
    primary pair, link 2 the opportunistic one.
    """

    h11: np.ndarray
    h12: np.ndarray
    h21: np.ndarray
    h22: np.ndarray


def derive_stream(seed: TrialSeed) -> np.random.Generator:
    """Deterministic, independent random stream for one trial."""
    entropy = (seed.master_seed & _MASK64, seed.grid_index, seed.trial_index)
    return np.random.default_rng(np.random.SeedSequence(entropy))


def draw_channel(nr: int, nt: int, stream: np.random.Generator) -> np.ndarray:
    """One nr x nt matrix of i.i.d. circularly symmetric complex Gaussians.

    Entries have zero mean and unit variance (real and imaginary parts each
    carry variance 1/2) and are consumed from the stream in row-major entry
    order, real part then imaginary part.
    """
    if nr < 1 or nt < 1:
        raise InvalidInputError("antenna counts must be >= 1")
    z = stream.standard_normal((nr, nt, 2))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def draw_channel_set(nr: int, nt: int, stream: np.random.Generator) -> ChannelSet:
    """Four independent channel draws in the fixed order h11, h12, h21, h22."""
    h11 = draw_channel(nr, nt, stream)
    h12 = draw_channel(nr, nt, stream)
    h21 = draw_channel(nr, nt, stream)
    h22 = draw_channel(nr, nt, stream)
    return ChannelSet(h11=h11, h12=h12, h21=h21, h22=h22)
