"""Photon- vs. dimensional-efficiency limits for optical communication.

Capacity tradeoff curves, the Dolinar binary channel, an information-greedy
feedback receiver simulator and an adaptive coded-sequence Dolinar receiver.
"""

from photonlim.numerics import binary_entropy, entropy, maximize_scalar
from photonlim.binary_channel import (
    ChannelMatrix,
    DolinarChannel,
    capacity_per_use,
    dolinar_channel_matrix,
    helstrom_error,
    mutual_information,
)

__all__ = [
    "ChannelMatrix",
    "DolinarChannel",
    "binary_entropy",
    "capacity_per_use",
    "dolinar_channel_matrix",
    "entropy",
    "helstrom_error",
    "maximize_scalar",
    "mutual_information",
]

__version__ = "0.1.0"
