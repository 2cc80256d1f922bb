"""Dolinar receiver on two coherent states as a binary asymmetric channel.

Labels follow the even/odd dichotomy: outcome 0 is an even final count
(decide the more likely state, "+"), outcome 1 an odd final count (decide the
less likely state, "-").  Crossovers are ``p_odd_plus`` and ``p_even_minus``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from photonlim.numerics import DISCRIMINANT_FLOOR, binary_entropy, half_one_minus_sqrt

_TOL = 1e-12


@dataclass(frozen=True)
class DolinarChannel:
    """Two coherent states with overlap ``s`` and minority prior ``xi``."""

    s: float
    xi: float

    def __post_init__(self):
        if not (-_TOL <= self.s <= 1.0 + _TOL):
            raise ValueError(f"overlap s must lie in [0, 1], got {self.s}")
        if not (-_TOL <= self.xi <= 0.5 + _TOL):
            raise ValueError(f"xi is the minority prior and must lie in [0, 1/2], got {self.xi}")
        object.__setattr__(self, "s", min(max(float(self.s), 0.0), 1.0))
        object.__setattr__(self, "xi", min(max(float(self.xi), 0.0), 0.5))

    @property
    def discriminant(self) -> float:
        d = 1.0 - 4.0 * self.xi * (1.0 - self.xi) * self.s
        return 0.0 if d < DISCRIMINANT_FLOOR else d


@dataclass(frozen=True)
class ChannelMatrix:
    p_even_plus: float
    p_odd_plus: float
    p_even_minus: float
    p_odd_minus: float

    def as_array(self) -> np.ndarray:
        """Rows are inputs (+, -), columns outcomes (even, odd)."""
        return np.array(
            [[self.p_even_plus, self.p_odd_plus], [self.p_even_minus, self.p_odd_minus]]
        )


def dolinar_channel_matrix(ch: DolinarChannel) -> ChannelMatrix:
    """Conditional even/odd count probabilities for the Dolinar measurement."""
    s, xi = ch.s, ch.xi
    root = math.sqrt(ch.discriminant)
    if root == 0.0:
        # s = 1 and xi = 1/2: identical states, the receiver guesses
        p_odd_plus = p_even_minus = 0.5
    else:
        p_odd_plus = _crossover(root, xi, s)
        p_even_minus = _crossover(root, 1.0 - xi, s)
    return ChannelMatrix(
        p_even_plus=1.0 - p_odd_plus,
        p_odd_plus=p_odd_plus,
        p_even_minus=p_even_minus,
        p_odd_minus=1.0 - p_even_minus,
    )


def _crossover(root: float, w: float, s: float) -> float:
    # (1 - (1 - 2 w s) / root) / 2; for b >= 0 the subtraction cancels, so use
    # root**2 - (1 - 2 w s)**2 = 4 w^2 s (1 - s) instead
    b = 1.0 - 2.0 * w * s
    if b > 0.0:
        p = 2.0 * w * w * s * (1.0 - s) / (root * (root + b))
    else:
        p = 0.5 * (1.0 - b / root)
    return min(max(p, 0.0), 1.0)


def state_likelihoods(s: float, p1: float) -> np.ndarray:
    """``P(Y=y | X=x)`` indexed ``[x, y]`` when state 1 has prior ``p1``.

    ``p1`` may lie anywhere in [0, 1].  Outcome ``y`` is the state index the
    measurement decides for.  For ``p1 > 1/2`` the roles of the two states
    are swapped before the canonical (minority prior) channel is formed.
    """
    if not (-_TOL <= p1 <= 1.0 + _TOL):
        raise ValueError(f"prior must lie in [0, 1], got {p1}")
    p1 = min(max(p1, 0.0), 1.0)
    if p1 <= 0.5:
        m = dolinar_channel_matrix(DolinarChannel(s, p1))
        # state 0 is "+", state 1 is "-"; decide 1 <-> odd
        return np.array([[m.p_even_plus, m.p_odd_plus], [m.p_even_minus, m.p_odd_minus]])
    m = dolinar_channel_matrix(DolinarChannel(s, 1.0 - p1))
    # state 1 is "+", state 0 is "-"; decide 1 <-> even
    return np.array([[m.p_odd_minus, m.p_even_minus], [m.p_odd_plus, m.p_even_plus]])


def helstrom_error(ch: DolinarChannel) -> float:
    """Minimum error probability for discriminating the two states."""
    return half_one_minus_sqrt(4.0 * ch.xi * (1.0 - ch.xi) * ch.s)


def mutual_information(ch: DolinarChannel) -> float:
    """I(X;Y) in bits across the Dolinar binary asymmetric channel."""
    m = dolinar_channel_matrix(ch)
    xi = ch.xi
    p_odd = xi * m.p_odd_minus + (1.0 - xi) * m.p_odd_plus
    mi = binary_entropy(p_odd) - (
        xi * binary_entropy(m.p_even_minus) + (1.0 - xi) * binary_entropy(m.p_odd_plus)
    )
    return max(mi, 0.0)


def capacity_per_use(s: float) -> float:
    """Dolinar capacity per use at equal priors: ``1 - H2((1 - sqrt(1-s))/2)``."""
    if not (-_TOL <= s <= 1.0 + _TOL):
        raise ValueError(f"overlap s must lie in [0, 1], got {s}")
    return 1.0 - binary_entropy(half_one_minus_sqrt(min(max(s, 0.0), 1.0)))
