"""Capacity and efficiency tradeoffs: photon efficiency (bits/photon, PIE)
versus dimensional efficiency (bits/mode, DIE).

Every scheme maps an energy parameter to a :class:`TradeoffPoint`.  Energies
are mean photons per mode except for PPM, where they are photons per PPM
symbol (the pulsed slot).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from photonlim.binary_channel import DolinarChannel, capacity_per_use, mutual_information
from photonlim.numerics import (
    LN2,
    LOG2E,
    binary_entropy,
    half_one_minus_sqrt,
    maximize_scalar,
    one_minus_binary_entropy_centered,
)

XI_MIN = 1e-6
APPROX1_CONST = 2.0 / (math.e * LN2)
RATIO_CONST = math.e**2 * LN2 / 2.0


@dataclass(frozen=True)
class TradeoffPoint:
    """One (PIE, DIE) pair.

    ``pie`` is ``None`` when unbounded (zero energy).  ``aux`` holds the
    optimizing duty cycle for OOK schemes, log2 of the optimal PPM order for
    the PPM envelope, and the PPM order for fixed-order PPM.
    """

    energy: float
    pie: float | None
    die: float
    aux: float | None = None


@dataclass(frozen=True)
class LinkGeometry:
    bandwidth_time_product: float
    fresnel_product: float
    polarizations: int = 2

    def __post_init__(self):
        if self.bandwidth_time_product <= 0 or self.fresnel_product <= 0:
            raise ValueError("link products must be positive")
        if self.polarizations not in (1, 2):
            raise ValueError("polarizations must be 1 or 2")


class Scheme(enum.Enum):
    HOLEVO_UNCONSTRAINED = "holevo"
    HETERODYNE = "heterodyne"
    HOMODYNE = "homodyne"
    PPM_COUNTING_OPTIMAL = "ppm-counting-optimal"
    PPM_COUNTING_FIXED_M = "ppm-counting-fixed"
    OOK_COUNTING = "ook-counting"
    OOK_DOLINAR = "ook-dolinar"
    BPSK_DOLINAR = "bpsk-dolinar"
    OOK_HOLEVO = "ook-holevo"
    BPSK_HOLEVO = "bpsk-holevo"
    APPROX1 = "approx1"
    APPROX2 = "approx2"


def mode_count(g: LinkGeometry) -> float:
    """Number of spatio-temporal-polarization modes available per channel use."""
    return g.polarizations * g.bandwidth_time_product * g.fresnel_product


def _check_energy(E: float, strict: bool = False) -> float:
    E = float(E)
    if not math.isfinite(E) or E < 0 or (strict and E == 0):
        raise ValueError(f"energy must be {'positive' if strict else 'nonnegative'}, got {E}")
    return E


def _point(E: float, c_d: float, aux: float | None = None) -> TradeoffPoint:
    return TradeoffPoint(energy=E, pie=c_d / E if E > 0 else None, die=c_d, aux=aux)


# --- PPM with photon counting ------------------------------------------------


def ppm_capacity(E: float, M: int) -> float:
    """Bits per PPM symbol: ``(1 - e^-E) log2 M``."""
    E = _check_energy(E)
    if int(M) != M or M < 2:
        raise ValueError(f"PPM order must be an integer >= 2, got {M}")
    return -math.expm1(-E) * math.log2(M)


def ppm_point(E: float, M: int) -> TradeoffPoint:
    c = ppm_capacity(E, M)
    return TradeoffPoint(energy=E, pie=c / E if E > 0 else None, die=c / M, aux=float(M))


def _one_minus_1pe_exp(E: float) -> float:
    """``1 - (1 + E) e^-E`` without cancellation for small E."""
    if E >= 1.0:
        return 1.0 - (1.0 + E) * math.exp(-E)
    # sum_{n>=2} (-1)^n (n-1) E^n / n!
    total, term, n = 0.0, -E, 1
    while True:
        n += 1
        term *= -E / n
        inc = (n - 1) * term
        total += inc
        if abs(inc) < 1e-18 * abs(total):
            return total


def ppm_envelope_terms(e_star: float) -> tuple[float, float, float]:
    """``(c_p, log2 M*, log2 c_d)`` of the real-M PPM optimum at slot energy ``e_star``."""
    if not e_star > 0:
        raise ValueError(f"e_star must be positive, got {e_star}")
    q = -math.expm1(-e_star)
    r = _one_minus_1pe_exp(e_star)
    c_p = q * q / (e_star * LN2 * r)
    log2_m = q / (r * LN2)
    log2_cd = math.log2(q * q / (LN2 * r)) - (q / r) * LOG2E
    return c_p, log2_m, log2_cd


def ppm_optimal_point(e_star: float) -> TradeoffPoint:
    """Point on the PPM + photon counting envelope (order treated as real).

    The DIE underflows to 0.0 once it drops below the double range
    (``e_star`` below about 3e-3); ``aux`` carries log2 M* since M* itself
    overflows there too.
    """
    c_p, log2_m, log2_cd = ppm_envelope_terms(e_star)
    return TradeoffPoint(energy=e_star, pie=c_p, die=2.0**log2_cd, aux=log2_m)


def ppm_objective(E: float, c_p: float) -> float:
    """``log2 c_d + c_p`` of PPM at slot energy E with the order chosen to hit ``c_p``."""
    q = -math.expm1(-E)
    return math.log2(E * c_p) + c_p * (1.0 - E / q)


def ppm_optimal_at_pie(c_p: float) -> TradeoffPoint:
    """Envelope point with prescribed photon efficiency (root-find on ``e_star``)."""
    if not c_p > 0:
        raise ValueError("c_p must be positive")
    lo, hi = 1e-12, 1.0
    while ppm_envelope_terms(hi)[0] > c_p:
        hi *= 2.0
        if hi > 1e6:
            raise ValueError(f"c_p={c_p} below the PPM envelope range")
    e_star = brentq(lambda e: ppm_envelope_terms(e)[0] - c_p, lo, hi, xtol=1e-300, rtol=1e-15)
    return ppm_optimal_point(e_star)


# --- Gaussian-receiver and ultimate limits ----------------------------------


def holevo_unconstrained(E: float) -> TradeoffPoint:
    """Ultimate limit: ``c_d = (E+1) log2(E+1) - E log2 E``."""
    E = _check_energy(E)
    if E == 0:
        return _point(0.0, 0.0)
    c_d = ((E + 1.0) * math.log1p(E) - E * math.log(E)) * LOG2E
    return _point(E, c_d)


def holevo_at_pie(c_p: float) -> TradeoffPoint:
    """Ultimate-limit point with prescribed photon efficiency."""
    if not c_p > 0:
        raise ValueError("c_p must be positive")
    f = lambda logE: holevo_unconstrained(math.exp(logE)).pie - c_p  # noqa: E731
    log_e = brentq(f, math.log(1e-300), math.log(1e6), xtol=1e-15, rtol=1e-15)
    return holevo_unconstrained(math.exp(log_e))


def heterodyne(E: float) -> TradeoffPoint:
    E = _check_energy(E)
    return _point(E, math.log1p(E) * LOG2E)


def homodyne(E: float) -> TradeoffPoint:
    E = _check_energy(E)
    return _point(E, 0.5 * math.log1p(4.0 * E) * LOG2E)


# --- binary modulations ------------------------------------------------------


def binary_pure_holevo(s: float, xi: float) -> float:
    """Holevo information (bits) of two pure states with overlap ``s`` and priors ``(1-xi, xi)``."""
    if not (0.0 <= s <= 1.0) or not (0.0 <= xi <= 1.0):
        raise ValueError("s and xi must lie in [0, 1]")
    return binary_entropy(half_one_minus_sqrt(4.0 * xi * (1.0 - xi) * (1.0 - s)))


def bpsk_dolinar_capacity(E: float) -> TradeoffPoint:
    """BPSK with the Dolinar receiver at equal priors (overlap ``e^-4E``)."""
    E = _check_energy(E)
    # 1 - H2((1 - sqrt(1 - s))/2) with 1 - s = -expm1(-4E), centered form near s = 1
    delta = 0.5 * math.sqrt(-math.expm1(-4.0 * E))
    return _point(E, one_minus_binary_entropy_centered(delta))


def bpsk_holevo_capacity(E: float) -> TradeoffPoint:
    E = _check_energy(E)
    return _point(E, binary_entropy(-0.5 * math.expm1(-2.0 * E)))


def _ook_overlap(E: float, xi: float) -> float:
    return math.exp(-E / xi)


def ook_counting_mi(E: float, xi: float) -> float:
    """Z-channel MI of OOK with photon counting at duty cycle ``xi``."""
    s = _ook_overlap(E, xi)
    return max(binary_entropy(xi * (1.0 - s)) - xi * binary_entropy(s), 0.0)


def ook_dolinar_mi(E: float, xi: float) -> float:
    return mutual_information(DolinarChannel(_ook_overlap(E, xi), xi))


def ook_holevo_mi(E: float, xi: float) -> float:
    return binary_pure_holevo(_ook_overlap(E, xi), xi)


def _maximize_over_duty(mi, E: float, xi_max: float) -> TradeoffPoint:
    E = _check_energy(E, strict=True)
    xi, c = maximize_scalar(lambda x: mi(E, x), XI_MIN, xi_max, 1e-12, log_grid=True)
    return _point(E, c, aux=xi)


def ook_counting_capacity(E: float) -> TradeoffPoint:
    return _maximize_over_duty(ook_counting_mi, E, 1.0)


def ook_dolinar_capacity(E: float) -> TradeoffPoint:
    return _maximize_over_duty(ook_dolinar_mi, E, 0.5)


def ook_holevo_capacity(E: float) -> TradeoffPoint:
    return _maximize_over_duty(ook_holevo_mi, E, 0.5)


# --- asymptotics and identities ---------------------------------------------


def approx1(c_p: float) -> float:
    """High-PIE asymptote of the PPM + counting envelope."""
    return APPROX1_CONST * 2.0 ** (-c_p)


def approx2(c_p: float) -> float:
    """High-PIE asymptote of the ultimate limit."""
    return math.e * c_p * 2.0 ** (-c_p)


def reciprocal_identity(s: float) -> float:
    """BPSK Holevo capacity at overlap s plus Dolinar capacity at 1 - s (bits)."""
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    return binary_pure_holevo(s, 0.5) + capacity_per_use(1.0 - s)


# --- curves ------------------------------------------------------------------

_ENERGY_SCHEMES = {
    Scheme.HOLEVO_UNCONSTRAINED: holevo_unconstrained,
    Scheme.HETERODYNE: heterodyne,
    Scheme.HOMODYNE: homodyne,
    Scheme.PPM_COUNTING_OPTIMAL: ppm_optimal_point,
    Scheme.OOK_COUNTING: ook_counting_capacity,
    Scheme.OOK_DOLINAR: ook_dolinar_capacity,
    Scheme.BPSK_DOLINAR: bpsk_dolinar_capacity,
    Scheme.OOK_HOLEVO: ook_holevo_capacity,
    Scheme.BPSK_HOLEVO: bpsk_holevo_capacity,
}


def _approx_point(fn, c_p: float) -> TradeoffPoint:
    c_d = fn(c_p)
    return TradeoffPoint(energy=c_d / c_p, pie=c_p, die=c_d)


def curve_point(scheme: Scheme, value: float, m: int | None = None) -> TradeoffPoint:
    if scheme is Scheme.PPM_COUNTING_FIXED_M:
        return ppm_point(value, m)
    if scheme is Scheme.APPROX1:
        return _approx_point(approx1, value)
    if scheme is Scheme.APPROX2:
        return _approx_point(approx2, value)
    return _ENERGY_SCHEMES[scheme](value)


def tradeoff_curve(
    scheme: Scheme | str, e_grid: Sequence[float], m: int | None = None
) -> list[TradeoffPoint]:
    """Evaluate a scheme on a grid, in grid order.

    The grid holds energies, except for the PPM envelope (slot energy E*) and
    the two asymptotes (photon efficiencies c_p).  ``m`` is required for, and
    only allowed with, fixed-order PPM.
    """
    scheme = Scheme(scheme)
    grid = np.asarray(e_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty grid")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly positive and increasing")
    if (scheme is Scheme.PPM_COUNTING_FIXED_M) != (m is not None):
        raise ValueError(f"PPM order given/missing for scheme {scheme.value}")
    if m is not None and (int(m) != m or m < 2):
        raise ValueError("PPM order must be an integer >= 2")
    return [curve_point(scheme, float(v), m) for v in grid]
