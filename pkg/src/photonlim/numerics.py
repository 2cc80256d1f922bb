"""Shared numerical primitives: entropies, scalar maximization, RNG streams.

All public entropies are in bits.  Internally natural logs are used and
converted once with ``LOG2E``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

LN2 = math.log(2.0)
LOG2E = 1.0 / LN2
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

PROB_TOL = 1e-12
DISCRIMINANT_FLOOR = 1e-15


class BracketError(ValueError):
    """Raised for an empty or inverted search interval."""


def _check_probability(p):
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < -PROB_TOL) or np.any(arr > 1.0 + PROB_TOL):
        raise ValueError(f"probability outside [0, 1]: {p!r}")
    return np.clip(arr, 0.0, 1.0)


def xlog2x(x):
    """``x * log2(x)`` with the convention ``0 log 0 = 0``."""
    arr = np.asarray(x, dtype=float)
    out = np.zeros_like(arr)
    pos = arr > 0.0
    out[pos] = arr[pos] * np.log(arr[pos]) * LOG2E
    if out.ndim == 0:
        return float(out)
    return out


def binary_entropy(p):
    """Binary entropy H2(p) in bits.

    Accepts scalars or arrays.  Values within 1e-12 outside [0, 1] are
    clipped; anything further out raises ``ValueError``.
    """
    q = _check_probability(p)
    h = np.clip(-(xlog2x(q) + xlog2x(1.0 - q)), 0.0, 1.0)
    if np.ndim(h) == 0:
        return float(h)
    return h


def one_minus_binary_entropy_centered(delta):
    """``1 - H2(1/2 - delta)`` computed without cancellation near delta = 0."""
    d = np.clip(2.0 * np.asarray(delta, dtype=float), -1.0, 1.0)
    # (1 -/+ d) log(1 -/+ d) vanishes at d = +/-1
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = np.where(d < 1.0, (1.0 - d) * np.log1p(-d), 0.0)
        hi = np.where(d > -1.0, (1.0 + d) * np.log1p(d), 0.0)
    out = 0.5 * (hi + lo) * LOG2E
    if np.ndim(out) == 0:
        return float(out)
    return out


def entropy(probs) -> float:
    """Shannon entropy in bits of a discrete distribution (any shape)."""
    q = _check_probability(probs)
    return float(-np.sum(xlog2x(q.ravel())))


def half_one_minus_sqrt(x):
    """``(1 - sqrt(1 - x)) / 2`` for ``x`` in [0, 1], cancellation-free.

    Discriminants ``1 - x`` below 1e-15 are clamped to zero.
    """
    arr = np.asarray(x, dtype=float)
    disc = 1.0 - arr
    disc = np.where(disc < DISCRIMINANT_FLOOR, 0.0, disc)
    out = arr / (2.0 * (1.0 + np.sqrt(disc)))
    out = np.where(disc == 0.0, 0.5, out)
    if out.ndim == 0:
        return float(out)
    return out


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10):
    """Golden-section maximization of ``f`` on ``[a, b]``.

    Returns ``(x, f(x))`` for the best point evaluated.
    """
    if not a < b:
        raise BracketError(f"invalid bracket [{a}, {b}]")
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = _eval(f, c), _eval(f, d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = _eval(f, c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = _eval(f, d)
    return (c, fc) if fc >= fd else (d, fd)


def _eval(f, x):
    y = float(f(x))
    if not math.isfinite(y):
        raise FloatingPointError(f"objective is not finite at x={x!r}: {y!r}")
    return y


def maximize_scalar(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    *,
    grid_points: int = 256,
    log_grid: bool = False,
) -> tuple[float, float]:
    """Maximize a scalar function on ``[lo, hi]``.

    A coarse grid of ``grid_points`` samples (uniform, or log-spaced when
    ``log_grid`` is set, which needs ``lo > 0``) locates the best sample;
    golden-section search then refines inside the bracket formed by its two
    neighbours.  For unimodal ``f`` the argmax is found to ``tol``; for
    multimodal ``f`` the result is the refined best grid bracket.

    Returns:
        (argmax, max)
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise BracketError(f"invalid bracket [{lo}, {hi}]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    if log_grid:
        if lo <= 0:
            raise BracketError("log grid needs lo > 0")
        xs = np.geomspace(lo, hi, grid_points)
    else:
        xs = np.linspace(lo, hi, grid_points)
    fs = np.array([_eval(f, x) for x in xs])
    i = int(np.argmax(fs))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, grid_points - 1)]
    x_best, f_best = float(xs[i]), float(fs[i])
    if b - a > tol:
        x_ref, f_ref = golden_section(f, float(a), float(b), tol)
        if f_ref >= f_best:
            x_best, f_best = x_ref, f_ref
    return x_best, f_best


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based random stream for trial ``index`` under ``seed``.

    Philox is keyed by the seed and the trial index occupies a high counter
    word, so streams are disjoint and independent of evaluation order.
    """
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    bitgen = np.random.Philox(key=seed % (1 << 128), counter=[0, 0, index % (1 << 64), 0])
    return np.random.Generator(bitgen)
