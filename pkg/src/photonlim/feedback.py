"""Causal optical feedback receiver with an information-greedy local oscillator.

The received coherent state ``alpha_k`` is displaced by a local oscillator
``a exp(i phi)`` and photodetected, giving a conditionally Poisson count
process with rate ``|alpha_k + a exp(i phi)|**2``.  At every instant the LO is
chosen to maximize the conditional mutual-information rate given the
posterior over symbols.  Rates are in nats per unit time.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from photonlim.numerics import trial_rng

TWO_PI = 2.0 * math.pi
DEFAULT_DT_FACTOR = 0.01
DEFAULT_CAP_FACTOR = 50.0
GRID_AMPLITUDES = 200
GRID_PHASES = 64


class NumericalValidityError(ValueError):
    """Time step too coarse for the Bernoulli approximation of Poisson counts."""


@dataclass(frozen=True, eq=False)
class Constellation:
    amplitudes: np.ndarray
    priors: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        pri = np.asarray(self.priors, dtype=float).ravel()
        if amps.size < 2 or amps.size != pri.size:
            raise ValueError("need at least two symbols and one prior per symbol")
        if np.any(pri < 0) or abs(pri.sum() - 1.0) > 1e-12:
            raise ValueError("priors must be nonnegative and sum to 1")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "priors", pri / pri.sum())

    @property
    def size(self) -> int:
        return self.amplitudes.size

    def axis(self) -> float | None:
        """Angle in [0, pi) of the common line through the origin, if any."""
        amps = self.amplitudes
        ref = amps[np.argmax(np.abs(amps))]
        if ref == 0:
            return 0.0
        theta = math.atan2(ref.imag, ref.real) % math.pi
        if math.pi - theta < 1e-15:
            theta = 0.0
        rotated = amps * np.exp(-1j * theta)
        if np.all(np.abs(rotated.imag) <= 1e-12 * abs(ref)):
            return theta
        return None


def bpsk(E: float, xi: float = 0.5, T: float = 1.0) -> Constellation:
    """Symbols ``(-alpha, +alpha)`` with ``|alpha|**2 T = E``; ``xi`` is the prior of ``+alpha``."""
    alpha = math.sqrt(E / T)
    return Constellation(np.array([-alpha, alpha]), np.array([1.0 - xi, xi]))


@dataclass(frozen=True)
class LoControl:
    a: float
    phi: float
    cap: float

    @property
    def field(self) -> complex:
        return self.a * complex(math.cos(self.phi), math.sin(self.phi))


@dataclass(frozen=True, eq=False)
class FilterState:
    posterior: np.ndarray
    t: float = 0.0


# --- information rate --------------------------------------------------------


def _xlnx(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


def _bregman(eps):
    """``(1+eps) ln(1+eps) - eps`` for eps >= -1, accurate near 0."""
    eps = np.asarray(eps, dtype=float)
    small = np.abs(eps) < 1e-3
    e = np.where(small, eps, 0.0)
    series = e * e * (0.5 + e * (-1.0 / 6.0 + e * (1.0 / 12.0 + e * (-1.0 / 20.0 + e / 30.0))))
    safe = np.where(eps > -1.0, eps, 0.0)
    direct = np.where(eps > -1.0, (1.0 + safe) * np.log1p(safe) - safe, 1.0)
    return np.where(small, series, direct)


def mi_rate(lambdas: Sequence[float], priors: Sequence[float]) -> float:
    """Conditional MI rate ``-lbar ln lbar + sum_k p_k l_k ln l_k`` (nats / time).

    Evaluated as ``lbar * sum_k p_k f(l_k / lbar - 1)`` with
    ``f(e) = (1+e) ln(1+e) - e``, which is the same quantity without the
    cancellation between the two large terms.
    """
    lam = np.asarray(lambdas, dtype=float)
    p = np.asarray(priors, dtype=float)
    if lam.shape != p.shape:
        raise ValueError("rates and priors must have the same length")
    if np.any(lam < 0):
        raise ValueError("rates must be nonnegative")
    live = lam[p > 0]
    if live.size == 0 or np.all(live == live[0]):
        return 0.0
    lbar = float(np.dot(p, lam))
    if lbar <= 0.0:
        return 0.0
    return max(lbar * float(np.dot(p, _bregman((lam - lbar) / lbar))), 0.0)


def rates(c: Constellation, lo_field: complex) -> np.ndarray:
    return np.abs(c.amplitudes + lo_field) ** 2


def stationarity_residuals(c: Constellation, posterior, a: float, phi: float) -> tuple[float, float]:
    """Residuals of the amplitude and phase first-order conditions.

    These are the partial derivatives of the rate with respect to ``a`` and
    ``phi`` divided by ``2`` and ``2a`` respectively; the phase condition
    carries the ``|alpha_k|`` weights that the derivative produces.
    """
    p = np.asarray(posterior, dtype=float)
    lam = rates(c, a * np.exp(1j * phi))
    lbar = float(np.dot(p, lam))
    mask = p > 0
    with np.errstate(divide="ignore"):
        log_ratio = np.where(mask & (lam > 0), np.log(np.where(lam > 0, lam, 1.0) / lbar), 0.0)
    mags = np.abs(c.amplitudes)
    phases = np.angle(c.amplitudes)
    r_amp = float(np.sum(p * log_ratio * (a + mags * np.cos(phi - phases))))
    r_phase = float(np.sum(p * log_ratio * mags * np.sin(phi - phases)))
    return r_amp, r_phase


# --- LO optimization ---------------------------------------------------------


def _axis_terms(beta, p0, p1, b):
    l0 = (b + beta[0]) ** 2
    d = (beta[1] - beta[0]) * (2.0 * b + beta[0] + beta[1])  # l1 - l0
    lbar = l0 + p1 * d
    with np.errstate(divide="ignore", invalid="ignore"):
        eps0 = np.where(lbar > 0, -p1 * d / lbar, 0.0)
        eps1 = np.where(lbar > 0, p0 * d / lbar, 0.0)
    return lbar, eps0, eps1


def _axis_rate(beta, p0, p1, b):
    """Rate for a binary constellation on the real axis with signed LO ``b``.

    ``beta = (beta0, beta1)``; the posterior masses ``p0``, ``p1`` are passed
    separately so that extreme posteriors keep full precision.
    """
    lbar, eps0, eps1 = _axis_terms(beta, p0, p1, b)
    return lbar * (p0 * _bregman(eps0) + p1 * _bregman(eps1))


def _axis_slope(beta, p0, p1, b):
    _, eps0, eps1 = _axis_terms(beta, p0, p1, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = np.where(eps0 > -1.0, np.log1p(np.maximum(eps0, -1.0 + 1e-300)), 0.0) * (b + beta[0])
        t1 = np.where(eps1 > -1.0, np.log1p(np.maximum(eps1, -1.0 + 1e-300)), 0.0) * (b + beta[1])
    return 2.0 * (p0 * t0 + p1 * t1)


def optimize_axis_lo(beta: tuple[float, float], p0, p1, cap: float, grid: int = 2001) -> np.ndarray:
    """Signed LO amplitude maximizing the rate for real binary amplitudes ``beta``.

    Vectorized over posteriors ``(p0, p1)``.  A grid over ``[-cap, cap]``
    locates the best point; the slope root inside the neighbouring bracket is
    then found by bisection.  Near-ties prefer ``b >= 0`` (phase 0).
    """
    p0 = np.atleast_1d(np.asarray(p0, dtype=float))[:, None]
    p1 = np.atleast_1d(np.asarray(p1, dtype=float))[:, None]
    bs = np.linspace(cap, -cap, grid)
    vals = _axis_rate(beta, p0, p1, bs[None, :])
    top = vals.max(axis=1, keepdims=True)
    near = vals >= top * (1.0 - 1e-12)
    idx = np.argmax(near, axis=1)
    p0, p1 = p0[:, 0], p1[:, 0]
    best = bs[idx]
    lo = bs[np.minimum(idx + 1, grid - 1)]
    hi = bs[np.maximum(idx - 1, 0)]
    interior = (
        (idx > 0) & (idx < grid - 1)
        & (_axis_slope(beta, p0, p1, lo) > 0) & (_axis_slope(beta, p0, p1, hi) < 0)
    )
    # the slope changes sign inside [lo, hi]
    a, b = lo.copy(), hi.copy()
    for _ in range(80):
        mid = 0.5 * (a + b)
        up = _axis_slope(beta, p0, p1, mid) > 0
        a = np.where(up, mid, a)
        b = np.where(up, b, mid)
    root = 0.5 * (a + b)
    better = _axis_rate(beta, p0, p1, root) >= _axis_rate(beta, p0, p1, best)
    return np.where(interior & better, root, best)


def _to_axis(c: Constellation, theta: float):
    return tuple(float(v) for v in (c.amplitudes * np.exp(-1j * theta)).real)


def _signed_to_control(b: float, theta: float, cap: float) -> LoControl:
    phi = theta if b >= 0 else theta + math.pi
    return LoControl(a=min(abs(b), cap), phi=phi % TWO_PI, cap=cap)


def _refine_2d(c: Constellation, p, a0: float, phi0: float, cap: float) -> tuple[float, float]:
    from scipy.optimize import minimize

    def neg(x):
        return -mi_rate(rates(c, x[0] * np.exp(1j * x[1])), p)

    def neg_grad(x):
        ra, rp = stationarity_residuals(c, p, x[0], x[1])
        return np.array([-2.0 * ra, 2.0 * x[0] * rp])

    res = minimize(
        neg, [a0, phi0], jac=neg_grad, method="L-BFGS-B",
        bounds=[(0.0, cap), (None, None)], options={"ftol": 1e-15, "gtol": 1e-13, "maxiter": 500},
    )
    return float(res.x[0]), float(res.x[1]) % TWO_PI


def optimize_lo(c: Constellation, posterior, cap: float) -> LoControl:
    """LO field maximizing the MI rate over amplitude ``[0, cap]`` and phase.

    A degenerate posterior (all mass on one symbol) gives zero rate for any
    LO and returns ``a = 0``.
    """
    if not cap > 0:
        raise ValueError("LO cap must be positive")
    p = np.asarray(posterior, dtype=float)
    if p.shape != c.priors.shape or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise ValueError("posterior must be a distribution over the constellation")
    if p.max() >= 1.0 - 1e-15:
        return LoControl(a=0.0, phi=0.0, cap=cap)

    amps = np.linspace(0.0, cap, GRID_AMPLITUDES)
    phis = np.linspace(0.0, TWO_PI, GRID_PHASES, endpoint=False)
    fields = amps[:, None] * np.exp(1j * phis[None, :])
    lam = np.abs(fields[..., None] + c.amplitudes) ** 2
    lbar = lam @ p
    with np.errstate(divide="ignore", invalid="ignore"):
        eps = np.where(lbar[..., None] > 0, lam / lbar[..., None] - 1.0, 0.0)
    grid_vals = lbar * (_bregman(eps) @ p)
    ia, ip = np.unravel_index(np.argmax(grid_vals), grid_vals.shape)
    grid_best = float(grid_vals[ia, ip])

    theta = c.axis()
    if theta is not None and c.size == 2:
        beta = _to_axis(c, theta)
        b = float(optimize_axis_lo(beta, p[0], p[1], cap)[0])
        candidate = _signed_to_control(b, theta, cap)
        val = mi_rate(rates(c, candidate.field), p)
        if val >= grid_best - 1e-12 * max(abs(grid_best), 1.0):
            return candidate
    a, phi = _refine_2d(c, p, float(amps[ia]), float(phis[ip]), cap)
    if mi_rate(rates(c, a * np.exp(1j * phi)), p) < grid_best:
        a, phi = float(amps[ia]), float(phis[ip])
    return LoControl(a=a, phi=phi, cap=cap)


# --- filtering ---------------------------------------------------------------


def filter_step(state: FilterState, c: Constellation, lo: LoControl, dt: float, count: bool) -> FilterState:
    """Bayes update of the symbol posterior over one step of length ``dt``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    lam = rates(c, lo.field)
    if float(lam.max()) * dt > 0.1:
        raise NumericalValidityError(f"max rate * dt = {lam.max() * dt:.3g} exceeds 0.1")
    if count:
        w = state.posterior * lam * dt
    else:
        w = state.posterior * np.exp(-lam * dt)
    total = float(w.sum())
    if total <= 0:
        raise ArithmeticError("count observed with zero likelihood under every symbol")
    return FilterState(posterior=w / total, t=state.t + dt)


# --- Monte Carlo ---------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloResult:
    pe_estimate: float
    stderr: float
    trials: int
    errors: int
    mean_counts: float
    parity_agreement: float | None


def default_cap(c: Constellation) -> float:
    return DEFAULT_CAP_FACTOR * float(np.abs(c.amplitudes).max())


_TABLE_SCALE = 1e-3
_TABLE_LMAX = 60.0
_TABLE_POINTS = 8001


@functools.lru_cache(maxsize=16)
def _lo_table(beta: tuple[float, float], cap: float):
    """Greedy signed LO versus log-odds ``L = ln(p1/p0)`` on a sinh-spaced grid.

    Returns ``(zmax, b_pos, b_neg, b_zero)``: tables at ``L = +x`` and
    ``L = -x`` for ``x = scale * sinh(z)``, and the tie-broken value at L = 0.
    """
    zmax = math.asinh(_TABLE_LMAX / _TABLE_SCALE)
    z = np.linspace(0.0, zmax, _TABLE_POINTS)
    x = _TABLE_SCALE * np.sinh(z)
    x[0] = 1e-14
    big = 1.0 / (1.0 + np.exp(-x))
    small = 1.0 / (1.0 + np.exp(x))
    b_pos = optimize_axis_lo(beta, small, big, cap)
    b_neg = optimize_axis_lo(beta, big, small, cap)
    b_zero = float(optimize_axis_lo(beta, 0.5, 0.5, cap)[0])
    return zmax, b_pos, b_neg, b_zero


def _kernel():
    from photonlim import _mc_kernel

    return _mc_kernel.simulate_axis_trials


def _random_inputs(seed: int, indices, n_exp: int):
    sym_u = np.empty(len(indices))
    exps = np.empty((len(indices), n_exp))
    for row, i in enumerate(indices):
        g = trial_rng(seed, int(i))
        sym_u[row] = g.random()
        exps[row] = g.standard_exponential(n_exp)
    return sym_u, exps


def run_monte_carlo(
    c: Constellation,
    T: float,
    trials: int,
    seed: int,
    cap: float | None = None,
    dt: float | None = None,
    dt_factor: float = DEFAULT_DT_FACTOR,
) -> MonteCarloResult:
    """Estimate the error probability of the greedy feedback receiver.

    Each trial draws a symbol from the priors and simulates counts step by
    step; before every step the LO is set from the current posterior, a
    count occurs with the step's Poisson probability and the posterior is
    updated as in :func:`filter_step`.  The decision at ``T`` is the MAP
    symbol (ties to the lowest index).

    With ``dt=None`` each step has length ``dt_factor / max_k lambda_k`` at
    the current LO, so ``lambda * dt <= dt_factor`` on every step.  A fixed
    ``dt`` must satisfy ``(cap + max|alpha|)**2 * dt <= 0.01``.

    Trial ``i`` uses the random stream ``trial_rng(seed, i)`` so results do
    not depend on evaluation order or chunking.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not T > 0:
        raise ValueError("T must be positive")
    cap = default_cap(c) if cap is None else float(cap)
    if not cap > 0:
        raise ValueError("LO cap must be positive")
    if not 0 < dt_factor <= 0.01:
        raise NumericalValidityError(f"dt factor {dt_factor} must lie in (0, 0.01]")
    a_max = float(np.abs(c.amplitudes).max())
    if dt is not None:
        if not dt > 0:
            raise ValueError("dt must be positive")
        if (cap + a_max) ** 2 * dt > 0.01:
            raise NumericalValidityError(
                f"max achievable rate * dt = {(cap + a_max) ** 2 * dt:.3g} exceeds 0.01"
            )
    theta = c.axis()
    if c.size == 2 and theta is not None and a_max > 0:
        return _run_axis(c, T, trials, seed, cap, dt, dt_factor, theta)
    return _run_generic(c, T, trials, seed, cap, dt, dt_factor)


def _even_symbol(c: Constellation, cap: float) -> int:
    # the symbol the receiver settles on after zero counts: the more likely
    # one, or at a tie the one the initial LO makes dimmer
    if c.priors[0] != c.priors[1]:
        return int(np.argmax(c.priors))
    lam = rates(c, optimize_lo(c, c.priors, cap).field)
    return int(np.argmin(lam))


def _summarize(decisions, truth, counts, even: int | None) -> MonteCarloResult:
    """``even`` is the decision expected for an even count total (binary only)."""
    trials = decisions.size
    errors = int(np.sum(decisions != truth))
    pe = errors / trials
    parity = None if even is None else float(np.mean(decisions == (even ^ (counts % 2))))
    return MonteCarloResult(
        pe_estimate=pe, stderr=math.sqrt(pe * (1.0 - pe) / trials), trials=trials,
        errors=errors, mean_counts=float(np.mean(counts)), parity_agreement=parity,
    )


def _run_axis(c, T, trials, seed, cap, dt, dt_factor, theta, chunk: int = 20000):
    a_max = float(np.abs(c.amplitudes).max())
    beta = tuple(v / a_max for v in _to_axis(c, theta))
    zmax, b_pos, b_neg, b_zero = _lo_table(beta, round(cap / a_max, 12))
    kernel = _kernel()
    log_odds0 = math.log(c.priors[1]) - math.log(c.priors[0]) if c.priors.min() > 0 else (
        math.copysign(700.0, c.priors[1] - c.priors[0])
    )
    decisions = np.empty(trials, dtype=np.int64)
    truth = np.empty(trials, dtype=np.int64)
    counts = np.empty(trials, dtype=np.int64)
    n_exp = 32
    step = 0.0 if dt is None else dt
    tables = (_TABLE_SCALE, zmax, b_pos, b_neg, b_zero)
    for first in range(0, trials, chunk):
        idx = np.arange(first, min(first + chunk, trials))
        sym_u, exps = _random_inputs(seed, idx, n_exp)
        d, s, k, ok = kernel(sym_u, exps, c.priors[1], *beta, a_max**2, T, step, dt_factor,
                             log_odds0, *tables)
        size = n_exp
        redo = np.flatnonzero(~ok)
        while redo.size:
            # same streams, longer prefix of exponential variates
            size *= 4
            su, ex = _random_inputs(seed, idx[redo], size)
            d2, s2, k2, ok2 = kernel(su, ex, c.priors[1], *beta, a_max**2, T, step, dt_factor,
                                     log_odds0, *tables)
            d[redo], s[redo], k[redo] = d2, s2, k2
            redo = redo[~ok2]
        decisions[idx] = d
        truth[idx] = s
        counts[idx] = k
    return _summarize(decisions, truth, counts, _even_symbol(c, cap))


def _run_generic(c, T, trials, seed, cap, dt, dt_factor):
    """Reference path for arbitrary constellations: full optimizer every step."""
    decisions = np.empty(trials, dtype=np.int64)
    truth = np.empty(trials, dtype=np.int64)
    counts = np.empty(trials, dtype=np.int64)
    cdf = np.cumsum(c.priors)
    for i in range(trials):
        g = trial_rng(seed, i)
        k_true = int(min(np.searchsorted(cdf, g.random(), side="right"), c.size - 1))
        state = FilterState(c.priors.copy(), 0.0)
        hazard, target, n_counts = 0.0, g.standard_exponential(), 0
        while state.t < T * (1.0 - 1e-12):
            lo = optimize_lo(c, state.posterior, cap)
            lam = rates(c, lo.field)
            lam_max = float(lam.max())
            h = dt if dt is not None else (dt_factor / lam_max if lam_max > 0 else T)
            h = min(h, T - state.t)
            hazard += lam[k_true] * h
            hit = hazard >= target
            if hit:
                hazard, target, n_counts = 0.0, g.standard_exponential(), n_counts + 1
            state = filter_step(state, c, lo, h, hit)
        decisions[i] = int(np.argmax(state.posterior))
        truth[i] = k_true
        counts[i] = n_counts
    return _summarize(decisions, truth, counts, _even_symbol(c, cap) if c.size == 2 else None)
