"""Compiled trial loop for binary constellations on one axis.

Amplitudes are normalized (``beta_k``, largest magnitude 1) and rates carry
the factor ``amp2 = max|alpha|**2``.  The greedy LO comes from tables of the
optimizer indexed by the posterior log-odds ``L = ln(p1/p0)``.
"""

import math

import numpy as np
from numba import njit

L_CLAMP = 700.0


@njit(cache=True)
def _lookup(L, scale, zmax, b_pos, b_neg, b_zero):
    if L == 0.0:
        return b_zero
    x = abs(L)
    n = b_pos.size
    z = math.asinh(x / scale)
    if z >= zmax:
        return b_pos[n - 1] if L > 0 else b_neg[n - 1]
    f = z / zmax * (n - 1)
    i = int(f)
    w = f - i
    if L > 0:
        return b_pos[i] * (1.0 - w) + b_pos[i + 1] * w
    return b_neg[i] * (1.0 - w) + b_neg[i + 1] * w


@njit(cache=True)
def simulate_axis_trials(sym_u, exps, p1, beta0, beta1, amp2, T, dt, dt_factor, L0,
                         scale, zmax, b_pos, b_neg, b_zero):
    """Run one trial per row of ``exps``.

    Returns decisions, true symbols, count totals and a flag that is False
    when a trial ran out of pre-drawn exponential variates.
    """
    m = sym_u.size
    n_exp = exps.shape[1]
    decisions = np.empty(m, dtype=np.int64)
    truth = np.empty(m, dtype=np.int64)
    counts = np.zeros(m, dtype=np.int64)
    ok = np.ones(m, dtype=np.bool_)
    for i in range(m):
        k = 0 if sym_u[i] < 1.0 - p1 else 1
        truth[i] = k
        L = L0
        t = 0.0
        hazard = 0.0
        used = 0
        target = exps[i, 0]
        while t < T:
            b = _lookup(L, scale, zmax, b_pos, b_neg, b_zero)
            l0 = amp2 * (b + beta0) ** 2
            l1 = amp2 * (b + beta1) ** 2
            lmax = l0 if l0 > l1 else l1
            if dt > 0.0:
                h = dt
            elif lmax > 0.0:
                h = dt_factor / lmax
            else:
                h = T - t
            if h > T - t:
                h = T - t
            hazard += (l1 if k == 1 else l0) * h
            if hazard >= target:
                counts[i] += 1
                used += 1
                if used >= n_exp:
                    ok[i] = False
                    break
                target = exps[i, used]
                hazard = 0.0
                # count step: posterior ~ p_k * lambda_k * h
                if l0 <= 0.0:
                    L = L_CLAMP
                elif l1 <= 0.0:
                    L = -L_CLAMP
                else:
                    L += math.log(l1 / l0)
            else:
                L -= (l1 - l0) * h
            if L > L_CLAMP:
                L = L_CLAMP
            elif L < -L_CLAMP:
                L = -L_CLAMP
            t += h
        decisions[i] = 1 if L > 0.0 else 0
    return decisions, truth, counts, ok
