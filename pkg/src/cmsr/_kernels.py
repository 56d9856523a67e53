"""Compiled loops behind the two evaluators.

Both kernels work on a flat, C-ordered outcome table whose axis ``k`` has
radix ``l_k + 1``; ``strides[k]`` converts a per-axis index to a flat offset.
Visit arrays are in (t, k) order: ``vk`` route axis (0-based), ``vu``
position (1-based), ``vc`` point, ``vt`` arrival second, ``vlam`` the
point's rate.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _neumaier(p, s):
    total = 0.0
    comp = 0.0
    for i in range(p.size):
        x = p[i] * s[i]
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        total = t
    return total + comp


@njit(cache=True)
def sa_kernel(radix, strides, vk, vu, vc, vt, vlam, cum, lengths, penalty, n_points):
    """Per-outcome probability and cruising time, each outcome from scratch."""
    K = radix.size
    M = 1
    for k in range(K):
        M *= radix[k]
    p = np.empty(M)
    s = np.empty(M)
    u = np.empty(K, dtype=np.int64)
    last = np.zeros(n_points + 1)
    nv = vk.size
    for m in range(M):
        rem = m
        for k in range(K):
            u[k] = rem // strides[k] + 1
            rem = rem % strides[k]
        for i in range(nv):
            last[vc[i]] = 0.0
        prob = 1.0
        for i in range(nv):
            k = vk[i]
            c = vc[i]
            if vu[i] < u[k]:
                prob *= math.exp(-vlam[i] * (vt[i] - last[c]))
            elif vu[i] == u[k]:
                prob *= -math.expm1(-vlam[i] * (vt[i] - last[c]))
            if vu[i] <= u[k]:
                last[c] = vt[i]
        total = 0.0
        for k in range(K):
            lk = lengths[k]
            if u[k] <= lk:
                total += cum[k, u[k] - 1]
            elif lk > 0:
                total += cum[k, lk - 1] + penalty
            else:
                total += penalty
        p[m] = prob
        s[m] = total
    return p, s


@njit(cache=True)
def se_kernel(radix, strides, vk, vu, vt, vlam, vleg, prior_ptr, prior_idx, penalty):
    """Grow the outcome table one visit at a time.

    ``prior_idx[prior_ptr[i]:prior_ptr[i + 1]]`` lists the earlier visits to the
    same point as visit ``i``, newest first.
    """
    K = radix.size
    M = 1
    for k in range(K):
        M *= radix[k]
    p = np.zeros(M)
    s = np.zeros(M)
    p[0] = 1.0
    s[0] = K * penalty
    done = np.zeros(K, dtype=np.int64)
    idx = np.zeros(K, dtype=np.int64)
    states = 1
    for i in range(vk.size):
        q = vk[i]
        n_split = 1
        for j in range(K):
            idx[j] = 0
            if j != q:
                n_split *= done[j] + 1
        idx[q] = done[q]
        lo = prior_ptr[i]
        hi = prior_ptr[i + 1]
        for _ in range(n_split):
            f = 0
            for j in range(K):
                f += idx[j] * strides[j]
            last = 0.0
            for n in range(lo, hi):
                v = prior_idx[n]
                if idx[vk[v]] >= vu[v] - 1:
                    last = vt[v]
                    break
            delta = vt[i] - last
            hit = -math.expm1(-vlam[i] * delta)
            miss = math.exp(-vlam[i] * delta)
            g = f + strides[q]
            p[g] = p[f] * miss
            s[g] = s[f] + vleg[i]
            p[f] = p[f] * hit
            s[f] = s[f] - penalty + vleg[i]
            # advance the odometer over every axis but q
            j = K - 1
            while j >= 0:
                if j != q:
                    if idx[j] < done[j]:
                        idx[j] += 1
                        break
                    idx[j] = 0
                j -= 1
        states += n_split
        done[q] += 1
    return p, s, states


@njit(cache=True)
def table_value(p, s):
    return _neumaier(p, s)
