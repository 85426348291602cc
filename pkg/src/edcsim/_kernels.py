"""Compiled inner loops (numba). Callers in edcs.py / matching.py own the API."""

from __future__ import annotations

import numba as nb
import numpy as np


@nb.njit(cache=True)
def greedy_matching_kernel(n, edges, order):
    matched = np.zeros(n, dtype=np.bool_)
    take = np.zeros(edges.shape[0], dtype=np.bool_)
    for t in range(order.shape[0]):
        e = order[t]
        u = edges[e, 0]
        v = edges[e, 1]
        if not matched[u] and not matched[v]:
            matched[u] = True
            matched[v] = True
            take[e] = True
    return take


@nb.njit(cache=True)
def _phi2(twice_beta_minus_one, size_h, sumsq):
    # 2*Phi = (2*beta - 1) * sum_v deg(v) - 2 * sum_v deg(v)^2
    return twice_beta_minus_one * 2 * size_h - 2 * sumsq


@nb.njit(cache=True)
def edcs_fix_kernel(n, edges, indptr, nbr, eid, beta, beta_minus, in_h,
                    scan_order, policy, record):
    """Run the fixing procedure in place on ``in_h``.

    policy 0: dirty-edge queues, P1 candidates served before P2 candidates.
    policy 1: repeated sweeps over ``scan_order`` until a sweep is clean.

    Returns (deg, steps, min_phi_step2, phi2_trace, trace_len).  Potential
    values are doubled so they stay integral.
    """
    m = edges.shape[0]
    deg = np.zeros(n, dtype=np.int64)
    size_h = 0
    for e in range(m):
        if in_h[e]:
            deg[edges[e, 0]] += 1
            deg[edges[e, 1]] += 1
            size_h += 1
    sumsq = 0
    maxdeg = 0
    for v in range(n):
        sumsq += deg[v] * deg[v]
        if deg[v] > maxdeg:
            maxdeg = deg[v]
    tb = 2 * beta - 1
    cap = 1024 if record else 1
    trace = np.empty(cap, dtype=np.int64)
    tlen = 0
    phi = _phi2(tb, size_h, sumsq)
    if record:
        trace[0] = phi
        tlen = 1
    steps = 0
    min_step = np.int64(1) << 62

    if policy == 1:
        changed = True
        while changed:
            changed = False
            for t in range(scan_order.shape[0]):
                e = scan_order[t]
                u = edges[e, 0]
                v = edges[e, 1]
                s = deg[u] + deg[v]
                if in_h[e] and s > beta:
                    in_h[e] = False
                    sumsq += -2 * deg[u] + 1 - 2 * deg[v] + 1
                    deg[u] -= 1
                    deg[v] -= 1
                    size_h -= 1
                elif (not in_h[e]) and s < beta_minus:
                    in_h[e] = True
                    sumsq += 2 * deg[u] + 1 + 2 * deg[v] + 1
                    deg[u] += 1
                    deg[v] += 1
                    size_h += 1
                else:
                    continue
                changed = True
                steps += 1
                nphi = _phi2(tb, size_h, sumsq)
                if nphi - phi < min_step:
                    min_step = nphi - phi
                phi = nphi
                if record:
                    if tlen == trace.shape[0]:
                        grown = np.empty(2 * tlen, dtype=np.int64)
                        grown[:tlen] = trace
                        trace = grown
                    trace[tlen] = phi
                    tlen += 1
        return deg, steps, min_step, trace, tlen

    # queue policy: two FIFO rings of candidate edges with membership flags
    q1 = np.empty(m + 1, dtype=np.int64)
    q2 = np.empty(m + 1, dtype=np.int64)
    h1 = 0
    t1 = 0
    n1 = 0
    h2 = 0
    t2 = 0
    n2 = 0
    queued1 = np.zeros(m, dtype=np.bool_)
    queued2 = np.zeros(m, dtype=np.bool_)
    ring = m + 1
    for t in range(scan_order.shape[0]):
        e = scan_order[t]
        if in_h[e]:
            queued1[e] = True
            q1[t1] = e
            t1 = (t1 + 1) % ring
            n1 += 1
        else:
            queued2[e] = True
            q2[t2] = e
            t2 = (t2 + 1) % ring
            n2 += 1

    while n1 > 0 or n2 > 0:
        if n1 > 0:
            e = q1[h1]
            h1 = (h1 + 1) % ring
            n1 -= 1
            queued1[e] = False
        else:
            e = q2[h2]
            h2 = (h2 + 1) % ring
            n2 -= 1
            queued2[e] = False
        u = edges[e, 0]
        v = edges[e, 1]
        s = deg[u] + deg[v]
        if in_h[e] and s > beta:
            in_h[e] = False
            sumsq += -2 * deg[u] + 1 - 2 * deg[v] + 1
            deg[u] -= 1
            deg[v] -= 1
            size_h -= 1
            # lower degrees can only create P2 violations on non-H edges at u, v
            for x in (u, v):
                for j in range(indptr[x], indptr[x + 1]):
                    f = eid[j]
                    if not in_h[f] and not queued2[f]:
                        if deg[nbr[j]] + deg[x] < beta_minus:
                            queued2[f] = True
                            q2[t2] = f
                            t2 = (t2 + 1) % ring
                            n2 += 1
        elif (not in_h[e]) and s < beta_minus:
            in_h[e] = True
            sumsq += 2 * deg[u] + 1 + 2 * deg[v] + 1
            deg[u] += 1
            deg[v] += 1
            size_h += 1
            if deg[u] > maxdeg:
                maxdeg = deg[u]
            if deg[v] > maxdeg:
                maxdeg = deg[v]
            # higher degrees can only create P1 violations on H edges at u, v
            for x in (u, v):
                if deg[x] + maxdeg <= beta:
                    continue
                for j in range(indptr[x], indptr[x + 1]):
                    f = eid[j]
                    if in_h[f] and not queued1[f]:
                        if deg[nbr[j]] + deg[x] > beta:
                            queued1[f] = True
                            q1[t1] = f
                            t1 = (t1 + 1) % ring
                            n1 += 1
        else:
            continue
        steps += 1
        nphi = _phi2(tb, size_h, sumsq)
        if nphi - phi < min_step:
            min_step = nphi - phi
        phi = nphi
        if record:
            if tlen == trace.shape[0]:
                grown = np.empty(2 * tlen, dtype=np.int64)
                grown[:tlen] = trace
                trace = grown
            trace[tlen] = phi
            tlen += 1
    return deg, steps, min_step, trace, tlen


@nb.njit(cache=True)
def unique_endpoint_edges(n, picked_u, picked_v):
    """Indices of picked edges whose endpoints both occur exactly once."""
    cnt = np.zeros(n, dtype=np.int64)
    for i in range(picked_u.shape[0]):
        cnt[picked_u[i]] += 1
        cnt[picked_v[i]] += 1
    out = np.empty(picked_u.shape[0], dtype=np.int64)
    k = 0
    for i in range(picked_u.shape[0]):
        if cnt[picked_u[i]] == 1 and cnt[picked_v[i]] == 1:
            out[k] = i
            k += 1
    return out[:k]
