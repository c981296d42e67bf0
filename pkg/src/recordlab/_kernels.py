"""numba kernels: Gamma(d) tails, incremental fronts, and batch trial loops.

Every batch loop builds trial ``t``'s Philox state from ``(seed, t, lane)``,
so results do not depend on how trials are split across workers.
"""

import math

import numpy as np
from numba import njit

from ._philox import fill_raw, new_state, next_uniform

ENGINE_TAIL = 0
ENGINE_STREAM = 1

# lanes keep experiments that share (seed, trial) statistically independent
LANE_MODEL_E = 0
LANE_SHELL = 1
LANE_NU = 2
LANE_SHELL_ALT = 3
LANE_MISC = 7

_LOG_HALF = math.log(0.5)


# --------------------------------------------------------------------------
# Gamma(d, 1) tails for integer shape d
# --------------------------------------------------------------------------

@njit(cache=True)
def log_gamma_tail(d, x):
    """log P(Gamma(d, 1) > x) = log(e^-x * sum_{j<d} x^j / j!)."""
    if x <= 0.0:
        return 0.0
    term = 1.0
    acc = 1.0
    for j in range(1, d):
        term *= x / j
        acc += term
    return -x + math.log(acc)


@njit(cache=True)
def log_gamma_lower(d, x):
    """log P(Gamma(d, 1) <= x)."""
    if x <= 0.0:
        return -np.inf
    ls = log_gamma_tail(d, x)
    if ls < _LOG_HALF:
        return math.log1p(-math.exp(ls))
    # series e^-x x^d / d! * sum_k x^k / ((d+1)...(d+k)), only reached for x <~ d
    term = 1.0
    acc = 1.0
    k = 1
    while k < 10000:
        term *= x / (d + k)
        acc += term
        if term < 1e-17 * acc:
            break
        k += 1
    return -x + d * math.log(x) - math.lgamma(d + 1.0) + math.log(acc)


@njit(cache=True)
def log_gamma_pdf(d, x):
    return (d - 1) * math.log(x) - x - math.lgamma(float(d))


@njit(cache=True)
def gamma_tail_inv_log(d, log_s, log_p):
    """Radius r with P(Gamma(d) > r) = e^log_s (equivalently P(<= r) = e^log_p).

    Both logs are passed so whichever side is smaller is solved in log space
    without cancellation.  Safeguarded Newton, relative tolerance ~1e-15.
    """
    use_tail = log_s < _LOG_HALF
    if use_tail:
        if log_s >= 0.0:
            return 0.0
        t = -log_s
        x = t + (d - 1) * math.log(max(t, 1.0))
    else:
        if log_p == -np.inf:
            return 0.0
        x = math.exp((log_p + math.lgamma(d + 1.0)) / d)
    lo = 0.0
    hi = np.inf
    for _ in range(200):
        if use_tail:
            g = log_gamma_tail(d, x) - log_s          # decreasing in x
            gp = -math.exp(log_gamma_pdf(d, x) - log_gamma_tail(d, x))
            if g > 0.0:
                lo = x
            else:
                hi = x
        else:
            lg = log_gamma_lower(d, x)
            g = lg - log_p                            # increasing in x
            gp = math.exp(log_gamma_pdf(d, x) - lg)
            if g < 0.0:
                lo = x
            else:
                hi = x
        if g == 0.0:
            return x
        step = g / gp
        x_new = x - step
        if not (x_new > lo and x_new < hi):
            x_new = 2.0 * lo + 1.0 if hi == np.inf else 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-15 * x:
            return x_new
        x = x_new
    return x


@njit(cache=True)
def gamma_tail_inv(d, s):
    """Radius with survival probability ``s`` (0 < s < 1)."""
    if s >= 1.0:
        return 0.0
    if s <= 0.0:
        return np.inf
    return gamma_tail_inv_log(d, math.log(s), math.log1p(-s))


# --------------------------------------------------------------------------
# Incremental fronts.  Works for any ordered dtype (float64 coordinates or
# int64 keys); "q dominates p" means q[j] > p[j] for every j.
# --------------------------------------------------------------------------

@njit(cache=True)
def _grow(fr, ix):
    cap = fr.shape[0] * 2
    fr2 = np.empty((cap, fr.shape[1]), dtype=fr.dtype)
    ix2 = np.empty(cap, dtype=np.int64)
    fr2[: fr.shape[0]] = fr
    ix2[: fr.shape[0]] = ix
    return fr2, ix2


@njit(cache=True)
def front_insert2(fr, ix, k, p0, p1, pidx):
    """d = 2 staircase kept in (x0 asc, x1 desc) order, so x1 is non-increasing.

    Returns (fr, ix, k, inserted).
    """
    # first position whose x0 exceeds p0: the largest x1 among them sits there
    lo = 0
    hi = k
    while lo < hi:
        mid = (lo + hi) >> 1
        if fr[mid, 0] > p0:
            hi = mid
        else:
            lo = mid + 1
    if lo < k and fr[lo, 1] > p1:
        return fr, ix, k, False
    # insertion slot in (x0 asc, x1 desc) order
    lo2 = 0
    hi2 = lo
    while lo2 < hi2:
        mid = (lo2 + hi2) >> 1
        if fr[mid, 0] < p0 or (fr[mid, 0] == p0 and fr[mid, 1] >= p1):
            lo2 = mid + 1
        else:
            hi2 = mid
    end = lo2
    # entries below p in both coordinates form a suffix of [0, end)
    lo3 = 0
    hi3 = end
    while lo3 < hi3:
        mid = (lo3 + hi3) >> 1
        if fr[mid, 1] < p1:
            hi3 = mid
        else:
            lo3 = mid + 1
    start = lo3
    removed = end - start
    if removed == 0:
        if k == fr.shape[0]:
            fr, ix = _grow(fr, ix)
        for t in range(k, start, -1):
            fr[t, 0] = fr[t - 1, 0]
            fr[t, 1] = fr[t - 1, 1]
            ix[t] = ix[t - 1]
        k += 1
    elif removed > 1:
        shift = removed - 1
        for t in range(end, k):
            fr[t - shift, 0] = fr[t, 0]
            fr[t - shift, 1] = fr[t, 1]
            ix[t - shift] = ix[t]
        k -= shift
    fr[start, 0] = p0
    fr[start, 1] = p1
    ix[start] = pidx
    return fr, ix, k, True


@njit(cache=True)
def front_insert_scan(fr, ix, k, p, pidx):
    """Any d: linear scan.  Returns (fr, ix, k, inserted)."""
    d = p.shape[0]
    for t in range(k):
        dom = True
        for j in range(d):
            if not (fr[t, j] > p[j]):
                dom = False
                break
        if dom:
            if t > 0:
                # move the witness forward; later points tend to hit it again
                for j in range(d):
                    tmp = fr[t, j]
                    fr[t, j] = fr[t - 1, j]
                    fr[t - 1, j] = tmp
                tmpi = ix[t]
                ix[t] = ix[t - 1]
                ix[t - 1] = tmpi
            return fr, ix, k, False
    w = 0
    for t in range(k):
        below = True
        for j in range(d):
            if not (fr[t, j] < p[j]):
                below = False
                break
        if not below:
            if w != t:
                for j in range(d):
                    fr[w, j] = fr[t, j]
                ix[w] = ix[t]
            w += 1
    k = w
    if k == fr.shape[0]:
        fr, ix = _grow(fr, ix)
    for j in range(d):
        fr[k, j] = p[j]
    ix[k] = pidx
    return fr, ix, k + 1, True


@njit(cache=True)
def front_indices(P):
    """Indices (into P) of the non-dominated rows, fed in input order."""
    n, d = P.shape
    fr = np.empty((16, d), dtype=P.dtype)
    ix = np.empty(16, dtype=np.int64)
    k = 0
    for i in range(n):
        if d == 2:
            fr, ix, k, _ = front_insert2(fr, ix, k, P[i, 0], P[i, 1], i)
        else:
            fr, ix, k, _ = front_insert_scan(fr, ix, k, P[i], i)
    return np.sort(ix[:k])


@njit(cache=True)
def brute_front_mask(P):
    """O(n^2) oracle: row i survives iff no row strictly dominates it."""
    n, d = P.shape
    keep = np.ones(n, dtype=np.bool_)
    for i in range(n):
        for q in range(n):
            dom = True
            for j in range(d):
                if not (P[q, j] > P[i, j]):
                    dom = False
                    break
            if dom:
                keep[i] = False
                break
    return keep


@njit(cache=True)
def desc_maxima_mask(P):
    """Maxima flags for rows already sorted by decreasing l1-norm.

    A row can only be dominated by rows of larger norm, and anything dominated
    by a discarded row is dominated by the front member that discarded it, so
    checking against the running front is exact.
    """
    n, d = P.shape
    keep = np.zeros(n, dtype=np.bool_)
    fr = np.empty((16, d), dtype=P.dtype)
    k = 0
    for i in range(n):
        dom = False
        for t in range(k):
            hit = True
            for j in range(d):
                if not (fr[t, j] > P[i, j]):
                    hit = False
                    break
            if hit:
                dom = True
                break
        if not dom:
            if k == fr.shape[0]:
                fr2 = np.empty((2 * k, d), dtype=P.dtype)
                fr2[:k] = fr
                fr = fr2
            fr[k] = P[i]
            k += 1
            keep[i] = True
    return keep


# --------------------------------------------------------------------------
# Coverage certificate: smallest l1-norm of a point that no front member
# strictly dominates.  x escapes p iff x[j] >= p[j] for some j, so the optimum
# assigns each front point a coordinate and pays the per-coordinate maxima.
# --------------------------------------------------------------------------

@njit(cache=True)
def _free_norm_leaf(P, idx, dim, accept, prune):
    """Last one or two coordinates: sweep the threshold on coordinate ``dim``.

    Returns the optimum when it is <= prune (or the first value found that
    is <= accept), otherwise some value > prune.
    """
    m = idx.shape[0]
    d = P.shape[1]
    if m == 0:
        return 0.0
    if dim == d - 1:
        best = 0.0
        for i in range(m):
            if P[idx[i], dim] > best:
                best = P[idx[i], dim]
        return best
    vals = np.empty(m)
    best = 0.0
    for i in range(m):
        vals[i] = P[idx[i], dim]
        if P[idx[i], d - 1] > best:
            best = P[idx[i], d - 1]
    if best <= accept:
        return best
    order = np.argsort(-vals)
    run = 0.0
    t = 0
    while t < m:
        if run >= best or run > prune:
            break
        c = vals[order[t]]
        cand = c + run
        if cand < best:
            best = cand
            if best <= accept:
                return best
        while t < m and vals[order[t]] == c:
            v = P[idx[order[t]], d - 1]
            if v > run:
                run = v
            t += 1
    return best


@njit(cache=True)
def _free_norm(P, accept_at, prune_at):
    """Branch and bound over coordinate thresholds with an explicit stack.

    Level L fixes a threshold c on coordinate L (zero or a point's value);
    points above c must be escaped through later coordinates, which costs at
    least max over those points of their smallest remaining coordinate.
    """
    n, d = P.shape
    if d == 2:
        return _free_norm_leaf(P, np.arange(n), 0, accept_at, prune_at)
    # tail_min[i, L] = min_{j >= L} P[i, j]
    tail_min = np.empty((n, d))
    for i in range(n):
        acc = np.inf
        for j in range(d - 1, -1, -1):
            if P[i, j] < acc:
                acc = P[i, j]
            tail_min[i, j] = acc
    top = d - 2  # levels 0 .. d-3 branch; the last two coordinates are a leaf
    idx_s = [np.empty(0, dtype=np.int64) for _ in range(top)]
    ord_s = [np.empty(0, dtype=np.int64) for _ in range(top)]
    val_s = [np.empty(0) for _ in range(top)]
    t_s = np.zeros(top, dtype=np.int64)
    lb_s = np.zeros(top)
    best_s = np.zeros(top)
    acc_s = np.zeros(top)
    prune_s = np.zeros(top)
    pend_s = np.zeros(top)

    idx_s[0] = np.arange(n)
    acc_s[0] = accept_at
    prune_s[0] = prune_at
    level = 0
    opening = True
    ret = 0.0
    while True:
        if opening:
            idx = idx_s[level]
            m = idx.shape[0]
            if m == 0:
                ret = 0.0
                opening = False
                level -= 1
                if level < 0:
                    return ret
                continue
            vals = np.empty(m)
            for i in range(m):
                vals[i] = P[idx[i], level]
            val_s[level] = vals
            ord_s[level] = np.argsort(-vals)
            t_s[level] = 0
            lb_s[level] = 0.0
            best_s[level] = np.inf
            pend_s[level] = 0.0
            # threshold 0 on this coordinate: every point passes down
            if level + 1 < top:
                idx_s[level + 1] = idx
                acc_s[level + 1] = acc_s[level]
                prune_s[level + 1] = prune_s[level]
                level += 1
                continue
            ret = _free_norm_leaf(P, idx, level + 1, acc_s[level], prune_s[level])
            opening = False
        # a child result ``ret`` arrives at ``level``
        cand = pend_s[level] + ret
        if cand < best_s[level]:
            best_s[level] = cand
        bst = best_s[level]
        opened = False
        if bst > acc_s[level]:
            vals = val_s[level]
            order = ord_s[level]
            idx = idx_s[level]
            m = idx.shape[0]
            t = t_s[level]
            lb = lb_s[level]
            pr = prune_s[level]
            while t < m:
                if lb >= bst or lb > pr:
                    # later thresholds only pass more points down
                    t = m
                    break
                c = vals[order[t]]
                start = t
                lb_here = lb
                while t < m and vals[order[t]] == c:
                    v = tail_min[idx[order[t]], level + 1]
                    if v > lb:
                        lb = v
                    t += 1
                if c + lb_here < bst and c + lb_here <= pr:
                    sub = np.empty(start, dtype=np.int64)
                    for i in range(start):
                        sub[i] = idx[order[i]]
                    t_s[level] = t
                    lb_s[level] = lb
                    pend_s[level] = c
                    if level + 1 < top:
                        idx_s[level + 1] = sub
                        acc_s[level + 1] = acc_s[level] - c
                        prune_s[level + 1] = min(bst, pr) - c
                        level += 1
                        opening = True
                    else:
                        ret = _free_norm_leaf(P, sub, level + 1, acc_s[level] - c, min(bst, pr) - c)
                    opened = True
                    break
            if not opened:
                t_s[level] = m
        if opened:
            continue
        ret = bst
        level -= 1
        if level < 0:
            return ret
        opening = False


@njit(cache=True)
def free_norm(P):
    """min ||x|| over x >= 0 not strictly dominated by any row of P."""
    if P.shape[0] == 0:
        return 0.0
    return _free_norm(P, -1.0, np.inf)


@njit(cache=True)
def free_norm_exceeds(P, r):
    """True iff every x >= 0 with ||x|| <= r is strictly dominated by a row."""
    if P.shape[0] == 0:
        return False
    return _free_norm(P, r, r) > r


# --------------------------------------------------------------------------
# Model-E trials
# --------------------------------------------------------------------------

@njit(cache=True)
def tail_trial(n, d, st, stop_early=True):
    """Exact Model-E front, generated from the largest norm downwards.

    Norm survival values are the uniform order statistics, drawn one at a
    time via log(1 - s_{j+1}) = log(1 - s_j) + log(U) / (n - j).  Generation
    stops once the free norm of the front exceeds the current radius, because
    every unseen point then lies strictly inside the dominated region.
    ``stop_early=False`` draws all n points (used to test the stopping rule).
    Returns (front points in decreasing-norm order, points generated).
    """
    fr = np.empty((32, d))
    k = 0
    log_p = 0.0
    p = np.empty(d)
    j = 0
    next_check = 4
    while j < n:
        log_p += math.log(next_uniform(st)) / (n - j)
        s = -math.expm1(log_p)
        r = gamma_tail_inv_log(d, math.log(s), log_p) if s > 0.0 else 0.0
        tot = 0.0
        for i in range(d):
            p[i] = -math.log(next_uniform(st))
            tot += p[i]
        for i in range(d):
            p[i] = r * p[i] / tot
        j += 1
        dom = False
        for t in range(k):
            hit = True
            for i in range(d):
                if not (fr[t, i] > p[i]):
                    hit = False
                    break
            if hit:
                dom = True
                break
        if not dom:
            if k == fr.shape[0]:
                fr2 = np.empty((2 * k, d))
                fr2[:k] = fr
                fr = fr2
            fr[k] = p
            k += 1
        if stop_early and j >= next_check:
            next_check = j + max(4, j // 4)
            if free_norm_exceeds(fr[:k], r):
                break
    return fr[:k].copy(), j


_CHUNK = 8192


@njit(cache=True)
def stream_trial(n, d, st):
    """Model-E front from all n points, one pass, nothing materialised.

    Coordinates are compared through their 53-bit uniform keys
    (X = -log U is decreasing in U), so no logarithm is taken until the
    surviving front is converted at the end.
    """
    raw = np.empty(_CHUNK * d, dtype=np.uint64)
    fr = np.empty((32, d), dtype=np.int64)
    ix = np.empty(32, dtype=np.int64)
    k = 0
    key = np.empty(d, dtype=np.int64)
    # witness: the front member with the largest smallest coordinate; it
    # alone rejects almost every point once the front has settled
    wit = np.empty(d, dtype=np.int64)
    wit[:] = np.iinfo(np.int64).min
    done = 0
    sh = np.uint64(11)
    while done < n:
        m = min(_CHUNK, n - done)
        fill_raw(st, raw[: m * d])
        for i in range(m):
            below = True
            for j in range(d):
                # negate so that larger key <=> larger coordinate
                key[j] = -np.int64(raw[i * d + j] >> sh)
                if not (key[j] < wit[j]):
                    below = False
            if below:
                continue
            if d == 2:
                fr, ix, k, ins = front_insert2(fr, ix, k, key[0], key[1], done + i)
            else:
                fr, ix, k, ins = front_insert_scan(fr, ix, k, key, done + i)
            if ins:
                best = np.iinfo(np.int64).min
                for t in range(k):
                    lo = fr[t, 0]
                    for j in range(1, d):
                        if fr[t, j] < lo:
                            lo = fr[t, j]
                    if lo > best:
                        best = lo
                        wit[:] = fr[t]
        done += m
    out = np.empty((k, d))
    for t in range(k):
        for j in range(d):
            u = (np.float64(-fr[t, j]) + 0.5) * 2.0 ** -53
            out[t, j] = -math.log(u)
    return out


@njit(cache=True)
def model_e_front(n, d, st, engine):
    if engine == ENGINE_STREAM:
        return stream_trial(n, d, st)
    fr, _ = tail_trial(n, d, st)
    return fr


@njit(cache=True)
def _lex_less(a, b):
    for j in range(a.shape[0]):
        if a[j] < b[j]:
            return True
        if a[j] > b[j]:
            return False
    return False


@njit(cache=True)
def summarize_front(fr, b_grid, phi_o, fplus_o, count_o, sigma_o, top_o, rho_o, t):
    k, d = fr.shape
    norms = np.empty(k)
    for i in range(k):
        norms[i] = fr[i].sum()
    imin = 0
    imax = 0
    for i in range(1, k):
        if norms[i] < norms[imin] or (norms[i] == norms[imin] and _lex_less(fr[i], fr[imin])):
            imin = i
        if norms[i] > norms[imax] or (norms[i] == norms[imax] and _lex_less(fr[i], fr[imax])):
            imax = i
    phi_o[t] = norms[imin]
    fplus_o[t] = norms[imax]
    count_o[t] = k
    sigma_o[t] = fr[imin]
    top_o[t] = fr[imax]
    for g in range(b_grid.shape[0]):
        c = 0
        for i in range(k):
            if norms[i] <= b_grid[g]:
                c += 1
        rho_o[t, g] = c


@njit(cache=True)
def batch_model_e(n, d, seed, t0, T, b_grid, engine, lane):
    phi = np.empty(T)
    fplus = np.empty(T)
    count = np.empty(T, dtype=np.int64)
    sigma = np.empty((T, d))
    top = np.empty((T, d))
    rho = np.empty((T, b_grid.shape[0]), dtype=np.int64)
    for t in range(T):
        st = new_state(seed, np.uint64(t0 + t), lane)
        fr = model_e_front(n, d, st, engine)
        summarize_front(fr, b_grid, phi, fplus, count, sigma, top, rho, t)
    return phi, fplus, count, sigma, top, rho


@njit(cache=True)
def batch_small_n(n, d, seed, t0, T, lane):
    """Small samples materialised whole; front by the O(n^2) oracle.

    Returns (front size, smallest-norm maximum, largest-norm maximum).
    """
    count = np.empty(T, dtype=np.int64)
    sigma = np.empty((T, d))
    top = np.empty((T, d))
    P = np.empty((n, d))
    for t in range(T):
        st = new_state(seed, np.uint64(t0 + t), lane)
        for i in range(n):
            for j in range(d):
                P[i, j] = -math.log(next_uniform(st))
        keep = brute_front_mask(P)
        c = 0
        best = np.inf
        worst = -1.0
        for i in range(n):
            if keep[i]:
                c += 1
                s = P[i].sum()
                if s < best:
                    best = s
                    sigma[t] = P[i]
                if s > worst:
                    worst = s
                    top[t] = P[i]
        count[t] = c
    return count, sigma, top


# --------------------------------------------------------------------------
# Poisson shell processes: intensity n e^{-||x||} on lo < ||x|| <= hi
# --------------------------------------------------------------------------

@njit(cache=True)
def shell_sample(n, lo, hi, d, st):
    """Points of the shell process in decreasing-norm order.

    Survival values of the radii form a rate-n homogeneous process on
    (S(hi), S(lo)); walking it upwards with exponential gaps lists the
    points from the outermost inwards.  Returns (points, norms).
    """
    log_s_lo = log_gamma_tail(d, lo)
    if hi == np.inf:
        s_hi = 0.0
    else:
        s_hi = math.exp(log_gamma_tail(d, hi))
    s_lo = math.exp(log_s_lo)
    cap = 64
    pts = np.empty((cap, d))
    nrm = np.empty(cap)
    k = 0
    pos = n * s_hi
    top = n * s_lo
    while True:
        pos += -math.log(next_uniform(st))
        if pos > top:
            break
        s = pos / n
        r = gamma_tail_inv_log(d, math.log(s), math.log1p(-s))
        if r <= lo:
            # rounding at the inner edge; the point belongs to (lo, hi]
            r = np.nextafter(lo, np.inf)
        if k == cap:
            cap *= 2
            p2 = np.empty((cap, d))
            n2 = np.empty(cap)
            p2[:k] = pts[:k]
            n2[:k] = nrm[:k]
            pts = p2
            nrm = n2
        tot = 0.0
        for j in range(d):
            pts[k, j] = -math.log(next_uniform(st))
            tot += pts[k, j]
        for j in range(d):
            pts[k, j] = r * pts[k, j] / tot
        nrm[k] = r
        k += 1
    return pts[:k].copy(), nrm[:k].copy()


@njit(cache=True)
def window_counts(pts, nrm, windows):
    """Maxima of the whole sample falling in each (w_lo, w_hi] window."""
    keep = desc_maxima_mask(pts)
    W = windows.shape[0]
    out = np.zeros(W, dtype=np.int64)
    for i in range(pts.shape[0]):
        if keep[i]:
            for w in range(W):
                if nrm[i] > windows[w, 0] and nrm[i] <= windows[w, 1]:
                    out[w] += 1
    return out


@njit(cache=True)
def batch_shell_counts(n, lo, hi, d, windows, seed, t0, T, lane):
    counts = np.empty((T, windows.shape[0]), dtype=np.int64)
    total = np.empty(T, dtype=np.int64)
    for t in range(T):
        st = new_state(seed, np.uint64(t0 + t), lane)
        pts, nrm = shell_sample(n, lo, hi, d, st)
        counts[t] = window_counts(pts, nrm, windows)
        total[t] = pts.shape[0]
    return counts, total


@njit(cache=True)
def nu_min_point(n, lo, hi, d, st):
    """Smallest-norm point of the process with intensity
    n e^{-||x||} exp(-n e^{-||x||}) on lo < ||x|| <= hi, by thinning.

    Proposals are walked from the inner edge outwards, so the first accepted
    proposal is the minimum.  Returns (found, norm, point).
    """
    if hi == np.inf:
        s_hi = 0.0
    else:
        s_hi = math.exp(log_gamma_tail(d, hi))
    s_lo = math.exp(log_gamma_tail(d, lo))
    pos = n * s_lo
    bottom = n * s_hi
    p = np.empty(d)
    while True:
        pos -= -math.log(next_uniform(st))
        if pos <= bottom:
            return False, np.nan, p
        s = pos / n
        r = gamma_tail_inv_log(d, math.log(s), math.log1p(-s))
        # acceptance exp(-n e^{-r}) <= 1
        accept = math.exp(-math.exp(math.log(n) - r))
        u = next_uniform(st)
        if u < accept:
            tot = 0.0
            for j in range(d):
                p[j] = -math.log(next_uniform(st))
                tot += p[j]
            for j in range(d):
                p[j] = r * p[j] / tot
            return True, r, p


@njit(cache=True)
def batch_nu_min(n, lo, hi, d, seed, t0, T, lane):
    found = np.empty(T, dtype=np.bool_)
    norm = np.empty(T)
    pts = np.empty((T, d))
    for t in range(T):
        st = new_state(seed, np.uint64(t0 + t), lane)
        f, r, p = nu_min_point(n, lo, hi, d, st)
        found[t] = f
        norm[t] = r
        pts[t] = p
    return found, norm, pts
