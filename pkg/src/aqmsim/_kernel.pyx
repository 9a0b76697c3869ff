# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled slot loop.

Replicates _pykernel.run_kernel operation for operation: same SplitMix64
streams, same expression shapes, same evaluation order. Floating point stays
strictly IEEE (built without fast-math or FMA contraction), so results are
bit-identical to the pure-Python backend.
"""

from libc.math cimport pow as cpow

import numpy as np

from .estimators import DEP_RATE_EPS as _PY_EPS

cdef double DEP_RATE_EPS = _PY_EPS
cdef double INV_2_53 = 1.0 / 9007199254740992.0

cdef int POLICY_RED = 0
cdef int POLICY_ERED = 1
cdef int POLICY_HYBRID = 2
cdef int POLICY_FUZZY = 3


cdef inline unsigned long long _next_u64(unsigned long long* s) noexcept nogil:
    s[0] = s[0] + 0x9E3779B97F4A7C15ULL
    cdef unsigned long long z = s[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(unsigned long long* s) noexcept nogil:
    return <double>(_next_u64(s) >> 11) * INV_2_53


cdef inline double _clamp01(double x) noexcept nogil:
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


cdef inline double _ewma(double value, double weight, double observed) noexcept nogil:
    return (1.0 - weight) * value + weight * observed


cdef inline double _base_dp(double avg, double min_th, double max_th, double max_p) noexcept nogil:
    return _clamp01(max_p * (avg - min_th) / (max_th - min_th))


cdef inline double _count_adjust(double dp_base, long long count) noexcept nogil:
    cdef double prod = count * dp_base
    if prod >= 1.0:
        return 1.0
    return _clamp01(dp_base / (1.0 - prod))


def run_kernel(a):
    """Run the slot loop described by a KernelArgs; returns raw counters."""
    cdef double arrival_prob = a.arrival_prob
    cdef double departure_prob = a.departure_prob
    cdef long long total_slots = a.total_slots
    cdef long long warmup = a.warmup_slots
    cdef int capacity = a.capacity
    cdef int kind = a.policy_kind
    cdef double min_th = a.min_th
    cdef double max_th = a.max_th
    cdef double max_p = a.max_p
    cdef double min_th2 = a.min_th2
    cdef double max_th2 = a.max_th2
    cdef double max_th3 = a.max_th3
    cdef double queue_weight = a.queue_weight
    cdef double delay_weight = a.delay_weight
    cdef double w_arr = a.arrival_weight
    cdef double w_dep = a.departure_weight

    cdef unsigned long long traffic = a.traffic_seed
    cdef unsigned long long decisions = a.decision_seed

    cdef double[:, ::1] q_degrees = a.q_degrees
    cdef double[:, ::1] avg_terms = a.avg_terms
    cdef int[:, ::1] rules = a.rules
    cdef double[::1] grid_x = a.grid_x
    cdef double[:, ::1] mf_grid = a.mf_grid
    cdef int n_avg = avg_terms.shape[0]
    cdef int n_rules = rules.shape[0]
    cdef int n_out = mf_grid.shape[0]
    cdef int n_grid = grid_x.shape[0]

    ring_arr = np.zeros(capacity, dtype=np.int64)
    cdef long long[::1] ring = ring_arr
    adeg_arr = np.zeros(max(n_avg, 1), dtype=np.float64)
    cdef double[::1] adeg = adeg_arr
    acts_arr = np.zeros(max(n_out, 1), dtype=np.float64)
    cdef double[::1] acts = acts_arr
    cog_cache = {}

    cdef int head = 0
    cdef int size = 0
    cdef long long idle_since = 0
    cdef double avg = 0.0
    cdef double arr_est = 0.0
    cdef double dep_est = 0.0
    cdef long long count = -1

    cdef long long arrived = 0, departed = 0, loss = 0, dropped = 0
    cdef long long delay_sum = 0, mql_sum = 0, occ_warm = 0

    cdef long long t, enq
    cdef bint measured, drop
    cdef int q_start, qsize, tail, l, r, i, qi, ai, oi
    cdef double u_arr, u_dep, dp, d_esti, dep_obs, arr_obs
    cdef double x, aa, bb, cc, dd, v, act, mu, num, den, dp0
    cdef object key, cached

    for t in range(total_slots):
        measured = t >= warmup
        if t == warmup:
            occ_warm = size
        q_start = size

        u_arr = _uniform(&traffic)
        u_dep = _uniform(&traffic)

        if u_arr < arrival_prob:
            if measured:
                arrived += 1
            qsize = size
            if qsize == 0:
                avg = avg * cpow(1.0 - queue_weight, <double>(t - idle_since))
            else:
                avg = _ewma(avg, queue_weight, <double>qsize)

            if qsize == capacity:
                if measured:
                    loss += 1
            else:
                drop = False
                if kind == POLICY_RED:
                    if avg < min_th:
                        count = -1
                    elif avg < max_th:
                        count += 1
                        dp = _count_adjust(_base_dp(avg, min_th, max_th, max_p), count)
                        if _uniform(&decisions) < dp:
                            drop = True
                            count = 0
                    else:
                        drop = True
                        count = 0
                elif kind == POLICY_ERED or kind == POLICY_HYBRID:
                    if min_th2 <= avg < max_th3 and qsize >= min_th2:
                        count += 1
                        dp = _count_adjust(_base_dp(avg, min_th, max_th, max_p), count)
                        if kind == POLICY_HYBRID:
                            if dep_est > DEP_RATE_EPS:
                                d_esti = (arr_est / dep_est) * qsize
                            else:
                                d_esti = qsize / DEP_RATE_EPS
                            dp = _clamp01(dp + delay_weight * d_esti)
                        if _uniform(&decisions) < dp:
                            drop = True
                            count = 0
                    elif avg < min_th2 and qsize > max_th2:
                        count += 1
                        dp = _count_adjust(max_p, count)
                        if _uniform(&decisions) < dp:
                            drop = True
                            count = 0
                    elif avg >= max_th3:
                        drop = True
                        count = 0
                    else:
                        count = -1
                else:
                    if dep_est > DEP_RATE_EPS:
                        d_esti = (arr_est / dep_est) * qsize
                    else:
                        d_esti = qsize / DEP_RATE_EPS
                    x = avg / capacity
                    if x > 1.0:
                        x = 1.0
                    for l in range(n_avg):
                        aa = avg_terms[l, 0]
                        bb = avg_terms[l, 1]
                        cc = avg_terms[l, 2]
                        dd = avg_terms[l, 3]
                        if x < aa or x > dd:
                            v = 0.0
                        elif x < bb:
                            v = (x - aa) / (bb - aa)
                        elif x <= cc:
                            v = 1.0
                        else:
                            v = (dd - x) / (dd - cc)
                        adeg[l] = v
                    for l in range(n_out):
                        acts[l] = 0.0
                    for r in range(n_rules):
                        qi = rules[r, 0]
                        ai = rules[r, 1]
                        oi = rules[r, 2]
                        if qi >= 0:
                            act = q_degrees[qsize, qi]
                            if ai >= 0 and adeg[ai] < act:
                                act = adeg[ai]
                        else:
                            act = adeg[ai]
                        if act > acts[oi]:
                            acts[oi] = act
                    key = tuple([acts[l] for l in range(n_out)])
                    cached = cog_cache.get(key)
                    if cached is None:
                        num = 0.0
                        den = 0.0
                        for i in range(n_grid):
                            mu = 0.0
                            for l in range(n_out):
                                v = mf_grid[l, i]
                                act = acts[l]
                                if act < v:
                                    v = act
                                if v > mu:
                                    mu = v
                            num += mu * grid_x[i]
                            den += mu
                        dp0 = 0.0 if den == 0.0 else num / den
                        cog_cache[key] = dp0
                    else:
                        dp0 = cached
                    dp = _clamp01(dp0 + delay_weight * d_esti)
                    if _uniform(&decisions) < dp:
                        drop = True

                if drop:
                    if measured:
                        dropped += 1
                else:
                    tail = head + size
                    if tail >= capacity:
                        tail -= capacity
                    ring[tail] = t
                    size += 1
            if size == 0:
                idle_since = t

        dep_obs = 0.0
        if u_dep < departure_prob and size > 0:
            dep_obs = 1.0
            enq = ring[head]
            head += 1
            if head == capacity:
                head = 0
            size -= 1
            if measured:
                departed += 1
                delay_sum += t - enq
            if size == 0:
                idle_since = t

        dep_est = _ewma(dep_est, w_dep, dep_obs)
        if q_start != capacity:
            arr_obs = 1.0 if u_arr < arrival_prob else 0.0
            arr_est = _ewma(arr_est, w_arr, arr_obs)

        if measured:
            mql_sum += size

    return {
        "arrived": arrived,
        "departed": departed,
        "loss": loss,
        "dropped": dropped,
        "delay_sum": delay_sum,
        "mql_sum": mql_sum,
        "occ_warm": occ_warm,
        "occ_end": size,
    }
