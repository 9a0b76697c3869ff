"""Pure-Python slot loop.

Fallback backend used when the compiled extension is unavailable. The
compiled kernel in _kernel.pyx replicates this loop operation for operation
(same expressions, same evaluation order, same random streams), so the two
backends produce bit-identical counters.

Per slot, in order: (1) the arrival draw; an arriving packet first updates
the average queue length, is lost if the buffer is full, and otherwise goes
through the policy's drop decision; (2) the departure draw, serving the head
of the queue when possible; (3) the per-slot rate-filter update, with the
arrival filter frozen if the buffer was full at arrival-evaluation time.
Counters only accumulate once the warm-up window has passed.
"""
from __future__ import annotations

from collections import deque

from .estimators import DEP_RATE_EPS, ewma_step, idle_decay
from .policies import base_drop_probability, clamp01, count_adjust
from .rng import SplitMix64

POLICY_RED = 0
POLICY_ERED = 1
POLICY_HYBRID = 2
POLICY_FUZZY = 3


def run_kernel(a) -> dict:
    """Run the slot loop described by a KernelArgs; returns raw counters."""
    arrival_prob = a.arrival_prob
    departure_prob = a.departure_prob
    total_slots = a.total_slots
    warmup = a.warmup_slots
    capacity = a.capacity
    kind = a.policy_kind
    params = a.red_params
    th = a.thresholds
    delay_weight = a.delay_weight
    w_arr = a.arrival_weight
    w_dep = a.departure_weight
    queue_weight = a.queue_weight
    tables = a.tables

    traffic = SplitMix64(a.traffic_seed)
    decisions = SplitMix64(a.decision_seed)

    queue: deque[int] = deque()
    idle_since = 0
    avg = 0.0
    arr_est = 0.0
    dep_est = 0.0
    count = -1

    arrived = departed = loss = dropped = 0
    delay_sum = 0
    mql_sum = 0
    occ_warm = 0

    for t in range(total_slots):
        measured = t >= warmup
        if t == warmup:
            occ_warm = len(queue)
        q_start = len(queue)

        u_arr = traffic.uniform()
        u_dep = traffic.uniform()

        if u_arr < arrival_prob:
            if measured:
                arrived += 1
            qsize = len(queue)
            if qsize == 0:
                avg = idle_decay(avg, queue_weight, t - idle_since)
            else:
                avg = ewma_step(avg, queue_weight, qsize)

            if qsize == capacity:
                if measured:
                    loss += 1
            else:
                drop = False
                if kind == POLICY_RED:
                    if avg < params.min_th:
                        count = -1
                    elif avg < params.max_th:
                        count += 1
                        dp = count_adjust(base_drop_probability(avg, params), count)
                        if decisions.uniform() < dp:
                            drop = True
                            count = 0
                    else:
                        drop = True
                        count = 0
                elif kind == POLICY_ERED or kind == POLICY_HYBRID:
                    if th.min_th2 <= avg < th.max_th3 and qsize >= th.min_th2:
                        count += 1
                        dp = count_adjust(base_drop_probability(avg, params), count)
                        if kind == POLICY_HYBRID:
                            if dep_est > DEP_RATE_EPS:
                                d_esti = (arr_est / dep_est) * qsize
                            else:
                                d_esti = qsize / DEP_RATE_EPS
                            dp = clamp01(dp + delay_weight * d_esti)
                        if decisions.uniform() < dp:
                            drop = True
                            count = 0
                    elif avg < th.min_th2 and qsize > th.max_th2:
                        count += 1
                        dp = count_adjust(params.max_p, count)
                        if decisions.uniform() < dp:
                            drop = True
                            count = 0
                    elif avg >= th.max_th3:
                        drop = True
                        count = 0
                    else:
                        count = -1
                else:
                    if dep_est > DEP_RATE_EPS:
                        d_esti = (arr_est / dep_est) * qsize
                    else:
                        d_esti = qsize / DEP_RATE_EPS
                    dp = clamp01(tables.initial_dp(qsize, min(avg / capacity, 1.0))
                                 + delay_weight * d_esti)
                    if decisions.uniform() < dp:
                        drop = True

                if drop:
                    if measured:
                        dropped += 1
                else:
                    queue.append(t)
            if not queue:
                idle_since = t

        dep_obs = 0.0
        if u_dep < departure_prob and queue:
            dep_obs = 1.0
            enq = queue.popleft()
            if measured:
                departed += 1
                delay_sum += t - enq
            if not queue:
                idle_since = t

        dep_est = ewma_step(dep_est, w_dep, dep_obs)
        if q_start != capacity:
            arr_obs = 1.0 if u_arr < arrival_prob else 0.0
            arr_est = ewma_step(arr_est, w_arr, arr_obs)

        if measured:
            mql_sum += len(queue)

    return {
        "arrived": arrived,
        "departed": departed,
        "loss": loss,
        "dropped": dropped,
        "delay_sum": delay_sum,
        "mql_sum": mql_sum,
        "occ_warm": occ_warm,
        "occ_end": len(queue),
    }
