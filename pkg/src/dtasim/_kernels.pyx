# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of _pykernels.py.

Same arithmetic, same operation order, bit-identical output; the parity
tests compare the two backends with exact equality.  Built with
-ffp-contract=off so the C compiler cannot fuse multiply-adds.  When
editing either backend, edit both.

The RNG (mix64 substream derivation + xorshift64* step) is restated
here in C; rng.py is the reference definition.
"""

import numpy as np

from .errors import DegenerateShareError

from libc.stdint cimport uint64_t

BACKEND_NAME = "c"

MODEL_CONSTANT = 0
MODEL_UNIFORM = 1
MODEL_WALK = 2

POLICY_STATIC = 0
POLICY_LOAD_BALANCE = 1
POLICY_DYNAMIC = 2
POLICY_OPTIMAL = 3

cdef uint64_t GOLDEN_C = 0x9E3779B97F4A7C15
cdef uint64_t MIX1_C = 0xBF58476D1CE4E5B9
cdef uint64_t MIX2_C = 0x94D049BB133111EB
cdef uint64_t STAR_C = 0x2545F4914F6CDD1D
# 2^-53, written as an exact division so the constant is identical to
# the Python side's 2.0**-53.
cdef double INV53_C = 1.0 / 9007199254740992.0

cdef double EPS_C = 1e-12
cdef double LOAD_CAP_C = 1.0 - 1e-6
cdef double ALLOC_FLOOR_C = 1e-9


cdef inline uint64_t c_mix64(uint64_t seed, uint64_t k) nogil:
    cdef uint64_t z = seed + (k + 1) * GOLDEN_C
    z = (z ^ (z >> 30)) * MIX1_C
    z = (z ^ (z >> 27)) * MIX2_C
    z = z ^ (z >> 31)
    if z == 0:
        z = GOLDEN_C
    return z


cdef inline uint64_t c_next_u64(uint64_t *s) nogil:
    cdef uint64_t x = s[0]
    x ^= x >> 12
    x = x ^ (x << 25)
    x ^= x >> 27
    s[0] = x
    return x * STAR_C


cdef inline double c_uniform(uint64_t *s) nogil:
    return <double> (c_next_u64(s) >> 11) * INV53_C


def generate_trace(
    unsigned long long seed,
    Py_ssize_t epochs,
    Py_ssize_t n,
    int model,
    mins,
    maxs,
    double walk_step_fraction,
):
    """Deterministic (epochs, n, 5) observation trace for one scenario."""
    out_arr = np.empty((epochs, n, 5), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef double lo_c[5]
    cdef double hi_c[5]
    cdef Py_ssize_t a, i, e
    cdef double lo, hi, mid, span, step_scale, v
    cdef uint64_t state

    for a in range(5):
        lo_c[a] = float(mins[a])
        hi_c[a] = float(maxs[a])

    for i in range(n):
        for a in range(5):
            lo = lo_c[a]
            hi = hi_c[a]
            mid = 0.5 * (lo + hi)
            if model == MODEL_CONSTANT:
                for e in range(epochs):
                    out[e, i, a] = mid
                continue
            state = c_mix64(seed, <uint64_t> (i * 5 + a))
            if model == MODEL_UNIFORM:
                span = hi - lo
                for e in range(epochs):
                    out[e, i, a] = lo + c_uniform(&state) * span
            else:  # MODEL_WALK
                step_scale = walk_step_fraction * (hi - lo)
                v = mid
                out[0, i, a] = v
                for e in range(1, epochs):
                    v = v + (2.0 * c_uniform(&state) - 1.0) * step_scale
                    while v < lo or v > hi:
                        if v > hi:
                            v = 2.0 * hi - v
                        else:
                            v = 2.0 * lo - v
                    out[e, i, a] = v
    return out_arr


def run_series(
    trace,
    priority,
    demanded_bw,
    sensitivity,
    max_latency,
    max_jitter,
    max_packet_loss,
    double pool_total,
    int policy,
    initial_load,
):
    """Step one policy over a full trace, evolving per-class load."""
    cdef double[:, :, ::1] tr = np.ascontiguousarray(trace, dtype=np.float64)
    cdef double[::1] p = np.ascontiguousarray(priority, dtype=np.float64)
    cdef double[::1] bdem = np.ascontiguousarray(demanded_bw, dtype=np.float64)
    cdef double[::1] sens = np.ascontiguousarray(sensitivity, dtype=np.float64)
    cdef double[::1] mlt = np.ascontiguousarray(max_latency, dtype=np.float64)
    cdef double[::1] mjt = np.ascontiguousarray(max_jitter, dtype=np.float64)
    cdef double[::1] mpk = np.ascontiguousarray(max_packet_loss, dtype=np.float64)

    cdef Py_ssize_t epochs = tr.shape[0]
    cdef Py_ssize_t n = tr.shape[1]
    cdef double r = pool_total

    load_arr = np.array(initial_load, dtype=np.float64)
    cdef double[::1] load = load_arr

    raw_arr = np.empty((epochs, n), dtype=np.float64)
    alloc_arr = np.empty((epochs, n), dtype=np.float64)
    qos_arr = np.empty((epochs, n), dtype=np.float64)
    load_out_arr = np.empty((epochs, n), dtype=np.float64)
    thr_raw_arr = np.empty(epochs, dtype=np.float64)
    thr_arr = np.empty(epochs, dtype=np.float64)
    eff_arr = np.empty(epochs, dtype=np.float64)
    obj_arr = np.empty(epochs, dtype=np.float64)
    viol_arr = np.zeros((epochs, n), dtype=np.uint16)
    infeasible_arr = np.zeros(epochs, dtype=np.uint8)

    cdef double[:, ::1] raw_out = raw_arr
    cdef double[:, ::1] alloc_out = alloc_arr
    cdef double[:, ::1] qos_out = qos_arr
    cdef double[:, ::1] load_out = load_out_arr
    cdef double[::1] thr_raw_out = thr_raw_arr
    cdef double[::1] thr_out = thr_arr
    cdef double[::1] eff_out = eff_arr
    cdef double[::1] obj_out = obj_arr
    cdef unsigned short[:, ::1] viol_out = viol_arr
    cdef unsigned char[::1] infeasible_out = infeasible_arr

    scratch = np.empty((4, n), dtype=np.float64)
    cdef double[::1] qos = scratch[0]
    cdef double[::1] raw = scratch[1]
    cdef double[::1] alloc = scratch[2]
    cdef double[::1] rates = scratch[3]
    cdef Py_ssize_t[::1] order = np.empty(n, dtype=np.intp)

    cdef Py_ssize_t e, i, j, io, key
    cdef double share, sum_headroom, sum_demand, sum_priority, sum_sensitivity
    cdef double sum_qos, baseline, b, bandwidth_factor, priority_share
    cdef double latency_share, demand_share, qos_share, load_share
    cdef double sum_lower, budget, room, take, kr
    cdef double total_raw, scale, thr, eff, obj, q, a_val, u, mapped, floored
    cdef bint feasible, scaled
    cdef int v

    for e in range(epochs):
        for i in range(n):
            qos[i] = (
                (tr[e, i, 0] / bdem[i])
                * (mlt[i] / tr[e, i, 1])
                * (mjt[i] / tr[e, i, 2])
                * (1.0 - tr[e, i, 3])
            )

        if policy == POLICY_STATIC:
            share = r / n
            for i in range(n):
                raw[i] = share
        elif policy == POLICY_LOAD_BALANCE:
            sum_headroom = 0.0
            sum_demand = 0.0
            for i in range(n):
                sum_headroom += 1.0 - load[i]
                sum_demand += tr[e, i, 4]
            if sum_headroom <= EPS_C:
                raise DegenerateShareError("load headroom", epoch=e)
            if sum_demand <= EPS_C:
                raise DegenerateShareError("demand", epoch=e)
            for i in range(n):
                raw[i] = (
                    r * ((1.0 - load[i]) / sum_headroom) * (tr[e, i, 4] / sum_demand)
                )
        elif policy == POLICY_DYNAMIC:
            sum_priority = 0.0
            sum_sensitivity = 0.0
            sum_demand = 0.0
            sum_qos = 0.0
            sum_headroom = 0.0
            for i in range(n):
                sum_priority += p[i]
                sum_sensitivity += sens[i]
                sum_demand += tr[e, i, 4]
                sum_qos += qos[i]
                sum_headroom += 1.0 - load[i]
            if sum_priority <= EPS_C:
                raise DegenerateShareError("priority", epoch=e)
            if sum_sensitivity <= EPS_C:
                raise DegenerateShareError("latency sensitivity", epoch=e)
            if sum_demand <= EPS_C:
                raise DegenerateShareError("demand", epoch=e)
            if sum_qos <= EPS_C:
                raise DegenerateShareError("qos", epoch=e)
            if sum_headroom <= EPS_C:
                raise DegenerateShareError("load headroom", epoch=e)
            baseline = r / n
            for i in range(n):
                b = tr[e, i, 0]
                bandwidth_factor = 1.0 if b == 0.0 else (b if b < r else r) / b
                priority_share = p[i] / sum_priority
                latency_share = sens[i] / sum_sensitivity
                demand_share = tr[e, i, 4] / sum_demand
                qos_share = qos[i] / sum_qos
                load_share = (1.0 - load[i]) / sum_headroom
                raw[i] = (
                    r
                    * (
                        priority_share
                        * bandwidth_factor
                        * latency_share
                        * demand_share
                        * qos_share
                        * load_share
                    )
                    + baseline
                )
        else:  # POLICY_OPTIMAL
            sum_lower = 0.0
            feasible = True
            for i in range(n):
                sum_lower += bdem[i]
                if bdem[i] > tr[e, i, 4]:
                    feasible = False
            if sum_lower > r:
                feasible = False
            if feasible:
                for i in range(n):
                    raw[i] = bdem[i]
                    rates[i] = p[i] / tr[e, i, 4]
                    order[i] = i
                # insertion sort: rate descending, ties by index ascending
                for i in range(1, n):
                    key = order[i]
                    kr = rates[key]
                    j = i - 1
                    while j >= 0 and (
                        rates[order[j]] < kr
                        or (rates[order[j]] == kr and order[j] > key)
                    ):
                        order[j + 1] = order[j]
                        j -= 1
                    order[j + 1] = key
                budget = r - sum_lower
                for io in range(n):
                    if budget <= 0.0:
                        break
                    i = order[io]
                    room = tr[e, i, 4] - raw[i]
                    take = room if room < budget else budget
                    if take > 0.0:
                        raw[i] += take
                        budget -= take
            else:
                for i in range(n):
                    raw[i] = bdem[i]
                infeasible_out[e] = 1

        total_raw = 0.0
        for i in range(n):
            total_raw += raw[i]
        scaled = total_raw > r
        if scaled:
            scale = r / total_raw
            for i in range(n):
                alloc[i] = raw[i] * scale
        else:
            for i in range(n):
                alloc[i] = raw[i]

        thr = 0.0
        for i in range(n):
            thr += alloc[i]
        eff = 0.0
        for i in range(n):
            q = qos[i]
            eff += alloc[i] * (q if q < 1.0 else 1.0)
        obj = 0.0
        for i in range(n):
            obj += p[i] * alloc[i] / tr[e, i, 4]

        for i in range(n):
            a_val = alloc[i]
            v = 0
            if a_val < 0.0:
                v |= 1
            if a_val > r:
                v |= 2
            if a_val < bdem[i]:
                v |= 4
            if tr[e, i, 1] > mlt[i]:
                v |= 8
            if tr[e, i, 2] > mjt[i]:
                v |= 16
            if tr[e, i, 3] > mpk[i]:
                v |= 32
            viol_out[e, i] = <unsigned short> v

            raw_out[e, i] = raw[i]
            alloc_out[e, i] = a_val
            qos_out[e, i] = qos[i]
            load_out[e, i] = load[i]

        thr_raw_out[e] = total_raw
        thr_out[e] = thr
        eff_out[e] = eff
        obj_out[e] = obj

        for i in range(n):
            a_val = alloc[i]
            floored = a_val if a_val > ALLOC_FLOOR_C else ALLOC_FLOOR_C
            u = tr[e, i, 4] / floored
            mapped = u / (1.0 + u)
            load[i] = mapped if mapped < LOAD_CAP_C else LOAD_CAP_C

    return {
        "raw": raw_arr,
        "alloc": alloc_arr,
        "qos": qos_arr,
        "load": load_out_arr,
        "throughput_raw": thr_raw_arr,
        "throughput": thr_arr,
        "effective": eff_arr,
        "objective": obj_arr,
        "violations": viol_arr,
        "infeasible": infeasible_arr,
    }
