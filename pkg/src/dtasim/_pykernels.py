"""Pure-Python hot-loop kernels (trace generation + epoch loop).

This module and the compiled twin in ``_kernels.pyx`` implement exactly
the same arithmetic in exactly the same order, and must stay
bit-identical: the parity test suite compares their outputs with ==.
When editing either one, edit both.

Numeric conventions shared by both kernels:

* all sums are sequential left-to-right accumulation;
* min/max are written as comparisons (no libm calls);
* the compiled twin is built with -ffp-contract=off so no FMA fusion
  changes rounding.

Trace layout: float64 array of shape (epochs, n_classes, 5) with the
attribute order bandwidth, latency, jitter, packet_loss, demand.
Substream ``class_id * 5 + attribute`` of the seed drives each cell
column (see rng.py for the generator definition).
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateShareError
from .rng import Stream

BACKEND_NAME = "python"

MODEL_CONSTANT = 0
MODEL_UNIFORM = 1
MODEL_WALK = 2

POLICY_STATIC = 0
POLICY_LOAD_BALANCE = 1
POLICY_DYNAMIC = 2
POLICY_OPTIMAL = 3

_EPS = 1e-12
_LOAD_CAP = 1.0 - 1e-6
_ALLOC_FLOOR = 1e-9


def generate_trace(
    seed: int,
    epochs: int,
    n: int,
    model: int,
    mins,
    maxs,
    walk_step_fraction: float,
) -> np.ndarray:
    """Deterministic (epochs, n, 5) observation trace for one scenario."""
    out = np.empty((epochs, n, 5), dtype=np.float64)
    lo_list = [float(x) for x in mins]
    hi_list = [float(x) for x in maxs]
    for i in range(n):
        for a in range(5):
            lo = lo_list[a]
            hi = hi_list[a]
            mid = 0.5 * (lo + hi)
            if model == MODEL_CONSTANT:
                for e in range(epochs):
                    out[e, i, a] = mid
                continue
            stream = Stream(seed, i * 5 + a)
            if model == MODEL_UNIFORM:
                span = hi - lo
                for e in range(epochs):
                    out[e, i, a] = lo + stream.uniform() * span
            else:  # MODEL_WALK
                step_scale = walk_step_fraction * (hi - lo)
                v = mid
                out[0, i, a] = v
                for e in range(1, epochs):
                    v = v + (2.0 * stream.uniform() - 1.0) * step_scale
                    while v < lo or v > hi:
                        if v > hi:
                            v = 2.0 * hi - v
                        else:
                            v = 2.0 * lo - v
                    out[e, i, a] = v
    return out


def run_series(
    trace: np.ndarray,
    priority: np.ndarray,
    demanded_bw: np.ndarray,
    sensitivity: np.ndarray,
    max_latency: np.ndarray,
    max_jitter: np.ndarray,
    max_packet_loss: np.ndarray,
    pool_total: float,
    policy: int,
    initial_load: np.ndarray,
) -> dict:
    """Step one policy over a full trace, evolving per-class load.

    Returns arrays keyed raw, alloc, qos, load (load as used at each
    epoch), throughput_raw, throughput, effective, objective,
    violations (bitmask) and infeasible (per-epoch optimal fallback).
    """
    epochs, n, _ = trace.shape
    r = float(pool_total)

    tr = trace.tolist()
    p = [float(x) for x in priority]
    bdem = [float(x) for x in demanded_bw]
    sens = [float(x) for x in sensitivity]
    mlt = [float(x) for x in max_latency]
    mjt = [float(x) for x in max_jitter]
    mpk = [float(x) for x in max_packet_loss]
    load = [float(x) for x in initial_load]

    raw_out = np.empty((epochs, n), dtype=np.float64)
    alloc_out = np.empty((epochs, n), dtype=np.float64)
    qos_out = np.empty((epochs, n), dtype=np.float64)
    load_out = np.empty((epochs, n), dtype=np.float64)
    thr_raw_out = np.empty(epochs, dtype=np.float64)
    thr_out = np.empty(epochs, dtype=np.float64)
    eff_out = np.empty(epochs, dtype=np.float64)
    obj_out = np.empty(epochs, dtype=np.float64)
    viol_out = np.zeros((epochs, n), dtype=np.uint16)
    infeasible_out = np.zeros(epochs, dtype=np.uint8)

    for e in range(epochs):
        row = tr[e]

        qos = [0.0] * n
        for i in range(n):
            o = row[i]
            qos[i] = (
                (o[0] / bdem[i]) * (mlt[i] / o[1]) * (mjt[i] / o[2]) * (1.0 - o[3])
            )

        if policy == POLICY_STATIC:
            share = r / n
            raw = [share] * n
        elif policy == POLICY_LOAD_BALANCE:
            sum_headroom = 0.0
            sum_demand = 0.0
            for i in range(n):
                sum_headroom += 1.0 - load[i]
                sum_demand += row[i][4]
            if sum_headroom <= _EPS:
                raise DegenerateShareError("load headroom", epoch=e)
            if sum_demand <= _EPS:
                raise DegenerateShareError("demand", epoch=e)
            raw = [
                r * ((1.0 - load[i]) / sum_headroom) * (row[i][4] / sum_demand)
                for i in range(n)
            ]
        elif policy == POLICY_DYNAMIC:
            sum_priority = 0.0
            sum_sensitivity = 0.0
            sum_demand = 0.0
            sum_qos = 0.0
            sum_headroom = 0.0
            for i in range(n):
                sum_priority += p[i]
                sum_sensitivity += sens[i]
                sum_demand += row[i][4]
                sum_qos += qos[i]
                sum_headroom += 1.0 - load[i]
            if sum_priority <= _EPS:
                raise DegenerateShareError("priority", epoch=e)
            if sum_sensitivity <= _EPS:
                raise DegenerateShareError("latency sensitivity", epoch=e)
            if sum_demand <= _EPS:
                raise DegenerateShareError("demand", epoch=e)
            if sum_qos <= _EPS:
                raise DegenerateShareError("qos", epoch=e)
            if sum_headroom <= _EPS:
                raise DegenerateShareError("load headroom", epoch=e)
            baseline = r / n
            raw = [0.0] * n
            for i in range(n):
                b = row[i][0]
                bandwidth_factor = 1.0 if b == 0.0 else (b if b < r else r) / b
                priority_share = p[i] / sum_priority
                latency_share = sens[i] / sum_sensitivity
                demand_share = row[i][4] / sum_demand
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
                if bdem[i] > row[i][4]:
                    feasible = False
            if sum_lower > r:
                feasible = False
            if feasible:
                raw = list(bdem)
                budget = r - sum_lower
                rates = [p[i] / row[i][4] for i in range(n)]
                for i in sorted(range(n), key=lambda k: (-rates[k], k)):
                    if budget <= 0.0:
                        break
                    room = row[i][4] - raw[i]
                    take = room if room < budget else budget
                    if take > 0.0:
                        raw[i] += take
                        budget -= take
            else:
                raw = list(bdem)
                infeasible_out[e] = 1

        total_raw = 0.0
        for i in range(n):
            total_raw += raw[i]
        if total_raw > r:
            scale = r / total_raw
            alloc = [raw[i] * scale for i in range(n)]
        else:
            alloc = raw

        thr = 0.0
        for i in range(n):
            thr += alloc[i]
        eff = 0.0
        for i in range(n):
            q = qos[i]
            eff += alloc[i] * (q if q < 1.0 else 1.0)
        obj = 0.0
        for i in range(n):
            obj += p[i] * alloc[i] / row[i][4]

        for i in range(n):
            a = alloc[i]
            o = row[i]
            v = 0
            if a < 0.0:
                v |= 1
            if a > r:
                v |= 2
            if a < bdem[i]:
                v |= 4
            if o[1] > mlt[i]:
                v |= 8
            if o[2] > mjt[i]:
                v |= 16
            if o[3] > mpk[i]:
                v |= 32
            viol_out[e, i] = v

            raw_out[e, i] = raw[i]
            alloc_out[e, i] = a
            qos_out[e, i] = qos[i]
            load_out[e, i] = load[i]

        thr_raw_out[e] = total_raw
        thr_out[e] = thr
        eff_out[e] = eff
        obj_out[e] = obj

        for i in range(n):
            a = alloc[i]
            floored = a if a > _ALLOC_FLOOR else _ALLOC_FLOOR
            u = row[i][4] / floored
            mapped = u / (1.0 + u)
            load[i] = mapped if mapped < _LOAD_CAP else _LOAD_CAP

    return {
        "raw": raw_out,
        "alloc": alloc_out,
        "qos": qos_out,
        "load": load_out,
        "throughput_raw": thr_raw_out,
        "throughput": thr_out,
        "effective": eff_out,
        "objective": obj_out,
        "violations": viol_out,
        "infeasible": infeasible_out,
    }
