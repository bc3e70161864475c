"""Compiled per-step arithmetic for the simulation engine.

The engine packs a scenario into a flat parameter vector plus the three
battery curves and calls into these functions, either one step at a time
(closed-loop policies) or for a whole open-loop run. Numba compiles them when
it is installed; otherwise they run as plain Python with identical results.
"""

from __future__ import annotations

import numpy as np

from .thermal import FAN_AIR_DENSITY, FAN_AIR_SPECIFIC_HEAT

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn


# parameter vector layout
DT, UA, HEAT_CAP, BASE_POWER, POWER_SPAN, UNIT_COUNT = 0, 1, 2, 3, 4, 5
RESERVE, CAPACITY, DISCHARGE_FLOOR, CHARGE_FLOOR, SHUTDOWN = 6, 7, 8, 9, 10
REF_POWER, MAX_CHARGE, CHARGE_EFF = 11, 12, 13
SETPOINT, APPROACH, HAS_FAN, FAN_P, FAN_AF, FAN_MAX_AF = 14, 15, 16, 17, 18, 19
CUTOFF, RESUME, AVAIL_U, FAN_HEAT, PULL_STEPS = 20, 21, 22, 23, 24
N_PARAMS = 25

# record row layout, same order as engine.StepRecord
N_COLUMNS = 17

RHO_C = FAN_AIR_DENSITY * FAN_AIR_SPECIFIC_HEAT
FEASIBILITY_RTOL = 1e-12
BISECT_ITERATIONS = 40


@njit(cache=True)
def interp(x, xs, ys):
    """Piecewise-linear lookup, clamped to the end values."""
    n = len(xs)
    if x <= xs[0]:
        return ys[0]
    if x >= xs[n - 1]:
        return ys[n - 1]
    k = 1
    while xs[k] < x:
        k += 1
    w = (x - xs[k - 1]) / (xs[k] - xs[k - 1])
    return ys[k - 1] + w * (ys[k] - ys[k - 1])


@njit(cache=True)
def fan_output(p, t_enc, t_amb, heat, enabled):
    setpoint = p[SETPOINT]
    above_set = t_enc > setpoint
    target = max(setpoint, t_amb + p[APPROACH])
    delta_air = t_enc - t_amb
    if p[HAS_FAN] == 0.0 or not enabled or t_enc <= target:
        return 0.0, 0.0, 0.0, above_set and delta_air <= 0.0
    if delta_air <= 0.0:
        return 0.0, 0.0, 0.0, True
    steady = heat + p[UA] * (t_amb - t_enc)
    pull = p[HEAT_CAP] * (t_enc - target) / (p[PULL_STEPS] * p[DT])
    q = max(steady, 0.0) + pull
    airflow = q / (RHO_C * delta_air)
    if airflow > p[FAN_MAX_AF]:
        airflow = p[FAN_MAX_AF]
        q = RHO_C * airflow * delta_air
    r = airflow / p[FAN_AF]
    return q, p[FAN_P] * r * r * r, airflow, False


@njit(cache=True)
def extraction(p, cap_x, cap_y, dis_x, dis_y, t_enc, power):
    if t_enc >= p[SHUTDOWN]:
        return 0.0
    f = interp(t_enc, cap_x, cap_y) * interp(power / p[REF_POWER], dis_x, dis_y)
    return min(1.0, f)


@njit(cache=True)
def feasible(p, cap_x, cap_y, dis_x, dis_y, load, solar, above, t_enc, can_discharge):
    deficit = load - solar
    if deficit <= 0.0:
        return True
    if not can_discharge or above <= 0.0:
        return False
    f = extraction(p, cap_x, cap_y, dis_x, dis_y, t_enc, deficit)
    return deficit * p[DT] <= above * f * (1.0 + FEASIBILITY_RTOL)


@njit(cache=True)
def max_deficit(p, cap_x, cap_y, dis_x, dis_y, t_enc, above):
    """Largest battery-covered power (W) the energy above the reserve can carry for one step.

    Solves ``d * dt = above * min(1, cap(T) * g(d / ref))`` piece by piece;
    the left side grows and the right side shrinks with ``d``, so the root
    is unique. Returns -1 when no piece holds it.
    """
    dt = p[DT]
    ref = p[REF_POWER]
    c = interp(t_enc, cap_x, cap_y)
    d = above / dt
    if c * interp(d / ref, dis_x, dis_y) >= 1.0:
        return d
    ac = above * c
    n = len(dis_x)
    for k in range(n + 1):
        # piece k spans [lo, hi] in watts with g = alpha + beta * d there
        if k == 0:
            lo, hi, alpha, beta = 0.0, dis_x[0] * ref, dis_y[0], 0.0
        elif k == n:
            lo, hi, alpha, beta = dis_x[n - 1] * ref, np.inf, dis_y[n - 1], 0.0
        else:
            lo, hi = dis_x[k - 1] * ref, dis_x[k] * ref
            beta = (dis_y[k] - dis_y[k - 1]) / (hi - lo)
            alpha = dis_y[k - 1] - beta * lo
        denom = dt - ac * beta
        if hi < lo or denom <= 0.0:
            continue
        d = ac * alpha / denom
        if lo - 1e-9 * max(1.0, lo) <= d <= hi + 1e-9 * max(1.0, hi):
            return d
    return -1.0


@njit(cache=True)
def advance(p, cap_x, cap_y, dis_x, dis_y, chg_x, chg_y,
            t_enc, stored, halted, time, t_amb, solar, u_req, fan_enabled, out):
    """One engine step; writes the record into ``out`` and returns the new state."""
    dt = p[DT]
    can_discharge = p[DISCHARGE_FLOOR] <= t_enc < p[SHUTDOWN]
    can_charge = p[CHARGE_FLOOR] < t_enc < p[SHUTDOWN]
    if halted and t_enc <= p[RESUME]:
        halted = False
    if not halted and t_enc >= p[CUTOFF]:
        halted = True
    u = 0.0 if halted else u_req
    above = stored - p[RESERVE]

    p_proc = p[BASE_POWER] + u * p[POWER_SPAN]
    q_diss, fan_p, airflow, _ = fan_output(p, t_enc, t_amb, p_proc, fan_enabled)
    powered = True
    if not feasible(p, cap_x, cap_y, dis_x, dis_y, p_proc + fan_p, solar, above, t_enc, can_discharge):
        p0 = p[BASE_POWER]
        q0, f0, a0, _ = fan_output(p, t_enc, t_amb, p0, fan_enabled)
        if feasible(p, cap_x, cap_y, dis_x, dis_y, p0 + f0, solar, above, t_enc, can_discharge):
            # largest utilization the energy on hand can carry
            lo = 0.0
            hi = u
            iterations = BISECT_ITERATIONS
            if f0 == 0.0 and fan_p == 0.0 and p[POWER_SPAN] > 0.0:
                # fan idle at both ends means idle throughout, so load is linear in u
                d = max_deficit(p, cap_x, cap_y, dis_x, dis_y, t_enc, above) if can_discharge else 0.0
                if d >= 0.0:
                    guess = min(u, (solar + d - p0) / p[POWER_SPAN])
                    if guess >= 0.0 and feasible(p, cap_x, cap_y, dis_x, dis_y, p0 + guess * p[POWER_SPAN],
                                                 solar, above, t_enc, can_discharge):
                        lo = guess
                        iterations = 0
            for _ in range(iterations):
                mid = 0.5 * (lo + hi)
                pm = p[BASE_POWER] + mid * p[POWER_SPAN]
                qm, fm, am, _ = fan_output(p, t_enc, t_amb, pm, fan_enabled)
                if feasible(p, cap_x, cap_y, dis_x, dis_y, pm + fm, solar, above, t_enc, can_discharge):
                    lo = mid
                else:
                    hi = mid
            u = lo
            p_proc = p[BASE_POWER] + u * p[POWER_SPAN]
            q_diss, fan_p, airflow, _ = fan_output(p, t_enc, t_amb, p_proc, fan_enabled)
        else:
            u = 0.0
            q_diss, fan_p, airflow = 0.0, 0.0, 0.0
            if feasible(p, cap_x, cap_y, dis_x, dis_y, p0, solar, above, t_enc, can_discharge):
                p_proc = p0
            else:
                p_proc = 0.0
                powered = False

    # electrical energy: solar first, battery covers the deficit, surplus charges
    load_e = (p_proc + fan_p) * dt
    solar_e = solar * dt
    direct = load_e if load_e < solar_e else solar_e
    deficit_e = load_e - direct
    delivered = 0.0
    drained = 0.0
    if deficit_e > 0.0:
        f = extraction(p, cap_x, cap_y, dis_x, dis_y, t_enc, deficit_e / dt)
        delivered = deficit_e
        drained = deficit_e / f
        stored = max(stored - drained, min(p[RESERVE], stored))
    charged = 0.0
    surplus = solar_e - direct
    if surplus > 0.0 and can_charge and p[MAX_CHARGE] > 0.0:
        cap = p[MAX_CHARGE] * interp(t_enc, chg_x, chg_y) * dt
        accepted = min(min(surplus, cap) * p[CHARGE_EFF], p[CAPACITY] - stored)
        if accepted > 0.0:
            stored += accepted
            charged = accepted / p[CHARGE_EFF]

    heat = p_proc + (fan_p if p[FAN_HEAT] != 0.0 else 0.0)
    q_trans = p[UA] * (t_amb - t_enc)
    t_new = t_enc + (q_trans + heat - q_diss) * dt / p[HEAT_CAP]

    u_act = u if powered else 0.0
    work = p[UNIT_COUNT] * u_act * dt
    u_min = min(p[AVAIL_U], u_req)
    available = powered and u_act >= u_min - 1e-12

    out[0] = time
    out[1] = t_amb
    out[2] = t_enc
    out[3] = u_req
    out[4] = u_act
    out[5] = p_proc
    out[6] = fan_p
    out[7] = airflow
    out[8] = solar
    out[9] = charged
    out[10] = delivered
    out[11] = stored
    out[12] = 1.0 if available else 0.0
    out[13] = work
    out[14] = drained
    out[15] = direct
    out[16] = 1.0 if powered else 0.0
    return t_new, stored, halted


@njit(cache=True)
def run_open_loop(p, cap_x, cap_y, dis_x, dis_y, chg_x, chg_y,
                  times, t_amb, solar, u_req, t_enc, stored, halted):
    n = len(times)
    out = np.empty((n, N_COLUMNS))
    for i in range(n):
        t_enc, stored, halted = advance(
            p, cap_x, cap_y, dis_x, dis_y, chg_x, chg_y,
            t_enc, stored, halted, times[i], t_amb[i], solar[i], u_req[i], True, out[i],
        )
    return out, t_enc, stored, halted
