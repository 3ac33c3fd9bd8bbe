"""Hot numeric kernels for the transient engine.

The per-timestep work (matrix assembly, dense solve, switch-region fixed
point, memristor state substeps) is written once and compiled with numba
when available. Setting MRLSIM_NO_NUMBA=1 selects the identical
pure-numpy/Python path, which is bit-compatible but slower; see
bench/bench_engine.py for the comparison.
"""

import os

import numpy as np


def _env_flag(name):
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = not _env_flag("MRLSIM_NO_NUMBA")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False

if USE_NUMBA:

    def _jit(fn):
        return njit(cache=True)(fn)

else:

    def _jit(fn):
        return fn


@_jit
def _stamp_g(A, a, b, g):
    if a > 0:
        A[a - 1, a - 1] += g
        if b > 0:
            A[a - 1, b - 1] -= g
            A[b - 1, a - 1] -= g
    if b > 0:
        A[b - 1, b - 1] += g


@_jit
def _stamp_i(rhs, a, b, i_ab):
    # injects i_ab into node a, pulls it from node b
    if a > 0:
        rhs[a - 1] += i_ab
    if b > 0:
        rhs[b - 1] -= i_ab


@_jit
def _mem_conductance(x, g_on, g_off, rlin):
    if rlin:
        r = x * (1.0 / g_on) + (1.0 - x) * (1.0 / g_off)
        return 1.0 / r
    return x * g_on + (1.0 - x) * g_off


@_jit
def _mem_dxdt(x, v, rate_k, v_char, p_exp):
    rate = rate_k * np.sinh(v / v_char)
    if rate == 0.0:
        return 0.0
    xc = min(max(x, 0.0), 1.0)
    p2 = 2.0 * p_exp
    if rate > 0.0:
        w = 1.0 - xc**p2
    else:
        w = 1.0 - (1.0 - xc) ** p2
    return rate * w


@_jit
def _mos_regions(v, mos_g, mos_s, mos_pol, mos_vth, out):
    for j in range(mos_g.size):
        vgs = v[mos_g[j]] - v[mos_s[j]]
        out[j] = 1 if mos_pol[j] * vgs > mos_vth[j] else 0


@_jit
def _solve_network(
    nn,
    res_a,
    res_b,
    res_g,
    cap_a,
    cap_b,
    cap_g,
    cap_ieq,
    vs_p,
    vs_n,
    vs_val,
    mem_a,
    mem_b,
    mem_gnow,
    mos_d,
    mos_g,
    mos_s,
    mos_pol,
    mos_vth,
    mos_gon,
    mos_goff,
    v_guess,
    max_iters,
):
    """One nonlinear network solve at fixed memristor states.

    Iterates linear solve <-> MOSFET switch-region update until the region
    assignment is stable. On oscillation past max_iters, the iterate with
    the smallest max node-voltage change wins (returned with converged=0).
    """
    ns = vs_p.size
    nmos = mos_d.size
    nu = nn - 1 + ns
    A = np.zeros((nu, nu))
    rhs = np.zeros(nu)
    mos_on = np.zeros(nmos, np.uint8)
    new_on = np.zeros(nmos, np.uint8)
    _mos_regions(v_guess, mos_g, mos_s, mos_pol, mos_vth, mos_on)
    v_prev = v_guess.copy()
    best_v = v_guess.copy()
    best_i = np.zeros(ns)
    best_delta = 1e300
    converged = 0
    for _ in range(max_iters):
        A[:, :] = 0.0
        rhs[:] = 0.0
        for j in range(res_a.size):
            _stamp_g(A, res_a[j], res_b[j], res_g[j])
        for j in range(cap_a.size):
            _stamp_g(A, cap_a[j], cap_b[j], cap_g[j])
            _stamp_i(rhs, cap_a[j], cap_b[j], cap_ieq[j])
        for j in range(mem_a.size):
            _stamp_g(A, mem_a[j], mem_b[j], mem_gnow[j])
        for j in range(nmos):
            g = mos_gon[j] if mos_on[j] == 1 else mos_goff[j]
            _stamp_g(A, mos_d[j], mos_s[j], g)
        for k in range(ns):
            row = nn - 1 + k
            p = vs_p[k]
            n = vs_n[k]
            if p > 0:
                A[p - 1, row] += 1.0
                A[row, p - 1] += 1.0
            if n > 0:
                A[n - 1, row] -= 1.0
                A[row, n - 1] -= 1.0
            rhs[row] = vs_val[k]
        sol = np.linalg.solve(A, rhs)
        v_new = np.zeros(nn)
        for i in range(1, nn):
            v_new[i] = sol[i - 1]
        _mos_regions(v_new, mos_g, mos_s, mos_pol, mos_vth, new_on)
        changed = False
        for j in range(nmos):
            if new_on[j] != mos_on[j]:
                changed = True
                break
        delta = 0.0
        for i in range(nn):
            d = abs(v_new[i] - v_prev[i])
            if d > delta:
                delta = d
        if not changed:
            converged = 1
            best_v = v_new
            for k in range(ns):
                best_i[k] = -sol[nn - 1 + k]
            break
        if delta < best_delta:
            best_delta = delta
            best_v = v_new.copy()
            for k in range(ns):
                best_i[k] = -sol[nn - 1 + k]
        for j in range(nmos):
            mos_on[j] = new_on[j]
        v_prev = v_new
    return best_v, best_i, converged


@_jit
def _advance_states(x, v, mem_a, mem_b, mem_pol, mem_rate, mem_vch, mem_pexp,
                    dt, substeps, clamp):
    """Explicit midpoint substeps at frozen branch voltage."""
    h = dt / substeps
    for j in range(mem_a.size):
        vm = mem_pol[j] * (v[mem_a[j]] - v[mem_b[j]])
        xj = x[j]
        for _ in range(substeps):
            k1 = _mem_dxdt(xj, vm, mem_rate[j], mem_vch[j], mem_pexp[j])
            xm = xj + 0.5 * h * k1
            # stiff drive: the half-step already crossed a rail, where the
            # window vanishes and a midpoint evaluation would stall; land on
            # the rail instead of sampling k2 there
            if clamp and xm >= 1.0:
                xj = 1.0
                break
            if clamp and xm <= 0.0:
                xj = 0.0
                break
            k2 = _mem_dxdt(xm, vm, mem_rate[j], mem_vch[j], mem_pexp[j])
            xj = xj + h * k2
            if clamp:
                xj = min(max(xj, 0.0), 1.0)
        x[j] = xj


@_jit
def _march(
    nn,
    n_steps,
    tstep,
    res_a,
    res_b,
    res_g,
    cap_a,
    cap_b,
    cap_c,
    cap_v0,
    vs_p,
    vs_n,
    vs_toff,
    vs_t,
    vs_v,
    mem_a,
    mem_b,
    mem_gon,
    mem_goff,
    mem_rlin,
    mem_pol,
    mem_rate,
    mem_vch,
    mem_pexp,
    x_init,
    mos_d,
    mos_g,
    mos_s,
    mos_pol,
    mos_vth,
    mos_gon,
    mos_goff,
    max_iters,
    substeps,
    clamp,
):
    """Fixed-step transient march; returns sample histories and warnings."""
    nT = n_steps + 1
    ns = vs_p.size
    nm = mem_a.size
    nc = cap_a.size
    vhist = np.zeros((nT, nn))
    ihist = np.zeros((nT, ns))
    xhist = np.zeros((nT, nm))
    osc_steps = np.full(64, -1, np.int64)
    n_osc = 0
    v = np.zeros(nn)
    x = x_init.copy()
    capv = cap_v0.copy()
    vs_val = np.zeros(ns)
    mem_gnow = np.zeros(nm)
    cap_g = np.zeros(nc)
    cap_ieq = np.zeros(nc)
    for st in range(nT):
        t = st * tstep
        for k in range(ns):
            lo = vs_toff[k]
            hi = vs_toff[k + 1]
            vs_val[k] = np.interp(t, vs_t[lo:hi], vs_v[lo:hi])
        for j in range(nm):
            mem_gnow[j] = _mem_conductance(x[j], mem_gon[j], mem_goff[j], mem_rlin[j])
        for j in range(nc):
            cap_g[j] = cap_c[j] / tstep
            cap_ieq[j] = cap_g[j] * capv[j]
        v, ibr, conv = _solve_network(
            nn,
            res_a,
            res_b,
            res_g,
            cap_a,
            cap_b,
            cap_g,
            cap_ieq,
            vs_p,
            vs_n,
            vs_val,
            mem_a,
            mem_b,
            mem_gnow,
            mos_d,
            mos_g,
            mos_s,
            mos_pol,
            mos_vth,
            mos_gon,
            mos_goff,
            v,
            max_iters,
        )
        if conv == 0:
            if n_osc < 64:
                osc_steps[n_osc] = st
            n_osc += 1
        vhist[st] = v
        ihist[st] = ibr
        xhist[st] = x
        if st < nT - 1:
            _advance_states(
                x, v, mem_a, mem_b, mem_pol, mem_rate, mem_vch, mem_pexp,
                tstep, substeps, clamp,
            )
            for j in range(nc):
                capv[j] = v[cap_a[j]] - v[cap_b[j]]
    return vhist, ihist, xhist, osc_steps, n_osc
