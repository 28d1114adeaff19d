# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the pure backend.

Same stepping logic as ``pure.py``, kept in lockstep; only the inner loops
are lowered to C. The adaptive RK4 march calls back into the Python risk
profile (profiles are arbitrary callables), which still removes the Python
interpreter from the per-step bookkeeping; the CRRA ascent runs entirely in
C.
"""

from libc.math cimport exp, fabs, isfinite, log, pow

import numpy as np

from ..errors import EngineError

cdef double _RK_ERR_DIV = 15.0


cdef double _risk_value(object risk_fn, double wealth) except -1.0:
    cdef double r = <double>risk_fn(wealth)
    if not isfinite(r) or r <= 0.0:
        raise EngineError("nonpositive-R", f"R({wealth!r}) = {r!r} must be finite and > 0")
    return r


cdef double _rk4_step(double g, double h, object risk_fn) except? -1e308:
    cdef double k1 = 1.0 / _risk_value(risk_fn, exp(g))
    cdef double k2 = 1.0 / _risk_value(risk_fn, exp(g + 0.5 * h * k1))
    cdef double k3 = 1.0 / _risk_value(risk_fn, exp(g + 0.5 * h * k2))
    cdef double k4 = 1.0 / _risk_value(risk_fn, exp(g + h * k3))
    return g + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


cdef double _march(double g, double s_from, double s_to, object risk_fn,
                   double rtol, double atol) except? -1e308:
    cdef double s = s_from
    cdef double h = s_to - s_from
    cdef double remaining, g_full, g_half, g_half2, err, tol, grow
    cdef bint last
    if h == 0.0:
        return g
    while True:
        remaining = s_to - s
        if fabs(remaining) <= 1e-15 * max(1.0, fabs(s_to)):
            return g
        last = fabs(h) >= fabs(remaining)
        if last:
            h = remaining
        g_full = _rk4_step(g, h, risk_fn)
        g_half = _rk4_step(g, 0.5 * h, risk_fn)
        g_half2 = _rk4_step(g_half, 0.5 * h, risk_fn)
        err = fabs(g_half2 - g_full) / _RK_ERR_DIV
        tol = atol + rtol * fabs(g_half2)
        if err <= tol:
            g = g_half2 + (g_half2 - g_full) / _RK_ERR_DIV
            if last:
                return g
            s += h
            grow = 4.0 if err == 0.0 else min(4.0, 0.9 * pow(tol / err, 0.2))
            h *= grow
        else:
            h *= max(0.1, 0.9 * pow(tol / err, 0.2))
            if fabs(h) < 1e-14 * max(1.0, fabs(s_to - s_from)):
                raise EngineError(
                    "ode-step-failure",
                    f"step size underflow near s={s!r} while integrating the payoff elasticity",
                )


def elasticity_profile(s_sorted, double lnF0, risk_fn, double rtol=1e-12, double atol=1e-14):
    """See pure.elasticity_profile; identical semantics."""
    s_arr = np.ascontiguousarray(s_sorted, dtype=np.float64)
    out_arr = np.empty_like(s_arr)
    cdef double[::1] s = s_arr
    cdef double[::1] out = out_arr
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t first_nonneg = np.searchsorted(s_arr, 0.0, side="left")
    cdef Py_ssize_t i
    cdef double g = lnF0
    cdef double prev = 0.0

    for i in range(first_nonneg, n):
        g = _march(g, prev, s[i], risk_fn, rtol, atol)
        out[i] = g
        prev = s[i]

    g = lnF0
    prev = 0.0
    for i in range(first_nonneg - 1, -1, -1):
        g = _march(g, prev, s[i], risk_fn, rtol, atol)
        out[i] = g
        prev = s[i]
    return out_arr


cdef inline double _u_crra(double F, double R) nogil:
    if R == 1.0:
        return log(F)
    return pow(F, 1.0 - R) / (1.0 - R)


cdef inline double _du_crra(double F, double R) nogil:
    if R == 1.0:
        return 1.0 / F
    return pow(F, -R)


cdef inline double _d2u_abs_crra(double F, double R) nogil:
    if R == 1.0:
        return 1.0 / (F * F)
    return R * pow(F, -R - 1.0)


def ascent_crra(F_start, bw, mw, double R, long max_steps=200000, double improve_tol=1e-12,
                long patience=200, double floor=1e-12):
    """See pure.ascent_crra; identical semantics, loops lowered to C."""
    bw_arr = np.ascontiguousarray(bw, dtype=np.float64)
    mw_arr = np.ascontiguousarray(mw, dtype=np.float64)
    F_arr = np.ascontiguousarray(F_start, dtype=np.float64).copy()
    cdef double[::1] bwv = bw_arr
    cdef double[::1] mwv = mw_arr
    cdef double[::1] F = F_arr
    cdef Py_ssize_t n = F.shape[0]
    trial_arr = np.empty_like(F_arr)
    d_arr = np.empty_like(F_arr)
    cdef double[::1] trial = trial_arr
    cdef double[::1] d = d_arr

    cdef Py_ssize_t i
    cdef double acc, J, J_trial, beta, num, den, dmax, eta, gi, hi, J_mark
    cdef long steps = 0
    cdef long mark = 0
    cdef bint converged = False

    acc = 0.0
    for i in range(n):
        if F[i] < floor:
            F[i] = floor
        acc += mwv[i] * F[i]
    for i in range(n):
        F[i] /= acc

    J = 0.0
    for i in range(n):
        J += bwv[i] * _u_crra(F[i], R)

    h_arr = np.empty_like(F_arr)
    cdef double[::1] h = h_arr

    eta = 1.0
    J_mark = J
    while steps < max_steps:
        steps += 1
        num = 0.0
        den = 0.0
        for i in range(n):
            gi = bwv[i] * _du_crra(F[i], R)
            hi = bwv[i] * _d2u_abs_crra(F[i], R)
            d[i] = gi
            h[i] = hi
            num += mwv[i] * gi / hi
            den += mwv[i] * mwv[i] / hi
        beta = num / den
        dmax = 0.0
        for i in range(n):
            d[i] = (d[i] - beta * mwv[i]) / h[i]
            if fabs(d[i]) > dmax:
                dmax = fabs(d[i])
        if dmax == 0.0:
            converged = True
            break
        if not isfinite(dmax):
            break
        acc = 0.0
        for i in range(n):
            trial[i] = F[i] + eta * d[i]
            if trial[i] < floor:
                trial[i] = floor
            acc += mwv[i] * trial[i]
        J_trial = 0.0
        for i in range(n):
            trial[i] /= acc
            J_trial += bwv[i] * _u_crra(trial[i], R)
        # Ties accepted: see pure.ascent_generic.
        if J_trial >= J:
            F_arr, trial_arr = trial_arr, F_arr
            F = F_arr
            trial = trial_arr
            J = J_trial
            eta = min(eta * 1.5, 1.0)
        else:
            eta *= 0.5
            if eta < 1e-13:
                converged = True
                break
        if steps - mark >= patience:
            if J - J_mark < improve_tol:
                converged = True
                break
            J_mark = J
            mark = steps
    return F_arr, J, steps, converged
