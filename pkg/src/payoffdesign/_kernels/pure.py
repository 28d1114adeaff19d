"""Pure numpy/Python backend for the two hot kernels.

The compiled extension (``_speedups``) implements the same two entry points
with identical stepping logic; whichever is importable wins at package import
(see ``__init__``). Keep the algorithms in lockstep: tests assert the two
backends agree to tight tolerances on shared fixtures.
"""

from __future__ import annotations

import numpy as np

from ..errors import EngineError

# Step-doubling Richardson factor for classic RK4 (order 4): err ~ diff / (2^4 - 1).
_RK_ERR_DIV = 15.0


def _risk_value(risk_fn, wealth: float) -> float:
    r = float(risk_fn(wealth))
    if not np.isfinite(r) or r <= 0.0:
        raise EngineError("nonpositive-R", f"R({wealth!r}) = {r!r} must be finite and > 0")
    return r


def _rk4_step(g: float, h: float, risk_fn) -> float:
    """One classic RK4 step of dG/ds = 1/R(exp(G)); the RHS is autonomous."""
    k1 = 1.0 / _risk_value(risk_fn, np.exp(g))
    k2 = 1.0 / _risk_value(risk_fn, np.exp(g + 0.5 * h * k1))
    k3 = 1.0 / _risk_value(risk_fn, np.exp(g + 0.5 * h * k2))
    k4 = 1.0 / _risk_value(risk_fn, np.exp(g + h * k3))
    return g + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def _march(g: float, s_from: float, s_to: float, risk_fn, rtol: float, atol: float) -> float:
    """Advance G from s_from to s_to with adaptive step-doubling RK4."""
    s = s_from
    h = s_to - s_from
    if h == 0.0:
        return g
    while True:
        remaining = s_to - s
        if abs(remaining) <= 1e-15 * max(1.0, abs(s_to)):
            return g
        last = abs(h) >= abs(remaining)
        if last:
            h = remaining
        g_full = _rk4_step(g, h, risk_fn)
        g_half = _rk4_step(g, 0.5 * h, risk_fn)
        g_half2 = _rk4_step(g_half, 0.5 * h, risk_fn)
        err = abs(g_half2 - g_full) / _RK_ERR_DIV
        tol = atol + rtol * abs(g_half2)
        if err <= tol:
            g = g_half2 + (g_half2 - g_full) / _RK_ERR_DIV
            if last:
                return g
            s += h
            grow = 4.0 if err == 0.0 else min(4.0, 0.9 * (tol / err) ** 0.2)
            h *= grow
        else:
            h *= max(0.1, 0.9 * (tol / err) ** 0.2)
            if abs(h) < 1e-14 * max(1.0, abs(s_to - s_from)):
                raise EngineError(
                    "ode-step-failure",
                    f"step size underflow near s={s!r} while integrating the payoff elasticity",
                )


def elasticity_profile(s_sorted, lnF0: float, risk_fn, rtol: float = 1e-12, atol: float = 1e-14):
    """Integrate d(ln F)/d(ln f) = 1/R(F) through sorted ln f nodes.

    ``s_sorted`` is ascending and may straddle 0; integration starts at the
    reference point s = 0 where ln F = lnF0 and proceeds outward in both
    directions, so every node is reached by a single monotone sweep.
    Returns ln F at each node, aligned with ``s_sorted``.
    """
    s = np.asarray(s_sorted, dtype=float)
    out = np.empty_like(s)
    n = s.size
    first_nonneg = int(np.searchsorted(s, 0.0, side="left"))

    g = lnF0
    prev = 0.0
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
    return out


def ascent_crra(
    F_start,
    bw,
    mw,
    R: float,
    max_steps: int = 200_000,
    improve_tol: float = 1e-12,
    patience: int = 200,
    floor: float = 1e-12,
):
    """Curvature-scaled projected ascent of sum(bw*U(F)) on the plane mw.F = 1.

    CRRA utility with coefficient R. Each step moves along the objective
    gradient rescaled by the diagonal curvature (which keeps progress uniform
    across the grid's huge density dynamic range), projected so the move is
    budget-neutral to first order, then clips at ``floor`` and renormalizes
    multiplicatively back onto the budget plane. Step length adapts by
    accept/reject on the objective; the run stops once the objective has
    improved by less than ``improve_tol`` over a ``patience`` window.
    Returns (F, objective, steps, converged).
    """

    def u(F):
        return np.log(F) if R == 1.0 else F ** (1.0 - R) / (1.0 - R)

    def du(F):
        return 1.0 / F if R == 1.0 else F ** (-R)

    def d2u_abs(F):
        return 1.0 / F**2 if R == 1.0 else R * F ** (-R - 1.0)

    return ascent_generic(F_start, bw, mw, u, du, d2u_abs, max_steps, improve_tol, patience, floor)


def ascent_generic(
    F_start,
    bw,
    mw,
    u,
    du,
    d2u_abs,
    max_steps: int = 200_000,
    improve_tol: float = 1e-12,
    patience: int = 200,
    floor: float = 1e-12,
):
    """Same ascent with caller-supplied vectorized U, U' and |U''|."""
    bw = np.asarray(bw, dtype=float)
    mw = np.asarray(mw, dtype=float)
    F = np.maximum(np.asarray(F_start, dtype=float), floor)
    F = F / float(mw @ F)

    J = float(bw @ u(F))
    eta = 1.0
    steps = 0
    converged = False
    J_mark = J
    mark = 0
    while steps < max_steps:
        steps += 1
        g = bw * du(F)
        h = bw * d2u_abs(F)
        beta = float((mw * g / h).sum()) / float((mw * mw / h).sum())
        d = (g - beta * mw) / h
        dmax = float(np.max(np.abs(d)))
        if dmax == 0.0:
            converged = True
            break
        if not np.isfinite(dmax):
            break
        trial = np.maximum(F + eta * d, floor)
        trial = trial / float(mw @ trial)
        J_trial = float(bw @ u(trial))
        # Ties are accepted: late-stage corrections in negligible-mass regions
        # are invisible to the double-precision objective, and the patience
        # window below is what ends the run.
        if J_trial >= J:
            F = trial
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
    return F, J, steps, converged
