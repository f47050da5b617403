"""Inversion of a speed in its first argument: f(g(y, z), y) = z.

Built-in families have closed-form inverses. These are also *algebraic*
continuations: they stay meaningful for z <= 0 or y < 0, which the wing
construction needs on its lower half. The bracketing root solver only
works inside the admissible cone, so it serves as the general path for
custom speeds and as an independent cross-check for the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDerivative, DomainError, NoBracket, NonConvergence
from .speeds import Family, SpeedFunction, binom

DERIVATIVE_FLOOR = 1e-12


def safeguarded_newton(fun, dfun, lo, hi, x0=None, ftol=1e-12, max_iter=200):
    """Newton iteration kept inside a sign-change bracket, bisecting when it strays.

    ``fun(lo)`` and ``fun(hi)`` must have opposite signs (or one is zero).
    Returns once ``|fun(x)| <= ftol`` or the bracket has collapsed to a few ulps.
    """
    flo, fhi = fun(lo), fun(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NoBracket(f"no sign change on [{lo!r}, {hi!r}]")
    if flo > 0:
        lo, hi = hi, lo
    x = 0.5 * (lo + hi) if x0 is None else float(x0)
    if not min(lo, hi) <= x <= max(lo, hi):
        x = 0.5 * (lo + hi)
    dx_old = dx = abs(hi - lo)
    fx, dfx = fun(x), dfun(x)
    for _ in range(max_iter):
        if abs(fx) <= ftol:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        step_ok = dfx != 0 and math.isfinite(dfx)
        if step_ok:
            x_new = x - fx / dfx
            step_ok = min(lo, hi) < x_new < max(lo, hi) and abs(2.0 * fx) <= abs(dx_old * dfx)
        dx_old = dx
        if step_ok:
            dx = x - x_new
            x = x_new
        else:
            dx = 0.5 * (hi - lo)
            x = lo + dx
        if abs(hi - lo) <= 4 * np.spacing(max(abs(lo), abs(hi), 1e-300)):
            return x
        fx, dfx = fun(x), dfun(x)
    raise NonConvergence(f"no convergence after {max_iter} iterations (last x={x!r}, f={fx!r})")


def closed_form_g(speed: SpeedFunction, y, z=1.0):
    """Closed-form g(y, z) for built-in families, None for custom speeds.

    Works on the raw formula and maps through the normalization: the
    normalized speed f/s reaches z exactly where the raw one reaches s*z.
    """
    fam, n, k = speed.family, speed.n, speed.k
    y = np.float64(y) if np.ndim(y) == 0 else np.asarray(y, dtype=float)
    z = np.float64(z) if np.ndim(z) == 0 else np.asarray(z, dtype=float)
    zs = speed.normalization_scale * z
    with np.errstate(divide="ignore", invalid="ignore"):
        if fam is Family.MEAN:
            return zs - (n - 1) * y
        if fam is Family.SK_ROOT:
            a, b = binom(n - 1, k), binom(n - 1, k - 1)
            return (zs**k - a * y**k) / (b * y ** (k - 1))
        if fam is Family.QUOTIENT:
            a, b, p = binom(n - 1, k), binom(n - 1, k + 1), binom(n - 1, k - 1)
            return y * (zs * a - b * y) / (a * y - zs * p)
        if fam is Family.INVERSE_HARMONIC:
            a, b = binom(n - 1, k - 1), binom(n - 1, k) / k
            return a * zs * y / (y - b * zs) - (k - 1) * y
    return None


def has_closed_form(speed: SpeedFunction) -> bool:
    return speed.family is not Family.CUSTOM


@dataclass(frozen=True)
class GSolver:
    speed: SpeedFunction
    bracket_growth: float = 2.0
    tol_abs: float = 1e-12
    tol_rel: float = 1e-12
    max_iter: int = 200

    def tolerance(self, z: float) -> float:
        return self.tol_abs + self.tol_rel * abs(z)


def _safe_residual(speed, y, z):
    def resid(x):
        try:
            return speed(x, y) - z
        except DomainError:
            return math.nan

    return resid


def bracket_root(solver: GSolver, y: float, z: float):
    """Expand from x = 0 until f(x, y) - z changes sign, respecting the cone."""
    with np.errstate(over="ignore", invalid="ignore"):
        return _bracket(solver, y, z)


def _bracket(solver, y, z):
    speed, growth = solver.speed, solver.bracket_growth
    resid = _safe_residual(speed, y, z)
    h = max(abs(y), abs(z), 1e-300)
    lb = speed.x_lower_bound(y)
    start = 0.0
    if lb is not None and not start > lb:
        start = lb + h
    r0 = resid(start)
    if math.isnan(r0):
        raise NoBracket(f"f(., {y}) undefined at the starting point x={start}")
    if r0 == 0.0:
        return start, start
    if r0 < 0:
        # f increasing in x: march right
        prev, step = start, h
        for _ in range(2000):
            x = start + step
            rx = resid(x)
            if math.isnan(rx) or math.isinf(x):
                break
            if rx >= 0:
                return prev, x
            prev, step = x, step * growth
        raise NoBracket(f"f(x, {y}) never reaches {z} for x >= {start}")
    # march left, toward the cone boundary if one is known
    good = start
    if lb is not None and math.isfinite(lb):
        bad = lb
    else:
        bad = None
        step = h
        for _ in range(2000):
            x = start - step
            rx = resid(x)
            if math.isnan(rx):
                bad = x
                break
            if rx <= 0:
                return x, good
            good, step = x, step * growth
        if bad is None:
            raise NoBracket(f"f(x, {y}) stays above {z} for all x <= {start}")
    for _ in range(4000):
        x = bad + (good - bad) / growth
        rx = resid(x)
        if math.isnan(rx):
            bad = x
        elif rx <= 0:
            return x, good
        else:
            good = x
        if abs(good - bad) <= 1e-15 * h:
            break
    raise NoBracket(f"f(x, {y}) - {z} has no sign change before the cone boundary")


def solve_g_root(solver: GSolver, y: float, z: float = 1.0) -> float:
    y, z = float(y), float(z)
    if not (y > 0 and z > 0):
        raise DomainError(f"root solver needs y > 0 and z > 0, got ({y}, {z})")
    lo, hi = bracket_root(solver, y, z)
    if lo == hi:
        return lo
    speed = solver.speed
    resid = _safe_residual(speed, y, z)

    def dres(x):
        try:
            return speed.dx(x, y)
        except DomainError:
            return math.nan

    return safeguarded_newton(resid, dres, lo, hi, x0=0.5 * (lo + hi),
                              ftol=solver.tolerance(z), max_iter=solver.max_iter)


def solve_g(solver: GSolver, y, z=1.0, method: str = "auto") -> float:
    """x with f(x, y) = z, for y > 0, z > 0 inside the admissible cone.

    ``method`` is ``"closed"``, ``"root"`` or ``"auto"`` (closed form when the
    family has one). A closed-form root outside the cone means no admissible
    x exists and raises NoBracket, as the root solver would.

    The residual |f(x, y) - z| meets tol_abs + tol_rel*z up to the rounding
    floor of f near its cone boundary, about eps * (|x f_x| + |y f_y|).
    """
    if method not in ("auto", "closed", "root"):
        raise ValueError(f"unknown method {method!r}")
    speed = solver.speed
    if method == "root" or (method == "auto" and not has_closed_form(speed)):
        return solve_g_root(solver, y, z)
    if not has_closed_form(speed):
        raise ValueError(f"{speed.label} has no closed-form inverse")
    y, z = float(y), float(z)
    if not (y > 0 and z > 0):
        raise DomainError(f"g(y, z) needs y > 0 and z > 0 inside the cone, got ({y}, {z})")
    x = float(closed_form_g(speed, y, z))
    if not math.isfinite(x) or not bool(speed.in_cone(x, y)):
        raise NoBracket(f"{speed.label}: no admissible x with f(x, {y}) = {z}")
    return x


def g_partial_y(solver: GSolver, y, z=1.0) -> float:
    """g_y = -f_y / f_x evaluated on the level set."""
    x = solve_g(solver, y, z)
    fx = solver.speed.dx(x, y)
    if abs(fx) < DERIVATIVE_FLOOR:
        raise DegenerateDerivative(f"f_x = {fx:.3g} at ({x:.6g}, {y:.6g})")
    return -solver.speed.dy(x, y) / fx


def g_partial_z(solver: GSolver, y, z=1.0) -> float:
    """g_z = 1 / f_x, positive by monotonicity."""
    x = solve_g(solver, y, z)
    fx = solver.speed.dx(x, y)
    if abs(fx) < DERIVATIVE_FLOOR:
        raise DegenerateDerivative(f"f_x = {fx:.3g} at ({x:.6g}, {y:.6g})")
    return 1.0 / fx


def make_g(speed: SpeedFunction):
    """Fast scalar g(y, z) for ODE right-hand sides.

    Built-ins use the closed form without cone checks (the algebraic
    continuation); custom speeds go through the bracketing solver.
    """
    if has_closed_form(speed):
        def g(y, z=1.0):
            return float(closed_form_g(speed, y, z))
    else:
        solver = GSolver(speed)

        def g(y, z=1.0):
            return solve_g_root(solver, y, z)
    return g
