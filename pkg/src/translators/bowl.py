"""Bowl-type translators: the slope ODE v' = (1 + v^2) g(v/r, 1) from the origin.

Also hosts the degenerate Gauss-curvature-root flows (f = S_n^{1/n}), whose
slope ODE reduces to v' = (1 + v^2) (r/v)^(n-1) and admits closed or
implicit solutions in low dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import (
    ConeExit,
    DegenerateSpeed,
    NonConvex,
    ParameterError,
    RangeError,
    StepUnderflow,
)
from .implicit_g import make_g, safeguarded_newton
from .speeds import CurvaturePair, SpeedFunction, is_nondegenerate, make_speed

R_START = 1e-4
LOG_SWITCH = 1e3
_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)


class DenseSlope:
    """Piecewise dense output; each piece may store v directly or log v."""

    def __init__(self):
        self.pieces = []  # (r_lo, r_hi, OdeSolution, log_mode)

    def add(self, r_lo, r_hi, dense, log_mode=False):
        self.pieces.append((float(r_lo), float(r_hi), dense, log_mode))

    @property
    def r_min(self):
        return self.pieces[0][0]

    @property
    def r_max(self):
        return self.pieces[-1][1]

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        flat, res = r.ravel(), out.ravel()
        for i, (lo, hi, dense, log_mode) in enumerate(self.pieces):
            last = i == len(self.pieces) - 1
            mask = (flat >= lo) & ((flat < hi) | (last & (flat <= hi)))
            if i == 0:
                mask |= flat < lo
            if last:
                mask |= flat > hi
            if np.any(mask):
                val = dense(flat[mask])[0]
                res[mask] = np.exp(val) if log_mode else val
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SlopeSolution:
    r_grid: np.ndarray
    v_values: np.ndarray
    v_prime_values: np.ndarray
    interpolator: DenseSlope = field(repr=False)
    speed: SpeedFunction | None
    r_start: float
    rhs: object = field(default=None, repr=False, compare=False)

    @property
    def r_max(self) -> float:
        return float(self.r_grid[-1])

    def __call__(self, r):
        return self.interpolator(r)

    def derivative(self, r):
        """v'(r) from the ODE right-hand side at the interpolated slope."""
        r = np.asarray(r, dtype=float)
        v = np.asarray(self.interpolator(r))
        out = np.array([self.rhs(ri, vi) for ri, vi in zip(r.ravel(), v.ravel())])
        return float(out[0]) if r.ndim == 0 else out.reshape(r.shape)


@dataclass(frozen=True)
class HeightFunction:
    """u(r) = int_0^r v on the slope grid, in the gauge u(0) = 0."""

    r_grid: np.ndarray
    u_values: np.ndarray
    quadrature_error_estimate: float


def _require_bowl_speed(f: SpeedFunction):
    if not is_nondegenerate(f):
        raise DegenerateSpeed(f"{f.label} is degenerate; use the degenerate pipeline")
    if not f.is_normalized:
        raise ParameterError(f"{f.label} must be normalized (f(0,1) = 1) for the bowl ODE")


def initial_series(f: SpeedFunction, r0: float = R_START):
    """Leading Taylor data (v(r0), v'(r0)) = (m r0, m) with f(m, m) = 1."""
    if not 0 < r0 <= 1e-3:
        raise ParameterError(f"series handoff radius must lie in (0, 1e-3], got {r0}")
    m = 1.0 / f(1.0, 1.0)
    return m * r0, m


def slope_rhs(f: SpeedFunction, check_cone: bool = True):
    """(r, v) -> (1 + v^2) g(v/r, 1); raises ConeExit when (g, v/r) leaves the cone."""
    g = make_g(f)

    def rhs(r, v):
        y = v / r
        x = g(y)
        if check_cone and not (math.isfinite(x) and bool(f.in_cone(x, y))):
            raise ConeExit(f"{f.label}: v/r = {y:.6g} left the admissible domain at r = {r:.6g}", r=r)
        return (1.0 + v * v) * x

    return rhs


def _run(rhs, r0, r1, v0, rtol, atol, events=None):
    def fun(r, v):
        return [rhs(r, v[0])]

    res = integrate.solve_ivp(fun, (r0, r1), [v0], method="DOP853", rtol=rtol, atol=atol,
                              dense_output=True, events=events)
    if res.status == -1:
        raise StepUnderflow(f"integration stopped at r = {res.t[-1]:.6g}: {res.message}")
    return res


def integrate_slope(rhs, speed, r0, v0, r_max, rtol=1e-10, atol=1e-12, events=None):
    """Integrate a slope ODE from (r0, v0) and package the result.

    Returns (SlopeSolution, solve_ivp result) so callers can inspect events.
    """
    res = _run(rhs, r0, r_max, v0, rtol, atol, events)
    dense = DenseSlope()
    dense.add(r0, res.t[-1], res.sol)
    r_grid = np.asarray(res.t, dtype=float)
    v_values = np.asarray(res.y[0], dtype=float)
    vp = np.array([rhs(r, v) for r, v in zip(r_grid, v_values)])
    sol = SlopeSolution(r_grid, v_values, vp, dense, speed, float(r0), rhs)
    return sol, res


def integrate_bowl(f: SpeedFunction, r_max: float = 100.0, rtol: float = 1e-10,
                   atol: float = 1e-12, r_start: float = R_START) -> SlopeSolution:
    """Bowl slope from the series handoff at r_start out to r_max."""
    _require_bowl_speed(f)
    if not r_max > 1:
        raise ParameterError(f"r_max must exceed 1, got {r_max}")
    v0, _ = initial_series(f, r_start)
    sol, _ = integrate_slope(slope_rhs(f), f, r_start, v0, r_max, rtol, atol)
    if np.any(np.diff(sol.v_values) <= 0):
        bad = int(np.argmax(np.diff(sol.v_values) <= 0))
        raise NonConvex(f"{f.label}: bowl slope stops increasing near r = {sol.r_grid[bad]:.6g}")
    return sol


def _gauss_increments(fun, edges, split=1):
    """Integrals of fun over consecutive [edges[i], edges[i+1]], 5-point Gauss per subinterval."""
    a, b = edges[:-1], edges[1:]
    total = np.zeros_like(a)
    for j in range(split):
        lo = a + (b - a) * j / split
        hi = a + (b - a) * (j + 1) / split
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
        vals = np.asarray(fun(nodes.ravel())).reshape(nodes.shape)
        total += half * (vals @ _GL_W)
    return total


def recover_height(sol: SlopeSolution, u_start: float | None = None) -> HeightFunction:
    """Integrate the slope; the piece [0, r_start] comes from the linear series."""
    r = sol.r_grid
    if u_start is None:
        u_start = 0.5 * (sol.v_values[0] / r[0]) * r[0] ** 2
    inc = _gauss_increments(sol.interpolator, r)
    inc_fine = _gauss_increments(sol.interpolator, r, split=2)
    u = u_start + np.concatenate([[0.0], np.cumsum(inc)])
    err = float(abs(np.sum(inc_fine) - np.sum(inc)))
    return HeightFunction(r.copy(), u, err)


def principal_curvatures(sol: SlopeSolution, r: float) -> CurvaturePair:
    """Radial and tangential curvature of the profile at radius r."""
    v = float(sol(r))
    vp = float(sol.derivative(r))
    w = math.sqrt(1.0 + v * v)
    return CurvaturePair(vp / w**3, v / (r * w))


# -- degenerate S_n^{1/n} flows ---------------------------------------------


def degenerate_speed(n: int) -> SpeedFunction:
    """The n-th root of the Gauss curvature, reduced (f(0, 1) = 0)."""
    return make_speed("sk_root", n, n)


def degenerate_s2_exact(r):
    """Closed form sqrt(exp(r^2/2) - 1) as printed for the n = 2 flow.

    Note that it does not solve v' = (1 + v^2) r / v; see
    ``degenerate_s2_solution`` for the function that does.
    """
    return _sqrt_expm1(np.asarray(r, dtype=float) ** 2 / 2.0)


def degenerate_s2_solution(r):
    """sqrt(exp(r^2) - 1): separating variables in v' = (1 + v^2) r / v with v(0) = 0."""
    return _sqrt_expm1(np.asarray(r, dtype=float) ** 2)


def _sqrt_expm1(t):
    if np.any(t < 0):
        raise ParameterError("r must be >= 0")
    with np.errstate(over="ignore"):
        out = np.sqrt(np.expm1(t))
    if not np.all(np.isfinite(out)):
        raise RangeError("exp overflow: r too large for a double-precision result")
    return float(out) if out.ndim == 0 else out


def _v_minus_arctan(v):
    if abs(v) < 1e-2:
        v2 = v * v
        return v * v2 * (1 / 3 - v2 * (1 / 5 - v2 * (1 / 7 - v2 / 9)))
    return v - math.atan(v)


def degenerate_s3_invert(r: float, tol: float = 1e-12) -> float:
    """Solve v - arctan v = r^3 / 3 for v >= 0."""
    if r < 0:
        raise ParameterError("r must be >= 0")
    t = r**3 / 3.0
    if t == 0.0:
        return 0.0
    return safeguarded_newton(
        lambda v: _v_minus_arctan(v) - t,
        lambda v: v * v / (1.0 + v * v),
        0.0,
        t + math.pi / 2,
        x0=t + math.pi / 2,
        ftol=tol,
    )


def _degenerate_integral(n, v, method):
    if method == "closed" or (method == "auto" and n in (3, 4)):
        if n == 3:
            return math.atan(v)
        if n == 4:
            return 0.5 * math.log1p(v * v)
        raise ParameterError(f"no closed form for the n = {n} integral")
    val, _ = integrate.quad(lambda t: t ** (n - 3) / (1.0 + t * t), 0.0, v,
                            limit=200, epsabs=0.0, epsrel=1e-13)
    return val


def degenerate_sn_implicit_residual(n: int, v: float, r: float, method: str = "quad") -> float:
    """v^(n-2)/(n-2) - int_0^v t^(n-3)/(1+t^2) dt - r^n/n.

    ``method="quad"`` is the reference (adaptive quadrature); ``"closed"``
    and ``"auto"`` use arctan / log forms for n = 3, 4.
    """
    if n < 3:
        raise ParameterError("the implicit relation needs n >= 3")
    if v < 0 or r < 0:
        raise ParameterError("v and r must be >= 0")
    if n == 3:
        # v - I(v) in cancellation-free form
        lhs = _v_minus_arctan(v) if method != "quad" else v - _degenerate_integral(n, v, method)
    else:
        lhs = v ** (n - 2) / (n - 2) - _degenerate_integral(n, v, method)
    return lhs - r**n / n


def degenerate_sn_leading(n: int, r):
    """Leading growth ((n-2)/n)^(1/(n-2)) r^(n/(n-2)) of the degenerate slope."""
    if n < 3:
        raise ParameterError("leading term defined for n >= 3")
    r = np.asarray(r, dtype=float)
    out = ((n - 2) / n) ** (1.0 / (n - 2)) * r ** (n / (n - 2))
    return float(out) if out.ndim == 0 else out


def integrate_degenerate(n: int, r_max: float = 10.0, rtol: float = 1e-12, atol: float = 1e-14,
                         r_start: float = R_START) -> SlopeSolution:
    """Slope of the S_n^{1/n} bowl; switches to w = log v once v exceeds LOG_SWITCH."""
    if n < 2:
        raise ParameterError("n must be >= 2")
    speed = degenerate_speed(n)

    def rhs(r, v):
        # (1 + v^2) (r/v)^(n-1), arranged so v^2 never forms
        return r ** (n - 1) * (v ** (1 - n) + v ** (3 - n))

    def rhs_log(r, w):
        return (1.0 + math.exp(-2.0 * w)) * r ** (n - 1) * math.exp(-(n - 2) * w)

    v0 = r_start + r_start**3 / (n + 2)

    def hit(r, v):
        return v[0] - LOG_SWITCH

    hit.terminal = True
    res = _run(rhs, r_start, r_max, v0, rtol, atol, events=[hit])
    dense = DenseSlope()
    dense.add(r_start, res.t[-1], res.sol)
    r_grid, v_values = list(res.t), list(res.y[0])
    if res.t[-1] < r_max:
        r1 = float(res.t[-1])
        res2 = _run(rhs_log, r1, r_max, math.log(v_values[-1]), rtol, atol)
        dense.add(r1, res2.t[-1], res2.sol, log_mode=True)
        if res2.y[0][-1] > 700.0:
            raise RangeError(f"slope overflows double precision before r = {r_max:g}; lower r_max")
        r_grid += list(res2.t[1:])
        v_values += list(np.exp(res2.y[0][1:]))
    r_grid = np.asarray(r_grid)
    v_values = np.asarray(v_values)
    vp = np.array([rhs(r, v) for r, v in zip(r_grid, v_values)])
    return SlopeSolution(r_grid, v_values, vp, dense, speed, r_start, rhs)
