"""Wing-like translators with a neck of radius R.

Near the neck the profile is a graph over the axis, r = r(h), solving
r'' = -(1 + r'^2) g(1/r, r') with r(0) = R, r'(0) = 0. Away from it the two
ends become graphs over the plane with slopes v = 1/r', continued by the
same slope ODE as the bowl. On the lower end (v < 0) the closed-form g is
used as an algebraic continuation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .bowl import (
    HeightFunction,
    SlopeSolution,
    integrate_slope,
    recover_height,
    slope_rhs,
)
from .errors import NonConvex, ParameterError, StepUnderflow
from .implicit_g import make_g
from .speeds import ConeReport, CurvaturePair, Family, SpeedFunction, cone_membership

SWITCH_SLOPE = math.tan(math.radians(80.0))
CONVEXITY_GUARD = 0.5  # stop the neck piece once |r r'| reaches this
SINGULAR_PROBE = 1e-10
SINGULAR_LEVEL = 1e8


class Classification(str, enum.Enum):
    MIRROR_BOWL = "MirrorBowl"
    BOUNDARY_SPHERE = "BoundarySphere"
    FLATTENING = "Flattening"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class SmallPiece:
    R: float
    h_grid: np.ndarray
    r_values: np.ndarray
    rprime_values: np.ndarray
    epsilon: float
    reach: tuple = (math.nan, math.nan)  # attained half-widths (below, above)
    dense: tuple = field(default=(None, None), repr=False, compare=False)

    def at(self, h):
        """(r, r') at height h, from the dense output of the matching half."""
        d = self.dense[1] if h >= 0 else self.dense[0]
        r, rp = d(h)
        return float(r), float(rp)


@dataclass(frozen=True)
class WingSolution:
    small_piece: SmallPiece
    upper: SlopeSolution
    lower: SlopeSolution
    classification: Classification
    r_boundary: float | None
    speed: SpeedFunction
    h0: float = 0.0
    evidence: dict = field(default_factory=dict)

    def upper_height(self) -> HeightFunction:
        return recover_height(self.upper, u_start=self.h0 + self.small_piece.epsilon)

    def lower_height(self) -> HeightFunction:
        return recover_height(self.lower, u_start=self.h0 - self.small_piece.epsilon)


def _piece_rhs(g):
    def rhs(h, y):
        r, p = y
        return [p, -(1.0 + p * p) * g(1.0 / r, p)]

    return rhs


def _half(rhs, R, direction, h_max, rtol, atol):
    def steep(h, y):
        return abs(y[1]) - SWITCH_SLOPE

    def bend(h, y):
        return abs(y[0] * y[1]) - CONVEXITY_GUARD

    steep.terminal = bend.terminal = True
    res = integrate.solve_ivp(rhs, (0.0, direction * h_max), [R, 0.0], method="DOP853",
                              rtol=rtol, atol=atol, dense_output=True, events=[steep, bend])
    if res.status == -1:
        raise StepUnderflow(f"neck piece: {res.message}")
    return res


def integrate_small_piece(f: SpeedFunction, R: float, rtol: float = 1e-11, atol: float = 1e-13,
                          h_max: float | None = None) -> SmallPiece:
    """Neck piece r(h) in both directions until the slope switch rule fires."""
    if not R > 0:
        raise ParameterError(f"neck radius must be positive, got {R}")
    g = make_g(f)
    rhs = _piece_rhs(g)
    h_max = 50.0 * R if h_max is None else h_max
    up = _half(rhs, R, 1.0, h_max, rtol, atol)
    down = _half(rhs, R, -1.0, h_max, rtol, atol)
    reach = (float(-down.t[-1]), float(up.t[-1]))
    eps = min(reach)
    h = np.concatenate([down.t[::-1], up.t[1:]])
    y = np.concatenate([down.y[:, ::-1], up.y[:, 1:]], axis=1)
    keep = np.abs(h) <= eps
    h, y = h[keep], y[:, keep]
    if h[0] > -eps:
        h, y = np.concatenate([[-eps], h]), np.column_stack([down.sol(-eps), y])
    if h[-1] < eps:
        h, y = np.concatenate([h, [eps]]), np.column_stack([y, up.sol(eps)])
    rpp = np.array([rhs(0.0, yi)[1] for yi in y.T])
    if np.any(rpp <= 0):
        bad = h[np.argmax(rpp <= 0)]
        raise NonConvex(f"neck piece loses convexity at h = {bad:.6g}")
    return SmallPiece(float(R), h, y[0].copy(), y[1].copy(), float(eps), reach, (down.sol, up.sol))


def g_singular_at_zero(f: SpeedFunction) -> bool:
    """Does g(y, 1) blow up as y -> 0 from below (the odd-k S_k behaviour)?"""
    g = make_g(f)
    with np.errstate(all="ignore"):
        val = g(-SINGULAR_PROBE)
    return not math.isfinite(val) or abs(val) > SINGULAR_LEVEL


def _boundary_radius(f, r1, v1, rtol, atol):
    """Finish a branch approaching v = 0 with infinite slope: integrate r as a function of v."""
    g = make_g(f)

    def drdv(v, r):
        with np.errstate(all="ignore"):
            gv = g(v / r[0])
        if not math.isfinite(gv):
            return [0.0]
        return [1.0 / ((1.0 + v * v) * gv)]

    res = integrate.solve_ivp(drdv, (v1, 0.0), [r1], method="DOP853", rtol=rtol, atol=atol)
    if res.status == -1:
        raise StepUnderflow(f"boundary approach: {res.message}")
    return float(res.y[0, -1])


def continue_branches(f: SpeedFunction, piece: SmallPiece, r_max: float = 100.0,
                      rtol: float = 1e-10, atol: float = 1e-12, h0: float = 0.0,
                      switch_v: float = -0.05) -> WingSolution:
    """Hand off both ends of the neck piece to the slope ODE and classify the lower end."""
    eps = piece.epsilon
    rhs = slope_rhs(f, check_cone=False)
    r_up, p_up = piece.at(eps)
    r_dn, p_dn = piece.at(-eps)
    upper, _ = integrate_slope(rhs, f, r_up, 1.0 / p_up, r_max, rtol, atol)

    singular = g_singular_at_zero(f)
    evidence = {"g_singular_at_zero": singular}
    r_boundary = None
    if singular:
        def near_zero(r, v):
            return v[0] - switch_v

        near_zero.terminal = True
        near_zero.direction = 1
        lower, res = integrate_slope(rhs, f, r_dn, 1.0 / p_dn, r_max, rtol, atol, events=[near_zero])
        if res.t_events[0].size:
            r_boundary = _boundary_radius(f, float(res.t[-1]), float(res.y[0, -1]), rtol, atol)
    else:
        def crossing(r, v):
            return v[0]

        lower, res = integrate_slope(rhs, f, r_dn, 1.0 / p_dn, r_max, rtol, atol, events=[crossing])
        if res.t_events[0].size:
            evidence["zero_crossing_r"] = float(res.t_events[0][0])
    cls = classify_lower(lower, r_boundary, evidence)
    return WingSolution(piece, upper, lower, cls, r_boundary, f, h0, evidence)


def classify_lower(lower: SlopeSolution, r_boundary, evidence: dict) -> Classification:
    """Evidence-based label for the lower branch."""
    v, r = lower.v_values, lower.r_grid
    if r_boundary is not None:
        return Classification.BOUNDARY_SPHERE
    ratio_end = v[-1] / r[-1]
    ratio_mid = float(lower(0.5 * r[-1])) / (0.5 * r[-1])
    evidence.update(slope_ratio_end=float(ratio_end), slope_ratio_mid=ratio_mid,
                    v_end=float(v[-1]), v_prime_end=float(lower.v_prime_values[-1]))
    if np.all(v < 0):
        if ratio_end < -0.5 and abs(ratio_end - ratio_mid) < 1e-2:
            return Classification.MIRROR_BOWL
        if abs(v[-1]) < 0.1 and lower.v_prime_values[-1] > 0:
            return Classification.FLATTENING
    return Classification.INDETERMINATE


def construct_wing(f: SpeedFunction, R: float = 1.0, r_max: float = 100.0, h0: float = 0.0,
                   rtol: float = 1e-10, atol: float = 1e-12) -> WingSolution:
    piece = integrate_small_piece(f, R)
    return continue_branches(f, piece, r_max, rtol, atol, h0)


def expected_classification(f: SpeedFunction) -> Classification:
    """The label the family predicts; Indeterminate outside the covered families."""
    if f.family is Family.SK_ROOT and f.k >= 2:
        return Classification.MIRROR_BOWL if f.k % 2 == 0 else Classification.BOUNDARY_SPHERE
    if f.family is Family.QUOTIENT and f.k >= 1:
        return Classification.FLATTENING
    return Classification.INDETERMINATE


def lower_slope_ratio_raw(wing: WingSolution, rho: float) -> float:
    """v/rho of the lower branch for the unnormalized speed, at radius rho.

    The unnormalized translator is the normalized one scaled by s = f(0, 1),
    so its slope at rho equals the normalized slope at rho / s.
    """
    s = wing.speed.normalization_scale
    return float(wing.lower(rho / s)) / rho


@dataclass(frozen=True)
class DecayReport:
    exponent: float
    weighted: np.ndarray  # |v| r^{a(1+eps)} over the last decade
    grows: bool
    increasing: bool
    negative: bool

    @property
    def passed(self) -> bool:
        return self.grows and self.increasing and self.negative


def lower_branch_decay_check(sol: SlopeSolution, k: int, n: int, eps: float = 0.25) -> DecayReport:
    """|v| r^{a(1+eps)} with a = (n-k)/k must grow: decay no faster than r^{-a(1+eps)}."""
    a = (n - k) / k
    r, v = sol.r_grid, sol.v_values
    mask = r >= r[-1] / 10.0
    weighted = np.abs(v[mask]) * r[mask] ** (a * (1 + eps))
    grows = bool(weighted[-1] > weighted[0] and np.all(np.diff(weighted) > 0))
    return DecayReport(a, weighted, grows, bool(np.all(np.diff(v) > 0)), bool(np.all(v < 0)))


def piece_curvatures(f: SpeedFunction, piece: SmallPiece):
    """Principal curvatures along the neck piece (radial from r'', tangential from r)."""
    g = make_g(f)
    out = []
    for r, p in zip(piece.r_values, piece.rprime_values):
        rpp = -(1.0 + p * p) * g(1.0 / r, p)
        w = math.sqrt(1.0 + p * p)
        out.append(CurvaturePair(-rpp / w**3, 1.0 / (r * w)))
    return out


def _branch_curvatures(sol: SlopeSolution):
    v, vp, r = sol.v_values, sol.v_prime_values, sol.r_grid
    w = np.sqrt(1.0 + v * v)
    return [CurvaturePair(a, b) for a, b in zip(vp / w**3, v / (r * w))]


@dataclass(frozen=True)
class WingConeReport:
    turning_point: ConeReport
    piece: list
    upper: list
    lower: list


def cone_along_wing(wing: WingSolution) -> WingConeReport:
    n = wing.speed.n
    piece = [cone_membership(n, c) for c in piece_curvatures(wing.speed, wing.small_piece)]
    g = make_g(wing.speed)
    R = wing.small_piece.R
    turning = cone_membership(n, CurvaturePair(g(1.0 / R, 0.0), 1.0 / R))
    upper = [cone_membership(n, c) for c in _branch_curvatures(wing.upper)]
    lower = [cone_membership(n, c) for c in _branch_curvatures(wing.lower)]
    return WingConeReport(turning, piece, upper, lower)


def handoff_gap(wing: WingSolution, n_samples: int = 20) -> float:
    """Largest height/slope mismatch between neck piece and branches on their overlap.

    The side of the neck that reached beyond epsilon overlaps the branch that
    starts at epsilon; there the curve (r(h), h) must lie on the branch graph
    with slope 1/r'. Returns NaN when neither side overlaps.
    """
    piece = wing.small_piece
    worst = math.nan
    for side, sol, u0 in ((1, wing.upper, wing.h0 + piece.epsilon),
                          (-1, wing.lower, wing.h0 - piece.epsilon)):
        reach = piece.reach[1] if side > 0 else piece.reach[0]
        if reach <= piece.epsilon * (1 + 1e-12):
            continue
        hs = side * np.linspace(piece.epsilon, reach, n_samples)[1:]
        for h in hs:
            r, p = piece.at(h)
            if not sol.r_grid[0] <= r <= sol.r_max:
                continue
            height = u0 + integrate.quad(sol, sol.r_grid[0], r, epsabs=1e-13, epsrel=1e-12)[0]
            gap = max(abs(height - (wing.h0 + h)), abs(float(sol(r)) - 1.0 / p))
            worst = gap if math.isnan(worst) else max(worst, gap)
    return worst
