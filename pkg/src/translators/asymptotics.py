"""Expansion coefficients of computed bowls and numerical sub/super-solution checks.

For a normalized nondegenerate speed the bowl slope behaves like
v = r - c/r + d/r^3 + ..., with c = f_x(0, 1). The coefficients are probed
algebraically (c ~ r (r - v)) rather than by nonlinear curve fitting.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .bowl import HeightFunction, SlopeSolution
from .errors import DomainError, InsufficientRange
from .speeds import Family, SpeedFunction, binom

MIN_FIT_RADIUS = 50.0
DEFECT_SLACK = 1e-13


@dataclass(frozen=True)
class AsymptoticFit:
    c_estimates: np.ndarray  # shape (m, 2): columns r, r (r - v)
    c_predicted: float
    next_coeff_estimates: np.ndarray  # shape (m, 2): columns r, r^3 (v - r + c/r)
    convergence_rate: float

    @property
    def c_at_rmax(self) -> float:
        return float(self.c_estimates[-1, 1])

    @property
    def relative_error(self) -> float:
        return abs(self.c_at_rmax - self.c_predicted) / abs(self.c_predicted)


def c_probe(sol: SlopeSolution, r):
    """r (r - v(r)), which tends to c."""
    r = np.asarray(r, dtype=float)
    return r * (r - sol(r))


def fit_c(sol: SlopeSolution) -> AsymptoticFit:
    """Probe c over the last decade of the grid and fit how fast the probe converges."""
    r_max = sol.r_max
    if r_max < MIN_FIT_RADIUS:
        raise InsufficientRange(f"fit needs r_max >= {MIN_FIT_RADIUS}, solution reaches {r_max:.4g}")
    c = sol.speed.asymptotic_c()
    mask = sol.r_grid >= r_max / 10.0
    r, v = sol.r_grid[mask], sol.v_values[mask]
    c_est = r * (r - v)
    nxt = r**3 * (v - r + c / r)
    err = np.abs(c_est - c)
    ok = err > 0
    rate = float(np.polyfit(np.log(r[ok]), np.log(err[ok]), 1)[0]) if ok.sum() >= 2 else math.nan
    return AsymptoticFit(np.column_stack([r, c_est]), c, np.column_stack([r, nxt]), rate)


@dataclass(frozen=True)
class NextCoeffFit:
    d: float
    e: float
    r_range: tuple
    residual: float


def fit_next_coeff(sol: SlopeSolution, r_range=(10.0, 40.0), n_points: int = 200) -> NextCoeffFit:
    """Least-squares fit of r^3 (v - r + c/r) = d + e / r^2 on r_range.

    The window stays at moderate radii: the probe multiplies a difference of
    size d/r^3 by r^3, so roundoff dominates at large r.
    """
    lo, hi = r_range
    if sol.r_max < hi:
        raise InsufficientRange(f"solution reaches {sol.r_max:.4g} < {hi}")
    c = sol.speed.asymptotic_c()
    r = np.geomspace(lo, hi, n_points)
    probe = r**3 * (sol(r) - r + c / r)
    A = np.column_stack([np.ones_like(r), r**-2])
    coef, *_ = np.linalg.lstsq(A, probe, rcond=None)
    resid = float(np.max(np.abs(A @ coef - probe)))
    return NextCoeffFit(float(coef[0]), float(coef[1]), (lo, hi), resid)


def predicted_next_coeff(f: SpeedFunction) -> float:
    """d = c - 3c^2 - f_xx(0,1)/2 for a normalized speed (formal series matching)."""
    c = f.dx(0.0, 1.0)
    return c - 3.0 * c * c - 0.5 * f.dxx(0.0, 1.0)


def quotient_next_coeff_formula(n: int, k: int) -> float:
    """Closed-form r^-3 coefficient for S_{k+1}/S_k, in unnormalized variables."""
    return n**2 * (n - k - 1) * (n - k - 4) / ((k + 1) ** 3 * (n - k) ** 2)


def to_raw_next_coeff(f: SpeedFunction, d_normalized: float) -> float:
    """Map the normalized-frame r^-3 coefficient to the unnormalized speed.

    The unnormalized translator is the normalized one scaled by s = f(0, 1),
    so its slope at radius rho is v(rho / s) and d picks up a factor s^3.
    """
    return d_normalized * f.normalization_scale**3


# -- sub / super solutions -----------------------------------------------------


class Verdict(str, enum.Enum):
    SUPER = "SuperSolution"
    SUB = "SubSolution"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class Candidate:
    name: str
    w: object = field(repr=False)
    dw: object = field(default=None, repr=False)
    expected: Verdict | None = None


@dataclass(frozen=True)
class DefectReport:
    candidate_name: str
    grid: np.ndarray
    defect_values: np.ndarray
    verdict: Verdict
    valid_from: float
    cone_exit_r: float | None = None

    def as_dict(self):
        return {
            "candidate": self.candidate_name,
            "verdict": self.verdict.value,
            "valid_from": None if math.isnan(self.valid_from) else self.valid_from,
            "cone_exit_r": self.cone_exit_r,
            "max_abs_defect_tail": _tail_max(self.defect_values, self.grid, self.valid_from),
        }


def _tail_max(defect, grid, r0):
    if math.isnan(r0):
        return None
    tail = defect[grid >= r0]
    return float(np.nanmax(np.abs(tail))) if tail.size else None


def comparison_candidates(f: SpeedFunction, eps: float | None = None) -> list[Candidate]:
    """The eight comparison functions used for the bowl slope, with expected verdicts.

    ``eps`` defaults to c/2. The linear-rate subsolution (1 - eps) r needs
    eps < 1, so it uses min(eps, 1/2).
    """
    c = f.asymptotic_c()
    e = 0.5 * c if eps is None else float(eps)
    e_lin = min(e, 0.5)
    m = 1.0 / f(1.0, 1.0)
    S, B = Verdict.SUPER, Verdict.SUB
    return [
        Candidate("r", lambda r: r, lambda r: np.ones_like(r), S),
        Candidate("(1-eps)r", lambda r: (1 - e_lin) * r, lambda r: (1 - e_lin) * np.ones_like(r), B),
        Candidate("r/f(1,1)", lambda r: m * r, lambda r: m * np.ones_like(r), B),
        Candidate("r-eps", lambda r: r - e, lambda r: np.ones_like(r), B),
        Candidate("r-(c-eps)/r", lambda r: r - (c - e) / r, lambda r: 1 + (c - e) / r**2, S),
        Candidate("r-(c+eps)/r", lambda r: r - (c + e) / r, lambda r: 1 + (c + e) / r**2, B),
        Candidate("r-c/r+eps/r^2", lambda r: r - c / r + e / r**2,
                  lambda r: 1 + c / r**2 - 2 * e / r**3, S),
        Candidate("r-c/r-eps/r^2", lambda r: r - c / r - e / r**2,
                  lambda r: 1 + c / r**2 + 2 * e / r**3, B),
    ]


def _central_diff(w, r, rel=1e-7):
    h = rel * np.maximum(np.abs(r), 1.0)
    return (w(r + h) - w(r - h)) / (2 * h)


def defect(f: SpeedFunction, w, dw, r):
    """f(w'/(1+w^2), w/r) - 1 pointwise; NaN where the argument leaves the cone."""
    r = np.asarray(r, dtype=float)
    wv = np.asarray(w(r), dtype=float)
    dwv = np.asarray(dw(r) if dw is not None else _central_diff(w, r), dtype=float)
    x, y = dwv / (1 + wv**2), wv / r
    out = np.full(r.shape, np.nan)
    inside = np.asarray(f.in_cone(x, y), dtype=bool)
    if np.any(inside):
        try:
            out[inside] = f(x[inside], y[inside]) - 1.0
        except DomainError:
            pass
    return out


def _tail_start(ok):
    """First index from which ok holds through the end, or None."""
    if not ok[-1]:
        return None
    bad = np.flatnonzero(~ok)
    return 0 if bad.size == 0 else int(bad[-1]) + 1


def check_sub_super(f: SpeedFunction, candidate: Candidate, r_range=(10.0, 100.0), n_grid: int = 400,
                    slack: float = DEFECT_SLACK) -> DefectReport:
    """Classify a comparison function by the sign of its defect on a log grid.

    The verdict needs a uniform-sign tail starting below the middle of the
    range; otherwise, or if the tail leaves the cone, it is Indeterminate.
    The default range is the last decade below r = 100, the same asymptotic
    window the coefficient probes use.
    """
    grid = np.geomspace(r_range[0], r_range[1], n_grid)
    d = defect(f, candidate.w, candidate.dw, grid)
    nan = np.isnan(d)
    exit_r = float(grid[np.flatnonzero(nan)[-1]]) if nan.any() else None
    i_sup = _tail_start(~nan & (d >= -slack))
    i_sub = _tail_start(~nan & (d <= slack))
    verdict, start = Verdict.INDETERMINATE, math.nan
    choices = [(i, v) for i, v in ((i_sup, Verdict.SUPER), (i_sub, Verdict.SUB)) if i is not None]
    if choices:
        choices.sort(key=lambda t: t[0])
        i, v = choices[0]
        tie = len(choices) == 2 and choices[1][0] == i
        start = float(grid[i])
        if not tie and start <= 0.5 * r_range[1]:
            verdict = v
    return DefectReport(candidate.name, grid, d, verdict, start, exit_r)


@dataclass(frozen=True)
class SandwichResult:
    candidate_name: str
    side: Verdict
    r_from: float
    min_gap: float  # smallest signed gap in the required direction; > 0 means strict
    holds: bool


def sandwich_check(sol: SlopeSolution, candidate: Candidate, report: DefectReport) -> SandwichResult:
    """Is v strictly on the certified side of the candidate on [valid_from, r_max]?"""
    grid = report.grid
    if report.verdict is Verdict.INDETERMINATE:
        return SandwichResult(candidate.name, report.verdict, math.nan, math.nan, False)
    mask = (grid >= report.valid_from) & (grid <= sol.r_max)
    r = grid[mask]
    gap = np.asarray(candidate.w(r)) - sol(r)
    if report.verdict is Verdict.SUB:
        gap = -gap
    mg = float(np.min(gap))
    return SandwichResult(candidate.name, report.verdict, report.valid_from, mg, mg > 0)


def growth_exponent(height: HeightFunction, decades: float = 1.0) -> float:
    """Least-squares slope of log u against log r over the last decade of the grid."""
    r, u = height.r_grid, height.u_values
    mask = (r >= r[-1] / 10**decades) & (u > 0)
    return float(np.polyfit(np.log(r[mask]), np.log(u[mask]), 1)[0])


def c_coefficient(family, n: int, k: int | None = None) -> float:
    """Closed-form c for the built-in families (normalized)."""
    fam = Family(family)
    if fam is Family.MEAN:
        return 1.0 / (n - 1)
    if fam is Family.SK_ROOT:
        return 1.0 / (n - k)
    if fam is Family.QUOTIENT:
        a, b, p = binom(n - 1, k), binom(n - 1, k + 1), binom(n - 1, k - 1)
        return (a * a - b * p) / (a * b)
    raise ValueError(f"no closed-form c for {fam.value}")
