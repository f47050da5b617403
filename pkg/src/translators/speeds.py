"""Speed functions in the axially symmetric two-variable reduction.

A rotationally symmetric hypersurface has only two distinct principal
curvatures: the radial one ``x`` and the tangential one ``y`` (repeated
n-1 times). Every speed here is stored as ``f(x, y) = F(x, y, ..., y)``
with closed-form partials, and never as the full n-variable function.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import qmc

from .errors import DegenerateSpeed, DomainError, ParameterError, SpeedValidationError
from .expression import Expression

NONDEGENERACY_TOL = 1e-14
CONE_TOL = 1e-12
_EPS = np.finfo(float).eps


class Family(str, enum.Enum):
    MEAN = "mean"
    SK_ROOT = "sk_root"
    QUOTIENT = "quotient"
    INVERSE_HARMONIC = "inverse_harmonic"
    CUSTOM = "custom"


def binom(n: int, k: int) -> int:
    """Binomial coefficient, zero outside 0 <= k <= n."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def _out(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


@dataclass(frozen=True)
class SpeedFunction:
    """A 1-homogeneous symmetric speed, reduced to f(x, y).

    ``normalization_scale`` divides the raw formula, so a normalized speed
    has ``normalization_scale == raw f(0, 1)`` and ``f(0, 1) == 1``.
    """

    dimension: int
    family: Family
    k: int | None = None
    expression: str | None = None
    normalization_scale: float = 1.0
    _expr: Expression | None = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.dimension

    @property
    def label(self) -> str:
        if self.family is Family.MEAN:
            return f"mean_n{self.n}"
        if self.family is Family.CUSTOM:
            return "custom"
        return f"{self.family.value}_n{self.n}_k{self.k}"

    @property
    def is_normalized(self) -> bool:
        return abs(self.value_at_cylinder() - 1.0) <= 1e-12

    # -- raw formulas (before dividing by the scale) -------------------------

    def _coeffs(self):
        n, k = self.n, self.k
        if self.family is Family.SK_ROOT:
            return binom(n - 1, k), binom(n - 1, k - 1)
        if self.family is Family.QUOTIENT:
            return binom(n - 1, k), binom(n - 1, k + 1), binom(n - 1, k - 1)
        if self.family is Family.INVERSE_HARMONIC:
            return binom(n - 1, k - 1), binom(n - 1, k) / k
        return None

    def raw_cylinder_value(self) -> float:
        """Raw f(0, 1), closed form where the formula is singular at x = 0."""
        fam = self.family
        if fam is Family.MEAN:
            return float(self.n - 1)
        if fam is Family.SK_ROOT:
            a, _ = self._coeffs()
            return a ** (1.0 / self.k)
        if fam is Family.QUOTIENT:
            a, b, _ = self._coeffs()
            return b / a
        if fam is Family.INVERSE_HARMONIC:
            if self.k == 1:
                return 0.0
            a, b = self._coeffs()
            return 1.0 / (a / (self.k - 1) + b)
        try:
            val = self._expr(0.0, 1.0)
        except (ArithmeticError, ValueError):
            return 0.0
        return float(val) if math.isfinite(val) else 0.0

    def value_at_cylinder(self) -> float:
        return self.raw_cylinder_value() / self.normalization_scale

    def x_lower_bound(self, y):
        """Infimum of admissible x at fixed y > 0, or None when unknown."""
        fam = self.family
        if fam is Family.MEAN:
            return -(self.n - 1) * y
        if fam is Family.SK_ROOT:
            a, b = self._coeffs()
            return -a * y / b
        if fam is Family.QUOTIENT:
            a, _, p = self._coeffs()
            return -math.inf if p == 0 else -a * y / p
        if fam is Family.INVERSE_HARMONIC:
            return -(self.k - 1) * y
        return None

    def in_cone(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.family is Family.CUSTOM:
            with np.errstate(all="ignore"):
                val = np.asarray(self._expr(x, y))
            return (y > 0) & np.isfinite(val)
        lb = self.x_lower_bound(y)
        return (y > 0) & (x > lb)

    def _require_cone(self, x, y):
        ok = self.in_cone(x, y)
        if not np.all(ok):
            xa = np.broadcast_to(np.asarray(x, float), np.shape(ok))
            ya = np.broadcast_to(np.asarray(y, float), np.shape(ok))
            idx = np.flatnonzero(~np.asarray(ok).ravel())[0]
            xb, yb = float(xa.ravel()[idx]), float(ya.ravel()[idx])
            if not yb > 0:
                cond = "y > 0"
            elif self.family is Family.CUSTOM:
                cond = "expression finite"
            else:
                cond = {
                    Family.MEAN: "x + (n-1) y > 0",
                    Family.SK_ROOT: "S_k(x, y) > 0",
                    Family.QUOTIENT: "denominator S_k(x, y) > 0",
                    Family.INVERSE_HARMONIC: "x + (k-1) y > 0",
                }[self.family]
            raise DomainError(f"{self.label}: ({xb:.6g}, {yb:.6g}) violates {cond}")

    def _raw(self, x, y, order):
        """order: 0 -> f, 'x' -> f_x, 'y' -> f_y, 'xx' -> f_xx."""
        n, k, fam = self.n, self.k, self.family
        with np.errstate(divide="ignore", invalid="ignore"):
            if fam is Family.MEAN:
                one = np.ones_like(x)
                return {0: x + (n - 1) * y, "x": one, "y": (n - 1) * one, "xx": 0 * one}[order]
            if fam is Family.SK_ROOT:
                a, b = self._coeffs()
                rad = a * y**k + b * x * y ** (k - 1)
                if order == 0:
                    return rad ** (1.0 / k)
                pre = (1.0 / k) * rad ** (1.0 / k - 1.0)
                if order == "x":
                    return pre * b * y ** (k - 1)
                if order == "y":
                    dy = k * a * y ** (k - 1)
                    if k > 1:
                        dy = dy + (k - 1) * b * x * y ** (k - 2)
                    return pre * dy
                return (1.0 / k) * (1.0 / k - 1.0) * rad ** (1.0 / k - 2.0) * (b * y ** (k - 1)) ** 2
            if fam is Family.QUOTIENT:
                a, b, p = self._coeffs()
                num = a * x * y**k + b * y ** (k + 1)
                den = (p * x * y ** (k - 1) if p else 0.0) + a * y**k
                if order == 0:
                    return num / den
                num_x, den_x = a * y**k, (p * y ** (k - 1) if p else 0.0 * y)
                wronsk = num_x * den - num * den_x
                if order == "x":
                    return wronsk / den**2
                if order == "xx":
                    return -2.0 * den_x * wronsk / den**3
                num_y = (k * a * x * y ** (k - 1) if k else 0.0) + (k + 1) * b * y**k
                den_y = ((k - 1) * p * x * y ** (k - 2) if p and k > 1 else 0.0) + (
                    k * a * y ** (k - 1) if k else 0.0
                )
                return (num_y * den - num * den_y) / den**2
            if fam is Family.INVERSE_HARMONIC:
                a, b = self._coeffs()
                pk = x + (k - 1) * y
                d = a / pk + b / y
                if order == 0:
                    return 1.0 / d
                if order == "x":
                    return a / (pk**2 * d**2)
                if order == "y":
                    return (a * (k - 1) / pk**2 + b / y**2) / d**2
                return -2.0 * a / (pk**3 * d**2) + 2.0 * a**2 / (pk**4 * d**3)
        # custom: central differences
        expr = self._expr
        scale = np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))
        if order == 0:
            return np.asarray(expr(x, y), dtype=float)
        if order == "xx":
            h = _EPS**0.25 * scale
            return (expr(x + h, y) - 2.0 * expr(x, y) + expr(x - h, y)) / h**2
        h = np.cbrt(_EPS) * scale
        if order == "x":
            return (expr(x + h, y) - expr(x - h, y)) / (2 * h)
        return (expr(x, y + h) - expr(x, y - h)) / (2 * h)

    def _evaluate(self, x, y, order):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        self._require_cone(x, y)
        val = np.asarray(self._raw(x, y, order), dtype=float) / self.normalization_scale
        if not np.all(np.isfinite(val)):
            raise DomainError(f"{self.label}: non-finite value at ({x}, {y})")
        return _out(val)

    def __call__(self, x, y):
        return self._evaluate(x, y, 0)

    def dx(self, x, y):
        return self._evaluate(x, y, "x")

    def dy(self, x, y):
        return self._evaluate(x, y, "y")

    def dxx(self, x, y):
        return self._evaluate(x, y, "xx")

    def asymptotic_c(self) -> float:
        """f_x(0, 1) of this speed (the log coefficient once normalized)."""
        return self.dx(0.0, 1.0)


@dataclass(frozen=True)
class CurvaturePair:
    lambda1: float
    lambda_tangential: float


@dataclass(frozen=True)
class ConeReport:
    max_gamma_k: int
    on_boundary: bool
    s_values: tuple = ()


def make_speed(family, n: int, k: int | None = None, expr: str | None = None) -> SpeedFunction:
    """Build the reduced speed for one of the supported families.

    ``quotient`` with index k is S_{k+1}/S_k (k = 0 gives the mean curvature),
    ``sk_root`` is S_k^{1/k}, ``inverse_harmonic`` is the reciprocal of the
    k-th harmonic sum.
    """
    try:
        family = Family(family)
    except ValueError:
        raise ParameterError(f"unknown speed family {family!r}") from None
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
        raise ParameterError(f"dimension n must be an integer >= 2, got {n!r}")
    n = int(n)
    if family is Family.CUSTOM:
        if expr is None:
            raise ParameterError("custom speed requires an expression")
        speed = SpeedFunction(n, family, None, expr, 1.0, Expression(expr))
        validate_custom(speed)
        return speed
    if family is Family.MEAN:
        return SpeedFunction(n, family, None)
    if k is None or isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise ParameterError(f"{family.value} needs an integer k")
    k = int(k)
    bounds = {
        Family.SK_ROOT: (1, n),
        Family.QUOTIENT: (0, n - 1),
        Family.INVERSE_HARMONIC: (1, n),
    }[family]
    if not bounds[0] <= k <= bounds[1]:
        raise ParameterError(f"{family.value}: need {bounds[0]} <= k <= {bounds[1]} for n={n}, got k={k}")
    return SpeedFunction(n, family, k)


def _positive_samples(count, seed=0):
    pts = qmc.Halton(d=2, seed=seed).random(count)
    return 0.05 + 1.95 * pts[:, 0], 0.1 + 1.9 * pts[:, 1]


def validate_custom(speed: SpeedFunction, count: int = 64) -> None:
    """Sampled check that a custom expression is a plausible speed on the positive cone."""
    x, y = _positive_samples(count)
    f = np.asarray(speed._raw(x, y, 0), dtype=float)
    if not np.all(np.isfinite(f)):
        raise SpeedValidationError(f"{speed.expression!r} is not finite on the positive cone")
    for c in (0.5, 2.0, 10.0):
        fc = np.asarray(speed._raw(c * x, c * y, 0), dtype=float)
        err = np.abs(fc - c * f)
        if not np.all(err <= 1e-10 * (1 + np.abs(c * f))):
            raise SpeedValidationError(
                f"{speed.expression!r} is not 1-homogeneous (max defect {np.nanmax(err):.3g} at c={c})"
            )
    fx = speed._raw(x, y, "x")
    fy = speed._raw(x, y, "y")
    if not (np.all(fx > 0) and np.all(fy > 0)):
        raise SpeedValidationError(f"{speed.expression!r} is not strictly increasing in x and y")
    euler = np.abs(f - (fx * x + fy * y))
    # the partials are finite differences here, hence the looser bound
    if not np.all(euler <= 1e-6 * (1 + np.abs(f))):
        raise SpeedValidationError(f"{speed.expression!r} fails the Euler identity")


def is_nondegenerate(f: SpeedFunction) -> bool:
    return f.value_at_cylinder() > NONDEGENERACY_TOL


def normalize(f: SpeedFunction) -> SpeedFunction:
    """Rescale so that f(0, 1) = 1; refuses degenerate speeds."""
    s = f.value_at_cylinder()
    if not s > NONDEGENERACY_TOL:
        raise DegenerateSpeed(
            f"{f.label}: f(0,1) = {s:.3g} <= 0; use the degenerate pipeline instead"
        )
    return replace(f, normalization_scale=f.normalization_scale * s)


# plain-function aliases for the operations
def evaluate(f: SpeedFunction, x, y):
    return f(x, y)


def partial_x(f: SpeedFunction, x, y):
    return f.dx(x, y)


def partial_y(f: SpeedFunction, x, y):
    return f.dy(x, y)


def partial_xx(f: SpeedFunction, x, y):
    return f.dxx(x, y)


def symmetric_reduced(n: int, l: int, x, y):
    """S_l evaluated at (x, y, ..., y) with n-1 copies of y."""
    return binom(n - 1, l) * y**l + binom(n - 1, l - 1) * x * y ** (l - 1)


def cone_membership(n: int, pair: CurvaturePair, tol: float = CONE_TOL) -> ConeReport:
    """Largest k with (lambda1, lambda*e) in the Garding cone Gamma_k."""
    x, y = float(pair.lambda1), float(pair.lambda_tangential)
    s = tuple(float(symmetric_reduced(n, l, x, y)) for l in range(1, n + 1))
    k = 0
    while k < n and s[k] > tol:
        k += 1
    boundary = k < n and abs(s[k]) <= tol
    return ConeReport(k, boundary, s)


def sample_cone_points(f: SpeedFunction, count: int, seed: int = 0, margin: float = 0.05):
    """Quasi-random interior points of the admissible cone (for property checks)."""
    pts = qmc.Halton(d=2, seed=seed).random(count)
    y = 0.2 + 2.8 * pts[:, 1]
    lb = f.x_lower_bound(y)
    if lb is None or np.any(~np.isfinite(lb)):
        lo = np.zeros_like(y) + 0.05
    else:
        lo = lb + margin * (1.0 + np.abs(lb))
    x = lo + (3.0 - lo) * pts[:, 0]
    return x, y
