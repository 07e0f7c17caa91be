"""Horizontal statistics of one eigenform: Av_f(x), its Rankin-Selberg limit,
moments of the limiting prime-coefficient measures, and the lower-bound scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from typing import Iterable, Sequence

import mpmath
from scipy import integrate

from .level1 import CoefficientSeries

__all__ = [
    "DataIntegrityError",
    "QuadratureError",
    "NormalizedSeries",
    "normalize",
    "avf_partial",
    "LimitConstant",
    "avf_limit",
    "DELTA_PETERSSON_NORM",
    "LimitMeasure",
    "measure_moment",
    "rth_mean_comparison",
    "DEFAULT_R_GRID",
    "ScanResult",
    "atkin_serre_scan",
    "convergence_trace",
]

WORKING_DIGITS = 40
# ||Delta|| (the norm, not its square), from Cohen-Stromberg p. 286
DELTA_PETERSSON_NORM = Decimal("0.001017527")
DEFAULT_R_GRID = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0)
AGREEMENT_TOL = 1e-8


class DataIntegrityError(ValueError):
    """Coefficient data violates a bound every eigenform satisfies."""


class QuadratureError(ArithmeticError):
    def __init__(self, message, estimate):
        super().__init__(f"{message} (achieved error estimate {estimate:.3g})")
        self.estimate = estimate


def _divisor_counts(n: int) -> list[int]:
    out = [0] * (n + 1)
    for d in range(1, n + 1):
        for mult in range(d, n + 1, d):
            out[mult] += 1
    return out


@dataclass
class NormalizedSeries:
    """a'(m) = a(m) / m^((k-1)/2) for m = 1..x, held as 40-digit decimals."""

    base: CoefficientSeries | None
    weight: int
    values: list[Decimal]
    label: str = "f"

    @property
    def length(self) -> int:
        return len(self.values)

    @classmethod
    def from_normalized(cls, values: Sequence, weight: int, label: str = "f") -> "NormalizedSeries":
        return cls(None, weight, [Decimal(v) for v in values], label)


def normalize(series: CoefficientSeries, check_deligne: bool = True) -> NormalizedSeries:
    """Normalize an eigenform's coefficients, verifying a(1) = 1 and |a'(m)| <= sigma_0(m)."""
    vals = series.values
    k = series.weight
    if not vals:
        raise DataIntegrityError("empty coefficient series")
    if vals[0] != 1:
        raise DataIntegrityError(f"{series.label}: a(1) = {vals[0]}, expected 1 for an eigenform")
    if check_deligne:
        d0 = _divisor_counts(len(vals))
        for m, a in enumerate(vals, start=1):
            # exact integer form of |a(m)| <= sigma_0(m) m^((k-1)/2)
            if a * a > d0[m] ** 2 * m ** (k - 1):
                raise DataIntegrityError(
                    f"{series.label}: |a({m})| = {abs(a)} exceeds sigma_0(m) m^((k-1)/2)"
                )
    out = []
    half = (k - 1) // 2
    with localcontext() as ctx:
        ctx.prec = WORKING_DIGITS
        for m, a in enumerate(vals, start=1):
            # k - 1 is odd: m^((k-1)/2) = m^half * sqrt(m)
            out.append(Decimal(a) / (Decimal(m) ** half * Decimal(m).sqrt()))
    return NormalizedSeries(series, k, out, series.label)


def _cumulative_squares(series: NormalizedSeries, upto: int) -> list[Decimal]:
    # 60 digits: the running sum never loses anything a 40-digit term carries
    with localcontext() as ctx:
        ctx.prec = WORKING_DIGITS + 20
        acc = Decimal(0)
        out = []
        for v in series.values[:upto]:
            acc += v * v
            out.append(acc)
    return out


def _check_x(series: NormalizedSeries, x: int) -> None:
    if x < 1:
        raise ValueError("x must be >= 1")
    if x > series.length:
        raise ValueError(f"x = {x} exceeds the {series.length} available coefficients")


def avf_partial(series: NormalizedSeries, x: int) -> Decimal:
    """sqrt((1/x) * sum_{m <= x} a'(m)^2)."""
    _check_x(series, x)
    total = _cumulative_squares(series, x)[-1]
    with localcontext() as ctx:
        ctx.prec = WORKING_DIGITS
        return (total / x).sqrt()


@dataclass(frozen=True)
class LimitConstant:
    weight: int
    petersson_norm_sq: Decimal
    value: Decimal

    @property
    def residue_factor(self) -> Decimal:
        """12 (4 pi)^(k-1) / (k-1)!, the ratio value^2 / <f, f>."""
        with localcontext() as ctx:
            ctx.prec = WORKING_DIGITS
            return self.value**2 / self.petersson_norm_sq


def _residue_factor(k: int) -> mpmath.mpf:
    return 12 * (4 * mpmath.pi) ** (k - 1) / mpmath.factorial(k - 1)


def avf_limit(k: int, petersson_norm=None, *, petersson_norm_sq=None) -> LimitConstant:
    """Limit of Av_f(x): sqrt(12 (4 pi)^(k-1) / (k-1)!) * ||f||.

    Pass either the norm ||f|| (positionally) or ``petersson_norm_sq`` = <f, f>.
    """
    if k < 2 or k % 2:
        raise ValueError("k must be even and >= 2")
    if (petersson_norm is None) == (petersson_norm_sq is None):
        raise TypeError("give exactly one of petersson_norm, petersson_norm_sq")
    with mpmath.workdps(WORKING_DIGITS):
        if petersson_norm is not None:
            norm_sq = mpmath.mpf(str(petersson_norm)) ** 2
        else:
            norm_sq = mpmath.mpf(str(petersson_norm_sq))
        if norm_sq <= 0:
            raise ValueError("Petersson norm must be positive")
        value = mpmath.sqrt(_residue_factor(k) * norm_sq)
        return LimitConstant(
            k,
            Decimal(mpmath.nstr(norm_sq, WORKING_DIGITS)),
            Decimal(mpmath.nstr(value, WORKING_DIGITS)),
        )


@dataclass(frozen=True)
class LimitMeasure:
    """Limiting distribution on [-2, 2]: ``serre`` (needs p), ``sato_tate`` or ``cm``."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("serre", "sato_tate", "cm"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if (self.kind == "serre") != (self.p is not None):
            raise ValueError("serre measures need a prime p; other kinds take none")
        if self.p is not None and self.p < 2:
            raise ValueError("p must be a prime >= 2")

    @property
    def atom_mass(self) -> float:
        return 0.5 if self.kind == "cm" else 0.0

    def density(self, t: float) -> float:
        if abs(t) >= 2:
            return 0.0
        u = 1 - t * t / 4
        if self.kind == "sato_tate":
            return math.sqrt(u) / math.pi
        if self.kind == "cm":
            return 1 / (4 * math.pi * math.sqrt(u))
        p = self.p
        return (p + 1) / math.pi * math.sqrt(u) / ((p**0.5 + p**-0.5) ** 2 - t * t)

    def angular_density(self, theta: float) -> float:
        """Density pulled back along t = 2 sin(theta), theta in [-pi/2, pi/2].

        The substitution cancels the CM density's inverse square root at t = +-2.
        """
        c = math.cos(theta)
        if self.kind == "sato_tate":
            return 2 * c * c / math.pi
        if self.kind == "cm":
            return 1 / (2 * math.pi)
        p = self.p
        s = 2 * math.sin(theta)
        return (p + 1) / math.pi * 2 * c * c / ((p**0.5 + p**-0.5) ** 2 - s * s)

    def __str__(self):
        return f"serre({self.p})" if self.kind == "serre" else self.kind


def measure_moment(measure: LimitMeasure, r: float, absolute: bool = True) -> float:
    """Integral of |t|^r (or t^r for integer r when ``absolute`` is false) against the measure.

    r = 0 gives the total mass. The CM atom at 0 contributes 1/2 * 0^r.
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    if not absolute and r != int(r):
        raise ValueError("signed moments need an integer r")

    def integrand(theta):
        s = 2 * math.sin(theta)
        tr = abs(s) ** r if absolute else s ** int(r)
        return tr * measure.angular_density(theta)

    total = 0.0
    # split at theta = 0 where |t|^r is not smooth
    for a, b in ((-math.pi / 2, 0.0), (0.0, math.pi / 2)):
        val, err = integrate.quad(integrand, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
        if err > 1e-9:
            raise QuadratureError(f"moment r={r} of {measure} did not converge", err)
        total += val
    if measure.atom_mass:
        total += measure.atom_mass * (1.0 if r == 0 else 0.0)
    return total


@dataclass(frozen=True)
class MeanComparisonRow:
    r: float
    sato_tate: float
    cm: float
    difference: float
    agree: bool


def rth_mean_comparison(r_grid: Iterable[float] = DEFAULT_R_GRID) -> list[MeanComparisonRow]:
    """(integral |t|^r dmu)^(1/r) for the Sato-Tate and CM measures on each r."""
    grid = list(r_grid)
    if not grid:
        raise ValueError("r_grid must be non-empty")
    st, cm = LimitMeasure("sato_tate"), LimitMeasure("cm")
    rows = []
    for r in grid:
        if r <= 0:
            raise ValueError("r must be positive")
        a = measure_moment(st, r) ** (1 / r)
        b = measure_moment(cm, r) ** (1 / r)
        rows.append(MeanComparisonRow(r, a, b, abs(a - b), abs(a - b) < AGREEMENT_TOL))
    return rows


@dataclass(frozen=True)
class ScanResult:
    min_ratio: float | None
    argmin: int | None
    zero_count: int
    x_max: int
    epsilon: float


def atkin_serre_scan(series: CoefficientSeries, epsilon: float, x_max: int) -> ScanResult:
    """min over m <= x_max with a(m) != 0 of |a(m)| / m^((k-3)/2 - epsilon)."""
    k = series.weight
    if k < 4:
        raise ValueError(f"weight must be >= 4, got {k}")
    exponent = (k - 3) / 2 - epsilon
    if not 0 < epsilon < (k - 3) / 2:
        raise ValueError(f"epsilon must lie in (0, {(k - 3) / 2}), got {epsilon}")
    if x_max < 1 or x_max > series.length:
        raise ValueError(f"x_max must lie in [1, {series.length}], got {x_max}")
    best = None
    argmin = None
    zeros = 0
    for m, a in enumerate(series.values[:x_max], start=1):
        if a == 0:
            zeros += 1
            continue
        # logs avoid float overflow of |a(m)| at large weight
        ratio = math.exp(math.log(abs(a)) - exponent * math.log(m))
        if best is None or ratio < best:
            best, argmin = ratio, m
    return ScanResult(best, argmin, zeros, x_max, epsilon)


@dataclass(frozen=True)
class ConvergenceTraceRow:
    x: int
    av: Decimal
    gap: Decimal


def convergence_trace(
    series: NormalizedSeries, checkpoints: Iterable[int], limit: LimitConstant
) -> list[ConvergenceTraceRow]:
    """Av_f(x) and |Av_f(x) - limit| at each checkpoint."""
    points = list(checkpoints)
    if not points:
        return []
    for x in points:
        _check_x(series, x)
    cum = _cumulative_squares(series, max(points))
    rows = []
    with localcontext() as ctx:
        ctx.prec = WORKING_DIGITS
        for x in points:
            value = (cum[x - 1] / x).sqrt()
            rows.append(ConvergenceTraceRow(x, value, abs(value - limit.value)))
    return rows
