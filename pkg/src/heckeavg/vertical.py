"""Vertical quadratic mean Av_m(N, k) and the classification of Av_2(N, k) <= 1.

Av_m(N,k)^2 = (1/s(N,k)) * sum_{d | m} Tr T'_{m^2/d^2}, exact because every
index m^2/d^2 is a perfect square.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Iterable, Mapping

from .arith import divisors, omega, psi, sigma, squarefree_decomposition
from .trace import CoprimalityError, LevelWeight, _trace, normalized_trace

__all__ = [
    "ZeroDimensionalSpaceError",
    "AvSquared",
    "RadicalForm",
    "AvResult",
    "CutoffRecord",
    "ClassificationResult",
    "av_squared",
    "av",
    "to_decimal",
    "t4_lower_bound",
    "bound_cutoff_weight",
    "large_level_certificate",
    "classify_av2_le_1",
    "ConvergenceRow",
    "vertical_convergence",
    "LARGE_LEVEL",
]

log = logging.getLogger(__name__)

# Above this level the explicit bounds on 2^omega(N)/psi(N) settle every weight.
LARGE_LEVEL = 150_000
DECIMAL_DIGITS = 10


class ZeroDimensionalSpaceError(ValueError):
    """Av_m is undefined on a zero-dimensional space."""


@dataclass(frozen=True)
class AvSquared:
    space: LevelWeight
    m: int
    value: Fraction


@dataclass(frozen=True)
class RadicalForm:
    """The real number rational_part * sqrt(radicand), radicand squarefree."""

    rational_part: Fraction
    radicand: int

    @classmethod
    def from_square(cls, value: Fraction) -> "RadicalForm":
        """The non-negative square root of a non-negative rational."""
        value = Fraction(value)
        if value < 0:
            raise ValueError("cannot take the square root of a negative rational")
        if value == 0:
            return cls(Fraction(0), 1)
        # sqrt(p/q) = sqrt(p*q)/q
        p, q = value.numerator, value.denominator
        s, r = squarefree_decomposition(p * q)
        return cls(Fraction(s, q), r)

    def squared(self) -> Fraction:
        return self.rational_part**2 * self.radicand

    def render(self, times: str = "*") -> str:
        q, r = self.rational_part, self.radicand
        if r == 1 or q == 0:
            return str(q)
        root = f"sqrt({r})"
        if q == 1:
            return root
        if q.denominator == 1:
            return f"{q.numerator}{times}{root}"
        return f"({q.numerator}/{q.denominator}){times}{root}"

    def __str__(self):
        return self.render()

    def as_json(self) -> dict:
        return {
            "num": self.rational_part.numerator,
            "den": self.rational_part.denominator,
            "radicand": self.radicand,
        }


@dataclass(frozen=True)
class AvResult:
    space: LevelWeight
    m: int
    squared: Fraction
    decimal: Decimal
    radical: RadicalForm


def _check_space(space: LevelWeight, m: int) -> int:
    if m < 1:
        raise ValueError("m must be >= 1")
    if gcd(m, space.N) != 1:
        raise CoprimalityError(f"gcd(m, N) = gcd({m}, {space.N}) != 1; Av_m needs N coprime to m")
    s = _trace(space.N, space.k, 1)
    if s == 0:
        raise ZeroDimensionalSpaceError(f"S_{space.k}(Gamma_0({space.N})) is zero-dimensional")
    return s


def av_squared(space: LevelWeight, m: int) -> AvSquared:
    """Exact Av_m(N,k)^2."""
    s = _check_space(space, m)
    total = sum((normalized_trace(space, (m // d) ** 2).value for d in divisors(m)), Fraction(0))
    return AvSquared(space, m, total / s)


def to_decimal(value: Fraction, digits: int = DECIMAL_DIGITS) -> Decimal:
    """sqrt(value) rounded half-even to ``digits`` significant digits."""
    if value == 0:
        return Decimal(0)
    with localcontext() as ctx:
        ctx.prec = digits + 20
        root = (Decimal(value.numerator) / Decimal(value.denominator)).sqrt()
        exp = root.adjusted() - digits + 1
        return root.quantize(Decimal(1).scaleb(exp), rounding=ROUND_HALF_EVEN)


def av(space: LevelWeight, m: int) -> AvResult:
    """Av_m(N,k) as an exact radical plus a 10-significant-digit decimal."""
    sq = av_squared(space, m).value
    return AvResult(space, m, sq, to_decimal(sq), RadicalForm.from_square(sq))


def _ceil_sqrt(n: int) -> int:
    r = isqrt(n)
    return r if r * r == n else r + 1


def t4_lower_bound(space: LevelWeight) -> Fraction:
    """Rigorous lower bound for Tr T'_4(N, k), N odd.

    psi(N) * [(k-1)/24 - (14 * 2^w/psi(N) + 1/2 * 2^w sqrt(N)/psi(N))], w = omega(N),
    with sqrt(N) replaced by its integer ceiling so the result stays a lower bound.
    """
    N, k = space.N, space.k
    if N % 2 == 0:
        raise ValueError(f"N must be odd, got {N}")
    w = 2 ** omega(N)
    return Fraction((k - 1) * psi(N), 24) - 14 * w - Fraction(w * _ceil_sqrt(N), 2)


def bound_cutoff_weight(N: int) -> int:
    """Smallest even k >= 2 with t4_lower_bound((N, k)) > 0.

    The bound grows with k, so it stays positive for every larger weight.
    """
    if N % 2 == 0:
        raise ValueError(f"N must be odd, got {N}")
    w = 2 ** omega(N)
    # (k-1) psi / 24 > 14 w + w ceil(sqrt N) / 2  <=>  k - 1 > 24 w (28 + ceil(sqrt N)) / (2 psi)
    threshold = Fraction(24 * w * (28 + _ceil_sqrt(N)), 2 * psi(N))
    k = int(threshold) + 1  # smallest integer with k - 1 >= floor(threshold)
    while Fraction(k - 1) <= threshold:
        k += 1
    k = max(k, 2)
    return k + (k % 2)


def large_level_certificate() -> tuple[bool, Fraction]:
    """Check 14 * 0.000147 + 0.0607 / 2 < 1/24, which settles every odd N >= 150000.

    Returns (holds, slack) with slack = 1/24 - (14 * 0.000147 + 0.0607 / 2).
    """
    lhs = 14 * Fraction(147, 10**6) + Fraction(607, 10**4) / 2
    slack = Fraction(1, 24) - lhs
    return slack > 0, slack


@dataclass(frozen=True)
class CutoffRecord:
    """Per-level search frontier: weights below ``cutoff`` were checked exactly."""

    N: int
    cutoff: int
    bound_at_cutoff: Fraction


@dataclass
class ClassificationResult:
    pairs: list[tuple[LevelWeight, RadicalForm]]
    certificate: list[CutoffRecord] = field(default_factory=list)
    large_level_slack: Fraction = Fraction(0)
    checked_pairs: int = 0
    max_level: int = LARGE_LEVEL


TraceKey = tuple[int, int, int]


def _classify_chunk(
    levels: list[int], known: Mapping[TraceKey, int]
) -> tuple[list[tuple[int, int, Fraction]], list[CutoffRecord], dict[TraceKey, int], int]:
    hits = []
    records = []
    computed: dict[TraceKey, int] = {}
    checked = 0

    def tr(N, k, m):
        key = (N, k, m)
        if key in known:
            return known[key]
        value = _trace(N, k, m)
        computed[key] = value
        return value

    for N in levels:
        cutoff = bound_cutoff_weight(N)
        records.append(CutoffRecord(N, cutoff, t4_lower_bound(LevelWeight(N, cutoff))))
        for k in range(2, cutoff, 2):
            s = tr(N, k, 1)
            if s == 0:
                continue
            checked += 1
            t4 = tr(N, k, 4)
            # Av_2^2 = 1 + Tr T'_4 / s, so Av_2 <= 1 exactly when Tr T_4 <= 0
            if t4 <= 0:
                av2 = 1 + Fraction(t4, 2 ** (k - 1) * s)
                hits.append((N, k, av2))
    return hits, records, computed, checked


def classify_av2_le_1(
    workers: int = 1,
    max_level: int = LARGE_LEVEL,
    known: Mapping[TraceKey, int] | None = None,
    progress: Callable[[int, int], None] | None = None,
    chunk_size: int = 5000,
) -> ClassificationResult:
    """All (N, k) with N odd, k even, s(N,k) > 0 and Av_2(N,k) <= 1.

    Levels N < ``max_level`` are searched up to their bound cutoff weight;
    levels from ``max_level`` on are settled by :func:`large_level_certificate`
    (valid only for max_level >= 150000). Newly computed traces are merged into
    ``known`` when it is a mutable mapping.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    holds, slack = large_level_certificate()
    if not holds:
        raise ArithmeticError("large-level bound does not close the search")
    if max_level < LARGE_LEVEL:
        log.warning("max_level %d < %d: result is a partial search", max_level, LARGE_LEVEL)
    known = known if known is not None else {}
    levels = list(range(1, max_level, 2))
    chunks = [levels[i : i + chunk_size] for i in range(0, len(levels), chunk_size)]

    def sub_known(chunk):
        if not known:
            return {}
        lo, hi = chunk[0], chunk[-1]
        return {key: v for key, v in known.items() if lo <= key[0] <= hi}

    results = []
    if workers == 1:
        for chunk in chunks:
            results.append(_classify_chunk(chunk, sub_known(chunk)))
            if progress:
                progress(chunk[-1], max_level)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_classify_chunk, c, sub_known(c)) for c in chunks]
            # collect in submission order so output never depends on scheduling
            for chunk, fut in zip(chunks, futures):
                results.append(fut.result())
                if progress:
                    progress(chunk[-1], max_level)

    pairs = []
    certificate = []
    checked = 0
    for hits, records, computed, n_checked in results:
        for N, k, av2 in hits:
            pairs.append((LevelWeight(N, k), RadicalForm.from_square(av2)))
        certificate.extend(records)
        checked += n_checked
        if computed and hasattr(known, "update"):
            known.update(computed)
    pairs.sort(key=lambda pr: (pr[0].N, pr[0].k))
    certificate.sort(key=lambda r: r.N)
    return ClassificationResult(pairs, certificate, slack, checked, max_level)


@dataclass(frozen=True)
class ConvergenceRow:
    space: LevelWeight
    av: Decimal | None
    limit: Decimal
    gap: Decimal | None
    error: str | None = None


def vertical_convergence(m: int, spaces: Iterable[LevelWeight]) -> list[ConvergenceRow]:
    """Compare Av_m(N,k) against its limit sqrt(sigma_1(m)/m) for each space."""
    limit = to_decimal(Fraction(sigma(m, 1), m))
    rows = []
    for space in spaces:
        try:
            value = av(space, m).decimal
        except ValueError as exc:
            rows.append(ConvergenceRow(space, None, limit, None, str(exc)))
            continue
        rows.append(ConvergenceRow(space, value, limit, abs(value - limit)))
    return rows
