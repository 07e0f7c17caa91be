"""Exact traces of Hecke operators on S_k(Gamma_0(N)) via the Eichler-Selberg trace formula.

For gcd(m, N) = 1 and even k >= 2 the trace is assembled from four terms::

    Tr T_m = A1 + A2 + A3 + A4

    A1 = (k-1)/12 * psi(N) * m^(k/2-1)                    (m a perfect square only)
    A2 = -1/2 * sum_{t^2 < 4m} P_k(t, m) * sum_f h_w((t^2-4m)/f^2) * mu(t, f, m)
    A3 = -1/2 * sum_{d | m} min(d, m/d)^(k-1) * sum_{c | N, g(c) | (m/d - d)} phi(g(c)),
         g(c) = gcd(c, N/c)
    A4 = sigma_1(m)                                        (k = 2 only)

where h_w is the class number of primitive forms weighted by 2/w, and
``mu(t, f, m) = psi(N)/psi(N/N_f) * #{x mod N : x^2 - t x + m = 0 mod N*N_f}``
with ``N_f = gcd(N, f)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from .arith import (
    class_number_weighted,
    divisors,
    euler_phi,
    factorize,
    is_square,
    kronecker_symbol,
    psi,
    sigma,
)

__all__ = [
    "LevelWeight",
    "TraceValue",
    "NormalizedTrace",
    "CoprimalityError",
    "gegenbauer_P",
    "count_quadratic_roots",
    "trace_hecke",
    "dim_cusp",
    "normalized_trace",
    "FORMULA_VERSION",
]

# Bump whenever the assembled trace could change; keys the on-disk trace cache.
FORMULA_VERSION = "es-gamma0-trivial-v1"


class CoprimalityError(ValueError):
    """Raised when the Hecke index shares a factor with the level."""


@dataclass(frozen=True, order=True)
class LevelWeight:
    N: int
    k: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"level must be >= 1, got N={self.N}")
        if self.k < 2 or self.k % 2:
            raise ValueError(f"weight must be even and >= 2, got k={self.k}")

    def __str__(self):
        return f"({self.N}, {self.k})"


@dataclass(frozen=True)
class TraceValue:
    space: LevelWeight
    index: int
    value: int


@dataclass(frozen=True)
class NormalizedTrace:
    space: LevelWeight
    index: int
    value: Fraction


def gegenbauer_P(k: int, t: int, m: int) -> int:
    """(rho^(k-1) - rhobar^(k-1)) / (rho - rhobar) for the roots of X^2 - tX + m."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if t * t > 4 * m:
        raise ValueError(f"t^2 > 4m (t={t}, m={m})")
    prev, cur = 1, t  # P_2, P_3
    if k == 2:
        return 1
    for _ in range(k - 3):
        prev, cur = cur, t * cur - m * prev
    return cur


def _sqrt_count(a: int, p: int, e: int) -> int:
    """Number of y mod p^e with y^2 = a (mod p^e)."""
    pe = p**e
    a %= pe
    if a == 0:
        return p ** (e // 2)
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    if v % 2:
        return 0
    rest = e - v
    if p == 2:
        if rest == 1:
            units = 1
        elif rest == 2:
            units = 2 if a % 4 == 1 else 0
        else:
            units = 4 if a % 8 == 1 else 0
    else:
        units = 1 + kronecker_symbol(a, p)
    return units * p ** (v // 2)


def _local_root_count(t: int, n: int, p: int, e: int) -> int:
    """Number of x mod p^e with x^2 - t x + n = 0 (mod p^e)."""
    if p != 2:
        # completing the square is a bijection mod odd p^e
        return _sqrt_count(t * t - 4 * n, p, e)
    if t % 2:
        # derivative 2x - t is a unit, so roots mod 2 lift uniquely (Hensel)
        return 2 if n % 2 == 0 else 0
    return _sqrt_count(t * t // 4 - n, 2, e)


def count_quadratic_roots(t: int, n: int, M: int) -> int:
    """Number of x mod M with x^2 - t x + n = 0 (mod M), by CRT over prime powers of M."""
    out = 1
    for p, e in factorize(M):
        out *= _local_root_count(t, n, p, e)
        if not out:
            break
    return out


@lru_cache(maxsize=1 << 16)
def _elliptic_weights(N: int, m: int) -> tuple[tuple[int, Fraction], ...]:
    """For each t with t^2 < 4m, the factor sum_f h_w((t^2-4m)/f^2) * mu(t, f, m).

    Independent of k, so one evaluation serves every weight at this (N, m).
    """
    psi_N = psi(N)
    out = []
    tmax = isqrt(4 * m - 1)
    for t in range(0, tmax + 1):
        D = t * t - 4 * m
        total = Fraction(0)
        for f in range(1, isqrt(-D) + 1):
            if D % (f * f):
                continue
            Df = D // (f * f)
            if Df % 4 not in (0, 1):
                continue
            Nf = gcd(N, f)
            roots = count_quadratic_roots(t, m, N * Nf)
            if not roots:
                continue
            mu = Fraction(psi_N * roots, psi(N // Nf) * Nf)
            total += class_number_weighted(Df) * mu
        if total:
            out.append((t, total))
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def _hyperbolic_weights(N: int, m: int) -> tuple[tuple[int, int], ...]:
    """Pairs (min(d, m/d), cusp count) over all d | m (both orders of each factorization)."""
    cusp_data = [(gcd(c, N // c)) for c in divisors(N)]
    out = []
    for d in divisors(m):
        diff = m // d - d
        count = sum(euler_phi(g) for g in cusp_data if diff % g == 0)
        out.append((min(d, m // d), count))
    return tuple(out)


@lru_cache(maxsize=1 << 18)
def _trace(N: int, k: int, m: int) -> int:
    total = Fraction(0)
    if is_square(m):
        total += Fraction(k - 1, 12) * psi(N) * isqrt(m) ** (k - 2)
    elliptic = Fraction(0)
    for t, w in _elliptic_weights(N, m):
        # +t and -t give the same P_k and root counts (x -> -x)
        mult = 1 if t == 0 else 2
        elliptic += mult * gegenbauer_P(k, t, m) * w
    total -= elliptic / 2
    # Summing over every divisor d counts each factorization d*d' with d != d'
    # twice; the halving leaves the d = d' = sqrt(m) term with weight 1/2.
    hyperbolic = sum(mn ** (k - 1) * c for mn, c in _hyperbolic_weights(N, m))
    total -= Fraction(hyperbolic, 2)
    if k == 2:
        total += sigma(m, 1)
    if total.denominator != 1:
        raise ArithmeticError(f"non-integral trace {total} at N={N}, k={k}, m={m}")
    return total.numerator


def _validate(space: LevelWeight, m: int) -> None:
    if m < 1:
        raise ValueError(f"Hecke index must be >= 1, got {m}")
    if gcd(m, space.N) != 1:
        raise CoprimalityError(
            f"gcd(m, N) = gcd({m}, {space.N}) != 1; traces are only defined here for m coprime to N"
        )


def trace_hecke(space: LevelWeight, m: int) -> TraceValue:
    """Exact Tr T_m on S_k(Gamma_0(N)); requires gcd(m, N) = 1."""
    _validate(space, m)
    return TraceValue(space, m, _trace(space.N, space.k, m))


def dim_cusp(space: LevelWeight) -> int:
    """dim S_k(Gamma_0(N)), computed as Tr T_1."""
    return _trace(space.N, space.k, 1)


def normalized_trace(space: LevelWeight, m: int) -> NormalizedTrace:
    """Tr T_m / m^((k-1)/2) for a perfect square m, as an exact rational."""
    if not is_square(m):
        raise ValueError(f"m={m} is not a perfect square; normalized trace would be irrational")
    tv = trace_hecke(space, m)
    return NormalizedTrace(space, m, Fraction(tv.value, isqrt(m) ** (space.k - 1)))
