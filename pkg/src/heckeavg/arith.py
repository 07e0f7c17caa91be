"""Exact arithmetic primitives: divisor functions, psi, class numbers, Kronecker symbol.

Rationals are :class:`fractions.Fraction`, which is always kept in lowest terms
with a positive denominator.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

__all__ = [
    "ExactRational",
    "factorize",
    "divisors",
    "sigma",
    "psi",
    "omega",
    "euler_phi",
    "is_square",
    "squarefree_decomposition",
    "class_number_weighted",
    "hurwitz_class_number",
    "kronecker_symbol",
]

ExactRational = Fraction


def _check_positive(n: int, name: str = "n") -> None:
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"{name} must be an int, got {type(n).__name__}")
    if n < 1:
        raise ValueError(f"{name} must be >= 1, got {n}")


@lru_cache(maxsize=1 << 18)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of ``n`` by trial division, as ``((p, e), ...)`` sorted by p."""
    _check_positive(n)
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    p = 5
    step = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += step
        step = 6 - step
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def divisors(n: int) -> list[int]:
    """All positive divisors of ``n`` in increasing order."""
    _check_positive(n)
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def sigma(n: int, j: int = 1) -> int:
    """Divisor power sum: sum of d**j over d | n."""
    _check_positive(n)
    if j < 0:
        raise ValueError("j must be non-negative")
    if j == 0:
        out = 1
        for _, e in factorize(n):
            out *= e + 1
        return out
    out = 1
    for p, e in factorize(n):
        pj = p**j
        out *= (pj ** (e + 1) - 1) // (pj - 1)
    return out


def psi(N: int) -> int:
    """Index of Gamma_0(N) in SL_2(Z): N * prod_{p | N} (1 + 1/p)."""
    _check_positive(N, "N")
    out = N
    for p, _ in factorize(N):
        out = out // p * (p + 1)
    return out


def omega(N: int) -> int:
    """Number of distinct prime divisors of N."""
    _check_positive(N, "N")
    return len(factorize(N))


def euler_phi(n: int) -> int:
    _check_positive(n)
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Write ``n = s**2 * r`` with ``r`` squarefree; returns ``(s, r)``. n = 0 gives (0, 1)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 0, 1
    s = r = 1
    for p, e in factorize(n):
        s *= p ** (e // 2)
        if e % 2:
            r *= p
    return s, r


def _reduced_forms(n: int):
    """Yield reduced positive-definite forms (a, b, c) with b^2 - 4ac = -n.

    Reduced means |b| <= a <= c, with b >= 0 whenever |b| == a or a == c.
    """
    a = 1
    # a <= c and |b| <= a force 3a^2 <= n
    while 3 * a * a <= n:
        for b in range(-a + 1, a + 1):
            num = b * b + n
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if c == a and b < 0:
                continue
            yield a, b, c
        a += 1


def _form_weight(a: int, b: int, c: int) -> Fraction:
    # forms equivalent to multiples of x^2+y^2 / x^2+xy+y^2 have extra automorphisms
    if a == c and b == 0:
        return Fraction(1, 2)
    if a == b == c:
        return Fraction(1, 3)
    return Fraction(1)


@lru_cache(maxsize=None)
def hurwitz_class_number(n: int) -> Fraction:
    """Hurwitz class number H(n), with the convention H(0) = -1/12.

    Counts all (not necessarily primitive) reduced forms of discriminant -n,
    weighting the classes of a(x^2+y^2) by 1/2 and a(x^2+xy+y^2) by 1/3.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return Fraction(-1, 12)
    if n % 4 in (1, 2):
        return Fraction(0)
    return sum((_form_weight(*f) for f in _reduced_forms(n)), Fraction(0))


@lru_cache(maxsize=None)
def class_number_weighted(D: int) -> Fraction:
    """Weighted class number h(D) / (w(D)/2) of primitive forms of discriminant D < 0."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")
    total = Fraction(0)
    for a, b, c in _reduced_forms(-D):
        if gcd(gcd(a, b), c) == 1:
            total += _form_weight(a, b, c)
    return total


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a | n) for arbitrary integers a, n."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a | n) for odd positive n
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0
