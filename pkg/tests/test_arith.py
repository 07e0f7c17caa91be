from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckeavg.arith import (
    class_number_weighted,
    divisors,
    euler_phi,
    factorize,
    hurwitz_class_number,
    is_square,
    kronecker_symbol,
    omega,
    psi,
    sigma,
    squarefree_decomposition,
)


@pytest.mark.parametrize("n, expected", [(1, [1]), (6, [1, 2, 3, 6]), (16, [1, 2, 4, 8, 16])])
def test_divisors_examples(n, expected):
    assert divisors(n) == expected


@pytest.mark.parametrize("n, j, expected", [(2, 1, 3), (4, 0, 3), (12, 1, 28)])
def test_sigma_examples(n, j, expected):
    assert sigma(n, j) == expected


@pytest.mark.parametrize("N, expected", [(1, 1), (6, 12), (37, 38)])
def test_psi_examples(N, expected):
    assert psi(N) == expected


@pytest.mark.parametrize("N, expected", [(1, 0), (12, 2), (30, 3)])
def test_omega_examples(N, expected):
    assert omega(N) == expected


@pytest.mark.parametrize("n, expected", [(1, 1), (9, 6), (10, 4)])
def test_euler_phi_examples(n, expected):
    assert euler_phi(n) == expected


@pytest.mark.parametrize("fn", [divisors, sigma, psi, omega, euler_phi])
def test_rejects_zero(fn):
    with pytest.raises(ValueError):
        fn(0)


def test_divisor_functions_against_brute_force():
    for n in range(1, 10_001):
        divs = [d for d in range(1, n + 1) if n % d == 0] if n <= 2000 else divisors(n)
        assert divisors(n) == divs
        assert sigma(n, 1) == sum(divs)
        assert sigma(n, 0) == len(divs)
    for n in range(1, 500):
        assert euler_phi(n) == sum(1 for a in range(1, n + 1) if gcd(a, n) == 1)
        primes = [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]
        assert omega(n) == len(primes)
        assert psi(n) == n * _prod(Fraction(p + 1, p) for p in primes)


def _prod(xs):
    out = Fraction(1)
    for x in xs:
        out *= x
    return out


@settings(max_examples=300)
@given(st.integers(1, 10_000), st.integers(1, 10_000))
def test_psi_multiplicative(a, b):
    if gcd(a, b) == 1:
        assert psi(a * b) == psi(a) * psi(b)
    assert psi(a) >= a


@given(st.integers(1, 10**9))
def test_factorize_roundtrip(n):
    out = 1
    for p, e in factorize(n):
        out *= p**e
    assert out == n


@given(st.integers(0, 10**8))
def test_squarefree_decomposition(n):
    s, r = squarefree_decomposition(n)
    assert s * s * r == n
    assert all(e == 1 for _, e in factorize(r))


# Small Hurwitz class numbers, read off from the reduced forms by hand,
# e.g. n = 16 has (1,0,4) with weight 1 and (2,0,2) with weight 1/2.
@pytest.mark.parametrize(
    "n, expected",
    [
        (0, Fraction(-1, 12)),
        (3, Fraction(1, 3)),
        (4, Fraction(1, 2)),
        (7, Fraction(1)),
        (8, Fraction(1)),
        (11, Fraction(1)),
        (12, Fraction(4, 3)),
        (15, Fraction(2)),
        (16, Fraction(3, 2)),
        (1, Fraction(0)),
        (2, Fraction(0)),
        (5, Fraction(0)),
    ],
)
def test_hurwitz_values(n, expected):
    assert hurwitz_class_number(n) == expected


def test_hurwitz_twelve_times_integral():
    for n in range(10_001):
        h = hurwitz_class_number(n)
        assert (12 * h).denominator == 1
        if n >= 3 and n % 4 in (0, 3):
            assert h > 0


def test_kronecker_hurwitz_class_number_relation():
    # sum_{t} H(4n - t^2) = 2 sigma(n) - sum_{d | n} min(d, n/d), with H(0) = -1/12
    for n in range(1, 400):
        lhs = sum(hurwitz_class_number(4 * n - t * t) for t in range(-2 * int(n**0.5) - 2, 2 * int(n**0.5) + 3)
                  if t * t <= 4 * n)
        rhs = 2 * sigma(n) - sum(min(d, n // d) for d in divisors(n))
        assert lhs == rhs, n


def test_primitive_class_numbers_sum_to_hurwitz():
    for n in range(3, 2000):
        if n % 4 not in (0, 3):
            continue
        total = Fraction(0)
        f = 1
        while f * f <= n:
            if n % (f * f) == 0 and (-n // (f * f)) % 4 in (0, 1):
                total += class_number_weighted(-n // (f * f))
            f += 1
        assert total == hurwitz_class_number(n)


def test_class_number_weighted_examples():
    assert class_number_weighted(-3) == Fraction(1, 3)
    assert class_number_weighted(-4) == Fraction(1, 2)
    assert class_number_weighted(-23) == 3
    assert class_number_weighted(-12) == 1  # (1,0,3) only; (2,2,2) is imprimitive
    with pytest.raises(ValueError):
        class_number_weighted(-5)


def _legendre_brute(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if any(x * x % p == a for x in range(1, p)) else -1


ODD_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43]


def test_kronecker_examples():
    assert kronecker_symbol(1, 3) == 1
    assert kronecker_symbol(2, 2) == 0
    assert kronecker_symbol(-4, 7) == _legendre_brute(-4, 7) == -1


def test_kronecker_matches_brute_force_residues():
    for p in ODD_PRIMES:
        for a in range(-60, 61):
            assert kronecker_symbol(a, p) == _legendre_brute(a, p), (a, p)


@given(st.integers(-500, 500), st.sampled_from(ODD_PRIMES + [2]), st.sampled_from(ODD_PRIMES + [2, -1]))
def test_kronecker_multiplicative_in_denominator(a, n1, n2):
    assert kronecker_symbol(a, n1 * n2) == kronecker_symbol(a, n1) * kronecker_symbol(a, n2)


def test_kronecker_at_two():
    for a in range(-40, 41):
        expected = 0 if a % 2 == 0 else (1 if a % 8 in (1, 7) else -1)
        assert kronecker_symbol(a, 2) == expected


def test_is_square():
    assert [n for n in range(50) if is_square(n)] == [0, 1, 4, 9, 16, 25, 36, 49]
    assert not is_square(-4)
