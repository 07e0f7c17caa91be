from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import gcd, isqrt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckeavg.arith import divisors, euler_phi, hurwitz_class_number, psi, sigma
from heckeavg.level1 import hecke_matrix
from heckeavg.trace import (
    CoprimalityError,
    LevelWeight,
    count_quadratic_roots,
    dim_cusp,
    gegenbauer_P,
    normalized_trace,
    trace_hecke,
)

from .conftest import naive_eta_product


def test_level_weight_validation():
    with pytest.raises(ValueError):
        LevelWeight(0, 2)
    with pytest.raises(ValueError):
        LevelWeight(1, 3)
    with pytest.raises(ValueError):
        LevelWeight(1, 0)


@pytest.mark.parametrize("t, m", [(0, 1), (1, 1), (2, 1), (3, 5), (-4, 4)])
def test_gegenbauer_weight_two(t, m):
    assert gegenbauer_P(2, t, m) == 1


def test_gegenbauer_examples():
    assert gegenbauer_P(4, 1, 2) == -1
    assert gegenbauer_P(12, 0, 1) == -1
    with pytest.raises(ValueError):
        gegenbauer_P(4, 3, 2)


def test_gegenbauer_matches_root_formula():
    # (rho^(k-1) - rhobar^(k-1)) / (rho - rhobar) in complex arithmetic
    for m in range(1, 10):
        for t in range(-isqrt(4 * m - 1), isqrt(4 * m - 1) + 1):
            disc = complex(t * t - 4 * m) ** 0.5
            rho, rhobar = (t + disc) / 2, (t - disc) / 2
            for k in range(2, 16, 2):
                expected = (rho ** (k - 1) - rhobar ** (k - 1)) / (rho - rhobar)
                assert abs(gegenbauer_P(k, t, m) - expected.real) < 1e-6 * max(1, abs(expected))


def test_gegenbauer_bound():
    for k in range(2, 31, 2):
        for m in range(1, 17):
            for t in range(-isqrt(4 * m), isqrt(4 * m) + 1):
                # |P_k| <= (k-1) m^((k-2)/2), squared to stay in integers
                assert gegenbauer_P(k, t, m) ** 2 <= (k - 1) ** 2 * m ** (k - 2)


def _brute_roots(t, n, M):
    return sum(1 for x in range(M) if (x * x - t * x + n) % M == 0)


@settings(max_examples=400)
@given(st.integers(-40, 40), st.integers(1, 200), st.integers(1, 3000))
def test_quadratic_root_count_matches_enumeration(t, n, M):
    assert count_quadratic_roots(t, n, M) == _brute_roots(t, n, M)


def test_quadratic_root_count_prime_powers():
    for M in (2, 4, 8, 16, 32, 64, 128, 9, 27, 81, 243, 25, 125, 49, 343, 72, 200, 648):
        for t in range(-6, 7):
            for n in range(1, 30):
                assert count_quadratic_roots(t, n, M) == _brute_roots(t, n, M), (t, n, M)


def test_trace_examples():
    assert trace_hecke(LevelWeight(1, 12), 4).value == -1472
    assert trace_hecke(LevelWeight(37, 2), 4).value == 0
    assert trace_hecke(LevelWeight(9, 4), 4).value == -8


def test_trace_rejects_bad_input():
    with pytest.raises(CoprimalityError):
        trace_hecke(LevelWeight(4, 12), 2)
    with pytest.raises(ValueError):
        trace_hecke(LevelWeight(4, 12), 0)


def test_dim_examples():
    assert dim_cusp(LevelWeight(1, 12)) == 1
    assert dim_cusp(LevelWeight(1, 2)) == 0
    assert dim_cusp(LevelWeight(37, 2)) == 2


def _dim_classical(N, k):
    """Genus-based dimension formula; elliptic points and cusps counted by brute force."""
    nu2 = 0 if N % 4 == 0 else sum(1 for x in range(N) if (x * x + 1) % N == 0)
    nu3 = 0 if N % 9 == 0 else sum(1 for x in range(N) if (x * x + x + 1) % N == 0)
    cusps = sum(euler_phi(gcd(d, N // d)) for d in divisors(N))
    genus = 1 + Fraction(psi(N), 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
    assert genus.denominator == 1
    if k == 2:
        return int(genus)
    return int((k - 1) * (genus - 1) + (k // 2 - 1) * cusps + nu2 * (k // 4) + nu3 * (k // 3))


def test_dimension_matches_classical_formula():
    for N in range(1, 301):
        for k in range(2, 17, 2):
            assert dim_cusp(LevelWeight(N, k)) == _dim_classical(N, k), (N, k)


# One-dimensional spaces spanned by eta products: (level, weight, {d: exponent}).
ETA_NEWFORMS = [
    (2, 8, {1: 8, 2: 8}),
    (3, 6, {1: 6, 3: 6}),
    (4, 6, {2: 12}),
    (5, 4, {1: 4, 5: 4}),
    (11, 2, {1: 2, 11: 2}),
    (14, 2, {1: 1, 2: 1, 7: 1, 14: 1}),
    (15, 2, {1: 1, 3: 1, 5: 1, 15: 1}),
    (20, 2, {2: 2, 10: 2}),
    (24, 2, {2: 1, 4: 1, 6: 1, 12: 1}),
    (27, 2, {3: 2, 9: 2}),
    (32, 2, {4: 2, 8: 2}),
    (36, 2, {6: 4}),
]


@pytest.mark.parametrize("N, k, eta", ETA_NEWFORMS, ids=[f"N{n}k{k}" for n, k, _ in ETA_NEWFORMS])
def test_trace_matches_eta_product_newform(N, k, eta):
    shift = sum(d * e for d, e in eta.items()) // 24
    coeffs = naive_eta_product(eta, shift, 41)
    space = LevelWeight(N, k)
    assert dim_cusp(space) == 1
    for m in range(1, 41):
        if gcd(m, N) == 1:
            assert trace_hecke(space, m).value == coeffs[m], m


def test_eleven_a_elliptic_curve_values():
    space = LevelWeight(11, 2)
    assert [trace_hecke(space, p).value for p in (2, 3, 5, 7, 13)] == [-2, -1, 1, -2, 4]


def _zagier_level_one(k, m):
    # level-1 trace with t^2 <= 4m and H(0) = -1/12 absorbing the identity term
    ell = sum(
        gegenbauer_P(k, t, m) * hurwitz_class_number(4 * m - t * t)
        for t in range(-isqrt(4 * m), isqrt(4 * m) + 1)
    )
    hyp = sum(min(d, m // d) ** (k - 1) for d in divisors(m))
    total = -Fraction(ell, 1) / 2 - Fraction(hyp, 2) + (sigma(m) if k == 2 else 0)
    return total


def test_hurwitz_zero_convention_reproduces_level_one_traces():
    for k in range(2, 31, 2):
        for m in range(1, 31):
            assert _zagier_level_one(k, m) == trace_hecke(LevelWeight(1, k), m).value


def test_level_one_matrix_oracle_small():
    for k in (12, 16, 24):
        for m in (1, 2, 3, 5):
            assert trace_hecke(LevelWeight(1, k), m).value == hecke_matrix(k, m).trace()


@pytest.mark.parametrize("p", [2, 3, 5])
def test_composition_identity_level_one(p):
    # T_p^2 = T_{p^2} + p^(k-1) T_1
    for k in range(12, 27, 2):
        Tp = hecke_matrix(k, p)
        sq = Tp @ Tp
        lhs = trace_hecke(LevelWeight(1, k), p * p).value + p ** (k - 1) * dim_cusp(LevelWeight(1, k))
        assert lhs == sum(sq[i][i] for i in range(len(sq)))


def test_integrality_over_many_spaces():
    # _trace raises on a non-integral total; sweep a block of spaces and indices
    for N in range(1, 60):
        for k in (2, 4, 6, 10):
            for m in range(1, 20):
                if gcd(m, N) == 1:
                    assert isinstance(trace_hecke(LevelWeight(N, k), m).value, int)


def test_normalized_trace():
    assert normalized_trace(LevelWeight(1, 12), 4).value == Fraction(-23, 32)
    assert normalized_trace(LevelWeight(9, 4), 4).value == -1
    for N, k in [(11, 2), (37, 2), (1, 24), (23, 4)]:
        assert normalized_trace(LevelWeight(N, k), 1).value == dim_cusp(LevelWeight(N, k))
    with pytest.raises(ValueError):
        normalized_trace(LevelWeight(1, 12), 2)


def _primes_between(a, b):
    return [n for n in range(a, b) if all(n % p for p in range(2, isqrt(n) + 1))]


def test_asymptotic_sanity_t4():
    for N in _primes_between(10_000, 10_101):
        space = LevelWeight(N, 2)
        ratio = normalized_trace(space, 4).value / Fraction(psi(N), 24)
        assert 0.5 <= ratio <= 1.5, (N, float(ratio))


def test_concurrent_evaluation_is_deterministic():
    keys = [(N, k, m) for N in range(1, 80, 2) for k in (2, 4) for m in (1, 4, 8) if gcd(m, N) == 1]
    serial = [trace_hecke(LevelWeight(N, k), m).value for N, k, m in keys]
    with ThreadPoolExecutor(8) as pool:
        threaded = list(pool.map(lambda key: trace_hecke(LevelWeight(key[0], key[1]), key[2]).value, keys))
    assert serial == threaded
