"""Level-1 q-expansions, Hecke matrices on the Victor Miller basis, and the tau series.

This is a computation path independent of the trace formula: everything here
comes from multiplying q-expansions and applying the coefficient action of T_m.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from pathlib import Path

from .arith import divisors, squarefree_decomposition
from .qexp import PrecisionError, QExpansion

__all__ = [
    "HeckeMatrix",
    "CoefficientSeries",
    "IrrationalEigenvalueError",
    "QuadraticNumber",
    "Eigenform",
    "eisenstein",
    "delta_qexp",
    "victor_miller_basis",
    "dim_cusp_level1",
    "hecke_matrix",
    "tau_series",
    "eigenforms",
    "eigen_coefficients",
    "format_coefficients",
    "write_coefficient_file",
    "read_coefficient_file",
]


class IrrationalEigenvalueError(ValueError):
    """Hecke eigenvalues lie outside Q but exact integer output was requested."""


def _power_sums(j: int, n: int) -> list[int]:
    """sigma_j(0..n-1) by a divisor sieve; index 0 is unused (0)."""
    out = [0] * n
    for d in range(1, n):
        dj = d**j
        for mult in range(d, n, d):
            out[mult] += dj
    return out


def eisenstein(weight: int, precision: int) -> QExpansion:
    """E_4 = 1 + 240 sum sigma_3(n) q^n, or E_6 = 1 - 504 sum sigma_5(n) q^n."""
    if weight not in (4, 6):
        raise ValueError(f"only weights 4 and 6 are supported, got {weight}")
    if precision < 1:
        raise ValueError("precision must be positive")
    const, j = (240, 3) if weight == 4 else (-504, 5)
    sig = _power_sums(j, precision)
    return QExpansion([1] + [const * s for s in sig[1:]], precision)


def _eta_cubed(precision: int) -> list[int]:
    """prod (1 - q^n)^3 = sum_{n >= 0} (-1)^n (2n+1) q^{n(n+1)/2} (Jacobi)."""
    out = [0] * precision
    n = 0
    while n * (n + 1) // 2 < precision:
        out[n * (n + 1) // 2] = (-1) ** n * (2 * n + 1)
        n += 1
    return out


def delta_qexp(precision: int) -> QExpansion:
    """Delta = q prod (1 - q^n)^24, via three squarings of the sparse eta^3 series."""
    if precision < 1:
        raise ValueError("precision must be positive")
    inner = QExpansion(_eta_cubed(max(precision - 1, 1)))
    for _ in range(3):
        inner = inner * inner
    return QExpansion([0] + inner.coefficients[: precision - 1], precision)


def dim_cusp_level1(k: int) -> int:
    """dim S_k(SL_2(Z)) for even k >= 2."""
    if k < 2 or k % 2:
        raise ValueError("k must be even and >= 2")
    e = k % 12
    if e == 2:
        e = 14
    return max((k - e) // 12, 0)


def victor_miller_basis(k: int, precision: int) -> list[QExpansion]:
    """Echelon basis f_1..f_d of S_k(SL_2(Z)) with a_{f_i}(j) = delta_ij for 1 <= i, j <= d."""
    d = dim_cusp_level1(k)
    if d == 0:
        return []
    if precision < d + 1:
        raise PrecisionError(f"precision {precision} < dim + 1 = {d + 1}")
    e = k - 12 * d
    E4 = eisenstein(4, precision)
    E6 = eisenstein(6, precision)
    lead = {
        0: QExpansion([1], precision),
        4: E4,
        6: E6,
        8: E4 * E4,
        10: E4 * E6,
        14: E4 * E4 * E6,
    }[e]
    D = delta_qexp(precision)
    E6sq = E6 * E6
    # g_i = lead * E6^(2(d-i)) * Delta^i = q^i + O(q^(i+1))
    gens = []
    for i in range(1, d + 1):
        gens.append(lead * E6sq ** (d - i) * D**i)
    basis: list[QExpansion] = [None] * d
    for i in range(d - 1, -1, -1):
        f = gens[i]
        for j in range(i + 1, d):
            c = f[j + 1]
            if c:
                f = f - basis[j] * c
        basis[i] = f
    return basis


@dataclass(frozen=True)
class HeckeMatrix:
    """Matrix of T_m on the Victor Miller basis; column j is the image of f_{j+1}."""

    weight: int
    index: int
    entries: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def trace(self) -> int:
        return sum(self.entries[i][i] for i in range(self.dimension))

    def __matmul__(self, other: "HeckeMatrix") -> tuple[tuple[int, ...], ...]:
        n = self.dimension
        return tuple(
            tuple(sum(self.entries[i][l] * other.entries[l][j] for l in range(n)) for j in range(n))
            for i in range(n)
        )


def _hecke_coefficient(f: QExpansion, k: int, m: int, n: int) -> int:
    """a_{T_m f}(n) = sum_{d | gcd(m, n)} d^(k-1) a_f(mn/d^2)."""
    return sum(d ** (k - 1) * f[m * n // (d * d)] for d in divisors(gcd(m, n)))


def hecke_matrix(k: int, m: int, precision: int | None = None) -> HeckeMatrix:
    """Matrix of T_m acting on S_k(SL_2(Z)) in the Victor Miller basis."""
    if m < 1:
        raise ValueError("m must be >= 1")
    d = dim_cusp_level1(k)
    need = m * d + 1
    if precision is None:
        precision = need
    if precision < need:
        raise PrecisionError(f"precision {precision} < m*dim + 1 = {need}")
    basis = victor_miller_basis(k, precision)
    entries = tuple(
        tuple(_hecke_coefficient(basis[j], k, m, i + 1) for j in range(d)) for i in range(d)
    )
    return HeckeMatrix(k, m, entries)


@dataclass
class CoefficientSeries:
    """Unnormalized coefficients a(1..x) of one form."""

    weight: int
    values: list[int]
    label: str = "f"

    @property
    def length(self) -> int:
        return len(self.values)

    def __getitem__(self, m: int) -> int:
        """a(m), 1-based."""
        if m < 1 or m > len(self.values):
            raise PrecisionError(f"a({m}) requested, series has {len(self.values)} coefficients")
        return self.values[m - 1]


def tau_series(x: int) -> CoefficientSeries:
    """Ramanujan tau(1..x)."""
    if x < 1:
        raise ValueError("x must be >= 1")
    D = delta_qexp(x + 1)
    return CoefficientSeries(12, D.coefficients[1:], "Delta")


class QuadraticNumber:
    """a + b*sqrt(D) with rational a, b and squarefree D (D = 1 means rational)."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b=0, D=1):
        self.a = Fraction(a)
        self.b = Fraction(b) if D != 1 else Fraction(0)
        self.D = D
        if D == 1:
            self.a += Fraction(b)

    def _lift(self, other):
        if isinstance(other, QuadraticNumber):
            if other.D != self.D and other.b and self.b:
                raise ValueError("mixing different quadratic fields")
            return other
        return QuadraticNumber(other, 0, self.D)

    def __add__(self, other):
        o = self._lift(other)
        D = self.D if self.D != 1 else o.D
        return QuadraticNumber(self.a + o.a, self.b + o.b, D)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.D)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        D = self.D if self.D != 1 else o.D
        return QuadraticNumber(self.a * o.a + self.b * o.b * D, self.a * o.b + self.b * o.a, D)

    __rmul__ = __mul__

    def conjugate(self):
        return QuadraticNumber(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.D

    def __truediv__(self, other):
        o = self._lift(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        num = self * o.conjugate()
        return QuadraticNumber(num.a / n, num.b / n, num.D)

    def __rtruediv__(self, other):
        return QuadraticNumber(other, 0, self.D) / self

    def __eq__(self, other):
        o = self._lift(other)
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b, self.D))

    def is_rational(self) -> bool:
        return self.b == 0

    def trace(self) -> Fraction:
        return 2 * self.a

    def __float__(self):
        return float(self.a) + float(self.b) * self.D**0.5

    def __repr__(self):
        if not self.b:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.D})"


@dataclass
class Eigenform:
    """Normalized Hecke eigenform, coefficients possibly in a real quadratic field."""

    weight: int
    coefficients: list[QuadraticNumber]  # a(1..x)
    field_discriminant: int = 1  # squarefree D of Q(sqrt D); 1 means rational
    label: str = ""

    def is_rational(self) -> bool:
        return self.field_discriminant == 1


def _nullvector(rows: list[list[QuadraticNumber]]) -> list[QuadraticNumber]:
    """A nonzero kernel vector of a square matrix whose kernel is one-dimensional."""
    n = len(rows)
    A = [row[:] for row in rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(n):
            if i != r and A[i][c] != 0:
                fac = A[i][c]
                A[i] = [x - fac * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        raise ArithmeticError(f"expected a one-dimensional eigenspace, got {len(free)}")
    fc = free[0]
    v = [QuadraticNumber(0)] * n
    v[fc] = QuadraticNumber(1)
    for i, pc in enumerate(pivots):
        v[pc] = -A[i][fc]
    return v


def eigenforms(k: int, x: int) -> list[Eigenform]:
    """Normalized eigenforms of S_k(SL_2(Z)) with coefficients a(1..x).

    Eigenvectors of T_2 are found over Q or a real quadratic field; Hecke fields
    of degree > 2 are not supported.
    """
    import sympy

    d = dim_cusp_level1(k)
    if d == 0:
        return []
    if x < 1:
        raise ValueError("x must be >= 1")
    prec = max(x + 1, 2 * d + 1)
    basis = victor_miller_basis(k, prec)
    if d == 1:
        coeffs = [QuadraticNumber(c) for c in basis[0].coefficients[1 : x + 1]]
        return [Eigenform(k, coeffs, 1, f"{k}.1")]
    T2 = hecke_matrix(k, 2, prec)
    X = sympy.Symbol("X")
    charpoly = sympy.Matrix(T2.entries).charpoly(X).as_expr()
    _, factors = sympy.factor_list(charpoly, X)
    forms = []
    for poly, mult in factors:
        coeffs = [int(c) for c in sympy.Poly(poly, X).all_coeffs()]
        if mult != 1:
            raise ArithmeticError("T_2 has a repeated eigenvalue")
        if len(coeffs) == 2:
            roots = [QuadraticNumber(Fraction(-coeffs[1], coeffs[0]))]
            Dsf = 1
        elif len(coeffs) == 3:
            a2, b2, c2 = coeffs
            s, Dsf = squarefree_decomposition(b2 * b2 - 4 * a2 * c2)
            roots = [
                QuadraticNumber(Fraction(-b2, 2 * a2), Fraction(sgn * s, 2 * a2), Dsf)
                for sgn in (1, -1)
            ]
        else:
            raise NotImplementedError(f"Hecke field of degree {len(coeffs) - 1} at weight {k}")
        for lam in roots:
            M = [
                [QuadraticNumber(T2.entries[i][j]) - (lam if i == j else 0) for j in range(d)]
                for i in range(d)
            ]
            v = _nullvector(M)
            # a_f(1) = v_1 because only f_1 has a q^1 term
            v = [c / v[0] for c in v]
            series = [
                sum((v[j] * basis[j][n] for j in range(d)), QuadraticNumber(0, 0, Dsf))
                for n in range(1, x + 1)
            ]
            forms.append(Eigenform(k, series, Dsf, f"{k}.{len(forms) + 1}"))
    forms.sort(key=lambda f: float(f.coefficients[1]) if x >= 2 else 0.0)
    return forms


def eigen_coefficients(k: int, x: int, irrational: str = "reject") -> list[CoefficientSeries]:
    """Integer coefficient series of the normalized eigenforms of S_k(SL_2(Z)).

    ``irrational`` controls Hecke fields larger than Q: ``"reject"`` raises
    :class:`IrrationalEigenvalueError`; ``"trace"`` returns one series per
    conjugate pair holding a_f(n) + a_{f^sigma}(n).
    """
    if irrational not in ("reject", "trace"):
        raise ValueError("irrational must be 'reject' or 'trace'")
    out = []
    seen_fields = set()
    for f in eigenforms(k, x):
        if f.is_rational():
            out.append(CoefficientSeries(k, [int(c.a) for c in f.coefficients], f.label))
            continue
        if irrational == "reject":
            raise IrrationalEigenvalueError(
                f"weight {k} eigenforms have coefficients in Q(sqrt({f.field_discriminant}))"
            )
        if f.field_discriminant in seen_fields:
            continue
        seen_fields.add(f.field_discriminant)
        vals = [int(c.trace()) for c in f.coefficients]
        out.append(CoefficientSeries(k, vals, f"{k}.trace(sqrt{f.field_discriminant})"))
    return out


def format_coefficients(series: CoefficientSeries) -> str:
    """``# label weight=k`` then one ``m<TAB>a(m)`` line per index."""
    lines = [f"# {series.label} weight={series.weight}"]
    lines += [f"{m}\t{a}" for m, a in enumerate(series.values, start=1)]
    return "\n".join(lines) + "\n"


def write_coefficient_file(series: CoefficientSeries, path: str | Path) -> None:
    Path(path).write_text(format_coefficients(series), encoding="utf-8")


def read_coefficient_file(path: str | Path) -> CoefficientSeries:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing '# label weight=k' header")
    header = text[0][1:].strip()
    label, sep, wt = header.rpartition("weight=")
    if not sep:
        raise ValueError(f"{path}: header lacks weight=")
    weight = int(wt)
    values = []
    for lineno, line in enumerate(text[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        m_str, a_str = line.split("\t")
        m = int(m_str)
        if m != len(values) + 1:
            raise ValueError(f"{path}:{lineno}: expected index {len(values) + 1}, got {m}")
        values.append(int(a_str))
    if not values:
        raise ValueError(f"{path}: no coefficients")
    return CoefficientSeries(weight, values, label.strip() or "f")
