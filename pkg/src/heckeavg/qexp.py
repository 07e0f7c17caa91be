"""Truncated integer q-expansions with exact multiplication."""

from __future__ import annotations

from typing import Sequence

try:
    import gmpy2
except ImportError:  # pragma: no cover - plain ints still work, just slower
    gmpy2 = None

__all__ = ["PrecisionError", "QExpansion", "convolve"]

# Below this many terms (shorter operand) schoolbook beats packing into big integers.
SCHOOLBOOK_CUTOFF = 64


class PrecisionError(IndexError):
    """Raised when a coefficient beyond the known precision is requested."""


def _schoolbook(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    out = [0] * n
    if len(a) < len(b):
        a, b = b, a
    # b is the shorter (often sparse) operand
    for j, bj in enumerate(b[:n]):
        if not bj:
            continue
        for i, ai in enumerate(a[: n - j]):
            if ai:
                out[i + j] += ai * bj
    return out


def _pack(coeffs: Sequence[int], nbytes: int) -> int:
    return int.from_bytes(b"".join(c.to_bytes(nbytes, "little") for c in coeffs), "little")


def _unpack(value: int, nbytes: int, n: int) -> list[int]:
    raw = value.to_bytes(max(nbytes * n, (value.bit_length() + 7) // 8), "little")
    return [int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") for i in range(n)]


def _mul(x: int, y: int) -> int:
    if gmpy2 is not None:
        return int(gmpy2.mpz(x) * gmpy2.mpz(y))
    return x * y


def _kronecker(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """Exact truncated product by Kronecker substitution (evaluation at a power of 2).

    Signs are handled by splitting each operand into non-negative parts, so every
    packed product has non-negative coefficients and unpacks by byte slicing.
    """
    a = list(a[:n])
    b = list(b[:n])
    ma = max(map(abs, a), default=0)
    mb = max(map(abs, b), default=0)
    # each slot must hold both the packed inputs and every output coefficient
    bound = max(ma, mb, ma * mb * min(len(a), len(b)))
    nbytes = (bound.bit_length() + 8) // 8 + 1
    ap = [c if c > 0 else 0 for c in a]
    am = [-c if c < 0 else 0 for c in a]
    bp = [c if c > 0 else 0 for c in b]
    bm = [-c if c < 0 else 0 for c in b]
    packed = {name: _pack(v, nbytes) for name, v in (("ap", ap), ("am", am), ("bp", bp), ("bm", bm))}
    pos = _mul(packed["ap"], packed["bp"]) + _mul(packed["am"], packed["bm"])
    neg = _mul(packed["ap"], packed["bm"]) + _mul(packed["am"], packed["bp"])
    P = _unpack(pos, nbytes, n)
    M = _unpack(neg, nbytes, n)
    return [p - m for p, m in zip(P, M)]


def convolve(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """First ``n`` coefficients of the product of two integer series."""
    nza = sum(1 for c in a[:n] if c)
    nzb = sum(1 for c in b[:n] if c)
    if min(nza, nzb) <= SCHOOLBOOK_CUTOFF or min(len(a), len(b)) <= SCHOOLBOOK_CUTOFF:
        return _schoolbook(a, b, n)
    return _kronecker(a, b, n)


class QExpansion:
    """Integer power series in q known modulo q^precision."""

    __slots__ = ("coefficients", "precision")

    def __init__(self, coefficients: Sequence[int], precision: int | None = None):
        coeffs = [int(c) for c in coefficients]
        if precision is None:
            precision = len(coeffs)
        if precision < 1:
            raise ValueError("precision must be positive")
        coeffs = coeffs[:precision] + [0] * (precision - len(coeffs))
        self.coefficients = coeffs
        self.precision = precision

    def __repr__(self):
        head = ", ".join(map(str, self.coefficients[:6]))
        more = ", ..." if self.precision > 6 else ""
        return f"QExpansion([{head}{more}], precision={self.precision})"

    def __len__(self):
        return self.precision

    def __getitem__(self, n: int) -> int:
        if isinstance(n, slice):
            start, stop, step = n.indices(self.precision)
            if n.stop is not None and n.stop > self.precision:
                raise PrecisionError(f"slice stop {n.stop} beyond precision {self.precision}")
            return self.coefficients[start:stop:step]
        if n < 0 or n >= self.precision:
            raise PrecisionError(f"coefficient {n} requested, precision is {self.precision}")
        return self.coefficients[n]

    def __eq__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        return self.precision == other.precision and self.coefficients == other.coefficients

    def _coerce(self, other) -> "QExpansion":
        if isinstance(other, QExpansion):
            return other
        if isinstance(other, int):
            return QExpansion([other], self.precision)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = min(self.precision, other.precision)
        return QExpansion([x + y for x, y in zip(self.coefficients[:n], other.coefficients[:n])], n)

    __radd__ = __add__

    def __neg__(self):
        return QExpansion([-c for c in self.coefficients], self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return QExpansion([c * other for c in self.coefficients], self.precision)
        if not isinstance(other, QExpansion):
            return NotImplemented
        n = min(self.precision, other.precision)
        return QExpansion(convolve(self.coefficients, other.coefficients, n), n)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = QExpansion([1], self.precision)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def truncate(self, precision: int) -> "QExpansion":
        if precision > self.precision:
            raise PrecisionError(f"cannot extend precision {self.precision} to {precision}")
        return QExpansion(self.coefficients[:precision], precision)

    def valuation(self) -> int | None:
        for i, c in enumerate(self.coefficients):
            if c:
                return i
        return None
