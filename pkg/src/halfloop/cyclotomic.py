"""Exact arithmetic in the cyclotomic field Q(zeta_m).

An element is stored as integer numerators ``num`` over one positive common
denominator ``den``, in the power basis 1, zeta, ..., zeta^(phi(m)-1) reduced
modulo the m-th cyclotomic polynomial.  The representation is canonical:
``gcd(num..., den) == 1`` and ``den > 0``.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from threading import Lock

__all__ = [
    "CycNum",
    "cyclotomic_polynomial",
    "euler_phi",
    "field_order",
    "root",
    "lift_order",
    "to_complex",
    "inverse",
    "imag_unit",
]

_lock = Lock()


def euler_phi(m: int) -> int:
    result, k, x = m, 2, m
    while k * k <= x:
        if x % k == 0:
            while x % k == 0:
                x //= k
            result -= result // k
        k += 1
    if x > 1:
        result -= result // x
    return result


def _poly_divexact(a: list[int], b: list[int]) -> list[int]:
    # coefficient lists, lowest degree first; b monic
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1]
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    if any(a[: len(b) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return q


@lru_cache(maxsize=None)
def _cyclo(m: int) -> tuple[int, ...]:
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divexact(poly, list(_cyclo(d)))
    return tuple(poly)


def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, lowest degree first.

    >>> cyclotomic_polynomial(12)
    (1, 0, -1, 0, 1)
    """
    if m < 1:
        raise ValueError("cyclotomic order must be positive")
    with _lock:
        return _cyclo(m)


@lru_cache(maxsize=None)
def _reduction_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Row k holds x^k mod Phi_m for 0 <= k < 2*phi(m) - 1."""
    phi_poly = cyclotomic_polynomial(m)
    deg = len(phi_poly) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(max(2 * deg - 1, 1)):
        rows.append(tuple(cur))
        # multiply by x and reduce
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * phi_poly[i]
    return tuple(rows)


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Row k holds zeta_m^k in the power basis, 0 <= k < m."""
    phi_poly = cyclotomic_polynomial(m)
    deg = len(phi_poly) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(m):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * phi_poly[i]
    return tuple(rows)


def field_order(n: int) -> int:
    """Working order lcm(n, 4): holds both zeta_n and the imaginary unit."""
    return n * 4 // math.gcd(n, 4)


class CycNum:
    """Element of Q(zeta_m) in canonical power-basis form."""

    __slots__ = ("order", "num", "den", "_hash")

    def __init__(self, order: int, num, den: int = 1, _normalized: bool = False):
        self.order = order
        if _normalized:
            self.num = num
            self.den = den
        else:
            num = tuple(int(c) for c in num)
            d = len(_reduction_table(order)[0])
            if len(num) != d:
                raise ValueError(f"expected {d} coefficients for order {order}")
            if den == 0:
                raise ZeroDivisionError("zero denominator")
            if den < 0:
                num = tuple(-c for c in num)
                den = -den
            g = math.gcd(den, *num)
            if g > 1:
                num = tuple(c // g for c in num)
                den //= g
            self.num = num
            self.den = den
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def rational(cls, value, order: int = 1) -> CycNum:
        value = Fraction(value)
        d = euler_phi(order)
        return cls(order, (value.numerator,) + (0,) * (d - 1), value.denominator)

    @classmethod
    def zero(cls, order: int = 1) -> CycNum:
        return cls(order, (0,) * euler_phi(order), 1, _normalized=True)

    @classmethod
    def one(cls, order: int = 1) -> CycNum:
        return cls(order, (1,) + (0,) * (euler_phi(order) - 1), 1, _normalized=True)

    # inspection ---------------------------------------------------------

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    def __bool__(self) -> bool:
        return any(self.num)

    # coercion -----------------------------------------------------------

    def _coerce(self, other) -> CycNum | None:
        if isinstance(other, CycNum):
            if other.order == self.order:
                return other
            if other.order == 1:
                return lift_order(other, self.order)
            if self.order == 1:
                return None  # caller swaps
            raise ValueError(
                f"order mismatch: Q(zeta_{self.order}) vs Q(zeta_{other.order}); use lift_order"
            )
        if isinstance(other, (int, Rational)):
            f = Fraction(other)
            d = len(self.num)
            return CycNum(self.order, (f.numerator,) + (0,) * (d - 1), f.denominator)
        return NotImplemented

    def _binary(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented, None
        if o is None:
            return lift_order(self, other.order), other
        return self, o

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        a, b = self._binary(other)
        if a is NotImplemented:
            return NotImplemented
        if a.den == b.den:
            return CycNum(a.order, tuple(x + y for x, y in zip(a.num, b.num)), a.den)
        return CycNum(
            a.order,
            tuple(x * b.den + y * a.den for x, y in zip(a.num, b.num)),
            a.den * b.den,
        )

    __radd__ = __add__

    def __neg__(self) -> CycNum:
        return CycNum(self.order, tuple(-x for x in self.num), self.den, _normalized=True)

    def __sub__(self, other):
        a, b = self._binary(other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._binary(other)
        if a is NotImplemented:
            return NotImplemented
        an, bn = a.num, b.num
        d = len(an)
        if not any(bn[1:]):
            c = bn[0]
            return CycNum(a.order, tuple(x * c for x in an), a.den * b.den)
        if not any(an[1:]):
            c = an[0]
            return CycNum(a.order, tuple(x * c for x in bn), a.den * b.den)
        raw = [0] * (2 * d - 1)
        for i, x in enumerate(an):
            if x:
                for j, y in enumerate(bn):
                    if y:
                        raw[i + j] += x * y
        out = raw[:d]
        table = _reduction_table(a.order)
        for k in range(d, 2 * d - 1):
            c = raw[k]
            if c:
                row = table[k]
                for i in range(d):
                    if row[i]:
                        out[i] += c * row[i]
        return CycNum(a.order, tuple(out), a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._binary(other)
        if a is NotImplemented:
            return NotImplemented
        return a * inverse(b)

    def __rtruediv__(self, other):
        return inverse(self) * other

    def __pow__(self, k: int) -> CycNum:
        if k < 0:
            return inverse(self) ** (-k)
        result = CycNum.one(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, CycNum):
            if self.order == other.order:
                return self.den == other.den and self.num == other.num
            if self.is_rational() and other.is_rational():
                return self.num[0] * other.den == other.num[0] * self.den
            return False
        if isinstance(other, (int, Rational)):
            if not self.is_rational():
                return False
            return Fraction(self.num[0], self.den) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(self.num[0], self.den))
            else:
                self._hash = hash((self.order, self.num, self.den))
        return self._hash

    def sort_key(self) -> tuple:
        return (self.order, tuple(Fraction(c, self.den) for c in self.num))

    # misc ---------------------------------------------------------------

    def conjugate(self) -> CycNum:
        """Complex conjugate, zeta -> zeta^-1."""
        m = self.order
        powers = _power_table(m)
        out = [0] * len(self.num)
        for k, c in enumerate(self.num):
            if c:
                row = powers[(-k) % m]
                for i, r in enumerate(row):
                    out[i] += c * r
        return CycNum(m, tuple(out), self.den)

    def __complex__(self) -> complex:
        return to_complex(self)

    def __repr__(self) -> str:
        return f"CycNum({self.order}, {self.num}, {self.den})"

    def __str__(self) -> str:
        return render(self)


def render(a: CycNum) -> str:
    """Deterministic text form, e.g. ``1/2 - zeta(12,3)``."""
    parts = []
    for k, c in enumerate(a.num):
        if not c:
            continue
        f = Fraction(c, a.den)
        mag = abs(f)
        if k == 0:
            body = str(mag)
        elif mag == 1:
            body = f"zeta({a.order},{k})"
        else:
            body = f"{mag}*zeta({a.order},{k})"
        sign = "-" if f < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def root(m: int, k: int) -> CycNum:
    """zeta_m^k in canonical form."""
    if m < 1:
        raise ValueError("order must be positive")
    row = _power_table(m)[k % m]
    return CycNum(m, row, 1, _normalized=True)


def imag_unit(m: int) -> CycNum:
    if m % 4:
        raise ValueError(f"Q(zeta_{m}) does not contain i")
    return root(m, m // 4)


def lift_order(a: CycNum, m2: int) -> CycNum:
    """Image of a under Q(zeta_m) -> Q(zeta_m2), zeta_m -> zeta_m2^(m2/m)."""
    m = a.order
    if m2 % m:
        raise ValueError(f"{m} does not divide {m2}")
    if m2 == m:
        return a
    step = m2 // m
    powers = _power_table(m2)
    out = [0] * euler_phi(m2)
    for k, c in enumerate(a.num):
        if c:
            row = powers[(k * step) % m2]
            for i, r in enumerate(row):
                if r:
                    out[i] += c * r
    return CycNum(m2, tuple(out), a.den)


def to_complex(a: CycNum) -> complex:
    z = cmath.exp(2j * cmath.pi / a.order)
    acc = 0j
    for k, c in enumerate(a.num):
        if c:
            acc += c * z**k
    return acc / a.den


def _qpoly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _qpoly_divmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    return _qpoly_trim(q), _qpoly_trim(a[: len(b) - 1])


def _qpoly_sub_mul(a, b, c):
    """a - b*c for coefficient lists."""
    out = list(a) + [Fraction(0)] * max(0, len(b) + len(c) - 1 - len(a))
    for i, x in enumerate(b):
        if x:
            for j, y in enumerate(c):
                out[i + j] -= x * y
    return _qpoly_trim(out)


def inverse(a: CycNum) -> CycNum:
    """Multiplicative inverse via the extended Euclidean algorithm against Phi_m."""
    if a.is_zero():
        raise ZeroDivisionError("inverse of zero in cyclotomic field")
    m = a.order
    if a.is_rational():
        d = len(a.num)
        return CycNum(m, (a.den,) + (0,) * (d - 1), a.num[0])
    # invariant: s * a == r (mod Phi)
    r0 = [Fraction(c) for c in cyclotomic_polynomial(m)]
    r1 = _qpoly_trim([Fraction(c, a.den) for c in a.num])
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, rem = _qpoly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, _qpoly_sub_mul(s0, q, s1)
    c = r1[0]
    coeffs = [x / c for x in s1]
    coeffs += [Fraction(0)] * (euler_phi(m) - len(coeffs))
    den = math.lcm(*(x.denominator for x in coeffs))
    return CycNum(m, tuple(int(x * den) for x in coeffs), den)
