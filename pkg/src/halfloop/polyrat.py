"""Polynomials and rational functions in positions q_1..q_L and the symbolic
parameters lambda, mu_0..mu_{n-1}, hbar, with cyclotomic coefficients.

Denominators are kept factored as a multiset of normalized linear forms
``q_i - c*q_j`` (i < j) or ``q_i``.  Parameters only ever appear in numerators.
Equality is semantic: two rational functions are equal when their difference,
brought to a common denominator, has zero numerator.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from numbers import Rational
from typing import NamedTuple

from .cyclotomic import CycNum, inverse, render as render_cyc

__all__ = ["PolyRing", "Poly", "LinForm", "RatFun", "linear_form", "ratfun_key", "sum_ratfuns", "invert"]


class PolyRing:
    """Variable layout q_1 < ... < q_L < lambda < mu_0 < ... < mu_{n-1} < hbar."""

    def __init__(self, L: int, n: int, order: int):
        self.L = L
        self.n = n
        self.order = order
        self.nvars = L + n + 2
        self.names = (
            [f"q{i + 1}" for i in range(L)]
            + ["lambda"]
            + [f"mu{k}" for k in range(n)]
            + ["hbar"]
        )
        self._zero_exp = (0,) * self.nvars

    def __eq__(self, other):
        return isinstance(other, PolyRing) and (self.L, self.n, self.order) == (
            other.L,
            other.n,
            other.order,
        )

    def __hash__(self):
        return hash((self.L, self.n, self.order))

    def __repr__(self):
        return f"PolyRing(L={self.L}, n={self.n}, order={self.order})"

    # variable indices
    def q_index(self, i: int) -> int:
        """0-based index of q_{i+1}; positions are 0-based throughout the code."""
        return i

    @property
    def lam_index(self) -> int:
        return self.L

    def mu_index(self, k: int) -> int:
        return self.L + 1 + k

    @property
    def hbar_index(self) -> int:
        return self.L + 1 + self.n

    def scalar(self, c) -> CycNum:
        if isinstance(c, CycNum):
            if c.order == self.order:
                return c
            return CycNum.one(self.order) * c
        f = Fraction(c)
        return CycNum.rational(f, self.order)

    # constructors
    def const(self, c) -> Poly:
        c = self.scalar(c)
        return Poly(self, {self._zero_exp: c} if c else {})

    def var(self, index: int, power: int = 1) -> Poly:
        e = [0] * self.nvars
        e[index] = power
        return Poly(self, {tuple(e): CycNum.one(self.order)})

    def q(self, i: int) -> Poly:
        return self.var(i)

    @property
    def lam(self) -> Poly:
        return self.var(self.lam_index)

    def mu(self, k: int) -> Poly:
        return self.var(self.mu_index(k))

    @property
    def hbar(self) -> Poly:
        return self.var(self.hbar_index)


class Poly:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _lift(self, other) -> Poly:
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Rational, CycNum)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                s = v + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> Poly:
        c = self.ring.scalar(c)
        if not c:
            return Poly(self.ring, {})
        return Poly(self.ring, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Rational, CycNum)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        out: dict = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple([a + b for a, b in zip(e1, e2)])
                v = get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return Poly(self.ring, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        out = self.ring.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def degree_in(self, index: int) -> int:
        return max((e[index] for e in self.terms), default=-1)

    def derivative(self, index: int) -> Poly:
        out = {}
        for e, c in self.terms.items():
            k = e[index]
            if k:
                e2 = list(e)
                e2[index] = k - 1
                out[tuple(e2)] = c * k
        return Poly(self.ring, out)

    def substitute_positions(self, scales: list, targets: list) -> Poly:
        """Replace q_i by scales[i] * q_{targets[i]}; scales are CycNum."""
        L = self.ring.L
        out: dict = {}
        cache: dict = {}
        for e, c in self.terms.items():
            e2 = list(e)
            for i in range(L):
                e2[i] = 0
            coef = c
            for i in range(L):
                k = e[i]
                if k:
                    e2[targets[i]] += k
                    s = scales[i]
                    key = (i, k)
                    p = cache.get(key)
                    if p is None:
                        p = cache[key] = s**k
                    coef = coef * p
            t = tuple(e2)
            v = out.get(t)
            out[t] = coef if v is None else v + coef
        return Poly(self.ring, {e: c for e, c in out.items() if c})

    def evaluate(self, values: dict):
        """Evaluate at ``values`` mapping variable index -> scalar or Poly.

        Unlisted variables are kept symbolic.
        """
        result = Poly(self.ring, {})
        for e, c in self.terms.items():
            rest = list(e)
            term = self.ring.const(c)
            for idx, val in values.items():
                k = e[idx]
                if k:
                    rest[idx] = 0
                    term = term * (val**k if isinstance(val, Poly) else self.ring.const(self.ring.scalar(val) ** k))
            term = term * Poly(self.ring, {tuple(rest): CycNum.one(self.ring.order)})
            result = result + term
        return result

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: t[0], reverse=True)

    def render(self) -> str:
        if not self.terms:
            return "0"
        names = self.ring.names
        out = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            cs = render_cyc(c)
            multi = (" + " in cs) or (" - " in cs)
            if not mono:
                body, neg = cs, False
                if cs.startswith("-") and not multi:
                    body, neg = cs[1:], True
            elif cs == "1":
                body, neg = mono, False
            elif cs == "-1":
                body, neg = mono, True
            elif multi:
                body, neg = f"({cs})*{mono}", False
            elif cs.startswith("-"):
                body, neg = f"{cs[1:]}*{mono}", True
            else:
                body, neg = f"{cs}*{mono}", False
            out.append((neg, body))
        s = ("-" if out[0][0] else "") + out[0][1]
        for neg, body in out[1:]:
            s += (" - " if neg else " + ") + body
        return s

    def __repr__(self):
        return f"Poly({self.render()})"


class LinForm(NamedTuple):
    """``q_i - c*q_j`` with i < j, or ``q_i`` alone when j is None (0-based)."""

    i: int
    j: int | None
    c: CycNum | None

    def sort_key(self):
        if self.j is None:
            return (self.i, -1, ())
        return (self.i, self.j, self.c.sort_key())

    def as_poly(self, ring: PolyRing) -> Poly:
        if self.j is None:
            return ring.q(self.i)
        return ring.q(self.i) - ring.q(self.j).scale(self.c)

    def d_dq(self, index: int, ring: PolyRing):
        """Coefficient of q_index in the form (a constant)."""
        if index == self.i:
            return ring.scalar(1)
        if index == self.j:
            return -self.c
        return None

    def render(self, ring: PolyRing) -> str:
        if self.j is None:
            return ring.names[self.i]
        c = self.c
        cs = render_cyc(c)
        if cs == "1":
            return f"{ring.names[self.i]} - {ring.names[self.j]}"
        if cs == "-1":
            return f"{ring.names[self.i]} + {ring.names[self.j]}"
        return f"{ring.names[self.i]} - ({cs})*{ring.names[self.j]}"


def linear_form(ring: PolyRing, i: int, a, j: int | None = None, b=None):
    """Normalize ``a*q_i + b*q_j`` into (scalar, LinForm) with value scalar*form."""
    a = ring.scalar(a)
    if j is None or b is None or not ring.scalar(b):
        return a, LinForm(i, None, None)
    b = ring.scalar(b)
    if not a:
        return b, LinForm(j, None, None)
    if i == j:
        raise ValueError("degenerate linear form")
    if i > j:
        i, j, a, b = j, i, b, a
    return a, LinForm(i, j, -b * inverse(a))


def _divide_linear(p: Poly, lf: LinForm):
    """Exact quotient p / lf, or None when lf does not divide p."""
    ring = p.ring
    i = lf.i
    if lf.j is None:
        out = {}
        for e, c in p.terms.items():
            if e[i] == 0:
                return None
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = c
        return Poly(ring, out)
    j, c = lf.j, lf.c
    # remainder: substitute q_i = c q_j
    rem: dict = {}
    cpow = [ring.scalar(1)]
    maxdeg = 0
    for e in p.terms:
        if e[i] > maxdeg:
            maxdeg = e[i]
    if maxdeg == 0:
        return None
    for _ in range(maxdeg):
        cpow.append(cpow[-1] * c)
    for e, v in p.terms.items():
        k = e[i]
        e2 = list(e)
        e2[i] = 0
        e2[j] += k
        t = tuple(e2)
        val = v * cpow[k] if k else v
        old = rem.get(t)
        rem[t] = val if old is None else old + val
    if any(rem.values()):
        return None
    out: dict = {}
    for e, v in p.terms.items():
        k = e[i]
        for s in range(k):
            # v * x^s * (c q_j)^(k-1-s)
            e2 = list(e)
            e2[i] = s
            e2[j] += k - 1 - s
            t = tuple(e2)
            val = v * cpow[k - 1 - s]
            old = out.get(t)
            out[t] = val if old is None else old + val
    return Poly(ring, {e: c for e, c in out.items() if c})


def _den_poly(ring: PolyRing, factors: dict) -> Poly:
    out = ring.const(1)
    for lf, m in factors.items():
        out = out * lf.as_poly(ring) ** m
    return out


class RatFun:
    """num / prod(LinForm^mult); immutable."""

    __slots__ = ("ring", "num", "den", "_cache")

    def __init__(self, ring: PolyRing, num: Poly, den: dict | None = None, simplify: bool = True):
        self.ring = ring
        self._cache = None
        den = {k: v for k, v in (den or {}).items() if v}
        if num.is_zero():
            den = {}
        elif simplify and den:
            num, den = _simplify(num, den)
        self.num = num
        self.den = den

    # constructors -------------------------------------------------------

    @classmethod
    def const(cls, ring: PolyRing, c) -> RatFun:
        return cls(ring, ring.const(c), None, simplify=False)

    @classmethod
    def from_poly(cls, p: Poly) -> RatFun:
        return cls(p.ring, p, None, simplify=False)

    @classmethod
    def inv_linear(cls, ring: PolyRing, i: int, a, j: int | None = None, b=None, power: int = 1):
        """1 / (a*q_i + b*q_j)^power."""
        scal, lf = linear_form(ring, i, a, j, b)
        return cls(ring, ring.const(inverse(scal) ** power), {lf: power}, simplify=False)

    # predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_const(self) -> bool:
        return not self.den and all(not any(e) for e in self.num.terms)

    # arithmetic ---------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, RatFun):
            return other
        if isinstance(other, Poly):
            return RatFun.from_poly(other)
        if isinstance(other, (int, Rational, CycNum)):
            return RatFun.const(self.ring, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return RatFun(self.ring, self.num + other.num, self.den)
        den = dict(self.den)
        for f, m in other.den.items():
            if den.get(f, 0) < m:
                den[f] = m
        num = _times_missing(self.num, self.den, den) + _times_missing(other.num, other.den, den)
        return RatFun(self.ring, num, den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(self.ring, -self.num, self.den, simplify=False)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational, CycNum)):
            return RatFun(self.ring, self.num.scale(other), self.den, simplify=False)
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return RatFun(self.ring, Poly(self.ring, {}))
        if not other.den and len(other.num.terms) == 1 and not any(next(iter(other.num.terms))):
            return RatFun(self.ring, self.num.scale(next(iter(other.num.terms.values()))), self.den, simplify=False)
        if not self.den and len(self.num.terms) == 1 and not any(next(iter(self.num.terms))):
            return RatFun(self.ring, other.num.scale(next(iter(self.num.terms.values()))), other.den, simplify=False)
        den = dict(self.den)
        for f, m in other.den.items():
            den[f] = den.get(f, 0) + m
        return RatFun(self.ring, self.num * other.num, den, simplify=bool(self.den or other.den))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> RatFun:
        out = RatFun.const(self.ring, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # calculus and substitutions -----------------------------------------

    def derivative(self, i: int) -> RatFun:
        """Partial derivative in q_i (0-based), quotient rule over the factored denominator."""
        ring = self.ring
        dnum = self.num.derivative(i)
        involved = [(lf, m, lf.d_dq(i, ring)) for lf, m in self.den.items()]
        involved = [(lf, m, d) for lf, m, d in involved if d is not None]
        if not involved:
            return RatFun(ring, dnum, self.den)
        forms = [lf.as_poly(ring) for lf, _, _ in involved]
        prod_all = ring.const(1)
        for f in forms:
            prod_all = prod_all * f
        num = dnum * prod_all
        for idx, (lf, m, d) in enumerate(involved):
            others = ring.const(1)
            for jdx, f in enumerate(forms):
                if jdx != idx:
                    others = others * f
            num = num - (self.num * others).scale(d * m)
        den = dict(self.den)
        for lf, _, _ in involved:
            den[lf] += 1
        return RatFun(ring, num, den)

    def substitute(self, scales: list, targets: list) -> RatFun:
        """q_i -> scales[i] * q_{targets[i]}, targets a permutation."""
        ring = self.ring
        num = self.num.substitute_positions(scales, targets)
        den: dict = {}
        factor = ring.scalar(1)
        for lf, m in self.den.items():
            if lf.j is None:
                s, nf = scales[lf.i], LinForm(targets[lf.i], None, None)
            else:
                s, nf = linear_form(ring, targets[lf.i], scales[lf.i], targets[lf.j], -lf.c * scales[lf.j])
            den[nf] = den.get(nf, 0) + m
            factor = factor * s**m
        return RatFun(ring, num.scale(inverse(factor)), den, simplify=False)

    def evaluate(self, values: dict) -> RatFun:
        """Evaluate numerator and denominator at ``values`` (variable index -> scalar).

        Only full evaluation of the position variables is supported; the
        result is a RatFun that is polynomial in the remaining parameters.
        """
        ring = self.ring
        num = self.num.evaluate(values)
        d = ring.scalar(1)
        for lf, m in self.den.items():
            val = lf.as_poly(ring).evaluate(values)
            if val.is_zero():
                raise ZeroDivisionError("evaluation at a pole")
            if len(val.terms) != 1 or any(next(iter(val.terms))):
                raise ValueError("denominator not fully evaluated")
            d = d * next(iter(val.terms.values())) ** m
        return RatFun(ring, num.scale(inverse(d)))

    # rendering ----------------------------------------------------------

    def render(self) -> str:
        ring = self.ring
        num = self.num.render()
        if not self.den:
            return num
        parts = []
        for lf in sorted(self.den, key=LinForm.sort_key):
            m = self.den[lf]
            body = f"({lf.render(ring)})"
            parts.append(body if m == 1 else f"{body}^{m}")
        return f"({num})/({'*'.join(parts)})"

    def __repr__(self):
        return f"RatFun({self.render()})"


def _times_missing(num: Poly, have: dict, want: dict) -> Poly:
    ring = num.ring
    out = num
    for f, m in want.items():
        k = m - have.get(f, 0)
        if k:
            out = out * f.as_poly(ring) ** k
    return out


def _simplify(num: Poly, den: dict):
    den = dict(den)
    for lf in sorted(den, key=LinForm.sort_key):
        while den[lf]:
            q = _divide_linear(num, lf)
            if q is None:
                break
            num = q
            den[lf] -= 1
    return num, {k: v for k, v in den.items() if v}


def binomial(n: int, k: int) -> int:
    return comb(n, k)


def ratfun_key(f: RatFun):
    """Hashable key of the stored form; equal keys imply equal values."""
    k = f._cache
    if k is None:
        k = f._cache = (frozenset(f.num.terms.items()), frozenset(f.den.items()))
    return k


def sum_ratfuns(ring: PolyRing, items) -> RatFun:
    """Sum many rational functions, adding numerators over shared denominators first."""
    groups: dict = {}
    for f in items:
        if f.is_zero():
            continue
        key = frozenset(f.den.items())
        g = groups.get(key)
        groups[key] = (f.num, f.den) if g is None else (g[0] + f.num, g[1])
    groups = {k: v for k, v in groups.items() if not v[0].is_zero()}
    if not groups:
        return RatFun(ring, Poly(ring, {}))
    if len(groups) == 1:
        num, den = next(iter(groups.values()))
        return RatFun(ring, num, den)
    top: dict = {}
    for _, den in groups.values():
        for lf, m in den.items():
            if top.get(lf, 0) < m:
                top[lf] = m
    num = Poly(ring, {})
    for n_, den in groups.values():
        num = num + _times_missing(n_, den, top)
    return RatFun(ring, num, top)


def candidate_forms(ring: PolyRing):
    """Every normalized linear form q_i or q_i - zeta^k q_j available in the field."""
    from .cyclotomic import root

    m = ring.order
    out = [LinForm(i, None, None) for i in range(ring.L)]
    for i in range(ring.L):
        for j in range(i + 1, ring.L):
            for k in range(m):
                out.append(LinForm(i, j, root(m, k)))
    return out


def invert(f: RatFun) -> RatFun:
    """1/f when the numerator of f is a constant times a product of linear forms."""
    ring = f.ring
    if f.is_zero():
        raise ZeroDivisionError("division by zero rational function")
    num = f.num
    factors: dict = {}
    for lf in candidate_forms(ring):
        while True:
            q = _divide_linear(num, lf)
            if q is None:
                break
            factors[lf] = factors.get(lf, 0) + 1
            num = q
    if len(num.terms) != 1 or any(next(iter(num.terms))):
        raise ValueError(f"cannot invert {f.render()}: numerator is not a product of linear forms")
    c = next(iter(num.terms.values()))
    out = RatFun(ring, _den_poly(ring, f.den).scale(inverse(c)), factors)
    return out
