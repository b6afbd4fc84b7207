"""Normal-form engine for positions, momenta, exchanges and branch rotations.

Elements are sums R(q) p^alpha w with R a rational function, p^alpha a
momentum monomial and w = Q_1^{a_1}...Q_L^{a_L} X_pi a group word
(phases written left of the permutation).  Conventions:

    X_pi q_j = q_{pi(j)} X_pi          (X is the position exchange)
    Q_i q_i = tau^-1 q_i Q_i           (Q is the branch rotation)
    Q_i p_i = tau p_i Q_i
    p_i f = f p_i - i hbar df/dq_i

so on wavefunctions (Q_i psi)(q) = psi(.., tau^-1 q_i, ..) and
(X_pi psi)(q) = psi(q_{pi(1)}, .., q_{pi(L)}).

Particle numbers in the public API are 1-based; internal tuples are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import comb, factorial

from .cyclotomic import CycNum, field_order, imag_unit, render as render_cyc, root
from .polyrat import Poly, PolyRing, RatFun, ratfun_key, sum_ratfuns
from .report import CheckResult
from .tensor_ops import SpaceLayout, SparseOp, embed, grading_diagonal, permutation

# ---------------------------------------------------------------------------
# wreath product group Z_n^L x| S_L


def perm_inverse(pi: tuple) -> tuple:
    out = [0] * len(pi)
    for i, p in enumerate(pi):
        out[p] = i
    return tuple(out)


def perm_sign(pi: tuple) -> int:
    seen = [False] * len(pi)
    sign = 1
    for i in range(len(pi)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = pi[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


def wreath_identity(L: int) -> tuple:
    return ((0,) * L, tuple(range(L)))


def wreath_mul(w1: tuple, w2: tuple, n: int) -> tuple:
    """(a, pi)(b, rho) = (a + pi.b, pi rho) with (pi.b)_i = b_{pi^-1(i)}."""
    a, pi = w1
    b, rho = w2
    pinv = perm_inverse(pi)
    phases = tuple((a[i] + b[pinv[i]]) % n for i in range(len(a)))
    return phases, tuple(pi[r] for r in rho)


def wreath_inverse(w: tuple, n: int) -> tuple:
    a, pi = w
    pinv = perm_inverse(pi)
    # (a, pi)^-1 = (-(pi^-1 . a), pi^-1)
    return tuple((-a[pi[i]]) % n for i in range(len(a))), pinv


def rotation(L: int, i: int, k: int, n: int) -> tuple:
    """Q_i^k (0-based i)."""
    a = [0] * L
    a[i] = k % n
    return tuple(a), tuple(range(L))


def transposition(L: int, i: int, j: int) -> tuple:
    pi = list(range(L))
    pi[i], pi[j] = j, i
    return (0,) * L, tuple(pi)


def group_elements(n: int, L: int):
    for a in product(range(n), repeat=L):
        for pi in permutations(range(L)):
            yield tuple(a), tuple(pi)


# ---------------------------------------------------------------------------
# model parameters


@dataclass
class DunklSpec:
    n: int
    L: int
    N: int = 1
    multiplicities: tuple | None = None
    eps: int = 1
    lam: object = None  # None: symbolic; else a rational value
    mu: object = None  # None: symbolic; "zero"; or a list of n values
    truncation: int | None = None

    def __post_init__(self):
        from .errors import ValidationError

        if self.n < 1:
            raise ValidationError("n-positive", "n must be at least 1")
        if self.L < 1:
            raise ValidationError("L-positive", "L must be at least 1")
        if self.eps not in (1, -1):
            raise ValidationError("eps-sign", "eps must be +1 or -1")
        if self.multiplicities is None:
            self.multiplicities = (self.N,) + (0,) * (self.n - 1)
        self.multiplicities = tuple(int(m) for m in self.multiplicities)
        if len(self.multiplicities) != self.n or sum(self.multiplicities) != self.N:
            raise ValidationError("multiplicity-sum", f"need {self.n} multiplicities summing to N={self.N}")
        if self.truncation is None:
            self.truncation = max(3, self.n)
        if isinstance(self.mu, (list, tuple)) and len(self.mu) != self.n:
            raise ValidationError("mu-count", f"need {self.n} values of mu")

    @property
    def order(self) -> int:
        return field_order(self.n)

    def echo(self) -> dict:
        return {
            "kind": "dunkl",
            "n": self.n,
            "L": self.L,
            "N": self.N,
            "multiplicities": list(self.multiplicities),
            "eps": self.eps,
            "lambda": "symbolic" if self.lam is None else str(self.lam),
            "mu": "symbolic" if self.mu is None else (self.mu if isinstance(self.mu, str) else [str(v) for v in self.mu]),
            "truncation": self.truncation,
        }


class Algebra:
    """Shared context: coefficient ring, roots of unity and memo tables."""

    def __init__(self, spec: DunklSpec):
        self.spec = spec
        self.n = spec.n
        self.L = spec.L
        self.order = spec.order
        self.ring = PolyRing(spec.L, spec.n, self.order)
        self.tau_pows = [root(self.order, (self.order // self.n) * k) for k in range(self.n)]
        self.i_unit = imag_unit(self.order)
        self.one = RatFun.const(self.ring, 1)
        self.identity_word = wreath_identity(spec.L)
        self.zero_alpha = (0,) * spec.L
        self._act: dict = {}
        self._deriv: dict = {}
        self._minus_i_hbar: dict = {}

    def tau(self, k: int) -> CycNum:
        return self.tau_pows[k % self.n]

    @property
    def lam(self) -> RatFun:
        s = self.spec
        if s.lam is None:
            return RatFun.from_poly(self.ring.lam)
        return RatFun.const(self.ring, Fraction(s.lam))

    def mu(self, k: int) -> RatFun:
        s = self.spec
        if s.mu is None:
            return RatFun.from_poly(self.ring.mu(k))
        if s.mu == "zero":
            return RatFun.const(self.ring, 0)
        return RatFun.const(self.ring, Fraction(s.mu[k]))

    @property
    def hbar(self) -> RatFun:
        return RatFun.from_poly(self.ring.hbar)

    def minus_i_hbar_pow(self, g: int) -> RatFun:
        if g not in self._minus_i_hbar:
            c = (-self.i_unit) ** g
            self._minus_i_hbar[g] = RatFun.from_poly(self.ring.var(self.ring.hbar_index, g).scale(c)) if g else self.one
        return self._minus_i_hbar[g]

    # group action on functions -----------------------------------------

    def act(self, w: tuple, f: RatFun) -> RatFun:
        """The rational function g with w f = g w."""
        a, pi = w
        if not any(a) and pi == tuple(range(self.L)):
            return f
        key = (w, ratfun_key(f))
        hit = self._act.get(key)
        if hit is None:
            scales = [self.tau(-a[pi[j]]) for j in range(self.L)]
            hit = f.substitute(scales, list(pi))
            self._act[key] = hit
        return hit

    def move_momentum(self, w: tuple, alpha: tuple):
        """w p^alpha = c p^beta w; returns (beta, c)."""
        a, pi = w
        beta = [0] * self.L
        e = 0
        for j, k in enumerate(alpha):
            if k:
                beta[pi[j]] = k
                e += a[pi[j]] * k
        return tuple(beta), self.tau(e)

    def derivative(self, f: RatFun, gamma: tuple) -> RatFun:
        if not any(gamma):
            return f
        key = (ratfun_key(f), gamma)
        hit = self._deriv.get(key)
        if hit is None:
            # peel one derivative off the last nonzero index
            i = max(k for k, g in enumerate(gamma) if g)
            prev = list(gamma)
            prev[i] -= 1
            hit = self.derivative(f, tuple(prev)).derivative(i)
            self._deriv[key] = hit
        return hit

    # constructors -----------------------------------------------------

    def elem(self, terms: dict) -> AlgebraElem:
        return AlgebraElem(self, {k: v for k, v in terms.items() if not v.is_zero()})

    def scalar(self, f) -> AlgebraElem:
        if not isinstance(f, RatFun):
            f = RatFun.const(self.ring, f) if not isinstance(f, Poly) else RatFun.from_poly(f)
        return self.elem({(self.zero_alpha, self.identity_word): f})

    def word(self, w: tuple, coeff=None) -> AlgebraElem:
        c = coeff if coeff is not None else self.one
        return self.elem({(self.zero_alpha, w): c})

    def p(self, i: int, power: int = 1) -> AlgebraElem:
        """p_i, 0-based."""
        alpha = [0] * self.L
        alpha[i] = power
        return self.elem({(tuple(alpha), self.identity_word): self.one})

    def q(self, i: int) -> AlgebraElem:
        return self.scalar(RatFun.from_poly(self.ring.q(i)))

    def Q(self, i: int, k: int = 1) -> AlgebraElem:
        return self.word(rotation(self.L, i, k, self.n))

    def X(self, i: int, j: int) -> AlgebraElem:
        return self.word(transposition(self.L, i, j))

    def zero(self) -> AlgebraElem:
        return AlgebraElem(self, {})


def _sort_key(key):
    alpha, (a, pi) = key
    return (tuple(-x for x in alpha), a, pi)


class AlgebraElem:
    """sum R p^alpha w, keyed by (alpha, w)."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: Algebra, terms: dict):
        self.alg = alg
        self.terms = terms

    @staticmethod
    def combine(alg: Algebra, pieces: dict) -> AlgebraElem:
        """pieces: key -> list of RatFun."""
        ring = alg.ring
        out = {}
        for k, lst in pieces.items():
            s = lst[0] if len(lst) == 1 else sum_ratfuns(ring, lst)
            if not s.is_zero():
                out[k] = s
        return AlgebraElem(alg, out)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _lift(self, other):
        if isinstance(other, AlgebraElem):
            return other
        return self.alg.scalar(other)

    def __add__(self, other):
        other = self._lift(other)
        pieces: dict = {}
        for src in (self, other):
            for k, v in src.terms.items():
                pieces.setdefault(k, []).append(v)
        return AlgebraElem.combine(self.alg, pieces)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElem(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> AlgebraElem:
        if isinstance(c, (RatFun, Poly)):
            c = c if isinstance(c, RatFun) else RatFun.from_poly(c)
            # scalars commute only from the left in general; treat as left multiplication
            return self.alg.scalar(c) * self
        return AlgebraElem(self.alg, {k: v * c for k, v in self.terms.items() if c}).prune()

    def prune(self) -> AlgebraElem:
        return AlgebraElem(self.alg, {k: v for k, v in self.terms.items() if not v.is_zero()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElem):
            return alg_mul(self, other)
        if isinstance(other, (int, Fraction, CycNum)):
            return self.scale(other)
        return alg_mul(self, self._lift(other))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            return self.scale(other)
        return alg_mul(self._lift(other), self)

    def __pow__(self, k: int) -> AlgebraElem:
        out = self.alg.scalar(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, AlgebraElem):
            other = self._lift(other)
        return (self - other).is_zero()

    __hash__ = None

    def coefficient(self, alpha: tuple, w: tuple) -> RatFun:
        return self.terms.get((alpha, w), RatFun.const(self.alg.ring, 0))

    def sorted_keys(self):
        return sorted(self.terms, key=_sort_key)

    def map_coeffs(self, f) -> AlgebraElem:
        return AlgebraElem(self.alg, {k: f(v) for k, v in self.terms.items()}).prune()

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in self.sorted_keys():
            parts.append(f"[{self.terms[key].render()}]{render_monomial(key)}")
        return "\n+ ".join(parts)

    def __repr__(self):
        return f"AlgebraElem({len(self.terms)} terms)"


def render_word(w: tuple) -> str:
    a, pi = w
    out = [f"Q{i + 1}^{k}" if k != 1 else f"Q{i + 1}" for i, k in enumerate(a) if k]
    if pi != tuple(range(len(pi))):
        out.append("X[" + ",".join(str(p + 1) for p in pi) + "]")
    return "*".join(out)


def render_monomial(key) -> str:
    alpha, w = key
    bits = [f"p{i + 1}" if k == 1 else f"p{i + 1}^{k}" for i, k in enumerate(alpha) if k]
    ws = render_word(w)
    if ws:
        bits.append(ws)
    return ("*" + "*".join(bits)) if bits else ""


def alg_mul(A: AlgebraElem, B: AlgebraElem) -> AlgebraElem:
    """Normal-ordered product."""
    alg = A.alg
    n = alg.n
    pieces: dict = {}
    for (alpha, w1), R1 in A.terms.items():
        for (beta, w2), R2 in B.terms.items():
            R2w = alg.act(w1, R2)
            beta2, phase = alg.move_momentum(w1, beta)
            w = wreath_mul(w1, w2, n)
            # p^alpha R2w = sum_gamma binom(alpha, gamma) (-i hbar)^|gamma| (d^gamma R2w) p^(alpha - gamma)
            ranges = [range(k + 1) for k in alpha]
            for gamma in product(*ranges):
                g = sum(gamma)
                D = alg.derivative(R2w, gamma)
                if D.is_zero():
                    continue
                c = phase
                for k, gg in zip(alpha, gamma):
                    if gg:
                        c = c * comb(k, gg)
                coef = R1 * D
                if g:
                    coef = coef * alg.minus_i_hbar_pow(g)
                coef = coef * c
                key = (tuple(k - gg + b for k, gg, b in zip(alpha, gamma, beta2)), w)
                pieces.setdefault(key, []).append(coef)
    return AlgebraElem.combine(alg, pieces)


def commutator(A: AlgebraElem, B: AlgebraElem) -> AlgebraElem:
    return A * B - B * A


# ---------------------------------------------------------------------------
# Dunkl operators and power sums


def dunkl_operator(alg: Algebra, i: int) -> AlgebraElem:
    """d_i for 1 <= i <= L."""
    L, n = alg.L, alg.n
    if not 1 <= i <= L:
        raise IndexError(f"particle {i} out of range 1..{L}")
    ii = i - 1
    ring = alg.ring
    terms: dict = {}
    p = [0] * L
    p[ii] = 1
    terms[(tuple(p), alg.identity_word)] = [alg.one]
    lam = alg.lam
    for j in range(L):
        if j == ii:
            continue
        for k in range(n):
            # Q_i^k X_ij Q_i^-k = Q_i^k Q_j^-k X_ij
            w = wreath_mul(wreath_mul(rotation(L, ii, k, n), transposition(L, ii, j), n), rotation(L, ii, -k, n), n)
            coef = lam * RatFun.inv_linear(ring, ii, 1, j, -alg.tau(k))
            terms.setdefault((alg.zero_alpha, w), []).append(coef)
    for k in range(n):
        coef = alg.mu(k) * RatFun.inv_linear(ring, ii, 1)
        terms.setdefault((alg.zero_alpha, rotation(L, ii, k, n)), []).append(coef)
    return AlgebraElem.combine(alg, terms)


def dunkl_operators(alg: Algebra) -> list[AlgebraElem]:
    return [dunkl_operator(alg, i) for i in range(1, alg.L + 1)]


def verify_dunkl_commutativity(alg: Algebra, all_pairs: bool = True) -> list[CheckResult]:
    from .gaudin import operator_pairs

    ds = dunkl_operators(alg)
    out = []
    for a, b in operator_pairs(len(ds), all_pairs):
        c = commutator(ds[a], ds[b])
        w = None
        if not c.is_zero():
            k = c.sorted_keys()[0]
            w = f"[{c.terms[k].render()}]{render_monomial(k)}"
        out.append(CheckResult(f"[d{a + 1},d{b + 1}]=0", w is None, w))
    return out


def power_sum(alg: Algebra, k: int, ds=None) -> AlgebraElem:
    """I^(k) = sum_i d_i^k."""
    ds = ds or dunkl_operators(alg)
    out = alg.zero()
    for d in ds:
        out = out + d**k
    return out


# ---------------------------------------------------------------------------
# operators with spin: matrices of algebra elements


class SpinPosOp:
    """Sparse matrix over the spin space (optionally with one auxiliary slot) with AlgebraElem entries."""

    __slots__ = ("alg", "layout", "entries")

    def __init__(self, alg: Algebra, layout: SpaceLayout, entries: dict | None = None):
        self.alg = alg
        self.layout = layout
        self.entries = {k: v for k, v in (entries or {}).items() if not v.is_zero()}

    @classmethod
    def from_sparse(cls, alg: Algebra, op: SparseOp) -> SpinPosOp:
        out = {}
        for (r, c), v in op.entries():
            out[r, c] = alg.scalar(RatFun.const(alg.ring, v))
        return cls(alg, op.layout, out)

    @classmethod
    def scalar(cls, alg: Algebra, layout: SpaceLayout, x: AlgebraElem) -> SpinPosOp:
        return cls(alg, layout, {(i, i): x for i in range(layout.size)})

    def is_zero(self) -> bool:
        return not self.entries

    def __add__(self, other: SpinPosOp) -> SpinPosOp:
        pieces: dict = {}
        for src in (self, other):
            for rc, el in src.entries.items():
                d = pieces.setdefault(rc, {})
                for k, v in el.terms.items():
                    d.setdefault(k, []).append(v)
        return SpinPosOp(self.alg, self.layout, {rc: AlgebraElem.combine(self.alg, d) for rc, d in pieces.items()})

    def __neg__(self):
        return SpinPosOp(self.alg, self.layout, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> SpinPosOp:
        return SpinPosOp(self.alg, self.layout, {k: v.scale(c) for k, v in self.entries.items()})

    def __mul__(self, other: SpinPosOp) -> SpinPosOp:
        if not isinstance(other, SpinPosOp):
            return self.scale(other)
        by_row: dict = {}
        for (k, c), v in other.entries.items():
            by_row.setdefault(k, []).append((c, v))
        pieces: dict = {}
        for (r, k), a in self.entries.items():
            for c, b in by_row.get(k, ()):
                prod = alg_mul(a, b)
                d = pieces.setdefault((r, c), {})
                for key, v in prod.terms.items():
                    d.setdefault(key, []).append(v)
        return SpinPosOp(self.alg, self.layout, {rc: AlgebraElem.combine(self.alg, d) for rc, d in pieces.items()})

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None

    def trace_aux(self, aux: int = 0) -> SpinPosOp:
        lay = self.layout
        new = lay.drop_aux(aux)
        st = lay.strides[aux]
        d = lay.dims[aux]
        hi = st * d
        pieces: dict = {}
        for (r, c), el in self.entries.items():
            if (r // st) % d != (c // st) % d:
                continue
            rc = ((r // hi) * st + r % st, (c // hi) * st + c % st)
            dd = pieces.setdefault(rc, {})
            for k, v in el.terms.items():
                dd.setdefault(k, []).append(v)
        return SpinPosOp(self.alg, new, {rc: AlgebraElem.combine(self.alg, dd) for rc, dd in pieces.items()})

    def map_coeffs(self, f) -> SpinPosOp:
        return SpinPosOp(self.alg, self.layout, {rc: el.map_coeffs(f) for rc, el in self.entries.items()})

    def first_nonzero(self):
        if not self.entries:
            return None
        rc = min(self.entries)
        el = self.entries[rc]
        k = el.sorted_keys()[0]
        return f"entry {rc}: [{el.terms[k].render()}]{render_monomial(k)}"

    def render(self) -> str:
        """One line per term, E(r,c) marking the spin matrix unit; parseable by the fixture reader."""
        lines = []
        for rc in sorted(self.entries):
            el = self.entries[rc]
            for key in el.sorted_keys():
                lines.append(f"E({rc[0]},{rc[1]})*[{el.terms[key].render()}]{render_monomial(key)}")
        return "\n+ ".join(lines) if lines else "0"


def spin_layout(spec: DunklSpec, aux: bool = False) -> SpaceLayout:
    return SpaceLayout((spec.N,) * spec.L, (spec.N,) if aux else ())


def spin_permutation(alg: Algebra, layout: SpaceLayout, pi: tuple) -> SparseOp:
    """P_s on spins: P_s X_j P_s^-1 = X_{s(j)}; v_j moves to slot pi(j)."""
    order = alg.order
    entries = []
    na = layout.n_aux
    for c in range(layout.size):
        dg = layout.digits(c)
        new = list(dg)
        for j, p in enumerate(pi):
            new[na + p] = dg[na + j]
        entries.append(((layout.flat(new), c), CycNum.one(order)))
    return SparseOp.from_entries(layout, order, entries)


def spin_grading(alg: Algebra, layout: SpaceLayout, slot: int, power: int = 1) -> SparseOp:
    diag = grading_diagonal(alg.n, alg.spec.multiplicities, alg.order)
    return embed(layout, alg.order, (slot,), {((i,), (i,)): g**power for i, g in enumerate(diag)})


def projector_P(alg: Algebra, layout: SpaceLayout | None = None) -> SpinPosOp:
    """(1/L!) sum_s eps^|s| X_s P_s."""
    spec = alg.spec
    layout = layout or spin_layout(spec)
    out = None
    for pi in permutations(range(alg.L)):
        sgn = perm_sign(pi) if spec.eps == -1 else 1
        Ps = SpinPosOp.from_sparse(alg, spin_permutation(alg, layout, pi))
        term = SpinPosOp.scalar(alg, layout, alg.word(((0,) * alg.L, pi))) * Ps
        term = term.scale(Fraction(sgn, factorial(alg.L)))
        out = term if out is None else out + term
    return out


def projector_Q(alg: Algebra, layout: SpaceLayout | None = None) -> SpinPosOp:
    """prod_i (1/n) sum_j Q_i^j G_i^-j."""
    spec = alg.spec
    layout = layout or spin_layout(spec)
    na = layout.n_aux
    out = None
    for i in range(alg.L):
        f = None
        for j in range(alg.n):
            G = SpinPosOp.from_sparse(alg, spin_grading(alg, layout, na + i, -j))
            t = SpinPosOp.scalar(alg, layout, alg.Q(i, j)) * G
            f = t if f is None else f + t
        f = f.scale(Fraction(1, alg.n))
        out = f if out is None else out * f
    return out


def coupling_aux_site(alg: Algebra, layout: SpaceLayout, site: int) -> SparseOp:
    """P_{a,site} (0-based site) in a layout with one auxiliary slot."""
    return permutation(layout, alg.order, 0, layout.site_slot(site))


def build_dunkl_series_coeff(alg: Algebra, p: int, kind: str = "B", ds=None, twist: int = -1) -> SpinPosOp:
    """T^(p) = sum_l P_al d_l^p, or B^(p) = sum_j tau^(twist*j*p) G_a^j T^(p) G_a^-j.

    The default twist -1 is the coefficient of u^-(p+1) in sum_j tau^j G_a^j T_a(u tau^j) G_a^-j;
    twist=+1 gives the mirrored sum over tau^-j, kept for diagnostics.
    """
    spec = alg.spec
    layout = spin_layout(spec, aux=True)
    ds = ds or dunkl_operators(alg)
    T = None
    for l in range(alg.L):
        Pal = SpinPosOp.from_sparse(alg, coupling_aux_site(alg, layout, l))
        term = Pal * SpinPosOp.scalar(alg, layout, ds[l] ** p)
        T = term if T is None else T + term
    if kind == "T":
        return T
    B = None
    for j in range(alg.n):
        Gj = SpinPosOp.from_sparse(alg, spin_grading(alg, layout, 0, j))
        Gmj = SpinPosOp.from_sparse(alg, spin_grading(alg, layout, 0, -j))
        term = (Gj * T * Gmj).scale(alg.tau(twist * j * p))
        B = term if B is None else B + term
    return B


def _with_aux(alg: Algebra, op: SpinPosOp) -> SpinPosOp:
    """Extend a spin-only operator by the identity on one auxiliary slot (aux most significant)."""
    spec = alg.spec
    big = spin_layout(spec, aux=True)
    N = spec.N
    size = op.layout.size
    out = {}
    for (r, c), v in op.entries.items():
        for a in range(N):
            out[a * size + r, a * size + c] = v
    return SpinPosOp(alg, big, out)


def verify_projector_identities(alg: Algebra, max_p: int | None = None) -> list[CheckResult]:
    spec = alg.spec
    max_p = spec.truncation if max_p is None else max_p
    LP, LQ = projector_P(alg), projector_Q(alg)
    Lam = LP * LQ
    out = []
    for name, X in (("Lambda_P", LP), ("Lambda_Q", LQ), ("Lambda_P Lambda_Q", Lam)):
        d = X * X - X
        out.append(CheckResult(f"{name} idempotent", d.is_zero(), d.first_nonzero()))
    d = LP * LQ - LQ * LP
    out.append(CheckResult("[Lambda_P,Lambda_Q]=0", d.is_zero(), d.first_nonzero()))
    LQa, Lama = _with_aux(alg, LQ), _with_aux(alg, Lam)
    ds = dunkl_operators(alg)
    for p in range(max_p + 1):
        B = build_dunkl_series_coeff(alg, p, "B", ds)
        c = B * LQa - LQa * B
        out.append(CheckResult(f"[B^({p}),Lambda_Q]=0", c.is_zero(), c.first_nonzero()))
        BL = B * Lama
        c = BL - Lama * BL
        out.append(CheckResult(f"(1-Lambda)B^({p})Lambda=0", c.is_zero(), c.first_nonzero()))
    return out


def tilde_charges(alg: Algebra, k: int, ds=None) -> SpinPosOp:
    """tr_a B^(k) Lambda_P Lambda_Q."""
    B = build_dunkl_series_coeff(alg, k, "B", ds)
    Lam = projector_P(alg) * projector_Q(alg)
    return (B * _with_aux(alg, Lam)).trace_aux(0)


# ---------------------------------------------------------------------------
# evaluator route: apply operators to explicit wavefunctions


class WaveFun:
    """Spin components (flat index -> RatFun)."""

    __slots__ = ("components",)

    def __init__(self, components: dict):
        self.components = {k: v for k, v in components.items() if not v.is_zero()}

    def is_zero(self) -> bool:
        return not self.components

    def __sub__(self, other: WaveFun) -> WaveFun:
        out = dict(self.components)
        for k, v in other.components.items():
            out[k] = out[k] - v if k in out else -v
        return WaveFun(out)

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None


def apply_elem(A: AlgebraElem, psi: RatFun) -> RatFun:
    """(R p^alpha w) psi = R (-i hbar)^|alpha| d^alpha (w psi)."""
    alg = A.alg
    items = []
    for (alpha, w), R in A.terms.items():
        f = alg.act(w, psi)
        for i, k in enumerate(alpha):
            for _ in range(k):
                f = f.derivative(i)
        g = sum(alpha)
        if g:
            f = f * alg.minus_i_hbar_pow(g)
        items.append(R * f)
    return sum_ratfuns(alg.ring, items)


def apply(op, psi):
    if isinstance(op, AlgebraElem):
        if isinstance(psi, WaveFun):
            return WaveFun({k: apply_elem(op, v) for k, v in psi.components.items()})
        return apply_elem(op, psi)
    alg = op.alg
    acc: dict = {}
    for (r, c), el in op.entries.items():
        v = psi.components.get(c)
        if v is not None:
            acc.setdefault(r, []).append(apply_elem(el, v))
    return WaveFun({r: sum_ratfuns(alg.ring, lst) for r, lst in acc.items()})


def random_wavefunction(alg: Algebra, rng, spin_dim: int = 1, degree: int = 3, terms: int = 4) -> WaveFun:
    """Random polynomial components with small rational coefficients."""
    ring = alg.ring
    comps = {}
    for s in range(spin_dim):
        f = ring.const(0)
        for _ in range(terms):
            e = [0] * ring.nvars
            for i in range(alg.L):
                e[i] = rng.randint(0, degree)
            c = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
            f = f + Poly(ring, {tuple(e): ring.scalar(c)}) if c else f
        comps[s] = RatFun.from_poly(f)
    return WaveFun(comps)


def verify_commutativity_evaluator(alg: Algebra, count: int = 20, seed: int = 0) -> CheckResult:
    import random

    rng = random.Random(seed)
    ds = dunkl_operators(alg)
    for t in range(count):
        psi = random_wavefunction(alg, rng).components.get(0)
        if psi is None:
            continue
        for a in range(len(ds)):
            for b in range(a + 1, len(ds)):
                r = apply_elem(ds[a], apply_elem(ds[b], psi)) - apply_elem(ds[b], apply_elem(ds[a], psi))
                if not r.is_zero():
                    return CheckResult("[d_i,d_j] psi = 0 (evaluator)", False, f"wavefunction {t}, pair ({a + 1},{b + 1}): {r.render()}")
    return CheckResult("[d_i,d_j] psi = 0 (evaluator)", True, info=f"{count} random wavefunctions")


def verify_quasi_parity_evaluator(alg: Algebra, count: int = 5, seed: int = 0) -> CheckResult:
    """phi = Lambda_Q psi obeys G_i phi = Q_i phi for random spin wavefunctions."""
    import random

    rng = random.Random(seed)
    layout = spin_layout(alg.spec)
    LQ = projector_Q(alg, layout)
    name = "G_i phi = Q_i phi for phi = Lambda_Q psi (evaluator)"
    for t in range(count):
        phi = apply(LQ, random_wavefunction(alg, rng, spin_dim=layout.size, degree=2, terms=3))
        for i in range(alg.L):
            G = SpinPosOp.from_sparse(alg, spin_grading(alg, layout, i))
            Qi = SpinPosOp.scalar(alg, layout, alg.Q(i))
            d = apply(G, phi) - apply(Qi, phi)
            if not d.is_zero():
                k = min(d.components)
                return CheckResult(name, False, f"wavefunction {t}, particle {i + 1}, component {k}: {d.components[k].render()}")
    return CheckResult(name, True, info=f"{count} random spin wavefunctions")


def verify_tilde_vanishing(alg: Algebra, max_k: int | None = None, ds=None) -> list[CheckResult]:
    max_k = alg.spec.truncation if max_k is None else max_k
    ds = ds or dunkl_operators(alg)
    Lam = projector_P(alg) * projector_Q(alg)
    out = []
    for k in range(max_k + 1):
        It = (build_dunkl_series_coeff(alg, k, "B", ds) * _with_aux(alg, Lam)).trace_aux(0)
        if k % alg.n:
            out.append(CheckResult(f"Itilde^({k})=0", It.is_zero(), It.first_nonzero()))
        else:
            # n * I^(k) Lambda, the structure that makes the vanishing pattern work
            I = SpinPosOp.scalar(alg, Lam.layout, power_sum(alg, k, ds)) * Lam
            d = It - I.scale(alg.n)
            out.append(CheckResult(f"Itilde^({k})=n I^({k}) Lambda", d.is_zero(), d.first_nonzero()))
    return out


def twist_diagnostic(alg: Algebra, max_p: int | None = None, ds=None) -> list[CheckResult]:
    """[B^(p), Lambda_Q] = 0 with the mirrored twist tau^(+jp); informational."""
    max_p = alg.spec.truncation if max_p is None else max_p
    ds = ds or dunkl_operators(alg)
    LQa = _with_aux(alg, projector_Q(alg))
    out = []
    for p in range(max_p + 1):
        B = build_dunkl_series_coeff(alg, p, "B", ds, twist=1)
        c = B * LQa - LQa * B
        out.append(CheckResult(f"mirrored twist: [B^({p}),Lambda_Q]=0", c.is_zero(), c.first_nonzero()))
    return out
