"""Exact sparse operators on tensor products of small site spaces.

A layout is a list of slots: zero or more auxiliary (matrix) slots followed by
the quantum sites.  Basis states are flattened mixed-radix with slot 0 as the
most significant digit, so with a single auxiliary slot the order is
aux, site 1, site 2, ... .  Golden data depend on this encoding.

Sites are 0-based in the API (site 0 is the first quantum site).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from numbers import Rational

from .cyclotomic import CycNum, inverse

__all__ = [
    "SpaceLayout",
    "SparseOp",
    "RepMatrices",
    "elementary",
    "embed",
    "permutation",
    "grading_matrix",
    "grading_diagonal",
    "coupling_P",
    "coupling_Q",
    "transpose_aux",
    "partial_trace_aux",
    "commutator",
    "identity",
    "exact_rank",
    "in_span",
    "mat_inverse",
]


class SpaceLayout:
    __slots__ = ("site_dims", "aux_dims", "dims", "strides", "size")

    def __init__(self, site_dims, aux_dims=()):
        if isinstance(aux_dims, int):
            aux_dims = (aux_dims,)
        self.site_dims = tuple(site_dims)
        self.aux_dims = tuple(aux_dims)
        if any(d < 1 for d in self.site_dims + self.aux_dims):
            raise ValueError("dimensions must be positive")
        self.dims = self.aux_dims + self.site_dims
        strides = []
        s = 1
        for d in reversed(self.dims):
            strides.append(s)
            s *= d
        self.strides = tuple(reversed(strides))
        self.size = s

    @property
    def L(self) -> int:
        return len(self.site_dims)

    @property
    def n_aux(self) -> int:
        return len(self.aux_dims)

    def aux_slot(self, k: int = 0) -> int:
        if not 0 <= k < self.n_aux:
            raise IndexError(f"no auxiliary slot {k}")
        return k

    def site_slot(self, site: int) -> int:
        if not 0 <= site < self.L:
            raise IndexError(f"no site {site}")
        return self.n_aux + site

    def digits(self, flat: int) -> list[int]:
        out = []
        for s, d in zip(self.strides, self.dims):
            out.append((flat // s) % d)
        return out

    def flat(self, digits) -> int:
        return sum(a * s for a, s in zip(digits, self.strides))

    def quantum(self) -> SpaceLayout:
        return SpaceLayout(self.site_dims, ())

    def drop_aux(self, k: int) -> SpaceLayout:
        aux = list(self.aux_dims)
        del aux[k]
        return SpaceLayout(self.site_dims, tuple(aux))

    def __eq__(self, other):
        return isinstance(other, SpaceLayout) and self.dims == other.dims and self.aux_dims == other.aux_dims

    def __hash__(self):
        return hash((self.aux_dims, self.site_dims))

    def __repr__(self):
        return f"SpaceLayout(site_dims={self.site_dims}, aux_dims={self.aux_dims})"


def _scalar(c, order: int) -> CycNum:
    if isinstance(c, CycNum):
        return c if c.order == order else CycNum.one(order) * c
    return CycNum.rational(Fraction(c), order)


class SparseOp:
    """Row-major dict-of-dicts sparse matrix over Q(zeta_order)."""

    __slots__ = ("layout", "order", "rows")

    def __init__(self, layout: SpaceLayout, order: int, rows: dict | None = None):
        self.layout = layout
        self.order = order
        self.rows = rows if rows is not None else {}

    @classmethod
    def from_entries(cls, layout, order, entries) -> SparseOp:
        rows: dict = {}
        for (r, c), v in entries:
            if not v:
                continue
            row = rows.setdefault(r, {})
            old = row.get(c)
            if old is None:
                row[c] = v
            else:
                s = old + v
                if s:
                    row[c] = s
                else:
                    del row[c]
        return cls(layout, order, {r: row for r, row in rows.items() if row})

    def entries(self):
        for r in sorted(self.rows):
            row = self.rows[r]
            for c in sorted(row):
                yield (r, c), row[c]

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def is_zero(self) -> bool:
        return not self.rows

    def __bool__(self):
        return bool(self.rows)

    def get(self, r: int, c: int) -> CycNum:
        return self.rows.get(r, {}).get(c, CycNum.zero(self.order))

    def _check(self, other: SparseOp):
        if self.layout != other.layout:
            raise ValueError(f"layout mismatch: {self.layout} vs {other.layout}")

    def __add__(self, other: SparseOp) -> SparseOp:
        self._check(other)
        rows = {r: dict(row) for r, row in self.rows.items()}
        for r, row in other.rows.items():
            tgt = rows.setdefault(r, {})
            for c, v in row.items():
                old = tgt.get(c)
                if old is None:
                    tgt[c] = v
                else:
                    s = old + v
                    if s:
                        tgt[c] = s
                    else:
                        del tgt[c]
        return SparseOp(self.layout, self.order, {r: row for r, row in rows.items() if row})

    def __neg__(self) -> SparseOp:
        return SparseOp(self.layout, self.order, {r: {c: -v for c, v in row.items()} for r, row in self.rows.items()})

    def __sub__(self, other: SparseOp) -> SparseOp:
        return self + (-other)

    def scale(self, c) -> SparseOp:
        c = _scalar(c, self.order)
        if not c:
            return SparseOp(self.layout, self.order)
        return SparseOp(self.layout, self.order, {r: {k: v * c for k, v in row.items()} for r, row in self.rows.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Rational, CycNum)):
            return self.scale(other)
        if not isinstance(other, SparseOp):
            return NotImplemented
        self._check(other)
        orows = other.rows
        out = {}
        for r in sorted(self.rows):
            acc: dict = {}
            for k in sorted(self.rows[r]):
                a = self.rows[r][k]
                orow = orows.get(k)
                if not orow:
                    continue
                for c, b in orow.items():
                    old = acc.get(c)
                    acc[c] = a * b if old is None else old + a * b
            acc = {c: v for c, v in acc.items() if v}
            if acc:
                out[r] = acc
        return SparseOp(self.layout, self.order, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Rational, CycNum)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, SparseOp):
            return NotImplemented
        return self.layout == other.layout and (self - other).is_zero()

    __hash__ = None

    def trace(self) -> CycNum:
        t = CycNum.zero(self.order)
        for r, row in self.rows.items():
            v = row.get(r)
            if v is not None:
                t = t + v
        return t

    def transpose(self) -> SparseOp:
        return SparseOp.from_entries(self.layout, self.order, (((c, r), v) for (r, c), v in self.entries()))

    def max_entry(self):
        """First nonzero entry in sorted order, or None."""
        for item in self.entries():
            return item
        return None

    def to_dense(self):
        import numpy as np

        from .cyclotomic import to_complex

        m = np.zeros((self.layout.size, self.layout.size), dtype=complex)
        for (r, c), v in self.entries():
            m[r, c] = to_complex(v)
        return m

    def __repr__(self):
        return f"SparseOp({self.layout}, nnz={self.nnz()})"


def commutator(a: SparseOp, b: SparseOp) -> SparseOp:
    return a * b - b * a


def identity(layout: SpaceLayout, order: int) -> SparseOp:
    one = CycNum.one(order)
    return SparseOp(layout, order, {i: {i: one} for i in range(layout.size)})


def embed(layout: SpaceLayout, order: int, slots, local: dict) -> SparseOp:
    """Embed ``local`` acting on ``slots`` (tuple of slot indices), identity elsewhere.

    ``local`` maps (row_digits, col_digits) tuples, one digit per listed slot,
    to scalars.
    """
    slots = tuple(slots)
    if len(set(slots)) != len(slots):
        raise ValueError("repeated slot")
    by_col: dict = {}
    for (rd, cd), v in local.items():
        v = _scalar(v, order)
        if v:
            for s, a, b in zip(slots, rd, cd):
                if not (0 <= a < layout.dims[s] and 0 <= b < layout.dims[s]):
                    raise IndexError("local index out of range")
            by_col.setdefault(tuple(cd), []).append((tuple(rd), v))
    strides = layout.strides
    entries = []
    for c in range(layout.size):
        dg = layout.digits(c)
        key = tuple(dg[s] for s in slots)
        for rd, v in by_col.get(key, ()):
            r = c + sum((a - dg[s]) * strides[s] for s, a in zip(slots, rd))
            entries.append(((r, c), v))
    return SparseOp.from_entries(layout, order, entries)


def elementary(layout: SpaceLayout, order: int, slot: int, i: int, j: int) -> SparseOp:
    """E_ij on one slot (0-based i, j)."""
    d = layout.dims[slot]
    if not (0 <= i < d and 0 <= j < d):
        raise IndexError(f"E_{i}{j} out of range for dimension {d}")
    return embed(layout, order, (slot,), {((i,), (j,)): 1})


def permutation(layout: SpaceLayout, order: int, x: int, y: int) -> SparseOp:
    """Swap the tensor factors in slots x and y."""
    d = layout.dims[x]
    if layout.dims[y] != d:
        raise ValueError("permutation needs equal dimensions")
    local = {((j, i), (i, j)): 1 for i in range(d) for j in range(d)}
    return embed(layout, order, (x, y), local)


def grading_diagonal(n: int, multiplicities, order: int) -> list[CycNum]:
    """Diagonal of G: tau^k repeated N_k times, tau = zeta_order^(order/n)."""
    from .cyclotomic import root

    if order % n:
        raise ValueError("field order must be a multiple of n")
    if len(multiplicities) != n:
        raise ValueError(f"need {n} multiplicities, got {len(multiplicities)}")
    out = []
    for k, mult in enumerate(multiplicities):
        if mult < 0:
            raise ValueError("multiplicities must be non-negative")
        out += [root(order, (order // n) * k)] * mult
    return out


def grading_matrix(layout: SpaceLayout, order: int, slot: int, n: int, multiplicities, power: int = 1) -> SparseOp:
    diag = grading_diagonal(n, multiplicities, order)
    if sum(multiplicities) != layout.dims[slot]:
        raise ValueError("multiplicity sum does not match the slot dimension")
    return embed(layout, order, (slot,), {((i,), (i,)): g**power for i, g in enumerate(diag)})


class RepMatrices:
    """Matrices rho(e_ij), 0-based i, j < N, each a dict (r, c) -> CycNum on a dim-dimensional space."""

    def __init__(self, N: int, dim: int, rho: dict, order: int, name: str = "custom", check: bool = True):
        self.N = N
        self.dim = dim
        self.order = order
        self.name = name
        self.rho = {}
        for i in range(N):
            for j in range(N):
                m = rho.get((i, j), {})
                self.rho[i, j] = {k: _scalar(v, order) for k, v in m.items() if v}
        if check:
            self.validate()

    def validate(self):
        def mm(a, b):
            out: dict = {}
            for (r, k), x in a.items():
                for (k2, c), y in b.items():
                    if k == k2:
                        out[r, c] = out.get((r, c), 0) + x * y
            return {k: v for k, v in out.items() if v}

        def sub(a, b):
            out = dict(a)
            for k, v in b.items():
                out[k] = out.get(k, 0) - v
            return {k: v for k, v in out.items() if v}

        N = self.N
        for (i, j), (k, l) in product(product(range(N), repeat=2), repeat=2):
            lhs = sub(mm(self.rho[i, j], self.rho[k, l]), mm(self.rho[k, l], self.rho[i, j]))
            rhs: dict = {}
            if j == k:
                rhs = dict(self.rho[i, l])
            if i == l:
                rhs = sub(rhs, self.rho[k, j])
            if sub(lhs, rhs):
                raise ValueError(f"representation '{self.name}' violates [e_{i+1}{j+1}, e_{k+1}{l+1}] relation")

    @classmethod
    def fundamental(cls, N: int, order: int) -> RepMatrices:
        return cls(N, N, {(i, j): {(i, j): 1} for i in range(N) for j in range(N)}, order, "fundamental")

    @classmethod
    def symmetric_square(cls, N: int, order: int) -> RepMatrices:
        """Sym^2 of the fundamental rep; for N=2 this is the spin-1 representation.

        Basis: monomials x_a x_b (a <= b); e_ij acts as x_i d/dx_j.
        """
        basis = [(a, b) for a in range(N) for b in range(a, N)]
        index = {m: k for k, m in enumerate(basis)}
        rho = {}
        for i in range(N):
            for j in range(N):
                m = {}
                for col, (a, b) in enumerate(basis):
                    # x_i d/dx_j (x_a x_b) = [j=a] x_i x_b + [j=b] x_i x_a
                    for hit, other in ((a, b), (b, a)):
                        if hit == j:
                            key = (index[tuple(sorted((i, other)))], col)
                            m[key] = m.get(key, 0) + 1
                rho[i, j] = m
        return cls(N, len(basis), rho, order, f"sym2_gl{N}")

    @classmethod
    def from_dense(cls, N: int, mats: dict, order: int, name: str = "custom") -> RepMatrices:
        """mats maps (i, j) -> list of rows of scalars."""
        dim = None
        rho = {}
        for key, rows in mats.items():
            dim = len(rows)
            rho[key] = {(r, c): v for r, row in enumerate(rows) for c, v in enumerate(row) if v}
        return cls(N, dim or 0, rho, order, name)


def coupling_P(layout: SpaceLayout, order: int, aux: int, site: int, rep: RepMatrices) -> SparseOp:
    """sum_ij E_ij (aux) (x) rho(e_ji) (site)."""
    if layout.aux_dims[aux] != rep.N:
        raise ValueError("auxiliary dimension must equal the rep's N")
    s = layout.site_slot(site)
    if layout.dims[s] != rep.dim:
        raise ValueError(f"site {site + 1} dimension does not match the representation")
    local = {}
    for i in range(rep.N):
        for j in range(rep.N):
            for (r, c), v in rep.rho[j, i].items():
                local[(i, r), (j, c)] = v
    return embed(layout, order, (aux, s), local)


def transpose_aux(X: SparseOp, aux: int = 0) -> SparseOp:
    """Transpose the auxiliary indices of slot ``aux`` only."""
    lay = X.layout
    st = lay.strides[aux]
    d = lay.dims[aux]
    entries = []
    for (r, c), v in X.entries():
        ar = (r // st) % d
        ac = (c // st) % d
        entries.append(((r + (ac - ar) * st, c + (ar - ac) * st), v))
    return SparseOp.from_entries(lay, X.order, entries)


def mat_inverse(rows: list[list[CycNum]], order: int) -> list[list[CycNum]]:
    """Gauss-Jordan inverse of a small dense matrix; raises ValueError if singular."""
    n = len(rows)
    a = [[_scalar(v, order) for v in row] + [_scalar(int(i == j), order) for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = inverse(a[col][col])
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def coupling_Q(layout: SpaceLayout, order: int, aux: int, site: int, rep: RepMatrices, K) -> SparseOp:
    """K_a P^{t_a} K_a^{-1} with P = coupling_P; K given as dense rows."""
    Kinv = mat_inverse(K, order)
    N = layout.aux_dims[aux]
    Kop = embed(layout, order, (aux,), {((i,), (j,)): K[i][j] for i in range(N) for j in range(N) if K[i][j]})
    Kiop = embed(layout, order, (aux,), {((i,), (j,)): Kinv[i][j] for i in range(N) for j in range(N) if Kinv[i][j]})
    return Kop * transpose_aux(coupling_P(layout, order, aux, site, rep), aux) * Kiop


def partial_trace_aux(X: SparseOp, aux: int = 0) -> SparseOp:
    """Contract the indices of auxiliary slot ``aux``."""
    lay = X.layout
    new = lay.drop_aux(aux)
    st = lay.strides[aux]
    d = lay.dims[aux]
    hi = st * d
    entries = []
    for (r, c), v in X.entries():
        if (r // st) % d != (c // st) % d:
            continue
        # remove the digit: high part shifts down by factor d
        r2 = (r // hi) * st + r % st
        c2 = (c // hi) * st + c % st
        entries.append(((r2, c2), v))
    return SparseOp.from_entries(new, X.order, entries)


def aux_entry(X: SparseOp, i: int, j: int, aux: int = 0) -> SparseOp:
    """The operator on the remaining slots sitting at auxiliary position (i, j)."""
    lay = X.layout
    return partial_trace_aux(elementary(lay, X.order, aux, j, i) * X, aux)


def kron_aux(layout: SpaceLayout, order: int, aux: int, mat, Y: SparseOp) -> SparseOp:
    """mat (on slot aux, dense rows) tensored with Y (an operator on the layout without that slot)."""
    lay_small = layout.drop_aux(aux)
    if Y.layout != lay_small:
        raise ValueError("layout mismatch")
    st = layout.strides[aux]
    entries = []
    for (r, c), v in Y.entries():
        rh, rl = divmod(r, st)
        ch, cl = divmod(c, st)
        for i, row in enumerate(mat):
            for j, m in enumerate(row):
                if m:
                    d = layout.dims[aux]
                    entries.append((((rh * d + i) * st + rl, (ch * d + j) * st + cl), _scalar(m, order) * v))
    return SparseOp.from_entries(layout, order, entries)


def _echelon(vectors: list[dict], order: int):
    """Row-reduce sparse vectors (dict key -> CycNum); returns list of (pivot, vec)."""
    basis: list = []
    for vec in vectors:
        v = dict(vec)
        for piv, b in basis:
            c = v.get(piv)
            if c:
                for k, x in b.items():
                    y = v.get(k)
                    nv = (-c * x) if y is None else y - c * x
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        if v:
            piv = min(v)
            inv = inverse(v[piv])
            basis.append((piv, {k: x * inv for k, x in v.items()}))
    return basis


def _as_vector(op: SparseOp) -> dict:
    return {(r, c): v for (r, c), v in op.entries()}


def exact_rank(ops: list[SparseOp]) -> int:
    if not ops:
        return 0
    return len(_echelon([_as_vector(o) for o in ops], ops[0].order))


def in_span(op: SparseOp, basis_ops: list[SparseOp]) -> bool:
    if op.is_zero():
        return True
    return exact_rank(basis_ops + [op]) == exact_rank(basis_ops)
