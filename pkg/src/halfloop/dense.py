"""Brute-force dense matrices over Q(zeta_m), used as an oracle for tensor_ops.

Everything here is built from Kronecker products of small matrices and
explicit index loops, sharing no code with the sparse engine beyond CycNum.
"""
from __future__ import annotations

from functools import reduce

from .cyclotomic import CycNum

Dense = list  # list of rows of CycNum


def zeros(n: int, order: int) -> Dense:
    z = CycNum.zero(order)
    return [[z] * n for _ in range(n)]


def eye(n: int, order: int) -> Dense:
    m = zeros(n, order)
    for i in range(n):
        m[i][i] = CycNum.one(order)
    return m


def unit(n: int, i: int, j: int, order: int) -> Dense:
    m = zeros(n, order)
    m[i][j] = CycNum.one(order)
    return m


def from_rows(rows, order: int) -> Dense:
    one = CycNum.one(order)
    return [[one * v for v in row] for row in rows]


def kron(a: Dense, b: Dense) -> Dense:
    na, nb = len(a), len(b)
    out = []
    for i in range(na):
        for k in range(nb):
            out.append([a[i][j] * b[k][l] for j in range(na) for l in range(nb)])
    return out


def kron_all(mats) -> Dense:
    return reduce(kron, mats)


def mul(a: Dense, b: Dense) -> Dense:
    n = len(a)
    z = a[0][0] * 0
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            s = z
            for k in range(n):
                if a[i][k] and b[k][j]:
                    s = s + a[i][k] * b[k][j]
            row.append(s)
        out.append(row)
    return out


def add(a: Dense, b: Dense) -> Dense:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sub(a: Dense, b: Dense) -> Dense:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(a: Dense, c) -> Dense:
    return [[x * c for x in row] for row in a]


def trace(a: Dense):
    s = a[0][0] * 0
    for i in range(len(a)):
        s = s + a[i][i]
    return s


def local_op(dims, slot: int, m: Dense, order: int) -> Dense:
    """m on one slot, identity elsewhere."""
    return kron_all([m if k == slot else eye(d, order) for k, d in enumerate(dims)])


def _digits(flat: int, dims) -> list[int]:
    out = []
    for d in reversed(dims):
        out.append(flat % d)
        flat //= d
    return out[::-1]


def _flat(digits, dims) -> int:
    f = 0
    for a, d in zip(digits, dims):
        f = f * d + a
    return f


def swap(dims, x: int, y: int, order: int) -> Dense:
    size = 1
    for d in dims:
        size *= d
    m = zeros(size, order)
    for c in range(size):
        dg = _digits(c, dims)
        dg[x], dg[y] = dg[y], dg[x]
        m[_flat(dg, dims)][c] = CycNum.one(order)
    return m


def partial_trace(a: Dense, dims, slot: int) -> Dense:
    rest = [d for k, d in enumerate(dims) if k != slot]
    size = 1
    for d in rest:
        size *= d
    z = a[0][0] * 0
    out = [[z] * size for _ in range(size)]
    for r in range(len(a)):
        dr = _digits(r, dims)
        for c in range(len(a)):
            dc = _digits(c, dims)
            if dr[slot] != dc[slot] or not a[r][c]:
                continue
            rr = _flat([v for k, v in enumerate(dr) if k != slot], rest)
            cc = _flat([v for k, v in enumerate(dc) if k != slot], rest)
            out[rr][cc] = out[rr][cc] + a[r][c]
    return out


def partial_transpose(a: Dense, dims, slot: int) -> Dense:
    n = len(a)
    out = [[a[0][0] * 0] * n for _ in range(n)]
    for r in range(n):
        dr = _digits(r, dims)
        for c in range(n):
            dc = _digits(c, dims)
            r2, c2 = list(dr), list(dc)
            r2[slot], c2[slot] = dc[slot], dr[slot]
            out[_flat(r2, dims)][_flat(c2, dims)] = a[r][c]
    return out


def coupling(dims, aux: int, site_slot: int, rep, order: int) -> Dense:
    """sum_ij E_ij (aux) rho(e_ji) (site) via Kronecker products."""
    N = dims[aux]
    d = dims[site_slot]
    total = None
    for i in range(N):
        for j in range(N):
            rho = zeros(d, order)
            for (r, c), v in rep.rho[j, i].items():
                rho[r][c] = v
            mats = []
            for k, dim in enumerate(dims):
                if k == aux:
                    mats.append(unit(N, i, j, order))
                elif k == site_slot:
                    mats.append(rho)
                else:
                    mats.append(eye(dim, order))
            term = kron_all(mats)
            total = term if total is None else add(total, term)
    return total


def to_dense(op) -> Dense:
    """Convert a SparseOp to a dense matrix."""
    m = zeros(op.layout.size, op.order)
    for (r, c), v in op.entries():
        m[r][c] = v
    return m


def equal(a: Dense, b: Dense) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def diag(values, order: int) -> Dense:
    m = zeros(len(values), order)
    for i, v in enumerate(values):
        m[i][i] = CycNum.one(order) * v
    return m


def hamiltonians(spec) -> list[Dense]:
    """Gaudin Hamiltonians rebuilt from dense Kronecker products (aux slot first)."""
    from fractions import Fraction

    from .cyclotomic import inverse, root
    from .gaudin import InnerModelSpec

    order = spec.order
    dims = [spec.N] + [r.dim for r in spec.reps]
    L = spec.L
    P = [coupling(dims, 0, 1 + k, spec.reps[k], order) for k in range(L)]

    def tr(a):
        return partial_trace(a, dims, 0)

    z = [CycNum.rational(v, order) for v in spec.z]
    out = []
    if isinstance(spec, InnerModelSpec):
        n = spec.n
        tau = root(order, order // n)
        grade = []
        for k, mult in enumerate(spec.multiplicities):
            grade += [tau**k] * mult
        G = [local_op(dims, 0, diag([g**p for g in grade], order), order) for p in range(n)]
        Ginv = [local_op(dims, 0, diag([g ** (-p) for g in grade], order), order) for p in range(n)]
        for k in range(L):
            H = zeros(len(P[0]) // spec.N, order)
            for j in range(L):
                if j == k:
                    continue
                for p in range(n):
                    num = tr(mul(mul(mul(P[k], Ginv[p]), P[j]), G[p]))
                    H = add(H, scale(num, inverse(z[k] - tau**p * z[j])))
            for p in range(1, n):
                num = tr(mul(mul(mul(P[k], Ginv[p]), P[k]), G[p]))
                H = add(H, scale(num, CycNum.rational(Fraction(1, 2) / spec.z[k], order)))
            out.append(H)
        return out
    K = local_op(dims, 0, from_rows(spec.K, order), order)
    Kinv = local_op(dims, 0, from_rows(spec.K_inv, order), order)
    Q = [mul(mul(K, partial_transpose(P[k], dims, 0)), Kinv) for k in range(L)]
    for k in range(L):
        H = zeros(len(P[0]) // spec.N, order)
        for j in range(L):
            if j == k:
                continue
            H = add(H, scale(tr(mul(P[k], P[j])), inverse(z[k] - z[j])))
            H = sub(H, scale(tr(mul(P[k], Q[j])), inverse(z[k] + z[j])))
        PQ = add(mul(P[k], Q[k]), mul(Q[k], P[k]))
        H = sub(H, scale(tr(PQ), inverse(z[k] * 4)))
        out.append(H)
    return out


def render(a: Dense) -> list[list[str]]:
    from .cyclotomic import render as render_cyc

    return [[render_cyc(v) for v in row] for row in a]
