"""Instances and comparison routine for sparse/dense equivalence (dimension <= 81)."""
from fractions import Fraction
from itertools import product

from halfloop import dense
from halfloop.cyclotomic import CycNum, root
from halfloop.tensor_ops import (
    RepMatrices,
    SpaceLayout,
    aux_entry,
    coupling_P,
    coupling_Q,
    elementary,
    grading_diagonal,
    grading_matrix,
    kron_aux,
    mat_inverse,
    partial_trace_aux,
    permutation,
    transpose_aux,
)

MAX_DIM = 81
ORDER = 4
K_FOR = {2: [[0, 1], [-1, 0]], 3: [[1, 0, 0], [0, 1, 0], [0, 0, -1]]}
GRADING_FOR = {2: (2, (1, 1)), 3: (2, (2, 1))}


def site_reps(N: int):
    reps = [RepMatrices.fundamental(N, ORDER)]
    if N == 2:
        reps.append(RepMatrices.symmetric_square(2, ORDER))
    return reps


def instances():
    """Every (N, reps) with N * prod(site dims) <= MAX_DIM, all site orderings."""
    out = []
    for N in (2, 3):
        choices = site_reps(N)
        for L in range(1, 6):
            for combo in product(range(len(choices)), repeat=L):
                reps = tuple(choices[c] for c in combo)
                size = N
                for r in reps:
                    size *= r.dim
                if size <= MAX_DIM:
                    out.append((N, reps))
    return out


def instance_id(case) -> str:
    N, reps = case
    return f"N{N}-" + "x".join(str(r.dim) for r in reps)


def same(sparse_op, dense_mat) -> bool:
    return dense.equal(dense.to_dense(sparse_op), dense_mat)


def compare_instance(case) -> list[str]:
    """Names of the sparse operations that disagree with the dense oracle on one instance."""
    bad = []

    def check(name, ok):
        if not ok:
            bad.append(name)

    N, reps = case
    lay = SpaceLayout([r.dim for r in reps], (N,))
    dims = list(lay.dims)
    L = len(reps)
    one = CycNum.one(ORDER)

    for slot, d in enumerate(dims):
        for i, j in sorted({(0, 0), (0, d - 1), (d - 1, 0)}):
            ref = dense.local_op(dims, slot, dense.unit(d, i, j, ORDER), ORDER)
            check(f"elementary slot {slot} ({i},{j})", same(elementary(lay, ORDER, slot, i, j), ref))
    for x in range(len(dims)):
        for y in range(x + 1, len(dims)):
            if dims[x] == dims[y]:
                check(f"permutation ({x},{y})", same(permutation(lay, ORDER, x, y), dense.swap(dims, x, y, ORDER)))

    n, mult = GRADING_FOR[N]
    G = grading_matrix(lay, ORDER, 0, n, mult)
    check("grading_matrix", same(G, dense.local_op(dims, 0, dense.diag(grading_diagonal(n, mult, ORDER), ORDER), ORDER)))

    K = K_FOR[N]
    Kd = dense.local_op(dims, 0, dense.from_rows(K, ORDER), ORDER)
    Kinv = dense.local_op(dims, 0, mat_inverse([[one * v for v in row] for row in K], ORDER), ORDER)
    Ps, Pd = [], []
    for k in range(L):
        P = coupling_P(lay, ORDER, 0, k, reps[k])
        D = dense.coupling(dims, 0, 1 + k, reps[k], ORDER)
        check(f"coupling_P site {k}", same(P, D))
        Q = coupling_Q(lay, ORDER, 0, k, reps[k], K)
        check(f"coupling_Q site {k}", same(Q, dense.mul(dense.mul(Kd, dense.partial_transpose(D, dims, 0)), Kinv)))
        check(f"transpose_aux site {k}", same(transpose_aux(P), dense.partial_transpose(D, dims, 0)))
        Ps.append(P)
        Pd.append(D)

    # products, sums, differences and scalar multiples
    c = root(ORDER, 1) + Fraction(1, 3)
    X, Xd = Ps[0].scale(c), dense.scale(Pd[0], c)
    for P, D in zip(Ps[1:], Pd[1:]):
        X = X * G * P - P + X
        Xd = dense.add(dense.sub(dense.mul(dense.mul(Xd, dense.to_dense(G)), D), D), Xd)
    check("mul/add/sub/scale", same(X, Xd))
    check("trace", X.trace() == dense.trace(Xd))
    check("transpose", same(X.transpose(), [list(r) for r in zip(*Xd)]))
    check("partial_trace_aux", same(partial_trace_aux(X), dense.partial_trace(Xd, dims, 0)))
    for i in range(N):
        for j in range(N):
            ref = dense.partial_trace(dense.mul(dense.local_op(dims, 0, dense.unit(N, j, i, ORDER), ORDER), Xd), dims, 0)
            check(f"aux_entry ({i},{j})", same(aux_entry(X, i, j), ref))
    Y = partial_trace_aux(X)
    mat = [[one * (a + 2 * b) for b in range(N)] for a in range(N)]
    check("kron_aux", same(kron_aux(lay, ORDER, 0, mat, Y), dense.kron(dense.from_rows(mat, ORDER), dense.to_dense(Y))))
    return bad


def gaudin_specs():
    from halfloop.gaudin import InnerModelSpec, OuterModelSpec

    sym2 = RepMatrices.symmetric_square(2, ORDER)
    return [
        InnerModelSpec(2, 2, (1, 1), (1, 2, 3)),
        InnerModelSpec(3, 3, (1, 1, 1), (1, 2)),
        InnerModelSpec(2, 3, (2, 1), (1, 2)),
        InnerModelSpec(1, 2, (2,), (1, 2, Fraction(7, 2))),
        InnerModelSpec(4, 2, (1, 1, 0, 0), (1, 2, 5)),
        InnerModelSpec(2, 2, (1, 1), (1, 2), reps=(None, sym2)),
        InnerModelSpec(2, 2, (1, 1), (1, 2), reps=(sym2, sym2)),
        OuterModelSpec(2, -1, (1, 2, 3)),
        OuterModelSpec(3, 1, (1, 2), signature=(2, 1)),
        OuterModelSpec(2, 1, (1, 3)),
        OuterModelSpec(2, -1, (1, 2), reps=(None, sym2)),
    ]


def compare_hamiltonians(spec) -> bool:
    from halfloop.gaudin import hamiltonians

    return all(same(H, D) for H, D in zip(hamiltonians(spec), dense.hamiltonians(spec)))
