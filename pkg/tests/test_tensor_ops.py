import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfloop.cyclotomic import CycNum
from halfloop.tensor_ops import (
    RepMatrices,
    SpaceLayout,
    SparseOp,
    commutator,
    coupling_P,
    elementary,
    embed,
    exact_rank,
    identity,
    in_span,
    kron_aux,
    partial_trace_aux,
    permutation,
    transpose_aux,
)
from strategies import cycnums

ORDER = 4
LAY = SpaceLayout((2, 3), (2,))


def sparse_ops(layout=LAY):
    entry = st.tuples(st.integers(0, layout.size - 1), st.integers(0, layout.size - 1))
    return st.lists(st.tuples(entry, cycnums(ORDER)), max_size=12).map(
        lambda es: SparseOp.from_entries(layout, ORDER, es)
    )


def test_layout_encoding_aux_most_significant():
    lay = SpaceLayout((2, 3), (2,))
    assert lay.dims == (2, 2, 3) and lay.size == 12
    assert lay.digits(7) == [1, 0, 1] and lay.flat([1, 0, 1]) == 7
    assert lay.site_slot(0) == 1 and lay.drop_aux(0) == SpaceLayout((2, 3))


def test_layout_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        SpaceLayout((2, 0))
    with pytest.raises(IndexError):
        LAY.site_slot(5)


def test_elementary_out_of_range():
    with pytest.raises(IndexError):
        elementary(LAY, ORDER, 1, 0, 2)


def test_layout_mismatch_raises():
    a = identity(LAY, ORDER)
    b = identity(SpaceLayout((2, 3)), ORDER)
    with pytest.raises(ValueError):
        a + b


def test_bad_representation_rejected():
    with pytest.raises(ValueError, match="violates"):
        RepMatrices.from_dense(2, {(0, 0): [[1, 0], [0, 0]], (0, 1): [[0, 2], [0, 0]], (1, 0): [[0, 0], [1, 0]], (1, 1): [[0, 0], [0, 1]]}, ORDER)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_symmetric_square_dimension(N):
    r = RepMatrices.symmetric_square(N, ORDER)
    assert r.dim == N * (N + 1) // 2


def test_coupling_is_permutation_for_fundamental():
    lay = SpaceLayout((2,), (2,))
    P = coupling_P(lay, ORDER, 0, 0, RepMatrices.fundamental(2, ORDER))
    assert P == permutation(lay, ORDER, 0, 1)


@given(sparse_ops(), sparse_ops(), sparse_ops())
def test_algebra_against_numpy(a, b, c):
    A, B, C = a.to_dense(), b.to_dense(), c.to_dense()
    assert np.allclose((a * b + c).to_dense(), A @ B + C)
    assert np.allclose(commutator(a, b).to_dense(), A @ B - B @ A)
    assert (a * b) * c == a * (b * c)
    assert np.isclose(complex(a.trace()), np.trace(A))


@given(sparse_ops(), sparse_ops())
def test_partial_trace_against_numpy(a, b):
    A = a.to_dense().reshape(2, 6, 2, 6)
    assert np.allclose(partial_trace_aux(a).to_dense(), np.einsum("iaib->ab", A))
    assert np.allclose(transpose_aux(a).to_dense().reshape(2, 6, 2, 6), A.transpose(2, 1, 0, 3))
    # tr_a is cyclic for factors acting on the auxiliary slot alone
    E = elementary(LAY, ORDER, 0, 0, 1) + elementary(LAY, ORDER, 0, 1, 0).scale(3)
    Einv_like = identity(LAY, ORDER) + E
    assert partial_trace_aux(Einv_like * a) == partial_trace_aux(a * Einv_like)


@given(sparse_ops(SpaceLayout((2, 3))))
def test_kron_aux_against_numpy(y):
    m = [[CycNum.rational(1, ORDER), CycNum.rational(2, ORDER)], [CycNum.zero(ORDER), CycNum.rational(-1, ORDER)]]
    got = kron_aux(LAY, ORDER, 0, m, y).to_dense()
    assert np.allclose(got, np.kron(np.array([[1, 2], [0, -1]]), y.to_dense()))


def test_exact_rank_and_span():
    a = elementary(LAY, ORDER, 0, 0, 1)
    b = elementary(LAY, ORDER, 1, 1, 0)
    assert exact_rank([a, b, a + b.scale(2)]) == 2
    assert in_span(a.scale(5) - b, [a, b])
    assert not in_span(a * b, [a, b])


def test_embed_rejects_repeated_slots():
    with pytest.raises(ValueError):
        embed(LAY, ORDER, (1, 1), {})
