import numpy as np
import pytest

from halfloop.gaudin import InnerModelSpec, OuterModelSpec, hamiltonians, symmetry_generators_inner
from halfloop.spectra import MAX_DIM, run_spectra, spectra_check
from halfloop.tensor_ops import SpaceLayout, SparseOp


def test_classic_gaudin_residual():
    checks, extra = spectra_check(hamiltonians(InnerModelSpec(1, 2, (2,), (1, 2))))
    assert checks[0].passed and extra["residual"] < 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_residual_invariant_under_seed(seed):
    checks, extra = spectra_check(hamiltonians(InnerModelSpec(2, 2, (1, 1), (1, 2, 3))), seed=seed)
    assert checks[0].passed


def test_spectrum_splits_into_symmetry_sectors():
    # B^(0) survivors are diagonal here; their joint eigenspaces are the weight sectors 1, 3, 3, 1
    spec = InnerModelSpec(2, 2, (1, 1), (1, 2, 3))
    hams = hamiltonians(spec)
    gens = symmetry_generators_inner(spec)
    diag = np.array([np.diag(g.to_dense()) for g in gens]).T
    sectors = {}
    for idx, key in enumerate(map(tuple, np.round(diag, 9))):
        sectors.setdefault(key, []).append(idx)
    assert sorted(len(v) for v in sectors.values()) == [1, 1, 3, 3]
    _, extra = spectra_check(hams)
    full = [complex(a, b) for a, b in extra["spectra"]["H1"]]
    H1 = hams[0].to_dense()
    pieces = []
    for idx in sectors.values():
        pieces += list(np.linalg.eigvals(H1[np.ix_(idx, idx)]))
        # H1 has no matrix elements between different sectors
        rest = [i for i in range(H1.shape[0]) if i not in idx]
        assert np.allclose(H1[np.ix_(idx, rest)], 0)
    assert np.allclose(sorted(pieces, key=lambda v: (round(v.real, 6), round(v.imag, 6))), full, atol=1e-7)


def test_single_operator_residual_zero():
    checks, extra = spectra_check(hamiltonians(OuterModelSpec(2, 1, (1,))))
    assert checks[0].passed and extra["residual"] == 0.0


def test_dimension_cap():
    lay = SpaceLayout((2,) * 13)
    assert lay.size > MAX_DIM
    checks, _ = spectra_check([SparseOp(lay, 4)])
    assert not checks[0].passed and "exceeds" in checks[0].witness


def test_spectra_sorted_lexicographically():
    rep = run_spectra(OuterModelSpec(2, -1, (1, 2, 3)))
    assert rep.passed
    line = next(n for n in rep.notes if n.startswith("H1 spectrum:"))
    vals = [complex(v.replace("i", "j")) for v in line.split(": ")[1].split()]
    assert vals == sorted(vals, key=lambda v: (v.real, v.imag))


def test_dunkl_rejected():
    from halfloop.dunkl import DunklSpec

    with pytest.raises(ValueError):
        run_spectra(DunklSpec(n=2, L=2))
