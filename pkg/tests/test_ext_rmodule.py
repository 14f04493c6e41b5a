import numpy as np
import pytest

from torext.errors import InvariantBreach
from torext.ext_rmodule import (HalfGradedRModule, RModule, _equivalent_pencils, ext_leading_terms,
                                ext_rmodule, nonminimal_presentation, presentation_structure,
                                predicted_ext_dims, r_free_resolution, r_presentation, r_regularity,
                                skew_block)

P = 101


@pytest.fixture(scope="module")
def X(N2_res):
    return ext_rmodule(N2_res)


def test_dims_are_betti_numbers(X, N2_res):
    from torext.resolution import betti
    assert [X.dims()[n] for n in range(12)] == betti(N2_res).totals()


def test_operators_commute(X):
    assert X.commute()


def test_noncommuting_operators_rejected():
    A = np.zeros((3, 3), dtype=np.int64)
    B = np.zeros((3, 3), dtype=np.int64)
    A[1, 0] = 1
    B[2, 1] = 1
    with pytest.raises(InvariantBreach):
        RModule(2, [(0, 0), (2, 0), (4, 0)], [A, B], P)


def test_even_resolution_and_structure(X):
    U = X.part(0)
    _, B = r_free_resolution(U)
    assert B.data == {(0, 0): 6, (1, 1): 3, (2, 2): 1}
    rep = presentation_structure(r_presentation(U), U.window)
    assert rep.free_rank == 3 and rep.skew_equivalent and rep.is_free_plus_maximal_ideal
    assert r_regularity(U) == 0


def test_odd_part(X):
    V = X.part(1)
    _, B = r_free_resolution(V)
    assert B.data == {(0, 0): 10, (1, 1): 9, (2, 2): 3}
    assert r_regularity(V) == 1


def test_leading_terms_match_ranks(X):
    for par, b in ((0, [4, 1, 1]), (1, [4, 3, 3])):
        lt = ext_leading_terms(X.part(par))
        assert lt.interval_form and lt.counts(3) == b
        assert lt.dims == predicted_ext_dims(b, 3, X.part(par).window)


def test_nonminimal_presentation(T2, X):
    _, hf, ok = nonminimal_presentation(T2, X.part(0))
    assert ok and hf[0] == 6 and hf[1] == 15


def test_pencil_equivalence_negative_control():
    S = skew_block(3, P)
    D = [np.diag([1 if t == k else 0 for t in range(3)]).astype(np.int64) for k in range(3)]
    assert _equivalent_pencils(S, S, P)
    assert not _equivalent_pencils(D, S, P)
    # a change of bases is still recognised
    A = np.array([[1, 2, 0], [0, 1, 0], [3, 0, 1]])
    C = np.array([[2, 0, 0], [1, 1, 0], [0, 5, 1]])
    Q = [(A @ s @ C) % P for s in S]
    assert _equivalent_pencils(Q, S, P)
