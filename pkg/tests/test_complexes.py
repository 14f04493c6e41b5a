import numpy as np
import pytest

from torext.complexes import (ChainComplex, ChainMap, cone, homology, koszul, minimize, reduce_mod_m,
                              tensor)
from torext.errors import InvariantBreach
from torext.field_poly import GradedFreeModule, GradedMap, PolyRing
from torext.resolution import betti

P = 101


def test_koszul_shape_and_homology():
    S = PolyRing(3, P)
    K = koszul(S.gens())
    assert K.ranks() == {0: 1, 1: 3, 2: 3, 3: 1}
    Kk = reduce_mod_m(K)
    assert [homology(Kk, i).total for i in range(4)] == [1, 3, 3, 1]


def test_tensor_of_koszul_is_koszul():
    S = PolyRing(2, P)
    x, y = S.gens()
    A, B, C = koszul([x]), koszul([y]), koszul([x, y])
    T = tensor(A, B)
    assert T.ranks() == C.ranks()
    assert betti(T) == betti(C)


def test_d_squared_checked():
    S = PolyRing(1, P)
    (x,) = S.gens()
    F = GradedFreeModule(S, [0])
    G = GradedFreeModule(S, [1])
    H = GradedFreeModule(S, [2])
    d1 = GradedMap.from_entries(G, F, [[x]])
    d2 = GradedMap.from_entries(H, G, [[x]])
    with pytest.raises(InvariantBreach):
        ChainComplex({0: F, 1: G, 2: H}, {1: d1, 2: d2})


def test_minimize_removes_unit_pairs():
    S = PolyRing(2, P)
    x, y = S.gens()
    F0 = GradedFreeModule(S, [0])
    F1 = GradedFreeModule(S, [1, 1, 0])
    F2 = GradedFreeModule(S, [0])
    d1 = GradedMap.from_entries(F1, F0, [[x, y, 0]])
    d2 = GradedMap.from_entries(F2, F1, [[0], [0], [1]])
    C = ChainComplex({0: F0, 1: F1, 2: F2}, {1: d1, 2: d2})
    M = minimize(C)
    assert M.ranks() == {0: 1, 1: 2, 2: 0}
    assert M.is_minimal()


def test_cone_of_identity_is_exact():
    S = PolyRing(2, P)
    K = koszul(S.gens())
    ident = ChainMap(K, K, {i: GradedMap.identity(K.term(i)) for i in range(K.lo, K.hi + 1)})
    C = cone(ident)
    Ck = reduce_mod_m(C)
    assert all(homology(Ck, i).total == 0 for i in range(C.lo, C.hi + 1))
