from math import comb

import numpy as np
import pytest

from torext.emodule import (EModule, e_free_resolution, e_regularity, free_module, is_isomorphic,
                            random_emodule, trivial_module)
from torext.errors import InvariantBreach

P = 101


def test_residue_field_resolution_is_symmetric_algebra():
    # Ext_E(k, k) is a polynomial ring in c variables of degree 1
    for c in (1, 2, 3):
        k = trivial_module(c, [(0, 0)], P)
        B = e_free_resolution(k, 5).betti()
        assert B.totals() == [comb(i + c - 1, c - 1) for i in range(6)]
        assert B.slopes() == [0]


def test_free_module_has_trivial_resolution():
    F = free_module(3, [(0, 0), (1, 0)], P)
    B = e_free_resolution(F, 3).betti()
    assert B.totals() == [2]
    assert e_regularity(F, 4) == (1, True)


def test_operator_must_raise_degree():
    with pytest.raises(InvariantBreach):
        EModule(1, [(0, 0), (0, 0)], [np.array([[0, 1], [0, 0]])], P)


def test_square_zero_is_enforced():
    A = np.zeros((3, 3), dtype=np.int64)
    A[1, 0] = A[2, 1] = 1
    with pytest.raises(InvariantBreach):
        EModule(1, [(0, 0), (1, 0), (2, 0)], [A], P)
    A[2, 1] = 0
    EModule(1, [(0, 0), (1, 0), (2, 0)], [A], P)


def test_isomorphism_detects_permutations(rng):
    T = random_emodule(3, rng, P)
    perm = rng.permutation(T.N)
    assert is_isomorphic(T, T.permuted(perm))[0]
    assert not is_isomorphic(T, trivial_module(3, T.keys, P))[0] or all(not A.any() for A in T.ops)


def test_dual_twice_is_identity(rng):
    T = random_emodule(2, rng, P)
    D = T.dual().dual()
    assert D.keys == T.keys
    assert all(np.array_equal(a, b) for a, b in zip(D.ops, T.ops))


def test_minimal_resolution_is_a_complex(rng):
    for _ in range(10):
        T = random_emodule(3, rng, P)
        R = e_free_resolution(T, 3)
        assert R.check_complex()
        assert R.is_minimal()
