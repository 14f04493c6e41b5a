import numpy as np
import pytest

from torext.acceptance import random_annihilated_module
from torext.complexes import koszul
from torext.errors import AnnihilationError
from torext.field_poly import PolyRing
from torext.homotopy import (check_defining_identity, compute_homotopy, e_action_on_tor, homotopy_system,
                             verify_homotopy_relations)
from torext.resolution import ModulePresentation, resolve
from torext.tor_emodule import tor_data

P = 101


def test_defining_identity_on_random_fixtures():
    rng = np.random.default_rng(7)
    for _ in range(20):
        M, f = random_annihilated_module(rng)
        H = homotopy_system(resolve(M, 4), f)
        assert check_defining_identity(H)
        assert verify_homotopy_relations(H).ok


def test_cubes_act_trivially_on_tor_of_k():
    S = PolyRing(3, P)
    x = S.gens()
    H = homotopy_system(koszul(x), [g ** 3 for g in x])
    T = e_action_on_tor(H)
    assert T.dims() == {0: 1, 1: 3, 2: 3, 3: 1}
    assert all(not A.any() for A in T.ops)


def test_squares_act_nontrivially_for_linear_form():
    # f = x * (linear form) acting on k: e is multiplication by the dual form
    S = PolyRing(1, P)
    (x,) = S.gens()
    H = homotopy_system(koszul([x]), [x])
    T = e_action_on_tor(H)
    assert T.ops[0][1, 0] == 1


def test_non_annihilating_element_rejected():
    S = PolyRing(2, P)
    x, y = S.gens()
    M = ModulePresentation.cyclic(S, [x ** 2])
    with pytest.raises(AnnihilationError):
        tor_data(M, [y ** 2])
    with pytest.raises(AnnihilationError):
        compute_homotopy(resolve(M, 2), y ** 2)
