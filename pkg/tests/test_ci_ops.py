import numpy as np
import pytest

from torext import fixtures as fx
from torext.ci_ops import (build_gk, check_gk, ci_operators, gk_block_json, higher_ci, lift_resolution,
                           minimize_gk, t2_from_system)
from torext.field_poly import GradedFreeModule
from torext.resolution import ModulePresentation, betti, resolve


@pytest.fixture(scope="module")
def c1():
    M = fx.one_variable()
    L = lift_resolution(resolve(M, 8))
    return M, L, higher_ci(L, 4)


def test_hypersurface_operator_is_a_unit(c1):
    # for a periodic resolution over k[x]/(x^3), t_2 is an isomorphism G_p -> G_{p-2}
    _, L, _ = c1
    t2 = ci_operators(L)
    for p, (t,) in t2.items():
        C = t.constant_part()
        assert C.shape == (1, 1) and C[0, 0] != 0


def test_square_of_lift_lies_in_ideal(c1):
    assert c1[1].square_in_ideal()


def test_identities_and_agreement(c1):
    _, L, H = c1
    assert all(H.verify(4).values())
    t2a, t2b = ci_operators(L), t2_from_system(H)
    assert all((a - b).is_zero() for p in t2a for a, b in zip(t2a[p], t2b[p]))


def test_gk_for_hypersurface_resolves_module(c1):
    M, L, H = c1
    gk = build_gk(L, H, 8)
    rep = check_gk(gk, M.over_ambient(), 6, 16)
    assert rep.d_squared_zero and rep.h0_matches and rep.exact_through == 6
    assert betti(minimize_gk(gk)) == betti(resolve(M.over_ambient(), 2))


def test_gk_of_free_module_is_koszul(cubes):
    M = ModulePresentation.free(GradedFreeModule(cubes, [0]))
    L = lift_resolution(resolve(M, 3))
    gk = build_gk(L, higher_ci(L, 4), 5)
    assert gk.complex.ranks() == {0: 1, 1: 3, 2: 3, 3: 1, 4: 0}


def test_sign_mutation_breaks_the_differential(c1):
    M, L, H = c1
    gk = build_gk(L, H, 6, mutate_sign=True)
    assert not check_gk(gk, M.over_ambient(), 4, 12).d_squared_zero


def test_block_map_names_operators(c1):
    _, L, H = c1
    blocks = gk_block_json(build_gk(L, H, 3))
    assert {b["map"] for b in blocks["2"]} == {"t1^(2,0)", "t0^(1,1)", "t2^(2,0)", "t1^(1,1)"}
