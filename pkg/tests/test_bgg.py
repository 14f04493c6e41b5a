import numpy as np

from torext.bgg import (bgg_L, bgg_R, exterior_algebra, free_r_module, is_acyclic, reciprocity_check,
                        residue_r_module)
from torext.emodule import random_emodule
from torext.ext_rmodule import HalfGradedRModule, ext_rmodule
from torext.tor_emodule import submodule_T_prime

P = 101


def test_d_squared_on_random_modules():
    rng = np.random.default_rng(3)
    for _ in range(50):
        assert bgg_L(random_emodule(3, rng, P)).d_squared_zero(range(-3, 5))


def test_reciprocity_pair(N2_res, T2):
    X = ext_rmodule(N2_res)
    sp = submodule_T_prime(T2)
    for U, T in ((X.part(0), sp.T_prime.dual()), (X.part(1), sp.T_double_prime.dual())):
        rep = reciprocity_check(U, T)
        assert rep.L_resolves and rep.R_resolves
        assert bgg_R(U).d_squared_zero()


def test_negative_control_fails_on_both_sides():
    rep = reciprocity_check(free_r_module(3, P, 4), exterior_algebra(3, P))
    assert not rep.L_resolves and not rep.R_resolves and rep.consistent


def test_koszul_pair_in_one_variable():
    rep = reciprocity_check(residue_r_module(1, P), exterior_algebra(1, P))
    assert rep.L_resolves and rep.R_resolves


def test_R_detects_positive_regularity():
    # k[chi]/(chi^2) has regularity 1
    U = free_r_module(1, P, 4)
    keep = [0, 1]
    V = HalfGradedRModule(1, [U.keys[k] for k in keep], [U.ops[0][np.ix_(keep, keep)]], P, 1, None, 4)
    ok, where = is_acyclic(bgg_R(V))
    assert not ok and where[0] == 1
