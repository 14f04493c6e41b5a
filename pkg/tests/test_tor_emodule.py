import pytest

from torext import fixtures as fx
from torext.errors import NotHighSyzygy
from torext.resolution import betti, resolve
from torext.tor_emodule import (HMFRanks, first_syzygy_check, infer_hmf_ranks, leading_term_module,
                                predicted_leading_dims, reg_over_sub, submodule_T_prime)


def test_rank_inference_round_trip():
    h = HMFRanks(3, [2, 0, 5], [1, 4, 2])
    tot = [h.forward(n % 2, n // 2) for n in range(12)]
    assert infer_hmf_ranks(tot, 3) == h


def test_rank_inference_rejects_k(cubes):
    from torext.resolution import ModulePresentation
    with pytest.raises(NotHighSyzygy):
        infer_hmf_ranks(betti(resolve(ModulePresentation.residue_field(cubes), 8)), 3)


def test_ranks_of_N2(N2_res):
    h = infer_hmf_ranks(betti(N2_res), 3)
    assert (h.b0, h.b1) == ([4, 1, 1], [4, 3, 3])


def test_split_dims(T2):
    sp = submodule_T_prime(T2)
    assert sp.T_prime.dims() == {0: 6, 1: 3, 2: 1}
    assert sp.T_double_prime.dims() == {1: 10, 2: 9, 3: 3}


def test_leading_terms_have_interval_form(T2, N2_res):
    lt = leading_term_module(T2)
    assert lt.interval_form
    h = infer_hmf_ranks(betti(N2_res), 3)
    assert lt.dims == predicted_leading_dims(h)


def test_regularity_over_subalgebras(T2):
    for p in (1, 2):
        rE, rp = reg_over_sub(T2, p, 6)
        assert rE <= rp <= rE + 3 - p


def test_first_syzygy_strands(N2):
    assert first_syzygy_check(N2, 4)["equal"]
