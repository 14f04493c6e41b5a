"""Standard small examples used by the tests and the CLI."""

from __future__ import annotations

from functools import lru_cache

from .errors import NotHighSyzygy
from .field_poly import GradedFreeModule, GradedMap, PolyRing
from .resolution import ModulePresentation, betti, resolve, syzygy_module
from .tor_emodule import infer_hmf_ranks


@lru_cache(maxsize=4)
def cubes_ring(p: int = 101):
    """``F_p[x1,x2,x3] / (x1^3, x2^3, x3^3)``."""
    S = PolyRing(3, p)
    x1, x2, x3 = S.gens()
    return S.quotient([x1 ** 3, x2 ** 3, x3 ** 3])


def residue_field(R) -> ModulePresentation:
    return ModulePresentation.residue_field(R)


def syzygy_of_k(i: int, p: int = 101) -> ModulePresentation:
    """N_i, the i-th syzygy of k over the cubes ring (N_0 = k)."""
    return syzygy_module(residue_field(cubes_ring(p)), i)


def one_variable(p: int = 101) -> ModulePresentation:
    """``coker(x^2)`` over ``F_p[x] / (x^3)``."""
    S = PolyRing(1, p)
    (x,) = S.gens()
    return ModulePresentation.cyclic(S.quotient([x ** 3]), [x ** 2])


def nonsplit_base(p: int = 101) -> ModulePresentation:
    """``coker [[a, b, c], [b, c, a]]`` over ``F_p[a,b,c] / (a^4, b^4, c^4)``."""
    S = PolyRing(["a", "b", "c"], p)
    a, b, c = S.gens()
    R = S.quotient([a ** 4, b ** 4, c ** 4])
    F0 = GradedFreeModule(R, [0, 0])
    F1 = GradedFreeModule(R, [1, 1, 1])
    return ModulePresentation(R, GradedMap.from_entries(F1, F0, [[a, b, c], [b, c, a]]))


def first_high_syzygy(N: ModulePresentation, length: int = 14, max_index: int = 8) -> tuple:
    """(index, syzygy) for the first index where the rank system has a solution.

    Betti numbers of N through ``length`` are computed once; the syzygy at
    index j uses ``totals[j:]``, so every later number serves as a check.
    """
    c = len(N.ring.ideal_generators())
    tot = betti(resolve(N, length)).totals()
    for j in range(max_index + 1):
        if len(tot) - j < 2 * c + 2:
            break
        try:
            infer_hmf_ranks(tot[j:], c)
        except NotHighSyzygy:
            continue
        return j, syzygy_module(N, j)
    raise NotHighSyzygy(f"no syzygy up to index {max_index} fits the rank pattern")
