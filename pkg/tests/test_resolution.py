from math import comb

from sympy import Rational, series, symbols

from torext import fixtures as fx
from torext.field_poly import GradedFreeModule, GradedMap, PolyRing
from torext.resolution import ModulePresentation, betti, check_resolution, resolve, syzygy_module

P = 101


def test_residue_field_over_polynomial_ring_is_koszul():
    S = PolyRing(3, P)
    B = betti(resolve(ModulePresentation.residue_field(S), 4))
    assert B.totals() == [comb(3, i) for i in range(4)]
    assert B.slopes() == [0]


def test_residue_field_over_cubes_poincare_series(cubes):
    # P(t) = (1 + t)^3 / (1 - t^2)^3 for a complete intersection of codim 3
    t = symbols("t")
    ser = series((1 + t) ** 3 / (1 - t ** 2) ** 3, t, 0, 8).removeO()
    want = [int(ser.coeff(t, i)) for i in range(8)]
    B = betti(resolve(ModulePresentation.residue_field(cubes), 7))
    assert B.totals() == want


def test_resolution_is_exact(cubes):
    M = ModulePresentation.cyclic(cubes, [cubes.gens()[0] ** 2])
    F = resolve(M, 4)
    assert check_resolution(F, M)


def test_syzygy_shifts_betti(cubes):
    k = ModulePresentation.residue_field(cubes)
    tk = betti(resolve(k, 6)).totals()
    t2 = betti(resolve(syzygy_module(k, 2), 4)).totals()
    assert t2 == tk[2:7]


def test_one_variable_fixture_is_periodic():
    M = fx.one_variable()
    B = betti(resolve(M, 6))
    assert B.totals() == [1] * 7
    # degrees 0, 2, 3, 5, 6, ...
    assert [j for (_, j) in sorted(B.data)] == [0, 2, 3, 5, 6, 8, 9]


def test_betti_table_render_and_json():
    S = PolyRing(2, P)
    B = betti(resolve(ModulePresentation.residue_field(S), 2))
    assert B.render().splitlines()[1].split() == ["total:", "1", "2", "1"]
    assert B.to_json() == {"rows": [{"slope": 0, "entries": [1, 2, 1]}], "total": [1, 2, 1]}
