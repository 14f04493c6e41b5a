import numpy as np
import pytest
from sympy import Poly, symbols

from torext.errors import HomogeneityError, ParseError, RingMismatch
from torext.field_poly import (GradedFreeModule, GradedMap, PolyRing, compose, invert_unit_block,
                               random_homogeneous, random_map)

P = 101
xs = symbols("x1 x2 x3")


def _to_sympy(f):
    return sum(int(c) * xs[0] ** m[0] * xs[1] ** m[1] * xs[2] ** m[2] for m, c in f.terms.items())


def _from_sympy(S, e):
    out = {}
    for m, c in Poly(e, *xs, modulus=P).terms():
        out[tuple(m)] = int(c) % P
    return {m: c for m, c in out.items() if c}


def test_arithmetic_agrees_with_sympy(rng):
    S = PolyRing(3, P)
    for _ in range(10):
        a = random_homogeneous(S, 2, rng, 0.6)
        b = random_homogeneous(S, 3, rng, 0.6)
        assert (a * b).terms == _from_sympy(S, _to_sympy(a) * _to_sympy(b))
        assert (a + a * 0 - a).is_zero()


def test_parse_round_trip():
    S = PolyRing(3, P)
    f = S.parse("x1^3+2*x2*x3 - 5")
    assert S.parse(str(f)) == f
    assert S.parse("(x1+x2)^2") == S.parse("x1^2+2*x1*x2+x2^2")


@pytest.mark.parametrize("bad,pos", [("x1^", 3), ("x1 + * x2", 5), ("x9", 0), ("", 0)])
def test_parse_errors_carry_position(bad, pos):
    S = PolyRing(3, P)
    with pytest.raises(ParseError) as exc:
        S.parse(bad)
    assert exc.value.pos == pos


def test_quotient_normal_forms():
    S = PolyRing(3, P)
    x1, x2, x3 = S.gens()
    R = S.quotient([x1 ** 3, x2 ** 3, x3 ** 3])
    assert R.coerce(x1 ** 4 + x2).terms == {(0, 1, 0): 1}
    # 27 standard monomials x^a y^b z^c, a, b, c < 3
    assert sum(len(R.basis(d)) for d in range(10)) == 27
    assert len(R.basis(7)) == 0


def test_ring_mismatch():
    A, B = PolyRing(2, P), PolyRing(3, P)
    with pytest.raises(RingMismatch):
        A.gens()[0] * B.gens()[0]


def test_bad_characteristic():
    with pytest.raises(ValueError):
        PolyRing(2, 100)


def test_graded_map_homogeneity_enforced():
    S = PolyRing(2, P)
    x, y = S.gens()
    F0 = GradedFreeModule(S, [0])
    F1 = GradedFreeModule(S, [1, 2])
    GradedMap.from_entries(F1, F0, [[x, y * y]])
    with pytest.raises(HomogeneityError):
        GradedMap.from_entries(F1, F0, [[x, y]])


def test_composition_associative(rng):
    S = PolyRing(3, P)
    A = GradedFreeModule(S, [0, 1])
    B = GradedFreeModule(S, [1, 1, 2])
    C = GradedFreeModule(S, [2, 3])
    D = GradedFreeModule(S, [3])
    f = random_map(B, A, 0, rng)
    g = random_map(C, B, 0, rng)
    h = random_map(D, C, 0, rng)
    assert (compose(compose(f, g), h) - compose(f, compose(g, h))).is_zero()


def test_invert_unit_block(rng):
    S = PolyRing(2, P)
    x, y = S.gens()
    F = GradedFreeModule(S, [0, 1])
    U = GradedMap.from_entries(F, F, [[3, x + y], [0, 7]])
    V = invert_unit_block(U)
    assert (compose(U, V) - GradedMap.identity(F)).is_zero()
    assert (compose(V, U) - GradedMap.identity(F)).is_zero()
