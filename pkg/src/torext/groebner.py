"""Groebner bases for submodules of graded free modules over S or S/I.

A module element is a dict ``{(component, monomial): coeff}``.  Buchberger's
algorithm uses the normal selection strategy (which is the sugar strategy for
homogeneous input), Buchberger's chain criterion, optional truncation at a
maximal degree, and returns the unique reduced basis so that the output does
not depend on the order of the input generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HomogeneityError, RingMismatch
from .field_poly import (
    GradedFreeModule,
    GradedMap,
    PolyRing,
    Polynomial,
    grevlex_key,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
    monomials_of_degree,
)


class ModuleOrder:
    """Monomial order on ``m * e_k``.

    kinds:
      ``top``     degree of m*e_k, then grevlex on m, then lower index first
      ``pot``     lower index first, then grevlex
      ``elim``    components ``< split`` dominate, then ``top`` inside a block
      ``schreyer`` induced by leading terms ``(comp, mono)`` of a parent basis
    Larger key means larger term.
    """

    def __init__(self, kind: str = "top", weights=None, split: int | None = None,
                 parent_lts=None, parent: "ModuleOrder | None" = None):
        if kind not in ("top", "pot", "elim", "schreyer"):
            raise ValueError(f"unknown module order {kind!r}")
        self.kind = kind
        self.weights = tuple(weights or ())
        self.split = split
        self.parent_lts = tuple(parent_lts or ())
        self.parent = parent

    def key(self, comp: int, m) -> tuple:
        w = self.weights[comp] if comp < len(self.weights) else 0
        if self.kind == "top":
            return (sum(m) + w, tuple(-e for e in reversed(m)), -comp)
        if self.kind == "pot":
            return (-comp, grevlex_key(m))
        if self.kind == "elim":
            block = 1 if comp < self.split else 0
            return (block, sum(m) + w, tuple(-e for e in reversed(m)), -comp)
        pc, pm = self.parent_lts[comp]
        return (self.parent.key(pc, mono_mul(m, pm)), -comp)

    def describe(self) -> str:
        return {"top": "term-over-position-grevlex", "pot": "position-over-term",
                "elim": "elimination", "schreyer": "schreyer"}[self.kind]


@dataclass
class GroebnerBasis:
    ring: PolyRing            # ambient polynomial ring S
    degrees: tuple            # component weights
    order: ModuleOrder
    elements: list            # reduced, monic, sorted by leading term
    quotient_ideal: tuple = ()  # GB of I as term dicts (empty for I = 0)
    max_degree: int | None = None
    lts: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def leading_terms(self) -> list:
        return list(self.lts)

    def submodule_generators(self) -> list:
        """Elements that are not of the form (element of I) * e_k."""
        return [g for g in self.elements if not _is_ideal_multiple(g, self.quotient_ideal)]


def _is_ideal_multiple(g, ideal) -> bool:
    comps = {c for c, _ in g}
    if len(comps) != 1 or not ideal:
        return False
    terms = {m: v for (_, m), v in g.items()}
    return any(terms == h for h in ideal)


# ---------------------------------------------------------------------------
# core polynomial-vector routines


def _lt(v: dict, order: ModuleOrder):
    return max(v, key=lambda t: order.key(t[0], t[1]))


def _elem_degree(v: dict, weights) -> int:
    degs = {sum(m) + (weights[c] if c < len(weights) else 0) for c, m in v}
    if len(degs) != 1:
        raise HomogeneityError("module element is not homogeneous")
    return degs.pop()


def _monic(v: dict, lt, p: int) -> dict:
    c = v[lt]
    if c == 1:
        return v
    inv = pow(c, -1, p)
    return {t: x * inv % p for t, x in v.items()}


def _sub_multiple(v: dict, g: dict, coef: int, shift, p: int):
    """v -= coef * shift * g, in place."""
    for (c, m), x in g.items():
        t = (c, mono_mul(m, shift))
        y = (v.get(t, 0) - coef * x) % p
        if y:
            v[t] = y
        else:
            v.pop(t, None)


def _find_reducer(t, lts):
    c, m = t
    for idx, (gc, gm) in enumerate(lts):
        if gc == c and mono_divides(gm, m):
            return idx
    return -1


def _reduce(v: dict, basis: list, lts: list, order: ModuleOrder, p: int, full: bool = True) -> dict:
    """Reduce v by basis (monic elements with leading terms lts).

    With full=False only the leading term is reduced repeatedly.
    Reducer choice: smallest index whose leading term divides.
    """
    v = dict(v)
    done: dict = {}
    while v:
        t = _lt(v, order)
        idx = _find_reducer(t, lts)
        if idx < 0:
            if not full:
                v.update(done)
                return v
            done[t] = v.pop(t)
            continue
        gm = lts[idx][1]
        _sub_multiple(v, basis[idx], v[t], mono_div(t[1], gm), p)
    return done


def _interreduce(basis: list, order: ModuleOrder, p: int) -> list:
    items = []
    for g in basis:
        if g:
            lt = _lt(g, order)
            items.append((lt, _monic(g, lt, p)))
    # keep elements whose leading term is not divisible by another's
    items.sort(key=lambda it: order.key(*it[0]))
    kept = []
    for lt, g in items:
        if any(k[0][0] == lt[0] and mono_divides(k[0][1], lt[1]) for k in kept):
            continue
        kept.append((lt, g))
    lts = [k[0] for k in kept]
    elems = [k[1] for k in kept]
    out = []
    for i, (lt, g) in enumerate(kept):
        others = elems[:i] + elems[i + 1:]
        olts = lts[:i] + lts[i + 1:]
        tail = dict(g)
        head = tail.pop(lt)
        red = _reduce(tail, others, olts, order, p, full=True)
        red[lt] = head
        out.append((lt, red))
    return out


def _buchberger_core(gens: list, weights, order: ModuleOrder, p: int, max_degree=None):
    basis: list = []
    lts: list = []
    degs: list = []
    pending: set = set()
    queue: list = []

    def add(g):
        lt = _lt(g, order)
        g = _monic(g, lt, p)
        k = len(basis)
        basis.append(g)
        lts.append(lt)
        degs.append(_elem_degree(g, weights))
        for i in range(k):
            if lts[i][0] != lt[0]:
                continue
            lcm = mono_lcm(lts[i][1], lt[1])
            d = sum(lcm) + (weights[lt[0]] if lt[0] < len(weights) else 0)
            if max_degree is not None and d > max_degree:
                continue
            pending.add((i, k))
            queue.append((d, i, k, lcm))

    # input generators, processed lowest degree first for a stable trace
    prepared = []
    for g in gens:
        g = {t: c % p for t, c in g.items() if c % p}
        if g:
            prepared.append((_elem_degree(g, weights), g))
    prepared.sort(key=lambda x: x[0])
    for _, g in prepared:
        if max_degree is not None and _elem_degree(g, weights) > max_degree:
            continue
        r = _reduce(g, basis, lts, order, p, full=False)
        if r:
            add(r)

    while queue:
        queue.sort(key=lambda q: (q[0], q[1], q[2]))
        d, i, k, lcm = queue.pop(0)
        if (i, k) not in pending:
            continue
        pending.discard((i, k))
        comp = lts[k][0]
        # chain criterion
        skip = False
        for j in range(len(basis)):
            if j in (i, k) or lts[j][0] != comp or not mono_divides(lts[j][1], lcm):
                continue
            a, b = (min(i, j), max(i, j)), (min(k, j), max(k, j))
            if a not in pending and b not in pending:
                skip = True
                break
        if skip:
            continue
        s = dict()
        _sub_multiple(s, basis[i], p - 1, mono_div(lcm, lts[i][1]), p)
        _sub_multiple(s, basis[k], 1, mono_div(lcm, lts[k][1]), p)
        r = _reduce(s, basis, lts, order, p, full=False)
        if r:
            add(r)
    return basis


def _groebner_dicts(gens, weights, order, p, max_degree=None) -> list:
    """Reduced Groebner basis as a list of (lt, element), sorted by lt ascending."""
    raw = _buchberger_core(gens, weights, order, p, max_degree)
    return _interreduce(raw, order, p)


# ---------------------------------------------------------------------------
# ideals (used by quotient rings)


def ideal_groebner(gens: list, p: int, n: int) -> list:
    """Reduced grevlex Groebner basis of an ideal, as term dicts."""
    order = ModuleOrder("top")
    vecs = [{(0, m): c for m, c in g.items()} for g in gens]
    red = _groebner_dicts(vecs, (0,), order, p)
    return [{m: c for (_, m), c in g.items()} for _, g in red]


def reduce_terms(terms: dict, gb: tuple, lms: tuple, p: int) -> dict:
    """Normal form of a polynomial (term dict) against an ideal Groebner basis."""
    order = ModuleOrder("top")
    vecs = [{(0, m): c for m, c in g.items()} for g in gb]
    lts = [(0, m) for m in lms]
    out = _reduce({(0, m): c for m, c in terms.items()}, vecs, lts, order, p)
    return {m: c for (_, m), c in out.items()}


# ---------------------------------------------------------------------------
# public API


def _ring_parts(ring: PolyRing, quotient_ideal):
    S = ring.ambient
    ideal = tuple(ring.ideal_gb)
    if quotient_ideal is not None:
        extra = [S.coerce(f) for f in quotient_ideal]
        if extra:
            ideal = tuple(S.quotient(extra + [Polynomial(S, g) for g in ideal]).ideal_gb)
    return S, ideal


def map_columns_as_elements(f: GradedMap) -> list:
    cols = [dict() for _ in range(f.shape[1])]
    for m, A in f.coeffs.items():
        for i, j in zip(*np.nonzero(A)):
            cols[int(j)][(int(i), m)] = int(A[i, j])
    return cols


def _as_elements(gens, ring: PolyRing | None):
    """Accept a GradedMap (columns), list of dicts, or list of polynomial vectors."""
    if isinstance(gens, GradedMap):
        return gens.ring, list(gens.target.degrees), map_columns_as_elements(gens)
    out = []
    for g in gens:
        if isinstance(g, dict):
            out.append(dict(g))
        else:
            v = {}
            for k, e in enumerate(g):
                e = ring.coerce(e)
                for m, c in e.terms.items():
                    v[(k, m)] = c
            out.append(v)
    return ring, None, out


def buchberger(gens, order: ModuleOrder | None = None, quotient_ideal=None, *,
               ring: PolyRing | None = None, degrees=None, max_degree: int | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the submodule generated by ``gens``.

    ``gens`` is a GradedMap (its columns), or a list of vectors of
    polynomials / element dicts together with ``ring`` and ``degrees``.  Over
    a quotient ring (either ``ring`` is a quotient or ``quotient_ideal`` is
    given) the generators ``I * e_k`` are appended.
    """
    ring, dflt_degrees, elems = _as_elements(gens, ring)
    if ring is None:
        raise ValueError("ring required")
    if degrees is None:
        degrees = dflt_degrees
    if degrees is None:
        rank = 1 + max((c for e in elems for c, _ in e), default=0)
        degrees = [0] * rank
    degrees = tuple(degrees)
    S, ideal = _ring_parts(ring, quotient_ideal)
    if order is None:
        order = ModuleOrder("top", weights=degrees)
    for e in elems:
        if e:
            _elem_degree(e, degrees)
    allg = list(elems)
    for k in range(len(degrees)):
        for h in ideal:
            allg.append({(k, m): c for m, c in h.items()})
    red = _groebner_dicts(allg, degrees, order, S.p, max_degree)
    return GroebnerBasis(S, degrees, order, [g for _, g in red], ideal, max_degree, [lt for lt, _ in red])


def normal_form(v, gb: GroebnerBasis) -> dict:
    """Fully reduced remainder of v (element dict or polynomial vector)."""
    if not isinstance(v, dict):
        v = _as_elements([v], gb.ring)[2][0]
    return _reduce(v, gb.elements, gb.lts, gb.order, gb.ring.p)


def contains(gb: GroebnerBasis, v) -> bool:
    return not normal_form(v, gb)


def hilbert_function(gb: GroebnerBasis, through_degree: int, start: int | None = None) -> dict:
    """dim of (ambient free module / submodule) per degree via standard monomials.

    Requires a basis computed at least through ``through_degree`` (or untruncated).
    """
    n = gb.ring.n
    lo = min(gb.degrees, default=0) if start is None else start
    by_comp: dict = {}
    for c, m in gb.lts:
        by_comp.setdefault(c, []).append(m)
    out = {}
    for d in range(lo, through_degree + 1):
        tot = 0
        for k, w in enumerate(gb.degrees):
            lms = by_comp.get(k, [])
            for m in monomials_of_degree(n, d - w):
                if not any(mono_divides(l, m) for l in lms):
                    tot += 1
        out[d] = tot
    return out


def is_finite_length(gb: GroebnerBasis) -> bool:
    """Quotient has finite length iff every component contains a pure power of each variable."""
    n = gb.ring.n
    for k in range(gb.rank):
        lms = [m for c, m in gb.lts if c == k]
        for i in range(n):
            if not any(all(e == 0 for j, e in enumerate(m) if j != i) for m in lms):
                return False
    return True


def element_to_column(v: dict, rank: int, ring: PolyRing) -> list:
    out = [dict() for _ in range(rank)]
    for (c, m), x in v.items():
        out[c][m] = x
    return [Polynomial(ring, t) for t in out]


def elements_to_map(elems: list, target: GradedFreeModule, degrees=None) -> GradedMap:
    """Columns -> GradedMap into target; column degrees inferred when not given."""
    ring = target.ring
    if degrees is None:
        degrees = [_elem_degree(e, target.degrees) for e in elems]
    src = GradedFreeModule(ring, degrees)
    coeffs: dict = {}
    for j, e in enumerate(elems):
        for (c, m), x in e.items():
            if m not in coeffs:
                coeffs[m] = np.zeros((target.rank, len(elems)), dtype=np.int64)
            coeffs[m][c, j] = x
    return GradedMap(src, target, coeffs, 0)


def kernel(f: GradedMap, quotient_ideal=None, max_degree: int | None = None, minimalize: bool = True) -> GradedMap:
    """Generators of ker f as the columns of a map into f.source.

    Computed with an elimination order on the graph module
    ``{(f(u), u)}`` inside ``target ⊕ source``; over a quotient ring the
    multiples ``I * e_k`` of every basis vector are adjoined.  The columns
    are sorted by (degree, leading monomial) and minimalized.
    """
    ring = f.ring
    S, ideal = _ring_parts(ring, quotient_ideal)
    G, F = f.target, f.source
    nG = G.rank
    w = tuple(d - f.degree_shift for d in G.degrees) + tuple(F.degrees)
    gens = []
    cols = map_columns_as_elements(f)
    for j in range(F.rank):
        v = dict(cols[j])
        v[(nG + j, (0,) * S.n)] = 1
        gens.append(v)
    for k in range(nG + F.rank):
        for h in ideal:
            gens.append({(k, m): c for m, c in h.items()})
    # with the target block dominant, elements whose leading term lies in
    # the source block have zero target part
    order_g = ModuleOrder("elim", weights=w, split=nG)
    red = _groebner_dicts(gens, w, order_g, S.p, max_degree)
    Fring_ideal = ideal
    kers = []
    for lt, g in red:
        if lt[0] < nG:
            continue
        if any(c < nG for c, _ in g):
            continue
        v = {(c - nG, m): x for (c, m), x in g.items()}
        if Fring_ideal:
            v = _reduce_mod_ideal(v, Fring_ideal, S.p)
            if not v:
                continue
        kers.append((lt, v))
    kers.sort(key=lambda it: (_elem_degree(it[1], F.degrees), order_g.key(*it[0])))
    R = ring if not quotient_ideal else S.quotient([Polynomial(S, g) for g in ideal])
    Fm = GradedFreeModule(R, F.degrees)
    if not kers:
        return GradedMap(GradedFreeModule(R, ()), Fm, {}, 0)
    K = elements_to_map([v for _, v in kers], GradedFreeModule(S, F.degrees)).over(R)
    K = K.with_modules(target=Fm)
    if minimalize:
        from .degreewise import minimal_columns

        K = K.submatrix(cols=minimal_columns(K))
    return K


def _reduce_mod_ideal(v: dict, ideal, p) -> dict:
    by_comp: dict = {}
    for (c, m), x in v.items():
        by_comp.setdefault(c, {})[m] = x
    lms = tuple(max(h, key=grevlex_key) for h in ideal)
    out = {}
    for c, t in by_comp.items():
        for m, x in reduce_terms(t, ideal, lms, p).items():
            out[(c, m)] = x
    return out


def syzygies(f: GradedMap, **kw) -> GradedMap:
    return kernel(f, **kw)


def check_ring(a: PolyRing, b: PolyRing):
    if a != b:
        raise RingMismatch(f"{a} vs {b}")
