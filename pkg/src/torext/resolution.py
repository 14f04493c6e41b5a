"""Minimal graded free resolutions, syzygy modules and Betti tables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import degreewise as dw
from . import groebner
from .complexes import ChainComplex
from .errors import MathPreconditionError, MinimalityError
from .field_poly import GradedFreeModule, GradedMap, PolyRing, Polynomial


@dataclass(frozen=True)
class ModulePresentation:
    """``M = coker(presentation)`` over ``ring``.

    ``annihilator`` optionally records polynomials known to kill M (for
    instance the regular sequence defining R); it is used to bound degrees.
    """

    ring: PolyRing
    presentation: GradedMap
    annihilator: tuple = ()

    def __post_init__(self):
        if self.presentation.ring != self.ring:
            raise MathPreconditionError("presentation over a different ring")

    @property
    def generators(self) -> GradedFreeModule:
        return self.presentation.target

    @classmethod
    def free(cls, F: GradedFreeModule, annihilator=()):
        return cls(F.ring, GradedMap.zero(GradedFreeModule(F.ring, ()), F), tuple(annihilator))

    @classmethod
    def cyclic(cls, ring: PolyRing, ideal, annihilator=()):
        """``ring / (ideal)``."""
        ideal = [ring.coerce(g) for g in ideal]
        F0 = GradedFreeModule(ring, [0])
        F1 = GradedFreeModule(ring, [g.degree() for g in ideal])
        return cls(ring, GradedMap.from_entries(F1, F0, [ideal], 0), tuple(annihilator))

    @classmethod
    def residue_field(cls, ring: PolyRing, annihilator=()):
        return cls.cyclic(ring, ring.gens(), annihilator)

    def hilbert_function(self, degrees) -> dict:
        return dw.cokernel_dims(self.presentation, degrees)

    def top_degree(self) -> int | None:
        """Largest degree with M_d != 0 for finite-length M, else None."""
        gens = self.generators.degrees
        if not gens:
            return -1
        if self.ring.is_artinian():
            cap = max(gens) + self.ring.top_degree()
        else:
            cap = _annihilator_cap(self)
        if cap is None:
            gb = groebner.buchberger(self.presentation, ring=self.ring, degrees=self.generators.degrees)
            if not groebner.is_finite_length(gb):
                return None
            cap = max(gens) + 1
            while True:
                hf = groebner.hilbert_function(gb, cap, start=cap)
                if hf[cap] == 0 and cap >= max(gens):
                    break
                cap += 1
        dims = self.hilbert_function(range(min(gens), cap + 1))
        top = -1
        for d, v in dims.items():
            if v:
                top = d
        return top

    def over_ambient(self) -> "ModulePresentation":
        """The same module presented over the ambient polynomial ring."""
        R = self.ring
        if not R.is_quotient:
            return self
        S = R.ambient
        F0 = self.generators.over(S)
        rels = [self.presentation.over(S)]
        ideal = R.ideal_generators()
        for g in ideal:
            rels.append(GradedMap.identity(F0).times_poly(g).with_modules(
                source=F0.shift(g.degree()), degree_shift=0))
        sources = [r.source for r in rels]
        from .field_poly import block_map

        P = block_map([rels], sources, [F0], 0)
        ann = tuple(self.annihilator) or tuple(ideal)
        return ModulePresentation(S, P, tuple(S.coerce(a) for a in ann))

    def annihilated_by(self, f) -> bool:
        """Whether f * (every generator) lies in the image of the presentation."""
        f = self.ring.coerce(f)
        F0 = self.generators
        if f.is_zero():
            return True
        B = GradedMap.identity(F0).times_poly(f)
        B = B.with_modules(source=F0.shift(f.degree()), degree_shift=0)
        if self.presentation.shape[1] == 0:
            return B.is_zero()
        return dw.in_image(self.presentation, B)


def _annihilator_cap(M: ModulePresentation):
    ann = [M.ring.coerce(a) for a in M.annihilator]
    if not ann:
        return None
    Q = M.ring.quotient(ann)
    if not Q.is_artinian():
        return None
    return max(M.generators.degrees) + Q.top_degree()


class BettiTable:
    """Graded Betti numbers ``beta[(i, j)]``: i homological, j internal degree.

    Rendering puts column i under its homological degree and places
    ``beta[i, j]`` in the row labelled ``j - i``.
    """

    def __init__(self, data: dict | None = None):
        self.data = {(int(i), int(j)): int(v) for (i, j), v in (data or {}).items() if v}

    @classmethod
    def from_degrees(cls, terms: dict):
        """``terms[i]`` = iterable of generator degrees of the i-th free module."""
        data: dict = {}
        for i, degs in terms.items():
            for j in degs:
                data[(i, j)] = data.get((i, j), 0) + 1
        return cls(data)

    def __getitem__(self, key) -> int:
        return self.data.get(tuple(key), 0)

    def __eq__(self, other):
        return isinstance(other, BettiTable) and self.data == other.data

    def columns(self) -> list:
        if not self.data:
            return []
        return list(range(min(i for i, _ in self.data), max(i for i, _ in self.data) + 1))

    def slopes(self) -> list:
        return sorted({j - i for i, j in self.data})

    def totals(self, ncols: int | None = None) -> list:
        cols = self.columns() if ncols is None else list(range(ncols))
        return [sum(v for (i, _), v in self.data.items() if i == c) for c in cols]

    def row(self, s: int, ncols: int | None = None) -> list:
        cols = self.columns() if ncols is None else list(range(ncols))
        return [self.data.get((c, c + s), 0) for c in cols]

    def truncate(self, ncols: int) -> "BettiTable":
        return BettiTable({k: v for k, v in self.data.items() if k[0] < ncols})

    def render(self) -> str:
        cols = self.columns()
        slopes = self.slopes()
        rows = [["", *[str(c) for c in cols]], ["total:", *[str(t) for t in self.totals()]]]
        for s in slopes:
            rows.append([f"{s}:", *[(str(v) if v else ".") for v in self.row(s)]])
        widths = [max(len(r[k]) for r in rows) for k in range(len(rows[0]))]
        return "\n".join(
            " ".join(cell.rjust(w) for cell, w in zip(r, widths)).rstrip() for r in rows
        )

    __str__ = render

    def to_json(self) -> dict:
        return {
            "rows": [{"slope": s, "entries": self.row(s)} for s in self.slopes()],
            "total": self.totals(),
        }

    def __repr__(self):
        return f"BettiTable({self.data})"


def betti(C: ChainComplex) -> BettiTable:
    if not C.is_minimal():
        raise MinimalityError("Betti numbers are read off a minimal complex")
    return BettiTable.from_degrees({i: C.term(i).degrees for i in range(C.lo, C.hi + 1)})


def minimal_presentation(M: ModulePresentation) -> ModulePresentation:
    phi, rows = dw.prune(M.presentation)
    return ModulePresentation(M.ring, phi, M.annihilator)


def _kernel_step(f: GradedMap, bound: int | None) -> GradedMap:
    ring = f.ring
    if ring.is_artinian() or bound is not None:
        return dw.kernel(f, None if ring.is_artinian() else bound)
    K = groebner.kernel(f)
    return K


def resolve(M: ModulePresentation, length: int) -> ChainComplex:
    """Minimal free resolution ``F_0 <- F_1 <- ... <- F_length`` of M.

    Over an Artinian ring every kernel is computed degree by degree.  Over a
    polynomial ring a finite-length module has regularity equal to its top
    degree, so the kernel of ``d_i`` is generated in degrees at most
    ``top + i + 1``; other modules go through Groebner kernels.
    """
    if length < 0:
        raise ValueError("length must be non-negative")
    P = minimal_presentation(M)
    F0 = P.generators
    terms = {0: F0}
    diffs = {}
    if length == 0:
        return ChainComplex(terms, {})
    top = None if M.ring.is_artinian() else P.top_degree()
    d = P.presentation
    i = 1
    while True:
        terms[i] = d.source
        diffs[i] = d
        if i == length or d.shape[1] == 0:
            break
        bound = None if top is None else top + i + 1
        d = _kernel_step(d, bound)
        i += 1
    return ChainComplex(terms, diffs, check=False)


def syzygy_module(M: ModulePresentation, i: int) -> ModulePresentation:
    """i-th syzygy ``image(d_i)``, presented by ``d_{i+1}``; ``N_0 = M``."""
    if i < 0:
        raise ValueError("syzygy index must be non-negative")
    if i == 0:
        return M
    F = resolve(M, i + 1)
    return ModulePresentation(M.ring, F.diff(i + 1) if i + 1 <= F.hi else
                              GradedMap.zero(GradedFreeModule(M.ring, ()), F.term(i)), M.annihilator)


def check_resolution(F: ChainComplex, M: ModulePresentation, degrees=None) -> bool:
    """Exactness of F at positions 1..hi-1 and coker d_1 = M, per degree."""
    from .complexes import homology_dims_over_ring

    ring = F.ring
    if degrees is None:
        if ring.is_artinian():
            hi = max((max(F.term(i).degrees, default=0) for i in F.terms), default=0) + ring.top_degree()
        else:
            raise ValueError("degree window required over a non-Artinian ring")
        degrees = range(0, hi + 1)
    for i in range(1, F.hi):
        if any(homology_dims_over_ring(F, i, degrees).values()):
            return False
    a = dw.cokernel_dims(F.diff(1), degrees)
    b = M.hilbert_function(degrees)
    return a == b
