"""CI operators, higher CI operators and the GK resolution over S.

Let ``G`` be a lift to S of a minimal R-free resolution, ``t1 = t1'`` its
maps and ``K`` the Koszul complex on f.  Operators ``t_n`` act on
``G ⊗ K`` with components ``t_n^{p,q}: G_p ⊗ K_q -> G_{p-n} ⊗ K_{q+n-1}``.
Only the ``q = 0`` components of ``t_n`` (n >= 2) are stored; the others are
obtained by right multiplication in the exterior algebra:
``t_n(g ⊗ e_J) = t_n(g ⊗ 1) · e_J``.  With ``t_0 = (-1)^p (1 ⊗ ∂)`` this
makes every ``sum_{i+j=n} t_i t_j`` right-linear, so the defining
identities need only be imposed on ``G_p ⊗ K_0``.

Tensor modules ``G_p ⊗ K_q`` use the G-major basis ``(g, J)``, J running
over increasing q-subsets, exactly as in ``complexes.tensor``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .complexes import ChainComplex, koszul, minimize, reduce_mod_m, homology
from .degreewise import cokernel_dims, lift
from .errors import InconsistentSystem, InvariantBreach, LiftError
from .field_poly import (
    GradedFreeModule,
    GradedMap,
    PolyRing,
    block_map,
    compose,
    tensor_maps,
)


@lru_cache(maxsize=None)
def _wedge_basis(c: int, q: int) -> tuple:
    return tuple(itertools.combinations(range(c), q))


@lru_cache(maxsize=None)
def _right_mult(c: int, a: int, J: tuple) -> np.ndarray:
    """Matrix of ``x -> x ∧ e_J`` from ∧^a to ∧^{a+|J|}."""
    src = _wedge_basis(c, a)
    tgt = {L: r for r, L in enumerate(_wedge_basis(c, a + len(J)))}
    M = np.zeros((len(tgt), len(src)), dtype=np.int64)
    for col, L in enumerate(src):
        if set(L) & set(J):
            continue
        inv = sum(1 for l in L for j in J if l > j)
        M[tgt[tuple(sorted(L + J))], col] = -1 if inv % 2 else 1
    return M


@dataclass
class LiftedResolution:
    """Maps ``t1[p]: G_p -> G_{p-1}`` over S lifting a minimal R-free resolution."""

    ring: PolyRing
    f: list
    terms: dict
    t1: dict
    bound: int

    @property
    def c(self) -> int:
        return len(self.f)

    def term(self, p: int) -> GradedFreeModule:
        return self.terms.get(p, GradedFreeModule(self.ring, ()))

    def map(self, p: int) -> GradedMap:
        if p in self.t1:
            return self.t1[p]
        return GradedMap.zero(self.term(p), self.term(p - 1))

    def square(self, p: int) -> GradedMap:
        """``t1' ∘ t1': G_p -> G_{p-2}``."""
        return compose(self.map(p - 1), self.map(p))

    def square_in_ideal(self) -> bool:
        R = self.ring.quotient(self.f)
        return all(self.square(p).over(R).is_zero() for p in range(2, self.bound + 1))


def lift_resolution(Rres: ChainComplex, length: int | None = None, f=None) -> LiftedResolution:
    """Lift each entry of an R-free resolution to its normal-form representative over S.

    ``f`` defaults to the reduced Groebner basis of the defining ideal.
    """
    R = Rres.ring
    if not R.is_quotient:
        raise ValueError("the resolution must live over a quotient ring")
    S = R.ambient
    hi = Rres.hi if length is None else min(length, Rres.hi)
    terms = {p: Rres.term(p).over(S) for p in range(0, hi + 1)}
    t1 = {p: Rres.diff(p).over(S) for p in range(1, hi + 1)}
    fs = R.ideal_generators() if f is None else f
    return LiftedResolution(S, [S.coerce(g) for g in fs], terms, t1, hi)


def _koszul_of(L: LiftedResolution) -> ChainComplex:
    return koszul(L.f)


def ci_operators(L: LiftedResolution) -> dict:
    """``{p: [t_{2,1}, ..., t_{2,c}]}`` with ``t1'^2 = sum_i f_i t_{2,i}`` on G_p.

    The quotients come from one linear solve per internal degree against
    ``(f_1 I, ..., f_c I)``, free variables set to zero.
    """
    K = _koszul_of(L)
    out = {}
    for p in range(2, L.bound + 1):
        tgt = L.term(p - 2)
        A = tensor_maps(GradedMap.identity(tgt), K.diff(1))
        sq = L.square(p)
        try:
            X = lift(A, sq)
        except InconsistentSystem as exc:
            raise LiftError(f"t1'^2 on G_{p} is not in the ideal of the regular sequence") from exc
        c = L.c
        parts = []
        for i in range(c):
            rows = [h * c + i for h in range(tgt.rank)]
            Y = X.submatrix(rows=rows)
            parts.append(GradedMap(Y.source, tgt, Y.coeffs, -L.f[i].degree(), check=False))
        out[p] = parts
    return out


@dataclass
class HigherCISystem:
    """``t[n][p]``: the component ``t_n^{p,0}: G_p -> G_{p-n} ⊗ K_{n-1}`` (n >= 2)."""

    lifted: LiftedResolution
    K: ChainComplex
    t: dict = field(default_factory=dict)
    nmax: int = 2

    @property
    def c(self) -> int:
        return self.lifted.c

    def GK_term(self, p: int, q: int) -> GradedFreeModule:
        G, Kq = self.lifted.term(p), self.K.term(q)
        return GradedFreeModule(G.ring, [a + b for a in G.degrees for b in Kq.degrees])

    def q0(self, n: int, p: int) -> GradedMap:
        m = self.t.get(n, {}).get(p)
        if m is None:
            return GradedMap.zero(self.lifted.term(p), self.GK_term(p - n, n - 1))
        return m

    def component(self, n: int, p: int, q: int) -> GradedMap:
        """``t_n^{p,q}: G_p ⊗ K_q -> G_{p-n} ⊗ K_{q+n-1}``."""
        src = self.GK_term(p, q)
        tgt = self.GK_term(p - n, q + n - 1)
        if src.rank == 0 or tgt.rank == 0 or p - n < 0:
            return GradedMap.zero(src, tgt)
        if n == 0:
            d = tensor_maps(GradedMap.identity(self.lifted.term(p)), self.K.diff(q))
            return d * (-1 if p % 2 else 1)
        if n == 1:
            return tensor_maps(self.lifted.map(p), GradedMap.identity(self.K.term(q)))
        base = self.q0(n, p)
        if q == 0:
            return base
        c = self.c
        a = n - 1
        Js = _wedge_basis(c, q)
        nh = self.lifted.term(p - n).rank
        ng = self.lifted.term(p).rank
        nL = len(_wedge_basis(c, a))
        nL2 = len(_wedge_basis(c, a + q))
        Rs = np.stack([_right_mult(c, a, J) for J in Js])  # (nJ, nL2, nL)
        out = {}
        for m, A in base.coeffs.items():
            A3 = A.reshape(nh, nL, ng)
            B = np.einsum("jxl,hlg->hxgj", Rs, A3).reshape(nh * nL2, ng * len(Js))
            if B.any():
                out[m] = B
        return GradedMap(src, tgt, out, 0, check=False)

    def identity_defect(self, n: int, p: int, q: int) -> GradedMap:
        """``sum_{i+j=n} t_i t_j`` on ``G_p ⊗ K_q``."""
        total = None
        for j in range(0, n + 1):
            i = n - j
            if p - j < 0:
                continue
            a = self.component(j, p, q)
            b = self.component(i, p - j, q + j - 1) if q + j - 1 >= 0 else None
            if b is None or a.target.rank == 0:
                continue
            term = compose(b, a)
            total = term if total is None else total + term
        if total is None:
            return GradedMap.zero(self.GK_term(p, q), self.GK_term(p - n, q + n - 2))
        return total

    def verify(self, nmax: int | None = None) -> dict:
        """``{n: bool}``: exact vanishing of ``sum_{i+j=n} t_i t_j`` for all (p, q)."""
        nmax = self.nmax if nmax is None else nmax
        res = {}
        for n in range(0, nmax + 1):
            ok = True
            for p in range(0, self.lifted.bound + 1):
                for q in range(0, self.c + 1):
                    if q + n - 2 < 0 or q + n - 2 > self.c or p - n < 0:
                        continue
                    if not self.identity_defect(n, p, q).is_zero():
                        ok = False
            res[n] = ok
        return res


def higher_ci(L: LiftedResolution, nmax: int) -> HigherCISystem:
    """Solve ``t_0 t_n = -sum_{i+j=n, i,j>0} t_i t_j`` on ``G_p ⊗ K_0`` for n <= nmax."""
    if nmax < 2:
        raise ValueError("nmax must be at least 2")
    K = _koszul_of(L)
    H = HigherCISystem(L, K, {}, nmax)
    c = L.c
    for n in range(2, nmax + 1):
        H.t[n] = {}
        if n - 1 > c:
            continue  # K_{n-1} = 0
        for p in range(n, L.bound + 1):
            rhs = None
            for j in range(1, n):
                term = compose(H.component(n - j, p - j, j - 1), H.component(j, p, 0))
                rhs = term if rhs is None else rhs + term
            rhs = -rhs
            tgt = L.term(p - n)
            A = tensor_maps(GradedMap.identity(tgt), K.diff(n - 1))
            if (p - n) % 2:
                A = -A
            try:
                H.t[n][p] = lift(A, rhs)
            except InconsistentSystem as exc:
                raise InvariantBreach(f"cannot solve for t_{n} on G_{p}") from exc
    H.nmax = nmax
    return H


def t2_from_system(H: HigherCISystem) -> dict:
    """The CI operators read off ``t_2^{p,0} = (-1)^{p+1} sum_i t_{2,i} ⊗ e_i``."""
    c = H.c
    out = {}
    for p, M in H.t.get(2, {}).items():
        tgt = H.lifted.term(p - 2)
        s = -1 if (p + 1) % 2 else 1
        parts = []
        for i in range(c):
            rows = [h * c + i for h in range(tgt.rank)]
            Y = M.submatrix(rows=rows) * s
            parts.append(GradedMap(Y.source, tgt, Y.coeffs, -H.lifted.f[i].degree(), check=False))
        out[p] = parts
    return out


@dataclass
class GKComplex:
    """``(GK)_n = ⊕_{i+j=n} G_i ⊗ K_j`` with blocks ordered by decreasing i."""

    complex: ChainComplex
    layout: dict
    blocks: dict


def build_gk(L: LiftedResolution, H: HigherCISystem, length: int | None = None,
             mutate_sign: bool = False) -> GKComplex:
    """Total complex with differential ``T_n``; block (r, s) is ``t_{r+1-s}^{n-s, s}``.

    ``mutate_sign`` drops the ``(-1)^p`` from t_0; it exists only as a
    negative control and yields a map that is not a differential.
    """
    c = L.c
    # a finished resolution (last term zero) carries GK c steps further
    cap = L.bound + c if L.term(L.bound).rank == 0 else L.bound
    hi = cap if length is None else min(length, cap)
    layout, terms = {}, {}
    for n in range(0, hi + 1):
        layout[n] = [(n - s, s) for s in range(0, min(n, c) + 1) if n - s <= L.bound]
        parts = [H.GK_term(i, j) for i, j in layout[n]]
        terms[n] = GradedFreeModule(L.ring, [d for P in parts for d in P.degrees])
    diffs, blocks = {}, {}
    for n in range(1, hi + 1):
        srcs = [H.GK_term(i, j) for i, j in layout[n]]
        tgts = [H.GK_term(i, j) for i, j in layout[n - 1]]
        grid = [[None] * len(srcs) for _ in tgts]
        for a, (i2, j2) in enumerate(layout[n - 1]):
            for b, (i1, j1) in enumerate(layout[n]):
                k = i1 - i2
                if k < 0 or j2 != j1 + k - 1:
                    continue
                if k >= 2 and k > H.nmax:
                    raise InvariantBreach(f"t_{k} needed but only computed through {H.nmax}")
                blk = H.component(k, i1, j1)
                if mutate_sign and k == 0 and i1 % 2:
                    blk = -blk
                grid[a][b] = blk
                blocks[(n, a, b)] = f"t{k}^({i1},{j1})"
        diffs[n] = block_map(grid, srcs, tgts, 0)
    return GKComplex(ChainComplex(terms, diffs, check=not mutate_sign), layout, blocks)


def gk_block_json(gk: GKComplex) -> dict:
    out = {}
    for (n, a, b), name in sorted(gk.blocks.items()):
        out.setdefault(str(n), []).append({
            "row": f"G{gk.layout[n - 1][a][0]}xK{gk.layout[n - 1][a][1]}",
            "col": f"G{gk.layout[n][b][0]}xK{gk.layout[n][b][1]}",
            "map": name,
        })
    return out


def minimize_gk(gk) -> ChainComplex:
    """Minimal complex of GK, cut one step below the computed length.

    The last computed term has no outgoing differential to cancel against,
    so it is dropped.
    """
    C = gk.complex if isinstance(gk, GKComplex) else gk
    return minimize(C).truncate(C.hi - 1)


@dataclass
class GKReport:
    d_squared_zero: bool
    h0_matches: bool
    exact_through: int
    tor_dims: dict


def check_gk(gk: GKComplex, M, exact_upto: int, degree_window: int) -> GKReport:
    """Verify d^2 = 0, H_0 = M and H_i = 0 for 1 <= i <= exact_upto.

    Homology over S is computed on the minimized complex, which differs from
    GK by split contractible summands and so has the same homology; it is
    tested in internal degrees up to ``degree_window``.
    """
    from .complexes import homology_dims_over_ring

    C = gk.complex
    try:
        C.check()
        d2 = True
    except InvariantBreach:
        d2 = False
    mins = min(C.term(0).degrees, default=0)
    degs = range(mins, degree_window + 1)
    coker = cokernel_dims(C.diff(1), degs)
    h0 = coker == M.hilbert_function(degs)
    Ck = reduce_mod_m(C)
    tor = {i: homology(Ck, i).total for i in range(0, exact_upto + 1)} if d2 else {}
    if not d2:
        return GKReport(d2, h0, 0, tor)
    Cm = minimize(C.truncate(exact_upto + 2))
    exact = 0
    for i in range(1, exact_upto + 1):
        lo = min(Cm.term(i).degrees, default=degree_window)
        if any(homology_dims_over_ring(Cm, i, range(lo, degree_window + 1)).values()):
            break
        exact = i
    return GKReport(d2, h0, exact, tor)
