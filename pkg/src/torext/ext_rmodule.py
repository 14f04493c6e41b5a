"""Ext_R(M, k) as a module over the ring of CI operators k[χ_1..χ_c].

Ext^n is the dual of ``G_n ⊗ k`` for a minimal R-free resolution G, and
χ_i acts ``Ext^n -> Ext^{n+2}`` by the transpose of ``t_{2,i} ⊗ k``.  A
resolution computed through homological degree ``hi`` determines the
quotient ``Ext / Ext^{>hi}``, which is what these objects hold.

Half-graded parts put ``Ext^{2i+s}`` in degree i.  For the odd part the
generators then sit in degree 0; its regularity is reported with the
shift ``s = 1`` added back, so that it is read in the grading where
``Ext^{2i+1}`` has degree ``i + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import degreewise as dw
from . import linalg
from .complexes import ChainComplex
from .errors import GenerationError, InvariantBreach
from .field_poly import GradedFreeModule, GradedMap, PolyRing
from .resolution import BettiTable, ModulePresentation, betti, resolve


class RModule:
    """Graded module with commuting operators ``ops[i]`` of degree ``step``.

    Keys are ``(degree, weight)``; χ_i adds ``(step, weights[i])``.
    """

    def __init__(self, c: int, keys, ops, p: int, step: int = 2, weights=None,
                 window: int | None = None, check: bool = True):
        self.c = int(c)
        self.p = int(p)
        self.keys = [(int(d), int(w)) for d, w in keys]
        self.step = int(step)
        self.weights = tuple(weights) if weights is not None else (0,) * self.c
        N = len(self.keys)
        self.ops = [np.remainder(np.asarray(A, dtype=np.int64).reshape(N, N), p) for A in ops]
        self.window = window if window is not None else max((d for d, _ in self.keys), default=0)
        if check:
            self.check()

    @property
    def N(self) -> int:
        return len(self.keys)

    def check(self):
        kd = np.array([k[0] for k in self.keys], dtype=np.int64)
        kw = np.array([k[1] for k in self.keys], dtype=np.int64)
        for i, A in enumerate(self.ops):
            ok = (kd[:, None] == kd[None, :] + self.step) & (kw[:, None] == kw[None, :] + self.weights[i])
            if (A[~ok] != 0).any():
                raise InvariantBreach(f"chi_{i + 1} is not homogeneous")
        for i in range(self.c):
            for j in range(i + 1, self.c):
                X = linalg.matmul(self.ops[i], self.ops[j], self.p) - linalg.matmul(self.ops[j], self.ops[i], self.p)
                if np.remainder(X, self.p).any():
                    raise InvariantBreach(f"chi_{i + 1} and chi_{j + 1} do not commute")

    def commute(self) -> bool:
        try:
            self.check()
            return True
        except InvariantBreach:
            return False

    def dims(self) -> dict:
        out: dict = {}
        for d, _ in self.keys:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def dims_list(self) -> list:
        dd = self.dims()
        return [dd.get(d, 0) for d in range(0, self.window + 1)]

    def indices(self, d: int) -> np.ndarray:
        return np.array([k for k, (e, _) in enumerate(self.keys) if e == d], dtype=np.int64)

    def part(self, parity: int) -> "HalfGradedRModule":
        """Ext^even (parity 0) or Ext^odd (parity 1), χ_i in degree 1."""
        sel = [k for k, (d, _) in enumerate(self.keys) if d % 2 == parity]
        keys = [((self.keys[k][0] - parity) // 2, self.keys[k][1]) for k in sel]
        ops = [A[np.ix_(sel, sel)] for A in self.ops]
        top = (self.window - parity) // 2
        return HalfGradedRModule(self.c, keys, ops, self.p, 1, self.weights, top, check=False, shift=parity)


class HalfGradedRModule(RModule):
    """A half of Ext over the standard-graded polynomial ring in the χ_i."""

    def __init__(self, *args, shift: int = 0, **kw):
        super().__init__(*args, **kw)
        self.shift = shift

    def minimal_generators(self) -> np.ndarray:
        mE = np.hstack(self.ops) if self.c else np.zeros((self.N, 0), dtype=np.int64)
        Id = np.eye(self.N, dtype=np.int64)
        mask = linalg.independent_rows(mE.T, Id, self.p)
        return Id[:, mask]


def ext_rmodule(Rres: ChainComplex, t2: dict | None = None, f=None) -> RModule:
    """Ext_R(M, k) with χ_i the transpose of ``t_{2,i} ⊗ k``."""
    from .ci_ops import ci_operators, lift_resolution

    R = Rres.ring
    fs = [R.ambient.coerce(g) for g in (R.ideal_generators() if f is None else f)]
    if t2 is None:
        t2 = ci_operators(lift_resolution(Rres, f=fs))
    c = len(fs)
    fdeg = [g.degree() for g in fs]
    keys, offs = [], {}
    for n in range(Rres.lo, Rres.hi + 1):
        offs[n] = len(keys)
        keys += [(n, -d) for d in Rres.term(n).degrees]
    N = len(keys)
    ops = []
    for i in range(c):
        A = np.zeros((N, N), dtype=np.int64)
        for n in range(Rres.lo, Rres.hi - 1):
            if n + 2 not in t2:
                continue
            C = t2[n + 2][i].constant_part()  # G_{n+2} -> G_n
            A[offs[n + 2]:offs[n + 2] + C.shape[1], offs[n]:offs[n] + C.shape[0]] = C.T
        ops.append(A)
    return RModule(c, keys, ops, R.p, 2, tuple(-d for d in fdeg), Rres.hi)


# ---------------------------------------------------------------------------
# presentations and resolutions over the polynomial ring in the χ_i


def chi_ring(c: int, p: int) -> PolyRing:
    return PolyRing([f"chi{i + 1}" for i in range(c)], p)


@dataclass
class GeneratorMap:
    """The surjection ``⊕ P(-a_j) -> U`` in each degree, as scalar matrices."""

    U: HalfGradedRModule
    P: PolyRing
    F: GradedFreeModule
    G: np.ndarray

    def images(self, d: int) -> np.ndarray:
        """Matrix from ``F_d`` (piece coordinates) to ``U_d`` (rows = U.indices(d))."""
        U, P = self.U, self.P
        Pc = dw.piece(self.F, d)
        rows = U.indices(d)
        M = np.zeros((len(rows), Pc.size), dtype=np.int64)
        cache: dict = {}

        def img(j, m):
            key = (j, m)
            if key in cache:
                return cache[key]
            if sum(m) == 0:
                v = self.G[:, j].copy()
            else:
                k = next(t for t, e in enumerate(m) if e)
                mm = tuple(e - (1 if t == k else 0) for t, e in enumerate(m))
                v = linalg.matmul(U.ops[k], img(j, mm).reshape(-1, 1), U.p)[:, 0]
            cache[key] = v
            return v

        for j in range(self.F.rank):
            for t, m in enumerate(Pc.bases[j]):
                M[:, Pc.offsets[j] + t] = img(j, m)[rows]
        return M


def generator_map(U: HalfGradedRModule) -> GeneratorMap:
    G = U.minimal_generators()
    degs = [U.keys[int(np.nonzero(G[:, t])[0][0])][0] for t in range(G.shape[1])]
    if any(d >= U.window for d in degs) and U.window > 0:
        raise GenerationError("generators reach the edge of the computed window")
    P = chi_ring(U.c, U.p)
    return GeneratorMap(U, P, GradedFreeModule(P, degs), G)


def r_presentation(U: HalfGradedRModule) -> ModulePresentation:
    """Minimal presentation of U from relations in degrees up to the window."""
    gm = generator_map(U)
    F, p = gm.F, U.p
    cols = []
    prev = None
    for d in range(min(F.degrees, default=0), U.window + 1):
        N = linalg.nullspace(gm.images(d), p) if dw.piece(F, d).size else np.zeros((0, 0), dtype=np.int64)
        if N.shape[1] == 0:
            prev = N
            continue
        if prev is not None and prev.shape[1]:
            sub = dw.max_ideal_image(F, d - 1, prev)
            mask = linalg.independent_rows(sub.T, N.T, p)
        else:
            mask = np.ones(N.shape[1], dtype=bool)
        cols += [(d, N[:, t]) for t in np.nonzero(mask)[0]]
        prev = N
    pres = dw.map_from_vectors(F, cols) if cols else GradedMap.zero(GradedFreeModule(gm.P, ()), F)
    return ModulePresentation(gm.P, pres)


def r_free_resolution(U: HalfGradedRModule, length: int | None = None) -> tuple:
    """(minimal resolution over k[χ], its Betti table)."""
    M = r_presentation(U)
    L = U.c + 1 if length is None else length
    C = resolve(M, L)
    degs = range(0, U.window + 1)
    if M.hilbert_function(degs) != {d: U.dims().get(d, 0) for d in degs}:
        raise InvariantBreach("presentation does not reproduce the module on the window")
    return C, betti(C)


def r_regularity(U: HalfGradedRModule, length: int | None = None) -> int:
    """Regularity of U, plus the half-grading shift (1 for the odd part)."""
    _, B = r_free_resolution(U, length)
    reg = max((j - i for (i, j) in B.data), default=0)
    return reg + U.shift


# ---------------------------------------------------------------------------
# structure of the even presentation


def _equivalent_pencils(Qs: list, Ss: list, p: int, seed: int = 0, tries: int = 4) -> bool:
    """Whether A Q_k C = S_k for all k with A, C invertible (simultaneous equivalence)."""
    m, n = Qs[0].shape
    if Ss[0].shape != (m, n):
        return False
    # unknowns: A (m x m) and D = C^{-1} (n x n); equations A Q_k - S_k D = 0
    eqs = []
    for Q, S in zip(Qs, Ss):
        EA = np.kron(np.eye(m, dtype=np.int64), Q.T)  # vec_row(A Q)
        ED = np.kron(S, np.eye(n, dtype=np.int64))  # vec_row(S D)
        eqs.append(np.hstack([EA, -ED]))
    B = linalg.nullspace(np.remainder(np.vstack(eqs), p), p)
    if B.shape[1] == 0:
        return False
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        x = linalg.matmul(B, rng.integers(0, p, size=(B.shape[1], 1)), p)[:, 0]
        A = x[:m * m].reshape(m, m)
        D = x[m * m:].reshape(n, n)
        if linalg.rank(A, p) == m and linalg.rank(D, p) == n:
            return True
    return False


def skew_block(c: int, p: int) -> list:
    """Coefficient matrices of the generic skew 3 x 3 linear matrix."""
    if c != 3:
        raise ValueError("the skew block is defined for three operators")
    S = [np.zeros((3, 3), dtype=np.int64) for _ in range(3)]
    for k, (a, b) in enumerate(((0, 1), (0, 2), (1, 2))):
        S[k][a, b] = 1
        S[k][b, a] = p - 1
    return S


@dataclass
class StructureReport:
    free_rank: int
    relation_count: int
    linear: bool
    skew_equivalent: bool | None
    nonfree_hilbert: dict
    maximal_ideal_hilbert: dict

    @property
    def is_free_plus_maximal_ideal(self) -> bool:
        return bool(self.skew_equivalent) and self.nonfree_hilbert == self.maximal_ideal_hilbert


def presentation_structure(M: ModulePresentation, window: int) -> StructureReport:
    """Split a linear presentation ``⊕P(-1) -> ⊕P`` into zero rows and the rest."""
    phi = M.presentation
    P = M.ring
    p = P.p
    c = P.n
    ngen, nrel = phi.shape
    linear = all(sum(m) == 1 for m in phi.coeffs) and len(set(phi.target.degrees)) <= 1
    if not linear:
        return StructureReport(0, nrel, False, None, {}, {})
    mats = []
    for k in range(c):
        m = tuple(1 if t == k else 0 for t in range(c))
        mats.append(phi.coeffs.get(m, np.zeros((ngen, nrel), dtype=np.int64)))
    stacked = np.hstack(mats)  # rows = generators
    mask = linalg.independent_rows(np.zeros((0, stacked.shape[1]), dtype=np.int64), stacked, p)
    sel = np.nonzero(mask)[0]
    r = len(sel)
    free_rank = ngen - r
    # after a change of basis the other generator rows become zero
    Qs = [Mk[sel] for Mk in mats]
    skew = None
    if r == 3 and nrel == 3 and c == 3:
        skew = _equivalent_pencils(Qs, skew_block(3, p), p)
    # Hilbert function of the non-free part: coker of the reduced pencil
    F0 = GradedFreeModule(P, [phi.target.degrees[0]] * r)
    sub = GradedMap(GradedFreeModule(P, phi.source.degrees), F0,
                    {tuple(1 if t == k else 0 for t in range(c)): Qs[k] for k in range(c) if Qs[k].any()}, 0)
    base = phi.target.degrees[0]
    degs = range(base, base + window + 1)
    nf = dw.cokernel_dims(sub, degs)
    mi = {d: comb(d - base + c, c - 1) for d in degs}  # dim of the maximal ideal shifted to degree 0
    return StructureReport(free_rank, nrel, True, skew, nf, mi)


# ---------------------------------------------------------------------------
# leading terms


@dataclass
class ExtLeadingTerms:
    dims: dict
    generator_degrees: list
    levels: list

    @property
    def interval_form(self) -> bool:
        return all(p is not None for p in self.levels)

    def counts(self, c: int) -> list:
        out = [0] * c
        for p in self.levels:
            if p is not None and 1 <= p <= c:
                out[p - 1] += 1
        return out


def ext_leading_terms(U: HalfGradedRModule) -> ExtLeadingTerms:
    """Leading terms of the relations on the minimal generators, lex χ_1 > ... > χ_c."""
    gm = generator_map(U)
    F, p, c = gm.F, U.p, U.c
    standard: dict = {j: set() for j in range(F.rank)}
    dims = {}
    for d in range(min(F.degrees, default=0), U.window + 1):
        Pc = dw.piece(F, d)
        if Pc.size == 0:
            continue
        labels = [(j, m) for j in range(F.rank) for m in Pc.bases[j]]
        order = sorted(range(Pc.size), key=lambda t: (labels[t][1], -labels[t][0]), reverse=True)
        N = linalg.nullspace(gm.images(d), p)
        lead = set()
        if N.shape[1]:
            _, piv = linalg.rref(N[order].T, p)
            lead = {order[q] for q in piv}
        for t in range(Pc.size):
            if t not in lead:
                standard[labels[t][0]].add(labels[t][1])
        dims[d] = Pc.size - len(lead)
    levels = []
    for j in range(F.rank):
        S = standard[j]
        used = [k for k in range(c) if any(m[k] for m in S)]
        lev = min(used) + 1 if used else c + 1
        top = U.window - F.degrees[j]
        full = {m for e in range(0, top + 1) for m in F.ring.basis(e) if all(m[k] == 0 for k in range(lev - 1))}
        levels.append(lev if S == full else None)
    return ExtLeadingTerms(dims, list(F.degrees), levels)


def predicted_ext_dims(b: list, c: int, upto: int) -> dict:
    """dims of ``⊕_p k[χ_p..χ_c] ⊗ B(p)^∨`` with the B(p)^∨ in degree 0."""
    return {i: sum(comb(c - p + i, c - p) * b[p - 1] for p in range(1, c + 1)) for i in range(upto + 1)}


# ---------------------------------------------------------------------------
# the non-minimal presentation from the E-action


def nonminimal_presentation(T, U: HalfGradedRModule | None = None) -> tuple:
    """τ: ``Tor_1^∨ ⊗ P(-1) -> Tor_0^∨ ⊗ P`` with linear part dual to ``E_1 ⊗ Tor_0 -> Tor_1``.

    Returns ``(tau, cokernel Hilbert function, matches U)``; the last entry
    is None when U is not given.
    """
    c, p = T.c, T.p
    P = chi_ring(c, p)
    i0 = [k for k, (d, _) in enumerate(T.keys) if d == 0]
    i1 = [k for k, (d, _) in enumerate(T.keys) if d == 1]
    F0 = GradedFreeModule(P, [0] * len(i0))
    F1 = GradedFreeModule(P, [1] * len(i1))
    coeffs = {}
    for k in range(c):
        m = tuple(1 if t == k else 0 for t in range(c))
        A = T.ops[k][np.ix_(i1, i0)].T  # rows Tor_0, cols Tor_1
        if A.any():
            coeffs[m] = np.remainder(A, p)
    tau = GradedMap(F1, F0, coeffs, 0)
    hi = U.window if U is not None else 4
    hf = dw.cokernel_dims(tau, range(0, hi + 1))
    match = None
    if U is not None:
        match = hf == {d: U.dims().get(d, 0) for d in range(0, hi + 1)}
    return tau, hf, match
