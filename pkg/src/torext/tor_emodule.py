"""Tor^S(M, k) as a module over E = k<e_1..e_c>.

E-modules here are keyed by ``(E-degree, internal degree)``: the E-degree
of ``Tor_n`` is n, and e_i raises the internal degree by ``deg f_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from . import linalg
from .complexes import ChainComplex
from .emodule import (
    EFreeComplex,
    EModule,
    FreeEModule,
    e_free_resolution,
    e_regularity,
    free_map_matrix,
    is_isomorphic,
    _kernel_by_key,
)
from .errors import (
    AnnihilationError,
    GenerationError,
    NotHighSyzygy,
    RegularityHypothesisFailed,
)
from .homotopy import HomotopySystem, e_action_on_tor, homotopy_system
from .resolution import BettiTable, ModulePresentation, betti, resolve, syzygy_module


@dataclass
class TorData:
    """The S-resolution, its homotopies and the resulting E-module."""

    module: ModulePresentation
    f: list
    resolution: ChainComplex
    homotopies: HomotopySystem
    T: EModule


def _over_S(M: ModulePresentation, f):
    if M.ring.is_quotient:
        fs = [M.ring.ambient.coerce(g) for g in (f or M.ring.ideal_generators())]
        return M.over_ambient(), fs
    if f is None:
        if not M.annihilator:
            raise ValueError("a regular sequence is required for a module over S")
        f = M.annihilator
    return M, [M.ring.coerce(g) for g in f]


def tor_data(M: ModulePresentation, f=None) -> TorData:
    MS, fs = _over_S(M, f)
    for g in fs:
        if not MS.annihilated_by(g):
            raise AnnihilationError(f"{g} does not annihilate the module")
    F = resolve(MS, MS.ring.n + 1)
    H = homotopy_system(F, fs)
    return TorData(MS, fs, F, H, e_action_on_tor(H))


def tor_emodule(M: ModulePresentation, f=None) -> EModule:
    """Tor^S(M, k) with the E-action induced by homotopies for the f_i."""
    return tor_data(M, f).T


# ---------------------------------------------------------------------------
# T' and T''


@dataclass
class TorSplit:
    """``T' = E·T_0`` and ``T'' = T / T'``."""

    T_prime: EModule
    T_double_prime: EModule
    inclusion: np.ndarray
    projection: np.ndarray

    def dims(self) -> tuple:
        return self.T_prime.dims(), self.T_double_prime.dims()


def submodule_T_prime(T: EModule) -> TorSplit:
    sel = [k for k, (d, _) in enumerate(T.keys) if d == 0]
    V = np.eye(T.N, dtype=np.int64)[:, sel]
    W = T.closure(V)
    sub = T.submodule(W)
    quo = T.quotient(W)
    if sub.module.N + quo.module.N != T.N:
        raise AssertionError("T' and T'' do not add up")
    return TorSplit(sub.module, quo.module, W, quo.projection)


# ---------------------------------------------------------------------------
# ranks of the higher matrix factorization


@dataclass
class HMFRanks:
    c: int
    b0: list
    b1: list

    def forward(self, s: int, i: int) -> int:
        """``sum_p C(c-p+i, c-p) b_s(p)``: predicted beta^R_{2i+s}."""
        b = self.b0 if s == 0 else self.b1
        return sum(comb(self.c - p + i, self.c - p) * b[p - 1] for p in range(1, self.c + 1))


def _solve_exact(A: list, y: list) -> list:
    """Exact solution of a square system over Q (Gaussian elimination on Fractions)."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(y[r])] for r, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise NotHighSyzygy("singular rank system")
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                fac = M[r][col] / M[col][col]
                M[r] = [a - fac * b for a, b in zip(M[r], M[col])]
    return [M[r][n] / M[r][r] for r in range(n)]


def infer_hmf_ranks(betti_R, c: int) -> HMFRanks:
    """Solve ``beta_{2i+s} = sum_p C(c-p+i, c-p) b_s(p)`` for b_s(1..c).

    ``betti_R`` is a BettiTable or a list of total Betti numbers; it must
    cover homological degrees 0..2c-1, and any further entries are used as
    consistency checks.
    """
    totals = betti_R.totals() if isinstance(betti_R, BettiTable) else list(betti_R)
    if len(totals) < 2 * c:
        raise ValueError(f"need Betti numbers in degrees 0..{2 * c - 1}")
    out = []
    for s in (0, 1):
        seq = totals[s::2]
        A = [[comb(c - p + i, c - p) for p in range(1, c + 1)] for i in range(c)]
        sol = _solve_exact(A, seq[:c])
        if any(v.denominator != 1 or v < 0 for v in sol):
            raise NotHighSyzygy(f"no non-negative integral solution for the {'even' if s == 0 else 'odd'} ranks")
        b = [int(v) for v in sol]
        for i, beta in enumerate(seq):
            pred = sum(comb(c - p + i, c - p) * b[p - 1] for p in range(1, c + 1))
            if pred != beta:
                raise NotHighSyzygy(f"Betti number {beta} in degree {2 * i + s} breaks the pattern")
        out.append(b)
    return HMFRanks(c, out[0], out[1])


# ---------------------------------------------------------------------------
# leading terms


def _lex_key(I, c: int) -> tuple:
    """Larger key = larger monomial for lex with e_c > ... > e_1."""
    return tuple(1 if j in I else 0 for j in reversed(range(c)))


@dataclass
class LeadingTerms:
    """Initial module of the relations on chosen generators.

    ``levels[g]`` is p when the standard monomials on generator g are
    exactly ``e_J g`` with J inside {1..p-1}; None when the standard set is
    not of that shape.
    """

    dims: dict
    generator_degrees: list
    levels: list
    standard: dict
    seed: int | None

    @property
    def interval_form(self) -> bool:
        return all(p is not None for p in self.levels)

    def counts(self, c: int) -> dict:
        """``{s: [b_s(1), ..., b_s(c)]}`` read off the levels."""
        out: dict = {}
        base = min(self.generator_degrees, default=0)
        for d, p in zip(self.generator_degrees, self.levels):
            row = out.setdefault(d - base, [0] * c)
            if p is not None:
                row[p - 1] += 1
        return out


def _generators_low(T: EModule) -> tuple:
    degs = sorted(set(T.degrees))
    if not degs:
        return np.zeros((T.N, 0), dtype=np.int64), []
    lo = degs[0]
    G = T.minimal_generators()
    gk = [T.keys[int(np.nonzero(G[:, t])[0][0])] for t in range(G.shape[1])]
    if any(k[0] > lo + 1 for k in gk):
        raise GenerationError("module is not generated in its two lowest degrees")
    return G, gk


def _standard_sets(T: EModule, G: np.ndarray, gk: list) -> tuple:
    c, p = T.c, T.p
    Fr = FreeEModule(c, gk, p, T.e_weights)
    K = _kernel_by_key(Fr, T, G)
    W = len(Fr.words)
    lead = set()
    for key, Kk in K.items():
        cols = [j for j in range(Fr.N) if Fr.keys[j] == key]
        order = sorted(cols, key=lambda j: (_lex_key(Fr.words[j % W], c), -(j // W)), reverse=True)
        _, piv = linalg.rref(Kk[order].T, p)
        lead.update(order[q] for q in piv)
    std: dict = {g: [] for g in range(len(gk))}
    dims: dict = {}
    for j in range(Fr.N):
        if j not in lead:
            std[j // W].append(Fr.words[j % W])
            d = Fr.keys[j][0]
            dims[d] = dims.get(d, 0) + 1
    levels = []
    for g in range(len(gk)):
        S = set(std[g])
        m = max((max(I) + 1 for I in S if I), default=0)
        full = {I for I in Fr.words if all(i < m for i in I)}
        levels.append(m + 1 if S == full else None)
    return dict(sorted(dims.items())), std, levels


def leading_term_module(T: EModule, tries: int = 4) -> LeadingTerms:
    """Leading terms of the relations on generators in the two lowest degrees.

    The order compares E-monomials lexicographically with e_c > ... > e_1
    and breaks ties by generator position.  Generators are first the
    deterministic minimal generators; if the standard monomials do not come
    out as intervals, seeded random bases of each generator block are tried.
    """
    G, gk = _generators_low(T)
    dims, std, levels = _standard_sets(T, G, gk)
    seed = None
    if not all(lv is not None for lv in levels):
        blocks: dict = {}
        for t, k in enumerate(gk):
            blocks.setdefault(k, []).append(t)
        for s in range(tries):
            rng = np.random.default_rng(s)
            G2 = G.copy()
            for ts in blocks.values():
                A = rng.integers(0, T.p, size=(len(ts), len(ts)))
                G2[:, ts] = linalg.matmul(G[:, ts], A, T.p)
            if any(linalg.rank(G2[:, ts], T.p) < len(ts) for ts in blocks.values()):
                continue
            d2, st2, lv2 = _standard_sets(T, G2, gk)
            if all(lv is not None for lv in lv2):
                dims, std, levels, seed = d2, st2, lv2, s
                break
    return LeadingTerms(dims, [k[0] for k in gk], levels, std, seed)


def predicted_leading_dims(ranks: HMFRanks, which: tuple = (0, 1)) -> dict:
    """dims of ``⊕_p E/(e_p..e_c) ⊗ B_s(p)`` with B_s(p) in degree s."""
    out: dict = {}
    for s in which:
        b = ranks.b0 if s == 0 else ranks.b1
        for p in range(1, ranks.c + 1):
            for j in range(p):
                out[s + j] = out.get(s + j, 0) + comb(p - 1, j) * b[p - 1]
    return dict(sorted((k, v) for k, v in out.items() if v))


# ---------------------------------------------------------------------------
# regularity


def reg_over_sub(T: EModule, p: int, window: int) -> tuple:
    """``(reg_E T, reg_{E(p)} T)`` on the given window."""
    return e_regularity(T, window)[0], e_regularity(T.restrict(p), window)[0]


# ---------------------------------------------------------------------------
# the two-row resolution built from t_2 and t_3


@dataclass
class Main7Result:
    complex: EFreeComplex
    rows: dict
    d_squared_zero: bool
    minimal: bool
    exact_positions: list
    rows_exact: dict
    h0: EModule | None = None
    isomorphic: bool | None = None
    operators_match: bool | None = None
    betti: BettiTable | None = None
    notes: list = field(default_factory=list)


def _constant(m) -> np.ndarray:
    return m.constant_part()


def build_main7_complex(H, length: int) -> Main7Result:
    """Assemble the total complex of the two rows ``Tor^R_{2i} ⊗ E`` and ``Tor^R_{2i+1} ⊗ E``.

    ``H`` is a HigherCISystem computed through n >= 3 on a lift of a minimal
    R-free resolution reaching homological degree ``2 * length + 3``.
    Position i carries generators of ``G_{2i}`` in E-degree i and of
    ``G_{2i+1}`` in E-degree i + 1; a generator g maps to
    ``sum_L e_L · (t_n^{p,0} g)_L`` reduced mod m, for n = 2 and n = 3.
    """
    L = H.lifted
    c = H.c
    p = L.ring.p
    ew = tuple(g.degree() for g in L.f)
    if L.bound < 2 * length + 1:
        raise ValueError("lifted resolution too short for the requested length")
    from itertools import combinations

    wedge = {q: list(combinations(range(c), q)) for q in range(c + 1)}
    terms, layout = [], []
    for i in range(length + 1):
        keys, lay = [], []
        for par in (0, 1):
            P = 2 * i + par
            if P > L.bound:
                continue
            for h, d in enumerate(L.term(P).degrees):
                keys.append((i + par, d))
                lay.append((P, h))
        terms.append(FreeEModule(c, keys, p, ew))
        layout.append(lay)
    diffs = {}
    for i in range(1, length + 1):
        F, Ft = terms[i], terms[i - 1]
        pos = {ph: t for t, ph in enumerate(layout[i - 1])}
        D = np.zeros((Ft.N, F.rank), dtype=np.int64)
        for col, (P, g) in enumerate(layout[i]):
            for n in (2, 3):
                if P - n < 0 or n - 1 > c:
                    continue
                A = _constant(H.q0(n, P))  # rows (h, L) G-major
                nL = len(wedge[n - 1])
                for r in np.nonzero(A[:, g])[0]:
                    h, Lidx = divmod(int(r), nL)
                    if (P - n, h) not in pos:
                        continue
                    D[Ft.basis_index(pos[(P - n, h)], wedge[n - 1][Lidx]), col] += A[r, g]
        diffs[i] = np.remainder(D, p)
    C = EFreeComplex(c, p, terms, diffs, None, None)
    res = Main7Result(C, {}, C.check_complex(), C.is_minimal(), [], {})
    res.exact_positions = efree_exact_positions(C)
    for par in (0, 1):
        res.rows_exact[par] = efree_exact_positions(_row(C, layout, par))
    res.betti = C.betti()
    return res


def _row(C: EFreeComplex, layout: list, par: int) -> EFreeComplex:
    """Subcomplex-shaped row of one parity (t_2 only)."""
    terms, diffs, sel = [], {}, []
    for i, F in enumerate(C.terms):
        idx = [t for t, (P, _) in enumerate(layout[i]) if P % 2 == par]
        sel.append(idx)
        terms.append(FreeEModule(C.c, [F.gen_keys[t] for t in idx], C.p, F.e_weights))
    for i in range(1, len(terms)):
        Fp, Ft = C.terms[i - 1], terms[i - 1]
        W = len(Fp.words)
        rows = [g * W + w for g in sel[i - 1] for w in range(W)]
        diffs[i] = C.diffs[i][np.ix_(rows, sel[i])]
    return EFreeComplex(C.c, C.p, terms, diffs, None, None)


def efree_exact_positions(C: EFreeComplex) -> list:
    """Positions 1..len-1 where ker d_s = im d_{s+1}, checked key by key."""
    out = []
    mats = {s: C.matrix(s) for s in C.diffs}
    for s in range(1, C.length):
        if s not in mats or s + 1 not in mats:
            continue
        F = C.terms[s]
        ok = True
        for key, idx in F.key_index().items():
            Ft = C.terms[s - 1]
            rows_t = Ft.key_index().get(key, np.zeros(0, dtype=np.int64))
            Fu = C.terms[s + 1]
            cols_u = Fu.key_index().get(key, np.zeros(0, dtype=np.int64))
            r_out = linalg.rank(mats[s][np.ix_(rows_t, idx)], C.p) if len(rows_t) else 0
            r_in = linalg.rank(mats[s + 1][np.ix_(idx, cols_u)], C.p) if len(cols_u) else 0
            if len(idx) - r_out != r_in:
                ok = False
                break
        if ok:
            out.append(s)
    return out


def h0_of(C: EFreeComplex) -> EModule:
    """Cokernel of d_1 as an E-module."""
    F0 = C.terms[0].to_emodule()
    if 1 not in C.diffs or C.diffs[1].shape[1] == 0:
        return F0
    V = F0.closure(C.diffs[1])
    return F0.quotient(V).module


def compare_with_tor(res: Main7Result, T: EModule, seed: int = 0) -> Main7Result:
    """Test H_0 of the two-row complex against T and record the outcome."""
    H0 = h0_of(res.complex)
    res.h0 = H0
    ok, X = is_isomorphic(T, H0, seed=seed)
    res.isomorphic = ok
    if ok:
        p = T.p
        res.operators_match = all(
            not np.remainder(linalg.matmul(X, T.ops[i], p) - linalg.matmul(H0.ops[i], X, p), p).any()
            for i in range(T.c)
        )
    else:
        res.operators_match = False
    return res


def check_main7(res: Main7Result, window: int):
    """Raise RegularityHypothesisFailed when a row is not acyclic on the window."""
    need = list(range(1, window))
    for par, name in ((0, "even"), (1, "odd")):
        missing = [s for s in need if s not in res.rows_exact[par]]
        if missing:
            raise RegularityHypothesisFailed(f"the {name} row is not acyclic at positions {missing}")


# ---------------------------------------------------------------------------
# strands


def strand_rows(T: EModule, length: int) -> dict:
    """``{s: [beta_{i,i+s}]}`` of the minimal E-free resolution of T."""
    B = e_free_resolution(T, length).betti()
    return {s: B.row(s, length + 1) for s in B.slopes()}


def first_syzygy_check(M: ModulePresentation, length: int = 5, rlength: int | None = None) -> dict:
    """Compare the slope-1 strand of Tor^S(M, k) with the slope-0 strand of Tor^S(M_1, k)."""
    c = len(M.ring.ideal_generators())
    rl = rlength if rlength is not None else 2 * c + 1
    for X in (M, syzygy_module(M, 1)):
        infer_hmf_ranks(betti(resolve(X, rl)).totals(), c)
    M1 = syzygy_module(M, 1)
    a = strand_rows(tor_emodule(M), length)
    b = strand_rows(tor_emodule(M1), length)
    lhs, rhs = a.get(1, [0] * (length + 1)), b.get(0, [0] * (length + 1))
    return {"strand1_M": lhs, "strand0_M1": rhs, "equal": lhs == rhs}
