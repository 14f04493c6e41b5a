"""The linear complexes 𝕃 and ℝ between E-modules and modules over k[χ].

``𝕃(T)`` has the free module ``ℛ ⊗ T_a`` in position a, generated in
ℛ-degree ``-a``, with differential ``1 ⊗ t ↦ Σ_j χ_j ⊗ e_j t``.

``ℝ(U)`` has ``Hom_k(E, U_i)`` in position i; a map ``E_q -> U_i`` has
E-degree ``-q - i``, E acts by ``(e φ)(a) = φ(a e)`` and the differential
is ``(δφ)(a) = Σ_j χ_j φ(e_j a)``.

Both are handled one internal degree at a time, where they are complexes
of finite-dimensional vector spaces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
import numpy as np

from . import linalg
from .emodule import EModule, _sign, is_isomorphic
from .ext_rmodule import HalfGradedRModule, chi_ring


def _blocks(T: EModule) -> dict:
    out: dict = {}
    for k, (d, _) in enumerate(T.keys):
        out.setdefault(d, []).append(k)
    return {d: np.array(v, dtype=np.int64) for d, v in sorted(out.items())}


def _rank(A, p) -> int:
    return linalg.rank(A, p) if A.size else 0


class LinearRComplex:
    """𝕃(T), cohomologically indexed by the degrees a of T."""

    def __init__(self, T: EModule):
        self.T = T
        self.c, self.p = T.c, T.p
        self.ring = chi_ring(T.c, T.p)
        self.blocks = _blocks(T)
        self.positions = list(self.blocks)

    @property
    def top(self) -> int:
        return max(self.positions, default=0)

    def dim(self, a: int, m: int) -> int:
        if a not in self.blocks or m + a < 0:
            return 0
        return len(self.ring.basis(m + a)) * len(self.blocks[a])

    def differential(self, a: int, m: int) -> np.ndarray:
        """``L^a_m -> L^{a+1}_m``; coordinates are monomial-major."""
        rows, cols = self.dim(a + 1, m), self.dim(a, m)
        D = np.zeros((rows, cols), dtype=np.int64)
        if rows == 0 or cols == 0:
            return D
        src, tgt = self.blocks[a], self.blocks[a + 1]
        for j in range(self.c):
            e = tuple(1 if t == j else 0 for t in range(self.c))
            X = self.ring.mult_matrix(e, m + a)
            Ej = self.T.ops[j][np.ix_(tgt, src)]
            D = D + np.kron(X, Ej)
        return np.remainder(D, self.p)

    def d_squared_zero(self, degrees) -> bool:
        for m in degrees:
            for a in self.positions:
                X = linalg.matmul(self.differential(a + 1, m), self.differential(a, m), self.p)
                if np.remainder(X, self.p).any():
                    return False
        return True

    def homology(self, a: int, m: int) -> int:
        n = self.dim(a, m)
        if n == 0:
            return 0
        out = _rank(self.differential(a, m), self.p)
        inc = _rank(self.differential(a - 1, m), self.p)
        return n - out - inc


class LinearEComplex:
    """ℝ(U) in positions ``0..U.window``."""

    def __init__(self, U: HalfGradedRModule):
        self.U = U
        self.c, self.p = U.c, U.p
        self.sets = {q: list(itertools.combinations(range(self.c), q)) for q in range(self.c + 1)}
        self.index = {q: {J: t for t, J in enumerate(S)} for q, S in self.sets.items()}
        self.rows = {i: U.indices(i) for i in range(0, U.window + 1)}

    @property
    def positions(self) -> list:
        return list(self.rows)

    def _q(self, i: int, d: int):
        q = -d - i
        return q if 0 <= q <= self.c and i in self.rows else None

    def dim(self, i: int, d: int) -> int:
        q = self._q(i, d)
        return 0 if q is None else len(self.sets[q]) * len(self.rows[i])

    def differential(self, i: int, d: int) -> np.ndarray:
        """``R^i_d -> R^{i+1}_d``; coordinates are subset-major."""
        rows, cols = self.dim(i + 1, d), self.dim(i, d)
        D = np.zeros((rows, cols), dtype=np.int64)
        if rows == 0 or cols == 0:
            return D
        q = self._q(i, d)
        nu, nv = len(self.rows[i]), len(self.rows[i + 1])
        for J in self.sets[q]:
            cj = self.index[q][J]
            for j in J:
                A = tuple(x for x in J if x != j)
                ra = self.index[q - 1][A]
                X = self.U.ops[j][np.ix_(self.rows[i + 1], self.rows[i])]
                D[ra * nv:(ra + 1) * nv, cj * nu:(cj + 1) * nu] += _sign(A, j) * X
        return np.remainder(D, self.p)

    def d_squared_zero(self) -> bool:
        for i in self.positions:
            for d in range(-i - self.c, -i + 1):
                X = linalg.matmul(self.differential(i + 1, d), self.differential(i, d), self.p)
                if np.remainder(X, self.p).any():
                    return False
        return True

    def homology(self, i: int, d: int) -> int:
        n = self.dim(i, d)
        if n == 0:
            return 0
        out = _rank(self.differential(i, d), self.p) if i + 1 in self.rows else 0
        inc = _rank(self.differential(i - 1, d), self.p)
        return n - out - inc

    def h0_module(self) -> EModule:
        """The kernel of the first differential with its E-action."""
        c, p = self.c, self.p
        r0 = self.rows[0]
        n0 = len(r0)
        keys, offs = [], {}
        for q in range(c + 1):
            offs[q] = len(keys)
            keys += [(-q, 0)] * (len(self.sets[q]) * n0)
        N = len(keys)
        ops = []
        for k in range(c):
            A = np.zeros((N, N), dtype=np.int64)
            for q in range(1, c + 1):
                for J in self.sets[q]:
                    if k not in J:
                        continue
                    Aset = tuple(x for x in J if x != k)
                    s = (-1) ** len(Aset) * _sign(Aset, k)
                    cj = offs[q] + self.index[q][J] * n0
                    ra = offs[q - 1] + self.index[q - 1][Aset] * n0
                    A[ra:ra + n0, cj:cj + n0] += s * np.eye(n0, dtype=np.int64)
            ops.append(np.remainder(A, p))
        amb = EModule(c, keys, ops, p)
        Ks = []
        for q in range(c + 1):
            D = self.differential(0, -q)
            blk = np.zeros((N, 0), dtype=np.int64)
            n = len(self.sets[q]) * n0
            if n:
                Z = linalg.nullspace(D, p) if D.size else np.eye(n, dtype=np.int64)
                blk = np.zeros((N, Z.shape[1]), dtype=np.int64)
                blk[offs[q]:offs[q] + n] = Z
            Ks.append(blk)
        W = np.hstack(Ks)
        return amb.submodule(W).module


def bgg_L(T: EModule) -> LinearRComplex:
    return LinearRComplex(T)


def bgg_R(U: HalfGradedRModule) -> LinearEComplex:
    return LinearEComplex(U)


def is_acyclic(C, window: int | None = None) -> tuple:
    """(acyclic, first failing (position, degree) or None).

    For 𝕃 the homology must vanish below the top position, so that the
    complex resolves its top homology; for ℝ it must vanish above position
    0, the last position being skipped since the next term is not known.
    """
    if isinstance(C, LinearRComplex):
        hi = window if window is not None else 4
        for a in C.positions:
            if a == C.top:
                continue
            for m in range(-C.top, hi + 1):
                if C.homology(a, m):
                    return False, (a, m)
        return True, None
    last = max(C.positions)
    for i in C.positions:
        if i == 0 or i == last:
            continue
        for d in range(-i - C.c, -i + 1):
            if C.homology(i, d):
                return False, (i, d)
    return True, None


def _plain(T: EModule, shift: int = 0) -> EModule:
    """Forget internal weights; shift degrees by ``shift``."""
    return EModule(T.c, [(d + shift, 0) for d, _ in T.keys], T.ops, T.p, None, check=False)


@dataclass
class ReciprocityReport:
    L_acyclic: bool
    L_failure: tuple | None
    L_top_matches: bool
    R_acyclic: bool
    R_failure: tuple | None
    R_h0_isomorphic: bool

    @property
    def L_resolves(self) -> bool:
        return self.L_acyclic and self.L_top_matches

    @property
    def R_resolves(self) -> bool:
        return self.R_acyclic and self.R_h0_isomorphic

    @property
    def consistent(self) -> bool:
        return self.L_resolves == self.R_resolves


def reciprocity_check(U: HalfGradedRModule, T: EModule, seed: int = 0) -> ReciprocityReport:
    """Whether 𝕃(T) resolves U and whether ℝ(U) resolves T, side by side.

    U in degree m is matched with ℛ-degree ``m - top`` of the top term of
    𝕃(T); T in degree a is matched with E-degree ``a - top`` of ℝ(U).
    """
    L = bgg_L(T)
    top = L.top
    W = U.window
    la, lf = is_acyclic(L, W - top)
    Ud = U.dims()
    lm = all(L.homology(top, m - top) == Ud.get(m, 0) for m in range(0, W + 1))
    R = bgg_R(U)
    ra, rf = is_acyclic(R)
    H0 = R.h0_module()
    iso = is_isomorphic(_plain(H0), _plain(T, -top), seed=seed)[0]
    return ReciprocityReport(la, lf, lm, ra, rf, iso)


def free_r_module(c: int, p: int, window: int) -> HalfGradedRModule:
    """ℛ itself, truncated above ``window``."""
    P = chi_ring(c, p)
    keys, offs = [], {}
    for d in range(window + 1):
        offs[d] = len(keys)
        keys += [(d, 0)] * len(P.basis(d))
    N = len(keys)
    ops = []
    for j in range(c):
        A = np.zeros((N, N), dtype=np.int64)
        e = tuple(1 if t == j else 0 for t in range(c))
        for d in range(window):
            X = P.mult_matrix(e, d)
            A[offs[d + 1]:offs[d + 1] + X.shape[0], offs[d]:offs[d] + X.shape[1]] = X
        ops.append(A)
    return HalfGradedRModule(c, keys, ops, p, 1, None, window, check=False)


def residue_r_module(c: int, p: int) -> HalfGradedRModule:
    return HalfGradedRModule(c, [(0, 0)], [np.zeros((1, 1), dtype=np.int64)] * c, p, 1, None, 0, check=False)


def exterior_algebra(c: int, p: int) -> EModule:
    """E as a module over itself, e_I in degree |I|."""
    sets = [I for q in range(c + 1) for I in itertools.combinations(range(c), q)]
    idx = {I: t for t, I in enumerate(sets)}
    N = len(sets)
    ops = []
    for i in range(c):
        A = np.zeros((N, N), dtype=np.int64)
        for I in sets:
            if i in I:
                continue
            J = tuple(sorted(I + (i,)))
            A[idx[J], idx[I]] = _sign(I, i) % p
        ops.append(A)
    return EModule(c, [(len(I), 0) for I in sets], ops, p)

