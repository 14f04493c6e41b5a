"""Finite-dimensional graded modules over the exterior algebra E = k<e_1..e_c>.

Modules are vector spaces with explicit operator matrices.  Every basis
vector carries a key ``(degree, weight)``: ``degree`` is the E-grading (each
``e_i`` raises it by one) and ``weight`` is an optional second grading (the
internal degree of the ring, ``e_i`` raising it by ``e_weights[i]``), used
only to split linear algebra into smaller blocks.

Free modules use the basis ``e_I g`` for subsets I (increasing index sets)
and act by signed index maps, so resolutions never multiply dense operator
matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import InvariantBreach, ShapeError


def _sign(I, i) -> int:
    """e_i e_I = sign * e_{I+i} (zero when i in I)."""
    return -1 if sum(1 for j in I if j < i) % 2 else 1


def subsets(c: int) -> list:
    """Subsets of range(c) ordered by size, then lexicographically."""
    return [I for q in range(c + 1) for I in itertools.combinations(range(c), q)]


class _Module:
    """Common interface: ``N``, ``c``, ``p``, ``keys`` and ``act(i, V)``."""

    c: int
    p: int
    keys: list
    e_weights: tuple

    @property
    def N(self) -> int:
        return len(self.keys)

    def key_index(self) -> dict:
        out: dict = {}
        for idx, k in enumerate(self.keys):
            out.setdefault(k, []).append(idx)
        return {k: np.array(v, dtype=np.int64) for k, v in out.items()}

    def act(self, i: int, V: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def step(self, i: int) -> tuple:
        return (1, self.e_weights[i])

    def act_word(self, I, V: np.ndarray) -> np.ndarray:
        """e_I V = e_{i1}(e_{i2}(... e_{ik} V))."""
        for i in reversed(I):
            V = self.act(i, V)
        return V


class EModule(_Module):
    """Graded E-module given by operator matrices ``ops[i]`` (N x N)."""

    def __init__(self, c: int, keys, ops, p: int, e_weights=None, check: bool = True):
        self.c = int(c)
        self.p = int(p)
        keys = [tuple(k) if isinstance(k, (tuple, list)) else (int(k), 0) for k in keys]
        self.keys = [(int(d), int(w)) for d, w in keys]
        self.e_weights = tuple(e_weights) if e_weights is not None else (0,) * self.c
        N = len(self.keys)
        if len(ops) != self.c:
            raise ShapeError(f"expected {self.c} operators")
        self.ops = []
        for A in ops:
            A = np.remainder(np.asarray(A, dtype=np.int64).reshape(N, N), p)
            self.ops.append(A)
        if check:
            self.check()

    @property
    def degrees(self) -> list:
        return [d for d, _ in self.keys]

    def act(self, i: int, V: np.ndarray) -> np.ndarray:
        return linalg.matmul(self.ops[i], V, self.p)

    def check(self):
        """Homogeneity and the exterior relations, exactly."""
        kd = np.array([k[0] for k in self.keys], dtype=np.int64)
        kw = np.array([k[1] for k in self.keys], dtype=np.int64)
        for i, A in enumerate(self.ops):
            ok = (kd[:, None] == kd[None, :] + 1) & (kw[:, None] == kw[None, :] + self.e_weights[i])
            if (A[~ok] != 0).any():
                raise InvariantBreach(f"e_{i + 1} is not homogeneous")
        for i in range(self.c):
            for j in range(i, self.c):
                X = linalg.matmul(self.ops[i], self.ops[j], self.p)
                if i != j:
                    X = X + linalg.matmul(self.ops[j], self.ops[i], self.p)
                if np.remainder(X, self.p).any():
                    raise InvariantBreach(f"exterior relation fails for e_{i + 1}, e_{j + 1}")

    def relations_hold(self) -> bool:
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

    def dims_list(self, lo: int = 0, hi: int | None = None) -> list:
        dd = self.dims()
        if hi is None:
            hi = max(dd, default=lo - 1)
        return [dd.get(d, 0) for d in range(lo, hi + 1)]

    def restrict(self, p: int) -> "EModule":
        """Restriction to E(p) = k<e_1..e_p>."""
        return EModule(p, self.keys, self.ops[:p], self.p, self.e_weights[:p], check=False)

    def dual(self) -> "EModule":
        """Hom_k(T, k) with degrees and weights negated and transposed operators."""
        keys = [(-d, -w) for d, w in self.keys]
        return EModule(self.c, keys, [A.T.copy() for A in self.ops], self.p, self.e_weights, check=False)

    def direct_sum(self, other: "EModule") -> "EModule":
        if other.c != self.c or other.e_weights != self.e_weights:
            raise ShapeError("direct sum of modules over different algebras")
        N1, N2 = self.N, other.N
        ops = []
        for A, B in zip(self.ops, other.ops):
            Z = np.zeros((N1 + N2, N1 + N2), dtype=np.int64)
            Z[:N1, :N1] = A
            Z[N1:, N1:] = B
            ops.append(Z)
        return EModule(self.c, self.keys + other.keys, ops, self.p, self.e_weights, check=False)

    def permuted(self, order) -> "EModule":
        order = np.asarray(order, dtype=np.int64)
        return EModule(self.c, [self.keys[k] for k in order],
                       [A[np.ix_(order, order)] for A in self.ops], self.p, self.e_weights, check=False)

    def sorted_by_key(self) -> "EModule":
        order = sorted(range(self.N), key=lambda k: (self.keys[k], k))
        return self.permuted(order)

    # sub-structures -------------------------------------------------------------
    def closure(self, V: np.ndarray) -> np.ndarray:
        """Homogeneous basis (columns) of the submodule generated by the columns of V.

        V must consist of homogeneous vectors.  Output columns are grouped
        by key in increasing order.
        """
        p = self.p
        kidx = self.key_index()
        pending = [V[:, t] for t in range(V.shape[1])]
        basis_by_key: dict = {}
        while pending:
            new = []
            for v in pending:
                nz = np.nonzero(v)[0]
                if len(nz) == 0:
                    continue
                k = self.keys[nz[0]]
                cur = basis_by_key.get(k)
                cand = v.reshape(-1, 1)
                if cur is None:
                    basis_by_key[k] = cand.copy()
                    new.append(v)
                    continue
                if linalg.independent_rows(cur.T, cand.T, p)[0]:
                    basis_by_key[k] = np.hstack([cur, cand])
                    new.append(v)
            pending = []
            for v in new:
                for i in range(self.c):
                    w = self.act(i, v.reshape(-1, 1))[:, 0]
                    if w.any():
                        pending.append(w)
        cols = [basis_by_key[k] for k in sorted(basis_by_key)]
        if not cols:
            return np.zeros((self.N, 0), dtype=np.int64)
        return np.hstack(cols)

    def submodule(self, V: np.ndarray) -> "SubQuotient":
        """Submodule spanned by the (closed, homogeneous) columns of V."""
        p = self.p
        keys = []
        for t in range(V.shape[1]):
            nz = np.nonzero(V[:, t])[0]
            keys.append(self.keys[nz[0]])
        ops = []
        for i in range(self.c):
            W = self.act(i, V)
            X = linalg.solve(V, W, p) if V.shape[1] else np.zeros((0, 0), dtype=np.int64)
            ops.append(X)
        sub = EModule(self.c, keys, ops, p, self.e_weights)
        return SubQuotient(sub, V, None)

    def quotient(self, V: np.ndarray) -> "SubQuotient":
        """Quotient by the closed subspace spanned by the columns of V.

        The quotient basis is the set of standard basis vectors independent
        modulo V, chosen in index order.
        """
        p = self.p
        Id = np.eye(self.N, dtype=np.int64)
        mask = linalg.independent_rows(V.T, Id, p)
        Q = Id[:, mask]
        A = np.hstack([Q, V])
        keys = [self.keys[k] for k in np.nonzero(mask)[0]]
        nq = Q.shape[1]
        ops = []
        for i in range(self.c):
            X = linalg.solve(A, self.act(i, Q), p)
            ops.append(X[:nq])
        # projection: coordinates of standard vectors in the quotient basis
        proj = linalg.solve(A, Id, p)[:nq]
        quo = EModule(self.c, keys, ops, p, self.e_weights)
        return SubQuotient(quo, None, proj)

    def generated_in(self, degrees) -> bool:
        """Whether the parts of the given E-degrees generate the module."""
        sel = [k for k, (d, _) in enumerate(self.keys) if d in set(degrees)]
        V = np.eye(self.N, dtype=np.int64)[:, sel]
        return self.closure(V).shape[1] == self.N

    def minimal_generators(self) -> np.ndarray:
        """Columns: homogeneous vectors lifting a basis of T / (e_1..e_c) T."""
        p = self.p
        mE = np.hstack([self.ops[i] for i in range(self.c)]) if self.c else np.zeros((self.N, 0), dtype=np.int64)
        mask = linalg.independent_rows(mE.T, np.eye(self.N, dtype=np.int64), p)
        return np.eye(self.N, dtype=np.int64)[:, mask]


@dataclass
class SubQuotient:
    """A derived module with its inclusion (columns) or projection matrix."""

    module: EModule
    inclusion: np.ndarray | None
    projection: np.ndarray | None


class FreeEModule(_Module):
    """Free module ``⊕_g E·g`` with generator keys; basis ``e_I g``, g-major."""

    def __init__(self, c: int, gen_keys, p: int, e_weights=None):
        self.c = int(c)
        self.p = int(p)
        self.gen_keys = [tuple(k) for k in gen_keys]
        self.e_weights = tuple(e_weights) if e_weights is not None else (0,) * self.c
        self.words = subsets(self.c)
        self.word_index = {I: t for t, I in enumerate(self.words)}
        W = len(self.words)
        self.keys = []
        for d, w in self.gen_keys:
            for I in self.words:
                self.keys.append((d + len(I), w + sum(self.e_weights[i] for i in I)))
        ng = len(self.gen_keys)
        self._maps = []
        for i in range(self.c):
            src, tgt, sgn = [], [], []
            for t, I in enumerate(self.words):
                if i in I:
                    continue
                J = tuple(sorted(I + (i,)))
                src.append(t)
                tgt.append(self.word_index[J])
                sgn.append(_sign(I, i))
            src = np.array(src, dtype=np.int64)
            tgt = np.array(tgt, dtype=np.int64)
            offs = (np.arange(ng, dtype=np.int64) * W)[:, None]
            self._maps.append(((offs + src).ravel(), (offs + tgt).ravel(),
                               np.tile(np.array(sgn, dtype=np.int64), ng)))

    @property
    def rank(self) -> int:
        return len(self.gen_keys)

    def basis_index(self, g: int, I) -> int:
        return g * len(self.words) + self.word_index[tuple(I)]

    def act(self, i: int, V: np.ndarray) -> np.ndarray:
        src, tgt, sgn = self._maps[i]
        out = np.zeros_like(V)
        out[tgt] = V[src] * (sgn[:, None] if V.ndim == 2 else sgn)
        return np.remainder(out, self.p)

    def to_emodule(self) -> EModule:
        N = self.N
        ops = []
        for i in range(self.c):
            ops.append(self.act(i, np.eye(N, dtype=np.int64)))
        return EModule(self.c, self.keys, ops, self.p, self.e_weights, check=False)

    def generator_columns(self) -> np.ndarray:
        """Coordinates of the generators g (= e_∅ g)."""
        W = len(self.words)
        M = np.zeros((self.N, self.rank), dtype=np.int64)
        M[np.arange(self.rank) * W, np.arange(self.rank)] = 1
        return M


def all_words_images(V: _Module, G: np.ndarray) -> dict:
    """``{I: e_I G}`` for every subset I, batched over the columns of G."""
    out = {(): G}
    for I in subsets(V.c)[1:]:
        out[I] = V.act(I[0], out[I[1:]])
    return out


def free_map_matrix(F: FreeEModule, V: _Module, images: np.ndarray) -> np.ndarray:
    """Matrix of the E-linear map F -> V sending generator g to ``images[:, g]``."""
    words = all_words_images(V, images)
    W = len(F.words)
    M = np.zeros((V.N, F.N), dtype=np.int64)
    for t, I in enumerate(F.words):
        M[:, np.arange(F.rank) * W + t] = words[I]
    return M


@dataclass
class EFreeComplex:
    """Minimal E-free resolution data.

    ``terms[s]`` is the free module F_s; ``diffs[s]`` (for s >= 1) holds the
    images of the generators of F_s in F_{s-1}; ``cover`` holds the images
    of the generators of F_0 in the resolved module.
    """

    c: int
    p: int
    terms: list
    diffs: dict = field(default_factory=dict)
    cover: np.ndarray | None = None
    base: EModule | None = None

    @property
    def length(self) -> int:
        return len(self.terms) - 1

    def gen_degrees(self, s: int) -> list:
        return [d for d, _ in self.terms[s].gen_keys]

    def betti(self):
        from .resolution import BettiTable

        return BettiTable.from_degrees({s: self.gen_degrees(s) for s in range(len(self.terms))})

    def matrix(self, s: int) -> np.ndarray:
        """Full matrix of d_s: F_s -> F_{s-1}."""
        return free_map_matrix(self.terms[s], self.terms[s - 1], self.diffs[s])

    def is_minimal(self) -> bool:
        """No generator image has a component on a generator of the target."""
        for s, D in self.diffs.items():
            if (D[self.terms[s - 1].generator_columns().argmax(axis=0)] != 0).any():
                return False
        return True

    def check_complex(self) -> bool:
        for s in range(2, len(self.terms)):
            if linalg.matmul(self.matrix(s - 1), self.matrix(s), self.p).any():
                return False
        return True

    def regularity(self) -> int:
        return max((max(self.gen_degrees(s)) - s for s in range(len(self.terms)) if self.terms[s].rank), default=0)


def _key_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _min_gens(V: _Module, K: dict) -> list:
    """Minimal generators of the submodule with homogeneous basis K[key] (columns).

    Returns a list of (key, vector) in increasing key order.
    """
    p = V.p
    kidx = V.key_index()
    out = []
    for key in sorted(K):
        Kk = K[key]
        if Kk.shape[1] == 0:
            continue
        rows = kidx[key]
        subs = []
        for i in range(V.c):
            lower = (key[0] - 1, key[1] - V.e_weights[i])
            if lower in K and K[lower].shape[1]:
                subs.append(V.act(i, K[lower])[rows])
        Sub = np.hstack(subs) if subs else np.zeros((len(rows), 0), dtype=np.int64)
        mask = linalg.independent_rows(Sub.T, Kk[rows].T, p)
        for t in np.nonzero(mask)[0]:
            out.append((key, Kk[:, t]))
    return out


def _kernel_by_key(F: FreeEModule, V: _Module, images: np.ndarray) -> dict:
    """Kernel of F -> V (generator g -> images[:, g]) as homogeneous bases per key."""
    p = F.p
    words = all_words_images(V, images)
    W = len(F.words)
    vk = V.key_index()
    fk = F.key_index()
    out = {}
    for key, cols in fk.items():
        rows = vk.get(key, np.zeros(0, dtype=np.int64))
        M = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for t, idx in enumerate(cols):
            g, w = divmod(int(idx), W)
            if len(rows):
                M[:, t] = words[F.words[w]][rows, g]
        Nl = linalg.nullspace(M, p) if len(rows) else np.eye(len(cols), dtype=np.int64)
        if Nl.shape[1]:
            Kf = np.zeros((F.N, Nl.shape[1]), dtype=np.int64)
            Kf[cols] = Nl
            out[key] = Kf
    return out


def e_free_resolution(T: EModule, length: int) -> EFreeComplex:
    """Minimal E-free resolution by iterated minimal covers, degree by degree."""
    if length < 0:
        raise ValueError("length must be non-negative")
    p = T.p
    kidx = T.key_index()
    K = {}
    for key, idx in kidx.items():
        B = np.zeros((T.N, len(idx)), dtype=np.int64)
        B[idx, np.arange(len(idx))] = 1
        K[key] = B
    V: _Module = T
    terms, diffs = [], {}
    cover = None
    for s in range(length + 1):
        gens = _min_gens(V, K)
        F = FreeEModule(T.c, [k for k, _ in gens], p, T.e_weights)
        imgs = np.array([v for _, v in gens], dtype=np.int64).T.reshape(V.N, len(gens))
        terms.append(F)
        if s == 0:
            cover = imgs
        else:
            diffs[s] = imgs
        if F.rank == 0 or s == length:
            break
        K = _kernel_by_key(F, V, imgs)
        V = F
    return EFreeComplex(T.c, p, terms, diffs, cover, T)


def e_regularity(T: EModule, window: int) -> tuple:
    """(regularity on the window, stabilization observed).

    Stabilization means the last two computed steps stay within the
    regularity found on the earlier steps.
    """
    res = e_free_resolution(T, window)
    per = [max(res.gen_degrees(s)) - s for s in range(len(res.terms)) if res.terms[s].rank]
    if not per:
        return 0, True
    reg = max(per)
    if len(res.terms) <= window:
        # resolution finished (free module): stable by definition
        return reg, True
    early = max(per[:-2]) if len(per) > 2 else None
    stable = early is not None and max(per[-2:]) <= early
    return reg, stable


def hom_solution_space(A: EModule, B: EModule) -> tuple:
    """Basis of degree-preserving E-linear maps A -> B, block by key.

    Returns (blocks, basis) where ``blocks`` lists (key, rowsB, colsA) and
    each basis vector concatenates the column-major blocks.
    """
    p = A.p
    ka, kb = A.key_index(), B.key_index()
    blocks = []
    off = 0
    for key in sorted(set(ka) & set(kb)):
        blocks.append((key, kb[key], ka[key], off))
        off += len(kb[key]) * len(ka[key])
    eqs = []
    pos = {b[0]: b for b in blocks}
    for i in range(A.c):
        for key, rb, ca, o in blocks:
            tgt = _key_add(key, A.step(i))
            if tgt not in pos and tgt not in kb and tgt not in ka:
                continue
            # X_tgt A_i[tgt<-key] - B_i[tgt<-key] X_key = 0
            rbt = kb.get(tgt, np.zeros(0, dtype=np.int64))
            cat = ka.get(tgt, np.zeros(0, dtype=np.int64))
            nr, nc = len(rbt), len(ca)
            if nr * nc == 0:
                continue
            E = np.zeros((nr * nc, off), dtype=np.int64)
            Ai = A.ops[i][np.ix_(cat, ca)]
            Bi = B.ops[i][np.ix_(rbt, rb)]
            if tgt in pos:
                _, rb2, ca2, o2 = pos[tgt]
                E[:, o2:o2 + len(rb2) * len(ca2)] += np.kron(Ai.T, np.eye(len(rb2), dtype=np.int64))
            E[:, o:o + len(rb) * len(ca)] -= np.kron(np.eye(nc, dtype=np.int64), Bi)
            eqs.append(E)
    if not eqs:
        return blocks, np.eye(off, dtype=np.int64)
    return blocks, linalg.nullspace(np.vstack(eqs), p)


def is_isomorphic(A: EModule, B: EModule, seed: int = 0, tries: int = 4) -> tuple:
    """Decide A ≅ B by testing random elements of Hom_E(A, B) for invertibility.

    Returns (answer, isomorphism matrix or None).  A False answer with equal
    key dimensions is correct with high probability only; dimension
    mismatches are certain.
    """
    if sorted(A.keys) != sorted(B.keys) or A.c != B.c:
        return False, None
    p = A.p
    blocks, basis = hom_solution_space(A, B)
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        coeffs = rng.integers(0, p, size=basis.shape[1])
        x = linalg.matmul(basis, coeffs.reshape(-1, 1), p)[:, 0] if basis.shape[1] else np.zeros(basis.shape[0], dtype=np.int64)
        X = np.zeros((B.N, A.N), dtype=np.int64)
        ok = True
        for key, rb, ca, o in blocks:
            blk = x[o:o + len(rb) * len(ca)].reshape(len(ca), len(rb)).T
            if linalg.rank(blk, p) < len(rb):
                ok = False
                break
            X[np.ix_(rb, ca)] = blk
        if ok:
            return True, X
    return False, None


def trivial_module(c: int, keys, p: int, e_weights=None) -> EModule:
    """Module with zero action."""
    N = len(keys)
    return EModule(c, keys, [np.zeros((N, N), dtype=np.int64)] * c, p, e_weights)


def free_module(c: int, gen_keys, p: int, e_weights=None) -> EModule:
    return FreeEModule(c, gen_keys, p, e_weights).to_emodule()


def random_emodule(c: int, rng, p: int, max_gens: int = 3, max_rels: int = 3) -> EModule:
    """Random cyclic-ish module: a free module modulo a random homogeneous submodule."""
    ng = int(rng.integers(1, max_gens + 1))
    keys = [(int(rng.integers(0, 2)), 0) for _ in range(ng)]
    F = FreeEModule(c, keys, p).to_emodule()
    nr = int(rng.integers(0, max_rels + 1))
    rels = []
    kidx = F.key_index()
    for _ in range(nr):
        key = list(kidx)[int(rng.integers(0, len(kidx)))]
        v = np.zeros(F.N, dtype=np.int64)
        v[kidx[key]] = rng.integers(0, p, size=len(kidx[key]))
        if v.any():
            rels.append(v)
    if not rels:
        return F
    W = F.closure(np.array(rels, dtype=np.int64).T)
    return F.quotient(W).module
