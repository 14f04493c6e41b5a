"""Chain complexes of graded free modules and their reductions mod the maximal ideal.

Conventions (fixed here once and used everywhere):

* Koszul differential ``d(e_{j1}^...^e_{jq}) = sum_l (-1)^(l+1) f_{jl} e_{J - jl}``
  with the basis of each exterior power ordered by increasing index sets;
* tensor products use ``d(a⊗b) = da⊗b + (-1)^{|a|} a⊗db``;
* the mapping cone of ``phi: C -> D`` is ``D_n ⊕ C_{n-1}`` with differential
  ``[[d_D, phi], [0, -d_C]]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .degreewise import degree_matrix, piece
from .errors import ChainMapError, InvariantBreach, RingMismatch, ShapeError
from .field_poly import (
    GradedFreeModule,
    GradedMap,
    PolyRing,
    block_map,
    compose,
    invert_unit_block,
    tensor_maps,
)


class ChainComplex:
    """Bounded complex ``C_lo <- ... <- C_hi``; ``d[i]: C_i -> C_{i-1}``."""

    def __init__(self, terms: dict, differentials: dict | None = None, check: bool = True):
        if not terms:
            raise ValueError("a complex needs at least one term")
        self.terms = {int(i): F for i, F in terms.items()}
        self.lo = min(self.terms)
        self.hi = max(self.terms)
        rings = {F.ring for F in self.terms.values()}
        if len(rings) != 1:
            raise RingMismatch("terms over different rings")
        self.ring: PolyRing = rings.pop()
        for i in range(self.lo, self.hi + 1):
            self.terms.setdefault(i, GradedFreeModule(self.ring, ()))
        self.d = {}
        for i, f in (differentials or {}).items():
            if i <= self.lo or i > self.hi:
                if not f.is_zero():
                    raise ShapeError(f"differential {i} outside the support")
                continue
            if f.source != self.terms[i] or f.target != self.terms[i - 1]:
                raise ShapeError(f"differential {i} does not match the terms")
            if f.degree_shift != 0 and not f.is_zero():
                raise ShapeError("differentials must have degree 0")
            self.d[i] = f
        if check:
            self.check()

    def term(self, i: int) -> GradedFreeModule:
        return self.terms.get(i, GradedFreeModule(self.ring, ()))

    def diff(self, i: int) -> GradedMap:
        f = self.d.get(i)
        if f is None:
            return GradedMap.zero(self.term(i), self.term(i - 1))
        return f

    def check(self):
        for i in range(self.lo + 2, self.hi + 1):
            if not compose(self.diff(i - 1), self.diff(i)).is_zero():
                raise InvariantBreach(f"d_{i - 1} d_{i} != 0")

    def is_minimal(self) -> bool:
        return all(f.is_minimal() for f in self.d.values())

    def ranks(self) -> dict:
        return {i: self.term(i).rank for i in range(self.lo, self.hi + 1)}

    def shift(self, k: int) -> "ChainComplex":
        """``C[k]`` with ``C[k]_i = C_{i-k}`` and differential ``(-1)^k d``."""
        s = -1 if k % 2 else 1
        terms = {i + k: F for i, F in self.terms.items()}
        diffs = {i + k: f * s for i, f in self.d.items()}
        return ChainComplex(terms, diffs, check=False)

    def truncate(self, hi: int) -> "ChainComplex":
        terms = {i: F for i, F in self.terms.items() if i <= hi}
        return ChainComplex(terms, {i: f for i, f in self.d.items() if i <= hi}, check=False)

    def over(self, ring: PolyRing) -> "ChainComplex":
        return ChainComplex({i: F.over(ring) for i, F in self.terms.items()},
                            {i: f.over(ring) for i, f in self.d.items()}, check=False)

    def __repr__(self):
        return "ChainComplex(" + " <- ".join(f"{self.term(i).rank}" for i in range(self.lo, self.hi + 1)) + ")"


@dataclass
class ChainMap:
    """Degree-0 map of complexes ``phi_i: C_i -> D_i``."""

    source: ChainComplex
    target: ChainComplex
    maps: dict = field(default_factory=dict)

    def component(self, i: int) -> GradedMap:
        f = self.maps.get(i)
        if f is None:
            return GradedMap.zero(self.source.term(i), self.target.term(i))
        return f

    def is_chain_map(self) -> bool:
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        for i in range(lo + 1, hi + 1):
            a = compose(self.target.diff(i), self.component(i))
            b = compose(self.component(i - 1), self.source.diff(i))
            if not (a - b).is_zero():
                return False
        return True


def _exterior_basis(c: int, q: int) -> list:
    return list(itertools.combinations(range(c), q))


def koszul(f) -> ChainComplex:
    """Koszul complex on the homogeneous polynomials f."""
    f = list(f)
    if not f:
        raise ValueError("koszul needs at least one element")
    ring = f[0].ring
    c = len(f)
    degs = [g.degree() for g in f]
    terms, diffs = {}, {}
    bases = {q: _exterior_basis(c, q) for q in range(c + 1)}
    for q in range(c + 1):
        terms[q] = GradedFreeModule(ring, [sum(degs[j] for j in J) for J in bases[q]])
    for q in range(1, c + 1):
        idx = {J: r for r, J in enumerate(bases[q - 1])}
        ents = [[ring.zero() for _ in bases[q]] for _ in bases[q - 1]]
        for col, J in enumerate(bases[q]):
            for l, j in enumerate(J):
                K = J[:l] + J[l + 1:]
                term = f[j] if l % 2 == 0 else -f[j]
                ents[idx[K]][col] = ents[idx[K]][col] + term
        diffs[q] = GradedMap.from_entries(terms[q], terms[q - 1], ents, 0)
    return ChainComplex(terms, diffs)


def exterior_left_mult(c: int, i: int, q: int) -> np.ndarray:
    """Matrix of ``e_i ∧ -`` from the q-th to the (q+1)-st exterior power."""
    src = _exterior_basis(c, q)
    tgt = {J: r for r, J in enumerate(_exterior_basis(c, q + 1))}
    M = np.zeros((len(tgt), len(src)), dtype=np.int64)
    for col, J in enumerate(src):
        if i in J:
            continue
        sign = -1 if sum(1 for j in J if j < i) % 2 else 1
        M[tgt[tuple(sorted(J + (i,)))], col] = sign
    return M


def koszul_homotopy(K: ChainComplex, i: int) -> dict:
    """Left multiplication by e_i: maps ``K_q -> K_{q+1}`` with ``σ∂ + ∂σ = f_i``.

    The internal degree of the maps is ``deg f_i`` (recorded as degree_shift).
    """
    c = K.hi
    ring = K.ring
    # recover deg f_i from the first differential
    di = K.term(1).degrees[i]
    out = {}
    for q in range(0, c):
        M = exterior_left_mult(c, i, q)
        out[q] = GradedMap.scalar(K.term(q), K.term(q + 1), M % ring.p, di)
    return out


def tensor(C: ChainComplex, D: ChainComplex) -> ChainComplex:
    """Tensor product with the Koszul sign rule; blocks ordered by C-degree."""
    if C.ring != D.ring:
        raise RingMismatch("tensor of complexes over different rings")
    ring = C.ring
    lo, hi = C.lo + D.lo, C.hi + D.hi
    layout = {}
    terms = {}
    for n in range(lo, hi + 1):
        parts = [(i, n - i) for i in range(C.lo, C.hi + 1) if D.lo <= n - i <= D.hi]
        layout[n] = parts
        degs = []
        for i, j in parts:
            degs += [a + b for a in C.term(i).degrees for b in D.term(j).degrees]
        terms[n] = GradedFreeModule(ring, degs)
    diffs = {}
    for n in range(lo + 1, hi + 1):
        src_parts, tgt_parts = layout[n], layout[n - 1]
        srcs = [_tensor_module(C.term(i), D.term(j)) for i, j in src_parts]
        tgts = [_tensor_module(C.term(i), D.term(j)) for i, j in tgt_parts]
        grid = [[None] * len(src_parts) for _ in tgt_parts]
        tindex = {ij: r for r, ij in enumerate(tgt_parts)}
        for col, (i, j) in enumerate(src_parts):
            if (i - 1, j) in tindex and i - 1 >= C.lo:
                blk = tensor_maps(C.diff(i), GradedMap.identity(D.term(j)))
                grid[tindex[(i - 1, j)]][col] = blk
            if (i, j - 1) in tindex and j - 1 >= D.lo:
                blk = tensor_maps(GradedMap.identity(C.term(i)), D.diff(j))
                grid[tindex[(i, j - 1)]][col] = blk * (-1 if i % 2 else 1)
        diffs[n] = block_map(grid, srcs, tgts, 0)
    return ChainComplex(terms, diffs)


def _tensor_module(A: GradedFreeModule, B: GradedFreeModule) -> GradedFreeModule:
    return GradedFreeModule(A.ring, [a + b for a in A.degrees for b in B.degrees])


def cone(phi: ChainMap) -> ChainComplex:
    """Mapping cone ``D_n ⊕ C_{n-1}`` with differential ``[[d_D, phi],[0, -d_C]]``."""
    if not phi.is_chain_map():
        raise ChainMapError("map does not commute with the differentials")
    C, D = phi.source, phi.target
    lo = min(D.lo, C.lo + 1)
    hi = max(D.hi, C.hi + 1)
    terms, diffs = {}, {}
    for n in range(lo, hi + 1):
        terms[n] = D.term(n) + C.term(n - 1)
    for n in range(lo + 1, hi + 1):
        grid = [[D.diff(n), phi.component(n - 1)],
                [None, -C.diff(n - 1)]]
        diffs[n] = block_map(grid, [D.term(n), C.term(n - 1)], [D.term(n - 1), C.term(n - 2)], 0)
    return ChainComplex(terms, diffs)


# ---------------------------------------------------------------------------
# complexes of graded vector spaces


class KComplexOverField:
    """Complex of graded vector spaces; ``mats[i]`` is the matrix of ``d_i``.

    ``degrees[i]`` lists the internal degree of each basis vector of term i.
    """

    def __init__(self, degrees: dict, mats: dict, p: int, check: bool = True):
        self.degrees = {i: tuple(v) for i, v in degrees.items()}
        self.p = p
        self.lo = min(self.degrees)
        self.hi = max(self.degrees)
        self.mats = {}
        for i in range(self.lo, self.hi + 1):
            self.degrees.setdefault(i, ())
        for i in range(self.lo + 1, self.hi + 1):
            M = mats.get(i)
            shape = (len(self.degrees[i - 1]), len(self.degrees[i]))
            if M is None:
                M = np.zeros(shape, dtype=np.int64)
            M = np.remainder(np.asarray(M, dtype=np.int64), p)
            if M.shape != shape:
                raise ShapeError(f"d_{i} has shape {M.shape}, expected {shape}")
            self.mats[i] = M
        if check:
            for i in range(self.lo + 2, self.hi + 1):
                if linalg.matmul(self.mats[i - 1], self.mats[i], p).any():
                    raise InvariantBreach(f"d_{i - 1} d_{i} != 0 over the field")

    def mat(self, i: int) -> np.ndarray:
        if i in self.mats:
            return self.mats[i]
        return np.zeros((len(self.degrees.get(i - 1, ())), len(self.degrees.get(i, ()))), dtype=np.int64)

    def dims(self) -> dict:
        out = {}
        for i, degs in self.degrees.items():
            for d in degs:
                out[(i, d)] = out.get((i, d), 0) + 1
        return out

    def internal_degrees(self) -> list:
        return sorted({d for v in self.degrees.values() for d in v})


def reduce_mod_m(C: ChainComplex) -> KComplexOverField:
    """Keep only the constant parts of the differentials."""
    mats = {i: C.diff(i).constant_part() for i in range(C.lo + 1, C.hi + 1)}
    degs = {i: C.term(i).degrees for i in range(C.lo, C.hi + 1)}
    return KComplexOverField(degs, mats, C.ring.p)


@dataclass
class Homology:
    """Homology in one homological degree.

    ``dims[j]`` is the dimension in internal degree j; ``reps`` has one
    column per class (cycles in the coordinates of the term) and
    ``rep_degrees`` their internal degrees; ``boundaries`` spans the
    boundaries.
    """

    n: int
    dims: dict
    reps: np.ndarray
    rep_degrees: tuple
    boundaries: np.ndarray

    @property
    def total(self) -> int:
        return int(self.reps.shape[1])


def homology(C: KComplexOverField, n: int) -> Homology:
    """H_n with a deterministic cycle basis.

    Per internal degree, cycles are the canonical nullspace basis and the
    representatives are those independent modulo the boundaries, scanned
    in order (lowest basis index first).
    """
    p = C.p
    degs = np.array(C.degrees.get(n, ()), dtype=np.int64)
    N = len(degs)
    dn = C.mat(n) if n > C.lo else np.zeros((0, N), dtype=np.int64)
    dn1 = C.mat(n + 1) if n < C.hi else np.zeros((N, 0), dtype=np.int64)
    src_degs = np.array(C.degrees.get(n + 1, ()), dtype=np.int64)
    reps, rep_degrees, dims = [], [], {}
    bnds = []
    for j in sorted(set(degs.tolist())):
        rows = np.nonzero(degs == j)[0]
        Z = linalg.nullspace(dn[:, rows], p) if dn.shape[0] else np.eye(len(rows), dtype=np.int64)
        cols = np.nonzero(src_degs == j)[0] if len(src_degs) else np.zeros(0, dtype=np.int64)
        B = dn1[np.ix_(rows, cols)] if len(cols) else np.zeros((len(rows), 0), dtype=np.int64)
        mask = linalg.independent_rows(B.T, Z.T, p) if Z.shape[1] else np.zeros(0, dtype=bool)
        picked = Z[:, mask] if Z.shape[1] else Z
        dims[j] = int(picked.shape[1])
        for t in range(picked.shape[1]):
            v = np.zeros(N, dtype=np.int64)
            v[rows] = picked[:, t]
            reps.append(v)
            rep_degrees.append(j)
        for t in range(B.shape[1]):
            v = np.zeros(N, dtype=np.int64)
            v[rows] = B[:, t]
            bnds.append(v)
    R = np.array(reps, dtype=np.int64).T.reshape(N, len(reps))
    Bm = np.array(bnds, dtype=np.int64).T.reshape(N, len(bnds))
    return Homology(n, dims, R, tuple(rep_degrees), Bm)


def homology_coordinates(H: Homology, v: np.ndarray, p: int) -> np.ndarray:
    """Coordinates of the class of the cycle(s) v in the representative basis."""
    v = np.asarray(v, dtype=np.int64)
    if v.ndim == 1:
        v = v.reshape(-1, 1)
    A = np.hstack([H.reps, H.boundaries]) if H.boundaries.size else H.reps
    if A.shape[1] == 0:
        if v.any():
            raise InvariantBreach("nonzero class in zero homology")
        return np.zeros((0, v.shape[1]), dtype=np.int64)
    X = linalg.solve(A, v, p)
    return X[: H.reps.shape[1]]


def homology_dims_over_ring(C: ChainComplex, n: int, degrees) -> dict:
    """dim_k H_n(C)_d for the given internal degrees, by degreewise rank counting."""
    p = C.ring.p
    out = {}
    for d in degrees:
        size = piece(C.term(n), d).size
        r_out = linalg.rank(degree_matrix(C.diff(n), d), p) if n > C.lo else 0
        r_in = linalg.rank(degree_matrix(C.diff(n + 1), d), p) if n < C.hi else 0
        out[d] = size - r_out - r_in
    return out


def euler_characteristic(C: KComplexOverField) -> dict:
    out: dict = {}
    for (i, d), k in C.dims().items():
        out[d] = out.get(d, 0) + (-1) ** i * k
    return out


def minimize(C: ChainComplex) -> ChainComplex:
    """Split off contractible summands ``0 -> R --u--> R -> 0`` with u a unit.

    For each differential, in increasing order, a maximal invertible block
    U of its constant part (rows I, columns J) is removed:
    ``d_n <- d_n[~I,~J] - d_n[~I,J] U^{-1} d_n[I,~J]``, rows J of
    ``d_{n+1}`` and columns I of ``d_{n-1}`` are dropped.
    """
    p = C.ring.p
    terms = dict(C.terms)
    diffs = {i: C.diff(i) for i in range(C.lo + 1, C.hi + 1)}
    for n in range(C.lo + 1, C.hi + 1):
        d = diffs[n]
        K = d.constant_part()
        if not K.any():
            continue
        _, J = linalg.rref(K, p)
        _, I = linalg.rref(K[:, J].T, p)
        I, J = list(I), list(J)
        nI = [i for i in range(d.shape[0]) if i not in I]
        nJ = [j for j in range(d.shape[1]) if j not in J]
        a, b, c = d.submatrix(nI, nJ), d.submatrix(nI, J), d.submatrix(I, nJ)
        mid = invert_unit_block(d.submatrix(I, J))
        diffs[n] = a - compose(compose(b, mid), c)
        terms[n] = diffs[n].source
        terms[n - 1] = diffs[n].target
        if n + 1 in diffs:
            diffs[n + 1] = diffs[n + 1].submatrix(rows=nJ)
        if n - 1 in diffs:
            diffs[n - 1] = diffs[n - 1].submatrix(cols=nI)
    return ChainComplex(terms, diffs)


def homology_over_ring_zero(C: ChainComplex, n: int, upto: int) -> bool:
    degs = range(min(C.term(n).degrees, default=0), upto + 1)
    return all(v == 0 for v in homology_dims_over_ring(C, n, degs).values())
