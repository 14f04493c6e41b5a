"""Degree-by-degree linear algebra on graded free modules.

The degree-d piece of ``F = ⊕ R(-a_j)`` has basis ``(j, m)`` with ``m`` a
standard monomial of degree ``d - a_j``, ordered generator-major.  A
homogeneous map becomes, in each degree, a scalar matrix assembled from
Kronecker products of its coefficient blocks with the ring's monomial
multiplication matrices.  Kernels, lifts and minimal generating sets are
then exact row reductions over F_p.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import InconsistentSystem
from .field_poly import GradedFreeModule, GradedMap, PolyRing, invert_unit_block
from . import linalg


class Piece:
    """Coordinates on the degree-d part of a graded free module."""

    __slots__ = ("module", "d", "offsets", "dims", "size", "bases")

    def __init__(self, F: GradedFreeModule, d: int):
        ring = F.ring
        self.module = F
        self.d = d
        self.bases = [ring.basis(d - a) for a in F.degrees]
        self.dims = np.array([len(b) for b in self.bases], dtype=np.int64)
        self.offsets = np.concatenate([[0], np.cumsum(self.dims)]).astype(np.int64)
        self.size = int(self.offsets[-1])

    def indices(self, gens) -> np.ndarray:
        if len(gens) == 0:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([np.arange(self.offsets[j], self.offsets[j + 1]) for j in gens]).astype(np.int64)

    def vector_to_terms(self, v) -> dict:
        """Coordinate vector -> {(gen, monomial): coeff}."""
        out = {}
        for idx in np.nonzero(v)[0]:
            j = int(np.searchsorted(self.offsets, idx, side="right") - 1)
            out[(j, self.bases[j][idx - self.offsets[j]])] = int(v[idx])
        return out


@lru_cache(maxsize=4096)
def piece(F: GradedFreeModule, d: int) -> Piece:
    return Piece(F, d)


def _groups(degrees) -> dict:
    g: dict = {}
    for j, a in enumerate(degrees):
        g.setdefault(a, []).append(j)
    return g


def degree_matrix(f: GradedMap, d: int) -> np.ndarray:
    """Matrix of f from source_d to target_{d + shift}."""
    ring = f.ring
    Ps = piece(f.source, d)
    Pt = piece(f.target, d + f.degree_shift)
    M = np.zeros((Pt.size, Ps.size), dtype=np.int64)
    if Ps.size == 0 or Pt.size == 0 or not f.coeffs:
        return M
    sg = _groups(f.source.degrees)
    tg = _groups(f.target.degrees)
    for m, A in f.coeffs.items():
        k = sum(m)
        for a, J in sg.items():
            s = d - a
            if ring.dim(s) == 0:
                continue
            I = tg.get(a + f.degree_shift - k)
            if not I:
                continue
            sub = A[np.ix_(I, J)]
            if not sub.any():
                continue
            mult = ring.mult_matrix(m, s)
            if mult.shape[0] == 0:
                continue
            blk = np.kron(sub, mult)
            M[np.ix_(Pt.indices(I), Ps.indices(J))] += blk
    np.remainder(M, ring.p, out=M)
    return M


def generator_vectors(f: GradedMap, cols=None) -> list:
    """For each selected column j, its image vector in target_{deg_j + shift}."""
    cols = range(f.shape[1]) if cols is None else cols
    out = []
    for j in cols:
        d = f.source.degrees[j] + f.degree_shift
        Pt = piece(f.target, d)
        v = np.zeros(Pt.size, dtype=np.int64)
        tb = [f.ring.basis_index(d - b) for b in f.target.degrees]
        for m, A in f.coeffs.items():
            for i in np.nonzero(A[:, j])[0]:
                v[Pt.offsets[i] + tb[i][m]] = A[i, j]
        out.append(v)
    return out


def map_from_vectors(target: GradedFreeModule, cols, degree_shift: int = 0) -> GradedMap:
    """Build a map whose j-th column is the vector ``v`` in ``target_{d}``.

    ``cols`` is a list of ``(d, v)``; the source generator gets degree
    ``d - degree_shift``.
    """
    ring = target.ring
    src = GradedFreeModule(ring, [d - degree_shift for d, _ in cols])
    coeffs: dict = {}
    for j, (d, v) in enumerate(cols):
        P = piece(target, d)
        for (i, m), c in P.vector_to_terms(v).items():
            if m not in coeffs:
                coeffs[m] = np.zeros((target.rank, len(cols)), dtype=np.int64)
            coeffs[m][i, j] = c
    return GradedMap(src, target, coeffs, degree_shift, check=False)


def variable_matrix(F: GradedFreeModule, k: int, d: int) -> np.ndarray:
    """Multiplication by x_k from F_d to F_{d+1}."""
    ring = F.ring
    P0, P1 = piece(F, d), piece(F, d + 1)
    M = np.zeros((P1.size, P0.size), dtype=np.int64)
    e = [0] * ring.n
    e[k] = 1
    e = tuple(e)
    for j, a in enumerate(F.degrees):
        if P0.dims[j] == 0 or P1.dims[j] == 0:
            continue
        M[P1.offsets[j]:P1.offsets[j + 1], P0.offsets[j]:P0.offsets[j + 1]] = ring.mult_matrix(e, d - a)
    return M


def max_ideal_image(F: GradedFreeModule, d: int, V: np.ndarray) -> np.ndarray:
    """Columns spanning (x_1..x_n) * span(V) in degree d + 1, for V in F_d."""
    if V.shape[1] == 0:
        return np.zeros((piece(F, d + 1).size, 0), dtype=np.int64)
    p = F.ring.p
    blocks = [linalg.matmul(variable_matrix(F, k, d), V, p) for k in range(F.ring.n)]
    return np.hstack(blocks)


def degree_range(F: GradedFreeModule, upto: int | None = None):
    """Degrees where F may be nonzero; all of them for an Artinian ring."""
    if not F.degrees:
        return range(0)
    lo = min(F.degrees)
    if upto is None:
        ring = F.ring
        if not ring.is_artinian():
            raise ValueError("a degree bound is required over a non-Artinian ring")
        upto = max(F.degrees) + ring.top_degree()
    return range(lo, upto + 1)


def kernel(f: GradedMap, upto: int | None = None) -> GradedMap:
    """Minimal generators of ker f in degrees <= upto (all degrees if Artinian).

    In degree d the new generators are the canonical nullspace vectors that
    are independent modulo (x_1..x_n) * ker_{d-1}.
    """
    F = f.source
    p = f.ring.p
    cols = []
    prev = None
    prev_d = None
    for d in degree_range(F, upto):
        N = linalg.nullspace(degree_matrix(f, d), p)
        if N.shape[1] == 0:
            prev, prev_d = N, d
            continue
        if prev is not None and prev_d == d - 1 and prev.shape[1]:
            sub = max_ideal_image(F, d - 1, prev)
            mask = linalg.independent_rows(sub.T, N.T, p)
        else:
            mask = np.ones(N.shape[1], dtype=bool)
        for idx in np.nonzero(mask)[0]:
            cols.append((d, N[:, idx]))
        prev, prev_d = N, d
    return map_from_vectors(F, cols)


def minimal_columns(f: GradedMap) -> list:
    """Indices of a minimal set of columns generating the same image.

    Columns are scanned by degree; a column is kept when its image vector
    is independent of the degree-d part of the module generated by the
    lower-degree columns and the columns already kept in degree d.
    """
    p = f.ring.p
    keep = []
    degs = sorted(set(f.source.degrees))
    for a in degs:
        J = [j for j, b in enumerate(f.source.degrees) if b == a]
        lower = [j for j, b in enumerate(f.source.degrees) if b < a]
        new = np.array(generator_vectors(f, J))
        if new.size == 0:
            continue
        if lower:
            old = degree_matrix(f.submatrix(cols=lower), a).T
        else:
            old = np.zeros((0, new.shape[1]), dtype=np.int64)
        mask = linalg.independent_rows(old, new, p)
        keep.extend(J[i] for i in np.nonzero(mask)[0])
    return sorted(keep)


def lift(A: GradedMap, B: GradedMap) -> GradedMap:
    """X with A ∘ X = B (free variables zero in every degree).

    Raises InconsistentSystem when some column of B is not in the image of A.
    """
    H = B.source
    shift = B.degree_shift - A.degree_shift
    p = A.ring.p
    cols = [None] * H.rank
    for e, J in sorted(_groups(H.degrees).items()):
        d_src = e + shift
        M = degree_matrix(A, d_src)
        rhs = np.array(generator_vectors(B, J)).T.reshape(M.shape[0], len(J))
        try:
            X = linalg.solve(M, rhs, p)
        except InconsistentSystem as exc:
            raise InconsistentSystem(f"cannot lift columns of degree {e}") from exc
        for t, j in enumerate(J):
            cols[j] = (d_src, X[:, t])
    out = map_from_vectors(A.source, cols, 0) if cols else None
    if out is None:
        return GradedMap.zero(H, A.source, shift)
    return GradedMap(H, A.source, out.coeffs, shift, check=True)


def in_image(A: GradedMap, B: GradedMap) -> bool:
    try:
        lift(A, B)
        return True
    except InconsistentSystem:
        return False


def cokernel_dims(f: GradedMap, degrees) -> dict:
    """dim (target / image f) in each target degree."""
    p = f.ring.p
    out = {}
    for d in degrees:
        M = degree_matrix(f, d - f.degree_shift)
        out[d] = piece(f.target, d).size - linalg.rank(M, p)
    return out


def module_dims(F: GradedFreeModule, degrees) -> dict:
    return {d: piece(F, d).size for d in degrees}


def prune(phi: GradedMap) -> tuple:
    """Minimal presentation of coker(phi).

    Returns ``(phi', keep_rows)``: generators of the target indexed by
    ``keep_rows`` still generate the cokernel, and ``phi'`` presents it
    minimally (no unit entries, no redundant relations).
    """
    p = phi.ring.p
    C = phi.constant_part()
    rows_all = list(range(phi.shape[0]))
    if C.any():
        _, piv_cols = linalg.rref(C, p)
        # pivot rows: the rows used to eliminate, chosen from the transposed echelon
        _, piv_rows = linalg.rref(C[:, piv_cols].T, p)
        I, J = list(piv_rows), list(piv_cols)
        nI = [i for i in rows_all if i not in I]
        nJ = [j for j in range(phi.shape[1]) if j not in J]
        # phi' = phi[nI, nJ] - phi[nI, J] U^{-1} phi[I, nJ]
        a = phi.submatrix(nI, nJ)
        b = phi.submatrix(nI, J)
        c = phi.submatrix(I, nJ)
        mid = invert_unit_block(phi.submatrix(I, J))
        phi = a - b @ mid @ c
        rows = nI
    else:
        rows = rows_all
    phi = phi.submatrix(cols=minimal_columns(phi))
    # drop zero columns (already excluded by minimal_columns)
    return phi, rows
