"""Exact linear algebra over a prime field F_p.

Matrices are ``numpy.int64`` arrays with entries in ``[0, p)``.  Elimination
kernels are compiled with numba; the wrappers below take care of reduction,
copying and shape corner cases.  Every routine is deterministic: pivots are
chosen as the first nonzero entry scanning rows top to bottom, and
particular solutions set all free variables to zero.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import InconsistentSystem

__all__ = [
    "as_mod",
    "rref",
    "rank",
    "nullspace",
    "solve",
    "inverse",
    "independent_rows",
    "reduce_against",
    "matmul",
    "is_zero",
]


def as_mod(a, p: int) -> np.ndarray:
    """Return ``a`` as a fresh int64 array reduced into ``[0, p)``."""
    arr = np.array(a, dtype=np.int64, copy=True)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    np.remainder(arr, p, out=arr)
    return arr


@njit(cache=True)
def _inv(a, p):
    # Fermat inverse; p is prime
    r = 1
    b = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            r = (r * b) % p
        b = (b * b) % p
        e >>= 1
    return r


@njit(cache=True)
def _rref_inplace(A, p, ncols_pivot):
    """Gauss-Jordan on A in place; pivots only in the first ncols_pivot columns."""
    m, n = A.shape
    pivots = np.empty(min(m, ncols_pivot), dtype=np.int64)
    r = 0
    for c in range(ncols_pivot):
        if r >= m:
            break
        piv = -1
        for i in range(r, m):
            if A[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, n):
                t = A[r, j]
                A[r, j] = A[piv, j]
                A[piv, j] = t
        iv = _inv(A[r, c], p)
        if iv != 1:
            for j in range(c, n):
                A[r, j] = (A[r, j] * iv) % p
        for i in range(m):
            if i == r:
                continue
            fct = A[i, c]
            if fct == 0:
                continue
            fct = p - fct
            for j in range(c, n):
                a = A[r, j]
                if a != 0:
                    A[i, j] = (A[i, j] + fct * a) % p
        pivots[r] = c
        r += 1
    return pivots[:r]


@njit(cache=True)
def _greedy_rows(B, C, p):
    """Mark rows of C that are independent modulo rowspace(B) + earlier picks.

    B is assumed to be in reduced row echelon form with pivot list ``bp``
    computed here.  Returns a boolean mask over C's rows.
    """
    n = C.shape[1]
    cap = B.shape[0] + C.shape[0]
    basis = np.zeros((cap, n), dtype=np.int64)
    piv = np.empty(cap, dtype=np.int64)
    nb = 0
    for i in range(B.shape[0]):
        lead = -1
        for j in range(n):
            if B[i, j] != 0:
                lead = j
                break
        if lead < 0:
            continue
        # reduce against current basis, then insert
        v = B[i].copy()
        for k in range(nb):
            c = piv[k]
            if v[c] != 0:
                fct = p - v[c]
                for j in range(n):
                    if basis[k, j] != 0:
                        v[j] = (v[j] + fct * basis[k, j]) % p
        lead = -1
        for j in range(n):
            if v[j] != 0:
                lead = j
                break
        if lead < 0:
            continue
        iv = _inv(v[lead], p)
        for j in range(n):
            v[j] = (v[j] * iv) % p
        basis[nb] = v
        piv[nb] = lead
        nb += 1
    mask = np.zeros(C.shape[0], dtype=np.bool_)
    for i in range(C.shape[0]):
        v = C[i].copy()
        for k in range(nb):
            c = piv[k]
            if v[c] != 0:
                fct = p - v[c]
                for j in range(n):
                    if basis[k, j] != 0:
                        v[j] = (v[j] + fct * basis[k, j]) % p
        lead = -1
        for j in range(n):
            if v[j] != 0:
                lead = j
                break
        if lead < 0:
            continue
        mask[i] = True
        iv = _inv(v[lead], p)
        for j in range(n):
            v[j] = (v[j] * iv) % p
        basis[nb] = v
        piv[nb] = lead
        nb += 1
    return mask


@njit(cache=True)
def _matmul(A, B, p):
    m, k = A.shape
    n = B.shape[1]
    out = np.zeros((m, n), dtype=np.int64)
    for i in range(m):
        for t in range(k):
            a = A[i, t]
            if a == 0:
                continue
            for j in range(n):
                b = B[t, j]
                if b != 0:
                    out[i, j] = (out[i, j] + a * b) % p
    return out


def matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Product mod p, through BLAS when the result is exactly representable."""
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
    if A.size == 0 or B.size == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    # float64 BLAS is exact while every partial sum stays below 2^53
    if (p - 1) ** 2 * A.shape[1] < 2**53:
        C = A.astype(np.float64) @ B.astype(np.float64)
        return np.remainder(C, p).astype(np.int64)
    if (p - 1) ** 2 * A.shape[1] < 2**62:
        return np.remainder(A @ B, p)
    return _matmul(np.ascontiguousarray(A), np.ascontiguousarray(B), p)


def rref(A, p: int, ncols_pivot: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form of A and its pivot columns.

    With ``ncols_pivot`` the elimination only pivots on the leading columns,
    which is how augmented systems are solved.
    """
    M = as_mod(A, p)
    if M.size == 0:
        return M, np.zeros(0, dtype=np.int64)
    k = M.shape[1] if ncols_pivot is None else ncols_pivot
    piv = _rref_inplace(M, p, k)
    return M[: len(piv)].copy(), piv.copy()


def rank(A, p: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    if A.shape[0] > A.shape[1]:
        A = A.T
    return len(rref(A, p)[1])


def nullspace(A, p: int) -> np.ndarray:
    """Basis of {x : A x = 0} as columns of an (ncols, k) matrix.

    The basis is canonical: one vector per non-pivot column j, with a 1 in
    position j and zeros in the other free positions.
    """
    A = np.asarray(A)
    n = A.shape[1]
    if A.shape[0] == 0 or A.size == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(A, p)
    free = np.setdiff1d(np.arange(n), piv)
    N = np.zeros((n, len(free)), dtype=np.int64)
    if len(free):
        N[free, np.arange(len(free))] = 1
        if len(piv):
            N[piv, :] = np.remainder(-R[:, free], p)
    return N


def solve(A, B, p: int) -> np.ndarray:
    """Particular solution X of A X = B with all free variables zero.

    Raises InconsistentSystem if some column of B is outside the column
    space of A.
    """
    A = as_mod(A, p)
    B = np.asarray(B)
    m, n = A.shape
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    B = as_mod(B, p).reshape(m, -1)
    k = B.shape[1]
    if k == 0:
        return np.zeros((n, 0), dtype=np.int64)
    if n == 0 or m == 0:
        if np.any(B):
            raise InconsistentSystem("right-hand side not in column space")
        return np.zeros((n, k), dtype=np.int64)
    aug = np.ascontiguousarray(np.hstack([A, B]))
    piv = _rref_inplace(aug, p, n)
    r = len(piv)
    if np.any(aug[r:, n:]):
        raise InconsistentSystem("right-hand side not in column space")
    X = np.zeros((n, k), dtype=np.int64)
    X[piv, :] = aug[:r, n:]
    return X


def inverse(A, p: int) -> np.ndarray:
    A = as_mod(A, p)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    if n == 0:
        return A.copy()
    aug = np.ascontiguousarray(np.hstack([A, np.eye(n, dtype=np.int64)]))
    piv = _rref_inplace(aug, p, n)
    if len(piv) < n:
        raise InconsistentSystem("matrix is singular")
    return aug[:, n:].copy()


def independent_rows(basis, cand, p: int) -> np.ndarray:
    """Boolean mask of candidate rows that extend span(basis), chosen greedily."""
    cand = as_mod(cand, p)
    if cand.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    basis = as_mod(basis, p) if np.size(basis) else np.zeros((0, cand.shape[1]), dtype=np.int64)
    return _greedy_rows(np.ascontiguousarray(basis), np.ascontiguousarray(cand), p)


def reduce_against(R: np.ndarray, piv: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """Reduce the rows of v against a reduced echelon basis (R, piv)."""
    v = as_mod(v, p)
    if len(piv) == 0 or v.size == 0:
        return v
    coef = v[:, piv]
    return np.remainder(v - matmul(coef, R, p), p)


def is_zero(A) -> bool:
    return not np.any(A)
