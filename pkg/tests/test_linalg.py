import numpy as np
import pytest
from sympy import GF
from sympy.polys.matrices import DomainMatrix

from torext import linalg
from torext.errors import InconsistentSystem

P = 101


def _dm(A):
    K = GF(P)
    return DomainMatrix([[K(int(v)) for v in row] for row in A], A.shape, K)


@pytest.mark.parametrize("shape", [(3, 5), (6, 4), (7, 7), (1, 9)])
def test_rank_matches_sympy(rng, shape):
    for _ in range(5):
        A = rng.integers(0, P, size=shape)
        # force some dependence
        if shape[0] > 2:
            A[-1] = (A[0] * 3 + A[1]) % P
        assert linalg.rank(A, P) == _dm(A).rank()


def test_nullspace_is_kernel_and_complete(rng):
    A = rng.integers(0, P, size=(4, 9))
    A[3] = (2 * A[0] + 5 * A[2]) % P
    N = linalg.nullspace(A, P)
    assert not linalg.matmul(A, N, P).any()
    assert N.shape[1] == 9 - _dm(A).rank()
    assert linalg.rank(N, P) == N.shape[1]


def test_solve_and_inverse(rng):
    A = rng.integers(0, P, size=(5, 5))
    while linalg.rank(A, P) < 5:
        A = rng.integers(0, P, size=(5, 5))
    B = rng.integers(0, P, size=(5, 2))
    X = linalg.solve(A, B, P)
    assert np.array_equal(linalg.matmul(A, X, P), B % P)
    Ai = linalg.inverse(A, P)
    assert np.array_equal(linalg.matmul(A, Ai, P), np.eye(5, dtype=np.int64))


def test_inconsistent_system_raises():
    A = np.array([[1, 0], [0, 0]])
    B = np.array([[0], [1]])
    with pytest.raises(InconsistentSystem):
        linalg.solve(A, B, P)


def test_matmul_large_entries_exact(rng):
    A = rng.integers(0, P, size=(40, 60))
    B = rng.integers(0, P, size=(60, 30))
    ref = (A.astype(object) @ B.astype(object)) % P
    assert np.array_equal(linalg.matmul(A, B, P), ref.astype(np.int64))


def test_independent_rows_extends_span():
    basis = np.array([[1, 0, 0]])
    cand = np.array([[2, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1]])
    assert linalg.independent_rows(basis, cand, P).tolist() == [False, True, False, True]
