"""Homotopies for the elements of a regular sequence and the E-action on Tor."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .complexes import ChainComplex, homology, homology_coordinates, reduce_mod_m
from .degreewise import lift
from .emodule import EModule
from .errors import AnnihilationError, InconsistentSystem, InvariantBreach
from .field_poly import GradedMap, Polynomial, compose


@dataclass
class HomotopySystem:
    """``sigmas[i][p]: F_p -> F_{p+1}`` with ``σ∂ + ∂σ = f_i``."""

    base: ChainComplex
    f: list
    sigmas: dict

    @property
    def c(self) -> int:
        return len(self.f)

    def sigma(self, i: int, p: int) -> GradedMap:
        s = self.sigmas[i].get(p)
        if s is None:
            F = self.base
            return GradedMap.zero(F.term(p), F.term(p + 1), self.f[i].degree() or 0)
        return s


def _f_identity(F, f: Polynomial) -> GradedMap:
    return GradedMap.identity(F).times_poly(f) if not f.is_zero() else GradedMap.zero(F, F, 0)


def compute_homotopy(F: ChainComplex, f: Polynomial, upto: int | None = None) -> dict:
    """σ with ∂σ + σ∂ = f·id, built degree by degree.

    ``σ_0`` solves ``∂_1 σ_0 = f``; ``σ_p`` solves ``∂_{p+1} σ_p = f - σ_{p-1} ∂_p``.
    Each lift takes the particular solution with free variables zero.
    """
    f = F.ring.coerce(f)
    hi = F.hi if upto is None else upto
    sig = {}
    shift = f.degree() if not f.is_zero() else 0
    for p in range(F.lo, hi + 1):
        rhs = _f_identity(F.term(p), f)
        if p > F.lo:
            rhs = rhs - compose(sig[p - 1], F.diff(p))
        if f.is_zero():
            sig[p] = GradedMap.zero(F.term(p), F.term(p + 1), 0)
            continue
        target = F.diff(p + 1)
        try:
            sig[p] = lift(target, rhs.with_modules(degree_shift=shift) if rhs.is_zero() else rhs)
        except InconsistentSystem as exc:
            if p == F.lo:
                raise AnnihilationError(f"{f} does not annihilate the module") from exc
            raise InvariantBreach(f"homotopy lift failed at position {p}") from exc
    return sig


def homotopy_system(F: ChainComplex, f) -> HomotopySystem:
    f = [F.ring.coerce(g) for g in f]
    return HomotopySystem(F, f, {i: compute_homotopy(F, g) for i, g in enumerate(f)})


def check_defining_identity(H: HomotopySystem) -> bool:
    F = H.base
    for i, f in enumerate(H.f):
        for p in range(F.lo, F.hi + 1):
            lhs = compose(F.diff(p + 1), H.sigma(i, p))
            if p > F.lo:
                lhs = lhs + compose(H.sigma(i, p - 1), F.diff(p))
            if not (lhs - _f_identity(F.term(p), f)).is_zero():
                return False
    return True


@dataclass
class RelationReport:
    """Outcome per pair (i, j), i <= j: 'exact', 'homotopic' or 'failed'."""

    status: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v != "failed" for v in self.status.values())


def _null_homotopy(F: ChainComplex, phi: dict, shift: int) -> dict:
    """α of homological degree +3 with ∂α + α∂ = φ (φ of degree +2, commuting with ∂)."""
    alpha = {}
    for p in range(F.lo, F.hi + 1):
        rhs = phi[p]
        if p > F.lo:
            rhs = rhs - compose(alpha[p - 1], F.diff(p))
        alpha[p] = lift(F.diff(p + 3), rhs)
    return alpha


def verify_homotopy_relations(H: HomotopySystem) -> RelationReport:
    """σ_i σ_j + σ_j σ_i and σ_i² are null-homotopic; certify with explicit α.

    These composites commute with ∂, so the certificate is a map α raising
    homological degree by 3 with ``∂α + α∂`` equal to the composite; it is
    re-checked exactly.
    """
    F = H.base
    rep = RelationReport()
    for i in range(H.c):
        for j in range(i, H.c):
            phi = {}
            shift = (H.f[i].degree() or 0) + (H.f[j].degree() or 0)
            for p in range(F.lo, F.hi + 1):
                a = compose(H.sigma(j, p + 1), H.sigma(i, p))
                if i != j:
                    a = a + compose(H.sigma(i, p + 1), H.sigma(j, p))
                phi[p] = a
            if all(x.is_zero() for x in phi.values()):
                rep.status[(i, j)] = "exact"
                continue
            try:
                alpha = _null_homotopy(F, phi, shift)
            except InconsistentSystem:
                rep.status[(i, j)] = "failed"
                continue
            good = True
            for p in range(F.lo, F.hi + 1):
                lhs = compose(F.diff(p + 3), alpha[p])
                if p > F.lo:
                    lhs = lhs + compose(alpha[p - 1], F.diff(p))
                if not (lhs - phi[p]).is_zero():
                    good = False
            rep.status[(i, j)] = "homotopic" if good else "failed"
            rep.certificates[(i, j)] = alpha
    return rep


def e_action_on_tor(H: HomotopySystem, use_homology: bool | None = None) -> EModule:
    """Tor(M, k) = H(F ⊗ k) with e_i acting through σ_i ⊗ k.

    Basis: generators of F_p for minimal F (or homology representatives),
    ordered by homological degree.  Keys are ``(p, internal degree)``; e_i
    raises the internal degree by ``deg f_i``.
    """
    F = H.base
    Fk = reduce_mod_m(F)
    p_ = F.ring.p
    if use_homology is None:
        use_homology = not F.is_minimal()
    ew = tuple(f.degree() or 0 for f in H.f)
    if not use_homology:
        keys, offs = [], {}
        for p in range(F.lo, F.hi + 1):
            offs[p] = len(keys)
            keys += [(p, d) for d in F.term(p).degrees]
        N = len(keys)
        ops = []
        for i in range(H.c):
            A = np.zeros((N, N), dtype=np.int64)
            for p in range(F.lo, F.hi):
                C = H.sigma(i, p).constant_part()
                r0, c0 = offs[p + 1], offs[p]
                A[r0:r0 + C.shape[0], c0:c0 + C.shape[1]] = C
            ops.append(A)
        return EModule(H.c, keys, ops, p_, ew)
    hom = {p: homology(Fk, p) for p in range(F.lo, F.hi + 1)}
    keys, offs = [], {}
    for p in range(F.lo, F.hi + 1):
        offs[p] = len(keys)
        keys += [(p, d) for d in hom[p].rep_degrees]
    N = len(keys)
    ops = []
    for i in range(H.c):
        A = np.zeros((N, N), dtype=np.int64)
        for p in range(F.lo, F.hi):
            if hom[p].total == 0 or hom[p + 1].total == 0:
                continue
            C = H.sigma(i, p).constant_part()
            img = linalg.matmul(C, hom[p].reps, p_)
            X = homology_coordinates(hom[p + 1], img, p_)
            A[offs[p + 1]:offs[p + 1] + X.shape[0], offs[p]:offs[p] + X.shape[1]] = X
        ops.append(A)
    return EModule(H.c, keys, ops, p_, ew)
