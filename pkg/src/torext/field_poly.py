"""Prime fields, standard-graded polynomial rings, graded free modules and maps.

Monomials are tuples of exponents.  A polynomial is a dict from monomials to
nonzero residues.  A :class:`GradedMap` stores, for every monomial that
occurs in some entry, the scalar coefficient matrix of that monomial; this
makes composition a sum of small matrix products and makes the degree-wise
linear algebra in :mod:`torext.degreewise` a sequence of Kronecker products.

Quotient rings ``S/I`` use the same classes: their elements are kept in
normal form with respect to a Groebner basis of ``I``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sympy import isprime

from .errors import HomogeneityError, ParseError, RingMismatch, ShapeError
from .linalg import matmul

Monomial = tuple  # tuple[int, ...] of exponents


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True if a divides b."""
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def grevlex_key(m: Monomial) -> tuple:
    """Sort key: larger key means larger monomial in grevlex."""
    return (sum(m), tuple(-e for e in reversed(m)))


@lru_cache(maxsize=None)
def monomials_of_degree(n: int, d: int) -> tuple:
    """All exponent vectors of length n and total degree d, grevlex descending."""
    if d < 0:
        return ()
    if n == 0:
        return ((),) if d == 0 else ()
    out = []
    for c in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in c:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=grevlex_key, reverse=True)
    return tuple(out)


@dataclass(frozen=True)
class FieldElement:
    """A residue modulo a prime."""

    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise RingMismatch("field elements over different primes")
            return other.value
        return int(other)

    def __add__(self, o):
        return FieldElement(self.value + self._coerce(o), self.p)

    __radd__ = __add__

    def __sub__(self, o):
        return FieldElement(self.value - self._coerce(o), self.p)

    def __rsub__(self, o):
        return FieldElement(self._coerce(o) - self.value, self.p)

    def __mul__(self, o):
        return FieldElement(self.value * self._coerce(o), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldElement(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, o):
        return self * FieldElement(self._coerce(o), self.p).inverse()

    def __int__(self):
        return self.value

    def __eq__(self, o):
        if isinstance(o, FieldElement):
            return self.p == o.p and self.value == o.value
        if isinstance(o, int):
            return self.value == o % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))


class PolyRing:
    """Standard-graded ``F_p[x_1..x_n]``, optionally modulo a homogeneous ideal.

    Use :meth:`quotient` to build ``S/I``; the quotient keeps a reduced
    Groebner basis of ``I`` (grevlex) and represents every element by its
    normal form.
    """

    def __init__(self, names, p: int = 101, _ideal=None, _ambient=None):
        if isinstance(names, int):
            names = [f"x{i + 1}" for i in range(names)]
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        if not isprime(p) or p <= 2:
            raise ValueError(f"characteristic must be a prime > 2, got {p}")
        self.p = int(p)
        self.n = len(self.names)
        self.ambient = _ambient if _ambient is not None else self
        self._gb = _ideal or ()  # reduced GB of the ideal, as term dicts
        self._lms = tuple(max(g, key=grevlex_key) for g in self._gb)
        self._monomial_ideal = all(len(g) == 1 for g in self._gb)
        self._nf_cache: dict = {}
        self._basis_cache: dict = {}
        self._mult_cache: dict = {}
        self._key = (self.p, self.names, tuple(tuple(sorted(g.items())) for g in self._gb))

    # construction -----------------------------------------------------------
    def quotient(self, ideal) -> "PolyRing":
        """The ring ``self/(ideal)``."""
        from .groebner import ideal_groebner

        base = self.ambient
        polys = [base.coerce(f) for f in ideal]
        for f in polys:
            if not f.is_homogeneous:
                raise HomogeneityError(f"non-homogeneous ideal generator {f}")
        gens = [dict(f.terms) for f in polys if f.terms] + [dict(g) for g in self._gb]
        gb = ideal_groebner(gens, self.p, self.n)
        if not gb:
            return base
        return PolyRing(self.names, self.p, _ideal=tuple(gb), _ambient=base)

    @property
    def is_quotient(self) -> bool:
        return bool(self._gb)

    @property
    def ideal_gb(self) -> tuple:
        return self._gb

    def ideal_generators(self) -> list:
        return [Polynomial(self.ambient, g) for g in self._gb]

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        s = f"F_{self.p}[{','.join(self.names)}]"
        if self._gb:
            s += "/(" + ",".join(str(g) for g in self.ideal_generators()) + ")"
        return s

    # elements -------------------------------------------------------------------
    def gens(self) -> list:
        return [self.var(i) for i in range(self.n)]

    def var(self, i: int) -> "Polynomial":
        e = [0] * self.n
        e[i] = 1
        return Polynomial(self, {tuple(e): 1})

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {(0,) * self.n: 1})

    def monomial(self, exps, coeff: int = 1) -> "Polynomial":
        return Polynomial(self, {tuple(exps): coeff})

    def coerce(self, x) -> "Polynomial":
        if isinstance(x, Polynomial):
            if x.ring == self:
                return x
            if x.ring.names == self.names and x.ring.p == self.p:
                return Polynomial(self, x.terms)
            raise RingMismatch(f"cannot coerce element of {x.ring} into {self}")
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, (int, np.integer, FieldElement)):
            return Polynomial(self, {(0,) * self.n: int(x)})
        raise TypeError(f"cannot coerce {type(x).__name__} to a polynomial")

    def parse(self, text: str) -> "Polynomial":
        return _PolyParser(self, text).parse()

    # normal forms and graded pieces -------------------------------------------
    def nf_monomial(self, m: Monomial) -> dict:
        """Normal form of a monomial as a term dict (``{m: 1}`` in S)."""
        if not self._gb:
            return {m: 1}
        hit = self._nf_cache.get(m)
        if hit is not None:
            return hit
        if self._monomial_ideal:
            out = {} if any(mono_divides(l, m) for l in self._lms) else {m: 1}
        else:
            from .groebner import reduce_terms

            out = reduce_terms({m: 1}, self._gb, self._lms, self.p)
        self._nf_cache[m] = out
        return out

    def normalize(self, terms: dict) -> dict:
        p = self.p
        if not self._gb:
            return {m: c % p for m, c in terms.items() if c % p}
        out: dict = {}
        for m, c in terms.items():
            c %= p
            if not c:
                continue
            for m2, c2 in self.nf_monomial(m).items():
                v = (out.get(m2, 0) + c * c2) % p
                if v:
                    out[m2] = v
                else:
                    out.pop(m2, None)
        return out

    def basis(self, d: int) -> tuple:
        """Standard monomials of degree d (a basis of the degree-d piece)."""
        hit = self._basis_cache.get(d)
        if hit is None:
            mons = monomials_of_degree(self.n, d)
            if self._gb:
                mons = tuple(m for m in mons if not any(mono_divides(l, m) for l in self._lms))
            hit = (mons, {m: i for i, m in enumerate(mons)})
            self._basis_cache[d] = hit
        return hit[0]

    def basis_index(self, d: int) -> dict:
        self.basis(d)
        return self._basis_cache[d][1]

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def mult_matrix(self, m: Monomial, s: int) -> np.ndarray:
        """Matrix of multiplication by monomial m from degree s to s + |m|."""
        key = (m, s)
        hit = self._mult_cache.get(key)
        if hit is not None:
            return hit
        src = self.basis(s)
        t = s + sum(m)
        idx = self.basis_index(t)
        M = np.zeros((len(idx), len(src)), dtype=np.int64)
        for j, b in enumerate(src):
            for m2, c in self.nf_monomial(mono_mul(m, b)).items():
                M[idx[m2], j] = c
        M.flags.writeable = False
        self._mult_cache[key] = M
        return M

    def is_artinian(self) -> bool:
        """Whether the ring is finite dimensional over the field."""
        return all(
            any(all(e == 0 for k, e in enumerate(l) if k != i) for l in self._lms)
            for i in range(self.n)
        )

    def top_degree(self) -> int:
        """Largest degree with a nonzero piece (Artinian rings only)."""
        if not self.is_artinian():
            raise ValueError("ring is not Artinian")
        d = 0
        while self.dim(d + 1):
            d += 1
        return d

    def hilbert_function(self, upto: int) -> list:
        return [self.dim(d) for d in range(upto + 1)]


class Polynomial:
    """Polynomial with coefficients in ``[0, p)``; immutable."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms=None):
        self.ring = ring
        self.terms = ring.normalize(dict(terms or {}))
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms):
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        obj._hash = None
        return obj

    # predicates ---------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    @property
    def homogeneous(self) -> bool:
        return self.is_homogeneous

    def degree(self):
        """Total degree, or None for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=None)

    def coefficient(self, m) -> int:
        return self.terms.get(tuple(m), 0)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.ring.n, 0)

    def leading_monomial(self):
        return max(self.terms, key=grevlex_key) if self.terms else None

    def monomials(self) -> list:
        return sorted(self.terms, key=grevlex_key, reverse=True)

    # arithmetic -----------------------------------------------------------------
    def _check(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        return self.ring.coerce(other)

    def __add__(self, other):
        other = self._check(other)
        p = self.ring.p
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = (out.get(m, 0) + c) % p
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial._raw(self.ring, {m: p - c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, np.integer, FieldElement)):
            c0 = int(other) % self.ring.p
            if not c0:
                return self.ring.zero()
            return Polynomial._raw(self.ring, {m: c * c0 % self.ring.p for m, c in self.terms.items()})
        other = self._check(other)
        acc: dict = {}
        p = self.ring.p
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                acc[m] = (acc.get(m, 0) + c1 * c2) % p
        return Polynomial(self.ring, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = self.ring.coerce(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in self.monomials():
            c = self.terms[m]
            mon = "*".join(
                (v if e == 1 else f"{v}^{e}") for v, e in zip(self.ring.names, m) if e
            )
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append(mon)
            else:
                parts.append(f"{c}*{mon}")
        return "+".join(parts)


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring} vs {b.ring}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


class _PolyParser:
    """Recursive descent for sums of products of powers, with parentheses."""

    def __init__(self, ring: PolyRing, text: str):
        self.ring = ring
        self.text = text
        self.pos = 0

    def parse(self) -> Polynomial:
        if not self.text.strip():
            raise ParseError("empty polynomial", 0)
        out = self._expr()
        self._ws()
        if self.pos != len(self.text):
            raise ParseError(f"unexpected {self.text[self.pos]!r}", self.pos)
        return out

    def _ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self):
        self._ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expr(self):
        sign = 1
        if self._peek() in "+-":
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        acc = self._term() * sign
        while self._peek() in ("+", "-") and self._peek():
            s = self.text[self.pos]
            self.pos += 1
            t = self._term()
            acc = acc + t if s == "+" else acc - t
        return acc

    def _term(self):
        acc = self._power()
        while self._peek() == "*":
            self.pos += 1
            acc = acc * self._power()
        return acc

    def _power(self):
        base = self._atom()
        if self._peek() == "^":
            self.pos += 1
            self._ws()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if start == self.pos:
                raise ParseError("expected exponent", start)
            base = base ** int(self.text[start:self.pos])
        return base

    def _atom(self):
        c = self._peek()
        start = self.pos
        if c == "(":
            self.pos += 1
            inner = self._expr()
            if self._peek() != ")":
                raise ParseError("expected ')'", self.pos)
            self.pos += 1
            return inner
        if c.isdigit():
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            return self.ring.coerce(int(self.text[start:self.pos]))
        if c.isalpha() or c == "_":
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.pos += 1
            name = self.text[start:self.pos]
            if name not in self.ring.names:
                raise ParseError(f"unknown variable {name!r}", start)
            return self.ring.var(self.ring.names.index(name))
        raise ParseError(f"unexpected {c!r}" if c else "unexpected end of input", self.pos)


# ---------------------------------------------------------------------------
# graded free modules and maps


class GradedFreeModule:
    """Free module ``⊕ ring(-a_j)`` given by generator degrees ``a_j``.

    ``twists`` follows the usual convention ``ring(t)``: twist = -degree.
    """

    __slots__ = ("ring", "degrees")

    def __init__(self, ring: PolyRing, degrees=()):
        self.ring = ring
        self.degrees = tuple(int(d) for d in degrees)

    @classmethod
    def from_twists(cls, ring, twists):
        return cls(ring, [-t for t in twists])

    @property
    def rank(self) -> int:
        return len(self.degrees)

    @property
    def twists(self) -> tuple:
        return tuple(-d for d in self.degrees)

    def __len__(self):
        return len(self.degrees)

    def __eq__(self, other):
        return isinstance(other, GradedFreeModule) and self.ring == other.ring and self.degrees == other.degrees

    def __hash__(self):
        return hash((self.ring, self.degrees))

    def __add__(self, other: "GradedFreeModule") -> "GradedFreeModule":
        if self.ring != other.ring:
            raise RingMismatch("direct sum over different rings")
        return GradedFreeModule(self.ring, self.degrees + other.degrees)

    def shift(self, k: int) -> "GradedFreeModule":
        """Generators moved up by k in degree."""
        return GradedFreeModule(self.ring, [d + k for d in self.degrees])

    def over(self, ring: PolyRing) -> "GradedFreeModule":
        return GradedFreeModule(ring, self.degrees)

    def __repr__(self):
        if not self.degrees:
            return "0"
        from collections import Counter

        parts = [f"R({-d})^{k}" if k > 1 else f"R({-d})" for d, k in sorted(Counter(self.degrees).items())]
        return " + ".join(parts)


class GradedMap:
    """Homogeneous matrix of polynomials between graded free modules.

    Entry (i, j) is homogeneous of degree
    ``target.twists[i] - source.twists[j] + degree_shift``, that is
    ``source.degrees[j] + degree_shift - target.degrees[i]``.
    Internally ``coeffs[m]`` is the int64 matrix of coefficients of monomial m.
    """

    __slots__ = ("source", "target", "degree_shift", "coeffs")

    def __init__(self, source, target, coeffs=None, degree_shift: int = 0, check: bool = True):
        if source.ring != target.ring:
            raise RingMismatch("source and target over different rings")
        self.source = source
        self.target = target
        self.degree_shift = int(degree_shift)
        ring = source.ring
        shape = (target.rank, source.rank)
        out = {}
        for m, A in (coeffs or {}).items():
            A = np.remainder(np.asarray(A, dtype=np.int64), ring.p)
            if A.shape != shape:
                raise ShapeError(f"coefficient block {A.shape} != {shape}")
            if A.any():
                out[tuple(m)] = A
        if ring.is_quotient and any(ring.nf_monomial(m) != {m: 1} for m in out):
            out = _reduce_coeffs(ring, out, shape)
        self.coeffs = out
        if check:
            self._check_homogeneous()

    def _check_homogeneous(self):
        sd = np.array(self.source.degrees, dtype=np.int64)
        td = np.array(self.target.degrees, dtype=np.int64)
        need = sd[None, :] + self.degree_shift - td[:, None]
        for m, A in self.coeffs.items():
            bad = (A != 0) & (need != sum(m))
            if bad.any():
                i, j = map(int, np.argwhere(bad)[0])
                raise HomogeneityError(
                    f"entry ({i},{j}) has a term of degree {sum(m)}, expected {int(need[i, j])}"
                )

    # constructors -------------------------------------------------------------
    @classmethod
    def from_entries(cls, source, target, entries, degree_shift: int | None = None):
        """Build from a row-major nested list of polynomials (or ints/strings)."""
        ring = source.ring
        rows, cols = target.rank, source.rank
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise ShapeError(f"expected a {rows}x{cols} matrix")
        coeffs: dict = {}
        shift = degree_shift
        for i, row in enumerate(entries):
            for j, e in enumerate(row):
                e = ring.coerce(e)
                if not e.is_homogeneous:
                    raise HomogeneityError(f"entry ({i},{j}) = {e} is not homogeneous")
                if e.terms and shift is None:
                    shift = e.degree() + target.degrees[i] - source.degrees[j]
                for m, c in e.terms.items():
                    coeffs.setdefault(m, np.zeros((rows, cols), dtype=np.int64))[i, j] = c
        return cls(source, target, coeffs, shift or 0)

    @classmethod
    def zero(cls, source, target, degree_shift: int = 0):
        return cls(source, target, {}, degree_shift)

    @classmethod
    def identity(cls, F: GradedFreeModule):
        return cls.scalar(F, F, np.eye(F.rank, dtype=np.int64))

    @classmethod
    def scalar(cls, source, target, A, degree_shift: int = 0):
        """Constant matrix A (entries of degree 0 only where degrees match)."""
        n = source.ring.n
        return cls(source, target, {(0,) * n: A}, degree_shift)

    # basic access -------------------------------------------------------------
    @property
    def ring(self) -> PolyRing:
        return self.source.ring

    @property
    def shape(self) -> tuple:
        return (self.target.rank, self.source.rank)

    def entry(self, i: int, j: int) -> Polynomial:
        return Polynomial._raw(
            self.ring, {m: int(A[i, j]) for m, A in self.coeffs.items() if A[i, j]}
        )

    def entries(self) -> list:
        return [[self.entry(i, j) for j in range(self.shape[1])] for i in range(self.shape[0])]

    def columns(self) -> list:
        """Sparse column-major view: per column, a list of (row, monomial, coeff)."""
        cols = [[] for _ in range(self.shape[1])]
        for m in sorted(self.coeffs, key=grevlex_key, reverse=True):
            A = self.coeffs[m]
            for i, j in zip(*np.nonzero(A)):
                cols[int(j)].append((int(i), m, int(A[i, j])))
        for c in cols:
            c.sort(key=lambda t: (t[0], grevlex_key(t[1])), reverse=False)
        return cols

    def constant_part(self) -> np.ndarray:
        z = (0,) * self.ring.n
        A = self.coeffs.get(z)
        return A.copy() if A is not None else np.zeros(self.shape, dtype=np.int64)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_minimal(self) -> bool:
        return is_minimal(self)

    def max_entry_degree(self) -> int:
        return max((sum(m) for m in self.coeffs), default=-1)

    # algebra ----------------------------------------------------------------------
    def _compatible(self, other: "GradedMap"):
        if self.source != other.source or self.target != other.target:
            raise ShapeError("maps have different source/target")
        if self.degree_shift != other.degree_shift and self.coeffs and other.coeffs:
            raise ShapeError("maps have different degree shifts")

    def __add__(self, other: "GradedMap") -> "GradedMap":
        self._compatible(other)
        out = {m: A.copy() for m, A in self.coeffs.items()}
        for m, B in other.coeffs.items():
            out[m] = out[m] + B if m in out else B
        shift = self.degree_shift if self.coeffs else other.degree_shift
        return GradedMap(self.source, self.target, out, shift, check=False)

    def __neg__(self):
        return GradedMap(self.source, self.target, {m: -A for m, A in self.coeffs.items()}, self.degree_shift, check=False)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, (int, np.integer)):
            return GradedMap(self.source, self.target, {m: A * int(c) for m, A in self.coeffs.items()}, self.degree_shift, check=False)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        return compose(self, other)

    def times_poly(self, f: Polynomial) -> "GradedMap":
        """Multiply every entry by the homogeneous polynomial f."""
        f = self.ring.coerce(f)
        if f.is_zero():
            return GradedMap.zero(self.source, self.target, self.degree_shift)
        if not f.is_homogeneous:
            raise HomogeneityError("scaling by a non-homogeneous polynomial")
        out: dict = {}
        for m, A in self.coeffs.items():
            for mf, c in f.terms.items():
                k = mono_mul(m, mf)
                out[k] = out[k] + c * A if k in out else c * A
        return GradedMap(self.source, self.target, out, self.degree_shift + f.degree(), check=False)

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def submatrix(self, rows=None, cols=None) -> "GradedMap":
        rows = list(range(self.shape[0])) if rows is None else list(rows)
        cols = list(range(self.shape[1])) if cols is None else list(cols)
        src = GradedFreeModule(self.ring, [self.source.degrees[j] for j in cols])
        tgt = GradedFreeModule(self.ring, [self.target.degrees[i] for i in rows])
        out = {m: A[np.ix_(rows, cols)] for m, A in self.coeffs.items()}
        return GradedMap(src, tgt, out, self.degree_shift, check=False)

    def with_modules(self, source=None, target=None, degree_shift=None) -> "GradedMap":
        """Same coefficients, relabelled source/target (re-checks homogeneity)."""
        return GradedMap(
            source or self.source,
            target or self.target,
            self.coeffs,
            self.degree_shift if degree_shift is None else degree_shift,
        )

    def over(self, ring: PolyRing) -> "GradedMap":
        """Reinterpret over another ring with the same variables (reduces or lifts)."""
        return GradedMap(self.source.over(ring), self.target.over(ring), self.coeffs, self.degree_shift, check=False)

    def transpose_scalar(self) -> np.ndarray:
        return self.constant_part().T

    def __repr__(self):
        return f"GradedMap({self.target!r} <- {self.source!r}, shift={self.degree_shift})"

    def __str__(self):
        ents = self.entries()
        if not ents or not ents[0]:
            return f"<{self.shape[0]}x{self.shape[1]} zero map>"
        cells = [[str(e) for e in row] for row in ents]
        w = max(len(c) for row in cells for c in row)
        return "\n".join("| " + "  ".join(c.rjust(w) for c in row) + " |" for row in cells)


def _reduce_coeffs(ring: PolyRing, coeffs: dict, shape) -> dict:
    out: dict = {}
    for m, A in coeffs.items():
        for m2, c in ring.nf_monomial(m).items():
            out[m2] = out[m2] + c * A if m2 in out else c * A
    res = {}
    for m, A in out.items():
        A = np.remainder(A, ring.p)
        if A.any():
            res[m] = A
    return res


def compose(f: GradedMap, g: GradedMap) -> GradedMap:
    """f ∘ g."""
    if f.ring != g.ring:
        raise RingMismatch("composition over different rings")
    if g.target != f.source:
        raise ShapeError(f"cannot compose: {g.target!r} is not {f.source!r}")
    p = f.ring.p
    out: dict = {}
    for m1, A in f.coeffs.items():
        for m2, B in g.coeffs.items():
            C = matmul(A, B, p)
            if not C.any():
                continue
            m = mono_mul(m1, m2)
            out[m] = out[m] + C if m in out else C
    return GradedMap(g.source, f.target, out, f.degree_shift + g.degree_shift, check=False)


def invert_unit_block(U: GradedMap) -> GradedMap:
    """Two-sided inverse of a square map whose constant part is invertible.

    Write ``U = U0 + N`` with U0 the constant part.  Entries of N raise
    degree, so ``X = U0^{-1} N`` is nilpotent and
    ``U^{-1} = sum_k (-X)^k U0^{-1}`` is a finite sum.
    """
    from .linalg import inverse

    p = U.ring.p
    U0inv = GradedMap.scalar(U.target, U.source, inverse(U.constant_part(), p), -U.degree_shift)
    zero = (0,) * U.ring.n
    N = GradedMap(U.source, U.target, {m: A for m, A in U.coeffs.items() if m != zero},
                  U.degree_shift, check=False)
    if N.is_zero():
        return U0inv
    X = compose(U0inv, N)
    total = U0inv
    term = U0inv
    for _ in range(U.source.rank + 1):
        term = -compose(X, term)
        if term.is_zero():
            return total
        total = total + term
    raise ValueError("unit block is not invertible")


def is_minimal(f: GradedMap) -> bool:
    """True iff no entry has a nonzero constant term."""
    return (0,) * f.ring.n not in f.coeffs


def block_map(blocks, sources, targets, degree_shift: int = 0) -> GradedMap:
    """Assemble a map from a grid of blocks (None = zero).

    ``blocks[a][b]`` maps ``sources[b]`` to ``targets[a]``.
    """
    ring = sources[0].ring if sources else targets[0].ring
    src = GradedFreeModule(ring, [d for s in sources for d in s.degrees])
    tgt = GradedFreeModule(ring, [d for t in targets for d in t.degrees])
    roff = np.cumsum([0] + [t.rank for t in targets])
    coff = np.cumsum([0] + [s.rank for s in sources])
    out: dict = {}
    for a, row in enumerate(blocks):
        for b, blk in enumerate(row):
            if blk is None or blk.is_zero():
                continue
            if blk.source.degrees != sources[b].degrees or blk.target.degrees != targets[a].degrees:
                raise ShapeError(f"block ({a},{b}) has the wrong source/target")
            for m, A in blk.coeffs.items():
                if m not in out:
                    out[m] = np.zeros((tgt.rank, src.rank), dtype=np.int64)
                out[m][roff[a]:roff[a + 1], coff[b]:coff[b + 1]] += A
    return GradedMap(src, tgt, out, degree_shift)


def direct_sum(maps) -> GradedMap:
    maps = list(maps)
    grid = [[f if i == j else None for j, f in enumerate(maps)] for i in range(len(maps))]
    shift = next((f.degree_shift for f in maps if not f.is_zero()), 0)
    return block_map(grid, [f.source for f in maps], [f.target for f in maps], shift)


def tensor_maps(A: GradedMap, B: GradedMap) -> GradedMap:
    """Kronecker product of maps: basis of A.source ⊗ B.source is (a, b) a-major."""
    ring = A.ring
    src = GradedFreeModule(ring, [x + y for x in A.source.degrees for y in B.source.degrees])
    tgt = GradedFreeModule(ring, [x + y for x in A.target.degrees for y in B.target.degrees])
    out: dict = {}
    for m1, X in A.coeffs.items():
        for m2, Y in B.coeffs.items():
            m = mono_mul(m1, m2)
            K = np.kron(X, Y)
            out[m] = out[m] + K if m in out else K
    return GradedMap(src, tgt, out, A.degree_shift + B.degree_shift)


def random_homogeneous(ring: PolyRing, d: int, rng, density: float = 1.0) -> Polynomial:
    """Random homogeneous polynomial of degree d (standard monomials only)."""
    terms = {}
    for m in ring.basis(d):
        if rng.random() < density:
            terms[m] = int(rng.integers(0, ring.p))
    return Polynomial(ring, terms)


def random_map(source, target, degree_shift, rng, density: float = 0.7) -> GradedMap:
    ring = source.ring
    ents = [
        [random_homogeneous(ring, source.degrees[j] + degree_shift - target.degrees[i], rng, density)
         if source.degrees[j] + degree_shift - target.degrees[i] >= 0 else ring.zero()
         for j in range(source.rank)]
        for i in range(target.rank)
    ]
    return GradedMap.from_entries(source, target, ents, degree_shift)
