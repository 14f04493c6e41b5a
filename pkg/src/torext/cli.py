"""Command-line interface: ``torext {resolve,tor,ext,gk,verify-paper}``.

Input can come from flags or from a file of ``;``-terminated statements::

    ring p=101 vars=x1,x2,x3;
    f=x1^3,x2^3,x3^3;
    module=syzk:2;
    length=11;

Module kinds: ``syzk:i`` (i-th syzygy of k), ``coker:[[..],[..]]`` (rows of
a matrix with generators in degree 0), ``cyclic:g1,g2,..`` (ring modulo an
ideal), ``free:r`` and ``syz:j:<kind>`` (j-th syzygy of another module).

Exit codes: 0 success, 1 failed verification, 2 usage or parse error,
3 mathematical precondition, 4 internal invariant breach.
"""

from __future__ import annotations

import os

_threads = os.environ.get("TOREXT_THREADS")
if _threads and _threads.isdigit():
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMBA_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

import argparse  # noqa: E402
import json  # noqa: E402
import re  # noqa: E402
import sys  # noqa: E402
from dataclasses import dataclass  # noqa: E402

import numpy as np  # noqa: E402

from .errors import InvariantBreach, MathPreconditionError, NotRegularSequence, ParseError  # noqa: E402
from .field_poly import GradedFreeModule, GradedMap, PolyRing  # noqa: E402
from .resolution import ModulePresentation, betti, resolve, syzygy_module  # noqa: E402

DEFAULT_RING = "p=101 vars=x1..x3"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# parsing


@dataclass
class JobSpec:
    ring: PolyRing  # ambient S
    f: list  # regular sequence, possibly empty
    module: str
    length: int | None = None

    @property
    def c(self) -> int:
        return len(self.f)

    @property
    def base(self) -> PolyRing:
        return self.ring.quotient(self.f) if self.f else self.ring


def _expand_names(tokens) -> list:
    out = []
    for tok in tokens:
        m = re.fullmatch(r"([A-Za-z_]+)(\d+)\.\.(?:[A-Za-z_]+)?(\d+)", tok)
        if m:
            a, b = int(m.group(2)), int(m.group(3))
            if b < a:
                raise ParseError(f"empty variable range {tok!r}")
            out += [f"{m.group(1)}{k}" for k in range(a, b + 1)]
        elif re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", tok):
            out.append(tok)
        else:
            raise ParseError(f"bad variable name {tok!r}")
    return out


def parse_ring(text: str) -> PolyRing:
    """``p=101 vars=x1,x2,x3`` or ``p=101,x1..x3`` (a leading ``ring`` is optional)."""
    t = text.strip().rstrip(";")
    t = re.sub(r"^ring\b", "", t).strip()
    m = re.search(r"p\s*=\s*(\d+)", t)
    if not m:
        raise ParseError("ring declaration needs p=<prime>", 0)
    p = int(m.group(1))
    rest = (t[:m.start()] + " " + t[m.end():]).replace("vars", " ").replace("=", " ")
    names = _expand_names([x for x in re.split(r"[,\s]+", rest) if x])
    if not names:
        raise ParseError("ring declaration has no variables", len(text))
    try:
        return PolyRing(names, p)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _split_top(text: str, sep: str = ",") -> list:
    """Split on ``sep`` outside brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out if s.strip()]


def parse_polys(ring: PolyRing, text: str) -> list:
    return [ring.parse(s) for s in _split_top(text)]


def parse_matrix(ring: PolyRing, text: str) -> list:
    t = text.strip()
    if not (t.startswith("[") and t.endswith("]")):
        raise ParseError("matrix must look like [[a,b],[c,d]]", 0)
    rows = _split_top(t[1:-1])
    out = []
    for r in rows:
        if not (r.startswith("[") and r.endswith("]")):
            raise ParseError(f"bad matrix row {r!r}")
        out.append(parse_polys(ring, r[1:-1]))
    if not out or len({len(r) for r in out}) != 1:
        raise ParseError("matrix rows have different lengths")
    return out


def build_module(R: PolyRing, text: str) -> ModulePresentation:
    kind, _, arg = text.strip().partition(":")
    if kind == "syzk":
        return syzygy_module(ModulePresentation.residue_field(R), _int(arg, "syzk"))
    if kind == "syz":
        j, _, inner = arg.partition(":")
        return syzygy_module(build_module(R, inner), _int(j, "syz"))
    if kind == "free":
        return ModulePresentation.free(GradedFreeModule(R, [0] * _int(arg or "1", "free")))
    if kind == "cyclic":
        return ModulePresentation.cyclic(R, parse_polys(R, arg))
    if kind == "coker":
        ent = parse_matrix(R, arg)
        F0 = GradedFreeModule(R, [0] * len(ent))
        degs = []
        for j in range(len(ent[0])):
            col = [e for e in (row[j] for row in ent) if not e.is_zero()]
            degs.append(col[0].degree() if col else 0)
        F1 = GradedFreeModule(R, degs)
        return ModulePresentation(R, GradedMap.from_entries(F1, F0, [[R.coerce(e) for e in r] for r in ent], 0))
    raise ParseError(f"unknown module kind {kind!r}")


def _int(s: str, what: str) -> int:
    try:
        v = int(s)
    except ValueError as exc:
        raise ParseError(f"{what} needs an integer, got {s!r}") from exc
    if v < 0:
        raise ParseError(f"{what} needs a non-negative integer")
    return v


def parse_file(text: str) -> dict:
    out: dict = {}
    for stmt in _split_top(text.replace("\n", " "), ";"):
        if stmt.startswith("ring"):
            out["ring"] = stmt
            continue
        key, eq, val = stmt.partition("=")
        if not eq:
            raise ParseError(f"expected key=value, got {stmt!r}")
        out[key.strip()] = val.strip()
    return out


def check_regular_sequence(S: PolyRing, f: list):
    """Compare the Hilbert function of S/(f) with that of a complete intersection.

    Equality in every degree up to ``sum(d_i) + max GB degree + n`` is
    taken as the test; a strict excess means f is not regular.
    """
    if not f:
        return
    for g in f:
        if g.is_zero() or not g.is_homogeneous or g.degree() == 0:
            raise NotRegularSequence(f"{g} is not a homogeneous form of positive degree")
    if len(f) > S.n:
        raise NotRegularSequence("more elements than variables")
    R = S.quotient(f)
    gbdeg = max((max(sum(m) for m in g) for g in R.ideal_gb), default=0)
    top = sum(g.degree() for g in f) + gbdeg + S.n
    # coefficients of prod(1 - t^d) / (1 - t)^n
    series = np.zeros(top + 1, dtype=object)
    series[0] = 1
    for g in f:
        d = g.degree()
        series[d:] = series[d:] - series[:top + 1 - d].copy()
    for _ in range(S.n):
        series = np.cumsum(series)
    for d in range(top + 1):
        if len(R.basis(d)) != series[d]:
            raise NotRegularSequence(f"Hilbert function of S/(f) differs in degree {d}")


def make_spec(args) -> JobSpec:
    fdata = {}
    if getattr(args, "input", None):
        try:
            with open(args.input, encoding="utf-8") as fh:
                fdata = parse_file(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc}") from exc
    ring_text = args.ring or fdata.get("ring") or DEFAULT_RING
    S = parse_ring(ring_text)
    if args.ring_only_S:
        f = []
    elif args.f is not None:
        f = parse_polys(S, args.f)
    elif "f" in fdata:
        f = parse_polys(S, fdata["f"])
    else:
        f = [x ** 3 for x in S.gens()]
    module = args.module or fdata.get("module")
    if not module:
        raise UsageError("no module given (use --module or module=... in the input file)")
    length = args.length
    if length is None and "length" in fdata:
        length = _int(fdata["length"], "length")
    check_regular_sequence(S, f)
    return JobSpec(S, f, module, length)


# ---------------------------------------------------------------------------
# commands


def _module(spec: JobSpec) -> ModulePresentation:
    return build_module(spec.base, spec.module)


def _matrix_json(A) -> dict:
    A = np.asarray(A)
    nz = np.nonzero(A)
    return {"shape": list(A.shape), "entries": [[int(i), int(j), int(A[i, j])] for i, j in zip(*nz)]}


def _dims_json(d: dict) -> dict:
    return {str(k): int(v) for k, v in sorted(d.items())}


def cmd_resolve(spec: JobSpec, as_json: bool) -> tuple:
    M = _module(spec)
    L = spec.length if spec.length is not None else (2 * spec.c + 4 if spec.f else spec.ring.n + 1)
    B = betti(resolve(M, L))
    data = {"ring": "R" if spec.f else "S", "length": L, "betti": B.to_json()}
    text = B.render()
    return data, text


def cmd_tor(spec: JobSpec, as_json: bool) -> tuple:
    from .emodule import e_free_resolution
    from .tor_emodule import submodule_T_prime, tor_emodule

    if not spec.f:
        raise UsageError("tor needs a regular sequence f")
    M = _module(spec)
    T = tor_emodule(M, spec.f)
    L = spec.length if spec.length is not None else 5
    B = e_free_resolution(T, L).betti()
    sp = submodule_T_prime(T)
    data = {
        "dims": _dims_json(T.dims()),
        "operators": [_matrix_json(A) for A in T.ops],
        "Tprime_dims": _dims_json(sp.T_prime.dims()),
        "Tdoubleprime_dims": _dims_json(sp.T_double_prime.dims()),
        "betti_strands": {str(s): B.row(s, L + 1) for s in B.slopes()},
        "betti": B.to_json(),
    }
    text = "\n".join([
        B.render(), "",
        f"Tor dims: {data['dims']}",
        f"T' dims: {data['Tprime_dims']}",
        f"T'' dims: {data['Tdoubleprime_dims']}",
    ])
    return data, text


def _poly_matrix(phi) -> list:
    return [[str(e) for e in row] for row in phi.entries()]


def cmd_ext(spec: JobSpec, as_json: bool) -> tuple:
    from .ext_rmodule import ext_rmodule, presentation_structure, r_free_resolution, r_presentation
    from .tor_emodule import infer_hmf_ranks

    if not spec.f:
        raise UsageError("ext needs a regular sequence f")
    M = _module(spec)
    L = spec.length if spec.length is not None else 2 * spec.c + 4
    Rres = resolve(M, L)
    ranks = infer_hmf_ranks(betti(Rres), spec.c)
    X = ext_rmodule(Rres, f=spec.f)
    data = {"hmf_ranks": {"b0": ranks.b0, "b1": ranks.b1}}
    lines = [f"ranks b0={ranks.b0} b1={ranks.b1}"]
    for name, par in (("even", 0), ("odd", 1)):
        U = X.part(par)
        _, B = r_free_resolution(U)
        P = r_presentation(U)
        rep = presentation_structure(P, U.window)
        reg = max((j - i for (i, j) in B.data), default=0) + U.shift
        data[name] = {
            "dims": _dims_json(U.dims()),
            "betti": B.to_json(),
            "regularity": reg,
            "presentation": _poly_matrix(P.presentation),
            "structure": {
                "free_rank": rep.free_rank,
                "linear": rep.linear,
                "skew_block": rep.skew_equivalent,
                "nonfree_hilbert": _dims_json(rep.nonfree_hilbert),
            },
        }
        lines += ["", f"Ext^{name}: regularity {reg}", B.render(), "presentation:"]
        lines += ["  [" + ", ".join(r) + "]" for r in data[name]["presentation"]]
        lines.append(f"free rank {rep.free_rank}; non-free Hilbert function {list(rep.nonfree_hilbert.values())}")
    return data, "\n".join(lines)


def cmd_gk(spec: JobSpec, as_json: bool, degree_window: int = 16) -> tuple:
    from .ci_ops import build_gk, check_gk, gk_block_json, higher_ci, lift_resolution, minimize_gk

    if not spec.f:
        raise UsageError("gk needs a regular sequence f")
    M = _module(spec)
    L = spec.length if spec.length is not None else 8
    Rres = resolve(M, L)
    Lr = lift_resolution(Rres, f=spec.f)
    H = higher_ci(Lr, L)
    gk = build_gk(Lr, H, L)
    MS = M.over_ambient()
    upto = max(gk.complex.hi - 2, 0)
    rep = check_gk(gk, MS, upto, degree_window)
    Bdir = betti(resolve(MS, MS.ring.n + 1))
    if not rep.d_squared_zero:
        raise InvariantBreach("the GK differential does not square to zero")
    Bmin = betti(minimize_gk(gk))
    data = {
        "blocks": gk_block_json(gk),
        "ranks": {str(k): v for k, v in sorted(gk.complex.ranks().items())},
        "d_squared_zero": bool(rep.d_squared_zero),
        "h0_matches": bool(rep.h0_matches),
        "exact_through": rep.exact_through,
        "checked_through": upto,
        "minimized_betti": Bmin.to_json(),
        "direct_betti": Bdir.to_json(),
        "minimized_matches_direct": Bmin == Bdir,
    }
    acyclic = rep.d_squared_zero and rep.h0_matches and rep.exact_through == upto
    text = "\n".join([
        f"GK ranks: {list(gk.complex.ranks().values())}",
        f"d^2 = 0: {rep.d_squared_zero}; H_0 = M: {rep.h0_matches}; exact through {rep.exact_through} of {upto}",
        f"acyclic on the window: {acyclic}",
        "minimized Betti table:", Bmin.render(),
        f"equals the direct S-resolution: {Bmin == Bdir}",
    ])
    return data, text


def cmd_verify(args) -> tuple:
    from . import acceptance

    if args.only:
        try:
            nums = [int(x) for x in args.only.split(",") if x.strip()]
        except ValueError as exc:
            raise UsageError(f"bad criterion list {args.only!r}") from exc
        bad = [n for n in nums if n not in acceptance.CRITERIA]
        if bad:
            raise UsageError(f"unknown criterion id(s): {bad}")
    else:
        nums = [n for n in sorted(acceptance.CRITERIA) if not (args.skip_slow and n in acceptance.SLOW)]
    acceptance.MUTATE_SIGN = bool(args.mutate_sign)
    try:
        outs = acceptance.run(nums)
    finally:
        acceptance.MUTATE_SIGN = False
    data = {
        "criteria": [{"number": o.number, "passed": bool(o.passed), "detail": o.detail} for o in outs],
        "passed": all(o.passed for o in outs),
    }
    text = "\n".join(f"criterion {o.number}: {'PASS' if o.passed else 'FAIL'}" for o in outs)
    return data, text


# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torext", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def job(name, helptext):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--input", help="file with ring/f/module statements")
        sp.add_argument("--ring", help=f"ring declaration (default {DEFAULT_RING!r})")
        sp.add_argument("--f", help="comma-separated regular sequence (default: cubes of the variables)")
        sp.add_argument("--ring-only-S", dest="ring_only_S", action="store_true",
                        help="work over the polynomial ring itself, ignoring f")
        sp.add_argument("--module", help="module spec, e.g. syzk:2 or coker:[[a,b],[b,a]]")
        sp.add_argument("--length", type=int, help="homological length")
        sp.add_argument("--json", action="store_true", help="JSON on stdout")
        return sp

    job("resolve", "minimal free resolution and Betti table")
    job("tor", "E-module structure on Tor^S(M,k)")
    job("ext", "Ext_R(M,k) over the ring of CI operators")
    g = job("gk", "complex built from higher CI operators")
    g.add_argument("--degree-window", type=int, default=16, help="top internal degree for homology checks")
    v = sub.add_parser("verify-paper", help="run the acceptance criteria")
    v.add_argument("--only", help="comma-separated criterion numbers")
    v.add_argument("--skip-slow", action="store_true", help="leave out the stretch criterion")
    v.add_argument("--mutate-sign", action="store_true", help="negative control: corrupt the GK sign convention")
    v.add_argument("--json", action="store_true", help="JSON on stdout")
    return ap


def _emit(data, text, as_json: bool):
    if as_json:
        print(json.dumps(data, sort_keys=True, default=_jsonable))
    else:
        print(text)


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        if args.command == "verify-paper":
            data, text = cmd_verify(args)
            _emit(data, text, args.json)
            return 0 if data["passed"] else 1
        spec = make_spec(args)
        if args.command == "resolve":
            data, text = cmd_resolve(spec, args.json)
        elif args.command == "tor":
            data, text = cmd_tor(spec, args.json)
        elif args.command == "ext":
            data, text = cmd_ext(spec, args.json)
        else:
            data, text = cmd_gk(spec, args.json, args.degree_window)
        _emit(data, text, args.json)
        return 0
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MathPreconditionError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except InvariantBreach as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
