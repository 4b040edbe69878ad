"""Command-line front end with JSON input and output.

Every subcommand prints one JSON document::

    {"command": <name>, "input": {<normalized options>}, "result": {...}, "ok": bool}

The ``input`` object of any emitted document can be fed back through
``--input FILE``; flags given explicitly on the command line override it.
Complex numbers are encoded as ``[re, im]`` and matrices as row-major
nested lists.  Exit status is 0 on success, 2 when a numerical check
exceeds its tolerance (or the computation itself fails) and 1 on usage
errors.  ``SHIFTSPACE_LOG`` sets the logging level (default ``WARNING``).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .analytic import AnalyticFn, Kernel
from .cuntz import CuntzFamily
from .errors import ShiftSpaceError
from .kernels import (InvariantSubspaceData, build_kernel, EPlusMinus, HardyAnalog, InvariantSubspace,
                      NevanlinnaL, SSpace, ThetaCircle, ThetaLine, hermitian_swap_residual, solve_stein,
                      stein_residual)
from .polyrat import Poly, RationalFn, cluster_roots, decode_complex, decode_coeffs, encode_complex, in_omega, \
    poly_roots, preimages
from .representation import decompose, multipoint_interpolate
from .resolvent import apply_resolvent, check_resolvent_identity
from .statespace import StateBasis
from .symmat import SignatureMatrix, assoc_sym_matrix, factor_signature

log = logging.getLogger("shiftspace")

COMMANDS = ("roots", "preimages", "resolvent", "xmatrix", "decompose", "cuntz-check", "kernel", "stein",
            "interp", "verify-paper")
KERNEL_FAMILIES = ("invariant", "theta-line", "theta-circle", "s", "epm", "nev", "hardy")


class UsageError(Exception):
    """Bad command line; exit status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# JSON encoding
# ---------------------------------------------------------------------------

def encode_array(a) -> Any:
    """Nested lists; real arrays as floats, complex ones with ``[re, im]`` leaves."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        if a.ndim == 0:
            return encode_complex(a)
        return [encode_array(x) for x in a]
    return a.astype(float).tolist()


def decode_array(obj, ndim: int = 2) -> np.ndarray:
    """Inverse of :func:`encode_array` for an array with ``ndim`` dimensions.

    Leaves one level deeper than ``ndim`` are ``[re, im]`` pairs; plain
    numbers and strings such as ``"1+2j"`` are accepted as leaves too.
    """

    def rec(x, level):
        if level == ndim:
            return decode_complex(x)
        if not isinstance(x, (list, tuple)):
            raise ValueError(f"expected a nested list of depth {ndim}")
        return [rec(t, level + 1) for t in x]

    return np.array(rec(obj, 0), dtype=complex)


def _matrix(obj, flag: str) -> np.ndarray:
    try:
        arr = decode_array(obj, 2)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{flag}: cannot read a matrix ({exc})") from None
    if np.max(np.abs(arr.imag), initial=0.0) == 0:
        arr = arr.real
    return np.atleast_2d(arr)


# ---------------------------------------------------------------------------
# option parsing helpers
# ---------------------------------------------------------------------------

def _load(value, flag: str):
    """JSON text, a path to a JSON file, or an already decoded object."""
    if value is None or not isinstance(value, str):
        return value
    text = value
    path = Path(value)
    if not value.lstrip().startswith(("{", "[", '"')) and path.is_file():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return value


def _rational(value, flag: str = "--r") -> RationalFn:
    obj = _load(value, flag)
    if obj is None:
        raise UsageError(f"{flag} is required")
    try:
        if isinstance(obj, dict):
            return RationalFn.from_json(obj)
        if isinstance(obj, list):
            return RationalFn(decode_coeffs(obj), [1.0])
    except (ShiftSpaceError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{flag}: {exc}") from None
    raise UsageError(f"{flag}: expected {{\"p\": [...], \"q\": [...]}}")


def _complex(value, flag: str, default=None) -> complex | None:
    obj = _load(value, flag)
    if obj is None:
        return default
    try:
        return decode_complex(obj)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _signature(value, flag: str = "--j") -> SignatureMatrix:
    obj = _load(value, flag)
    if obj is None:
        obj = "identity"
    try:
        if isinstance(obj, (int, float, str)):
            return SignatureMatrix(obj)
        if isinstance(obj, list) and all(isinstance(x, (int, float)) for x in obj):
            return SignatureMatrix([float(x) for x in obj])
        return SignatureMatrix(_matrix(obj, flag).real)
    except ShiftSpaceError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _function(value, flag: str = "--f") -> AnalyticFn:
    """``{"poly": [...]}``, ``{"rational": {...}}`` or ``{"polyvec": [[...], ...]}``."""
    obj = _load(value, flag)
    if obj is None:
        raise UsageError(f"{flag} is required")
    try:
        if isinstance(obj, list):
            return AnalyticFn.from_poly(Poly(decode_coeffs(obj)))
        if "poly" in obj:
            return AnalyticFn.from_poly(Poly(decode_coeffs(obj["poly"])))
        if "rational" in obj:
            return AnalyticFn.from_rational(RationalFn.from_json(obj["rational"]))
        if "polyvec" in obj:
            return AnalyticFn.poly_vector([decode_coeffs(c) for c in obj["polyvec"]])
    except (ShiftSpaceError, ValueError, TypeError) as exc:
        raise UsageError(f"{flag}: {exc}") from None
    raise UsageError(f"{flag}: expected poly, rational or polyvec")


def _matrix_function(value, size: int, flag: str, default=None) -> Callable[[complex], np.ndarray]:
    """A scalar rational times ``I``, or a matrix of rationals/numbers."""
    obj = _load(value, flag)
    if obj is None:
        if default is None:
            raise UsageError(f"{flag} is required")
        obj = default
    try:
        if isinstance(obj, dict):
            rf = RationalFn.from_json(obj)
            return lambda z: complex(rf(complex(z))) * np.eye(size)
        if isinstance(obj, (int, float, str)):
            c = decode_complex(obj)
            return lambda z: c * np.eye(size)
        entries = [[RationalFn.from_json(e) if isinstance(e, dict) else decode_complex(e) for e in row]
                   for row in obj]
    except (ShiftSpaceError, ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"{flag}: {exc}") from None
    if len(entries) != size or any(len(row) != size for row in entries):
        raise UsageError(f"{flag}: expected a {size} x {size} matrix")

    def fn(z):
        z = complex(z)
        return np.array([[complex(e(z)) if isinstance(e, RationalFn) else e for e in row] for row in entries])

    return fn


def _points(value, flag: str) -> np.ndarray:
    obj = _load(value, flag)
    if obj is None:
        raise UsageError(f"{flag} is required")
    if isinstance(obj, dict) and "points" in obj:
        obj = obj["points"]
    try:
        return np.array([decode_complex(x) for x in obj], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _random_samples(rng: np.random.Generator, r: RationalFn, count: int) -> np.ndarray:
    """Points in the box ``|Re|, |Im| <= 2`` away from poles of ``r``."""
    out = []
    poles = np.array(r.poles, dtype=complex)
    while len(out) < count:
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if poles.size and np.min(np.abs(poles - z)) < 0.2:
            continue
        out.append(z)
    return np.array(out)


# ---------------------------------------------------------------------------
# subcommands; each returns (normalized input, result, ok)
# ---------------------------------------------------------------------------

def _cmd_roots(a) -> tuple[dict, dict, bool]:
    obj = _load(a.p, "--p")
    if obj is None:
        r = _rational(a.r)
        p = r.p
    else:
        try:
            p = Poly(decode_coeffs(obj))
        except (ShiftSpaceError, ValueError, TypeError) as exc:
            raise UsageError(f"--p: {exc}") from None
    if p.degree < 1:
        raise UsageError("--p: need a nonconstant polynomial")
    roots = poly_roots(p)
    resid = float(np.max(np.abs(p(np.array(roots))))) / (1 + float(np.max(np.abs(p.coeffs))))
    tol = a.tolerance if a.tolerance is not None else 1e-9
    clusters = cluster_roots(roots)
    return ({"p": p.to_json()},
            {"roots": [encode_complex(z) for z in roots],
             "clusters": [{"center": encode_complex(c), "multiplicity": m} for c, m in clusters],
             "residual": resid, "tolerance": tol},
            resid <= tol or any(m > 1 for _, m in clusters))


def _cmd_preimages(a):
    r = _rational(a.r)
    alpha = _complex(a.alpha, "--alpha")
    if alpha is None:
        raise UsageError("--alpha is required")
    pts = preimages(r, alpha)
    resid = max((abs(complex(r(w)) - alpha) for w in pts), default=0.0)
    tol = a.tolerance if a.tolerance is not None else 1e-9
    return ({"r": r.to_json(), "alpha": encode_complex(alpha)},
            {"preimages": [encode_complex(w) for w in pts], "in_omega": in_omega(r, alpha),
             "residual": resid, "tolerance": tol},
            resid <= tol * (1 + abs(alpha)))


def _cmd_resolvent(a):
    r = _rational(a.r)
    f = _function(a.f)
    alpha = _complex(a.alpha, "--alpha", 0.5 + 0.25j)
    beta = _complex(a.beta, "--beta", None)
    samples = a.samples if a.samples is not None else 10
    seed = a.seed if a.seed is not None else 0
    z = _random_samples(np.random.default_rng(seed), r, samples)
    g = apply_resolvent(r, f, alpha)
    result = {"samples": encode_array(z), "values": encode_array(np.asarray(g(z), dtype=complex)),
              "preimages": [encode_complex(w) for w in g.preimages]}
    tol = a.tolerance if a.tolerance is not None else 1e-9
    ok = True
    if beta is not None:
        resid = check_resolvent_identity(r, f, alpha, beta, z, relative=True)
        result.update({"identity_residual": resid, "tolerance": tol})
        ok = resid <= tol
    inp = {"r": r.to_json(), "f": _load(a.f, "--f"), "alpha": encode_complex(alpha), "samples": samples,
           "seed": seed}
    if beta is not None:
        inp["beta"] = encode_complex(beta)
    return inp, result, ok


def _cmd_xmatrix(a):
    r = _rational(a.r)
    J = _signature(a.j)
    alpha = _complex(a.alpha, "--alpha")
    X = assoc_sym_matrix(r, None, J, alpha)
    fac = factor_signature(X)
    tol = a.tolerance if a.tolerance is not None else 1e-9
    res = X.to_json()
    res.update({"J0": fac.J0.J.tolist(), "Y": fac.Y.tolist(), "factor_residual": fac.residual(X),
                "inertia": list(X.inertia), "tolerance": tol})
    ok = X.symmetry_residual <= tol and X.imag_residual <= tol and fac.residual(X) <= tol * (1 + np.max(np.abs(X.X)))
    inp = {"r": r.to_json(), "j": J.J.tolist()}
    if alpha is not None:
        inp["alpha"] = encode_complex(alpha)
    return inp, res, bool(ok)


def _cmd_decompose(a):
    r = _rational(a.r)
    f = _function(a.f)
    nodes = a.nodes if a.nodes is not None else 2048
    order = a.taylor_order if a.taylor_order is not None else 32
    res = decompose(r, None, f, quad_nodes=nodes, taylor_order=order)
    tol = a.tolerance if a.tolerance is not None else 1e-7
    bound = tol * (1 + res.roundtrip_scale)
    out = res.to_json()
    out.update({"tolerance": tol, "bound": bound})
    return ({"r": r.to_json(), "f": _load(a.f, "--f"), "nodes": nodes, "taylor_order": order},
            out, res.roundtrip_error <= bound)


def _cmd_cuntz(a):
    r = _rational(a.r)
    degree = a.degree if a.degree is not None else 32
    nodes = a.nodes if a.nodes is not None else 2048
    fam = CuntzFamily(r, None, degree, quad_nodes=nodes)
    rep = fam.verify_cuntz()
    default = 1e-12 if fam.mode == "polynomial" else 1e-7
    tol = a.tolerance if a.tolerance is not None else default
    out = rep.to_json()
    out["tolerance"] = tol
    return ({"r": r.to_json(), "degree": degree, "nodes": nodes}, out,
            rep.completeness <= tol and rep.orthogonality <= tol)


def _pencil(value, flag: str, J: SignatureMatrix | None, rng=None, m: int = 1, N: int = 1, M: int = 3):
    obj = _load(value, flag)
    if obj is None:
        if rng is None:
            raise UsageError(f"{flag} is required")
        A = np.eye(M) + 0.3 * (rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M)))
        B = 0.3 * (rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M)))
        C = rng.normal(size=(m * N, M)) + 1j * rng.normal(size=(m * N, M))
        return {"A": A, "B": B, "C": C, "P": None}
    if not isinstance(obj, dict) or not {"A", "B", "C"} <= set(obj):
        raise UsageError(f"{flag}: expected an object with A, B, C (and optionally P)")
    out = {k: _matrix(obj[k], f"{flag}.{k}") for k in ("A", "B", "C")}
    out["P"] = _matrix(obj["P"], f"{flag}.P") if obj.get("P") is not None else None
    return out


def _encode_pencil(p: dict) -> dict:
    return {k: encode_array(np.asarray(v, dtype=complex)) for k, v in p.items() if v is not None}


def _cmd_stein(a):
    J = _signature(a.j)
    seed = a.seed if a.seed is not None else 0
    M = a.size if a.size is not None else 3
    pen = _pencil(a.pencil, "--pencil", J, np.random.default_rng(seed), m=J.size, N=1, M=M)
    P = solve_stein(pen["A"], pen["B"], pen["C"], J)
    resid = stein_residual(pen["A"], pen["B"], pen["C"], J, P)
    tol = a.tolerance if a.tolerance is not None else 1e-10
    ev = np.linalg.eigvalsh(P)
    inp = {"pencil": _encode_pencil({k: pen[k] for k in ("A", "B", "C")}), "j": J.J.tolist()}
    return inp, {"P": encode_array(P), "residual": resid, "eigenvalues": ev.tolist(), "tolerance": tol}, resid <= tol


def _cmd_kernel(a):
    family = a.family
    if family is None:
        raise UsageError("--family is required")
    grid = _points(a.grid, "--grid")
    r = _rational(a.r) if a.r is not None else RationalFn([0.0, 1.0])
    basis = StateBasis.canonical(r)
    J = _signature(a.j)
    inp: dict = {"family": family, "r": r.to_json(), "grid": encode_array(grid), "j": J.J.tolist()}
    p = 1
    size = basis.N * p
    Xobj = _load(a.x, "--x")
    if family in ("theta-line", "theta-circle", "s"):
        X = _matrix(Xobj, "--x") if Xobj is not None else assoc_sym_matrix(r, basis, 1).X
        inp["x"] = encode_array(np.asarray(X))
    if family == "invariant":
        seed = a.seed if a.seed is not None else 0
        pen = _pencil(a.pencil, "--pencil", J, np.random.default_rng(seed), m=J.size, N=basis.N)
        Jbig = np.kron(np.eye(basis.N), J.J)
        if pen["P"] is None:
            pen["P"] = solve_stein(pen["A"], pen["B"], pen["C"], Jbig)
        family = InvariantSubspace(InvariantSubspaceData(pen["C"], pen["A"], pen["B"], pen["P"]))
        inp["pencil"] = _encode_pencil(pen)
    elif family == "theta-line":
        family = ThetaLine(X, _matrix_function(a.theta, size, "--theta"))
        inp["theta"] = _load(a.theta, "--theta")
    elif family == "theta-circle":
        family = ThetaCircle(X, _matrix_function(a.theta, size, "--theta"))
        inp["theta"] = _load(a.theta, "--theta")
    elif family == "s":
        family = SSpace(X, _matrix_function(a.s, size, "--s", default=0))
        inp["s"] = _load(a.s, "--s") if a.s is not None else 0
    elif family == "epm":
        Js = J if J.size == size else SignatureMatrix(np.eye(size))
        variant = a.variant or "line"
        family = EPlusMinus(_matrix_function(a.e_plus, size, "--e-plus", default=1),
                          _matrix_function(a.e_minus, size, "--e-minus"), Js, variant)
        inp.update({"e_plus": _load(a.e_plus, "--e-plus") if a.e_plus is not None else 1,
                    "e_minus": _load(a.e_minus, "--e-minus"), "variant": variant})
    elif family == "nev":
        family = NevanlinnaL(_matrix_function(a.n, size, "--n"))
        inp["n"] = _load(a.n, "--n")
    elif family == "hardy":
        family = HardyAnalog()
    else:
        raise UsageError(f"--family must be one of {', '.join(KERNEL_FAMILIES)}")
    K = build_kernel(family, basis, p)
    G = K.gram(grid)
    herm = hermitian_swap_residual(K, grid)
    ev = np.linalg.eigvalsh((G + G.conj().T) / 2)
    tol = a.tolerance if a.tolerance is not None else 1e-10
    scale = max(float(np.max(np.abs(ev))), 1e-300)
    result = {"gram": encode_array(G), "eigenvalues": ev.tolist(), "min_eigenvalue": float(ev.min()),
              "negative_squares": int(np.sum(ev < -1e-9 * scale)), "hermitian_residual": herm, "tolerance": tol}
    return inp, result, herm <= tol * (1 + float(np.max(np.abs(G))))


def _cmd_interp(a):
    r = _rational(a.r)
    basis = StateBasis.canonical(r)
    pts = _points(a.points, "--points")
    weights = _points(a.weights, "--weights") if a.weights is not None else np.ones(pts.size, dtype=complex)
    gamma = _complex(a.gamma, "--gamma", 1.0)
    N = basis.N
    K0 = Kernel(lambda z, w: np.eye(N) / (1 - z * np.conj(w)), N, name="szego")
    sol = multipoint_interpolate(r, basis, K0, weights, pts, gamma)
    tol = a.tolerance if a.tolerance is not None else 1e-9
    return ({"r": r.to_json(), "points": encode_array(pts), "weights": encode_array(weights),
             "gamma": encode_complex(gamma)},
            {"alpha": encode_complex(sol.alpha), "F_alpha": encode_array(sol.F(sol.alpha)),
             "constraint_residual": sol.constraint_residual, "orthogonality_residual": sol.orthogonality_residual,
             "tolerance": tol},
            sol.constraint_residual <= tol * (1 + abs(gamma)))


def golden_x_cases() -> list[tuple[str, RationalFn, np.ndarray]]:
    """Worked examples of ``X(1, r)`` in the canonical basis."""
    cases = [("z+1/z", RationalFn([1.0, 0.0, 1.0], [0.0, 1.0]), np.diag([1.0, -1.0])),
             ("z^2+1/z", RationalFn([1.0, 0.0, 0.0, 1.0], [0.0, 1.0]),
              np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]]))]
    for n in range(3, 6):
        X = np.zeros((n + 1, n + 1))
        X[:n, :n] = np.fliplr(np.eye(n))
        X[n, n] = -1.0
        cases.append((f"z^{n}+1/z", RationalFn([1.0] + [0.0] * n + [1.0], [0.0, 1.0]), X))
    return cases


def _cmd_verify(a):
    tol = a.tolerance if a.tolerance is not None else 1e-9
    lines, cases, ok = [], [], True
    for name, r, expected in golden_x_cases():
        t0 = time.perf_counter()
        X = assoc_sym_matrix(r).X
        err = float(np.max(np.abs(X - expected)))
        elapsed = time.perf_counter() - t0
        passed = err <= tol
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} xmatrix {name} err={err:.2e} time={elapsed:.3f}s")
        cases.append({"name": name, "error": err, "passed": passed})
    return {}, {"cases": cases, "lines": lines, "tolerance": tol}, ok


_HANDLERS = {"roots": _cmd_roots, "preimages": _cmd_preimages, "resolvent": _cmd_resolvent,
             "xmatrix": _cmd_xmatrix, "decompose": _cmd_decompose, "cuntz-check": _cmd_cuntz,
             "kernel": _cmd_kernel, "stein": _cmd_stein, "interp": _cmd_interp, "verify-paper": _cmd_verify}


# ---------------------------------------------------------------------------
# parser and entry points
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--input", help="JSON file produced by an earlier run (its 'input' object is reused)")
    p.add_argument("--tolerance", type=float, help="tolerance for the validation checks")
    p.add_argument("--seed", type=int, help="seed for randomized samples")
    p.add_argument("--output", help="write the JSON document to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shiftspace", description="Generalized backward shifts for rational functions.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    specs: dict[str, list[tuple[str, dict]]] = {
        "roots": [("--p", {}), ("--r", {})],
        "preimages": [("--r", {}), ("--alpha", {})],
        "resolvent": [("--r", {}), ("--f", {}), ("--alpha", {}), ("--beta", {}), ("--samples", {"type": int})],
        "xmatrix": [("--r", {}), ("--j", {}), ("--alpha", {})],
        "decompose": [("--r", {}), ("--f", {}), ("--nodes", {"type": int}), ("--taylor-order", {"type": int})],
        "cuntz-check": [("--r", {}), ("--degree", {"type": int}), ("--nodes", {"type": int})],
        "kernel": [("--family", {"choices": KERNEL_FAMILIES}), ("--grid", {}), ("--r", {}), ("--j", {}),
                   ("--x", {}), ("--theta", {}), ("--s", {}), ("--e-plus", {}), ("--e-minus", {}),
                   ("--variant", {"choices": ("line", "circle")}), ("--n", {}), ("--pencil", {})],
        "stein": [("--pencil", {}), ("--j", {}), ("--size", {"type": int})],
        "interp": [("--r", {}), ("--points", {}), ("--weights", {}), ("--gamma", {})],
        "verify-paper": [],
    }
    for name in COMMANDS:
        p = sub.add_parser(name)
        for flag, kw in specs[name]:
            p.add_argument(flag, **kw)
        _add_common(p)
    return parser


def _apply_input_file(args: argparse.Namespace, parser_defaults: set[str]):
    obj = _load(args.input, "--input")
    if isinstance(obj, str):
        raise UsageError(f"--input: cannot read JSON from {args.input!r}")
    if isinstance(obj, dict) and "input" in obj and "command" in obj:
        if obj["command"] != args.command:
            raise UsageError(f"--input: document is for '{obj['command']}', not '{args.command}'")
        obj = obj["input"]
    if not isinstance(obj, dict):
        raise UsageError("--input: expected a JSON object")
    for key, value in obj.items():
        dest = key.replace("-", "_")
        if dest not in parser_defaults:
            raise UsageError(f"--input: unknown option '{key}'")
        if getattr(args, dest) is None:
            setattr(args, dest, value)


def run(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit status."""
    level = os.environ.get("SHIFTSPACE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.input is not None:
            _apply_input_file(args, set(vars(args)))
        for flag in ("tolerance", "nodes", "samples", "degree", "taylor_order", "size"):
            val = getattr(args, flag, None)
            if val is not None and val <= 0:
                raise UsageError(f"--{flag.replace('_', '-')} must be positive")
    except UsageError as exc:
        print(f"shiftspace: error: {exc}", file=sys.stderr)
        return 1
    log.info("running %s", args.command)
    try:
        inp, result, ok = _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"shiftspace: error: {exc}", file=sys.stderr)
        return 1
    except (ShiftSpaceError, ArithmeticError, np.linalg.LinAlgError) as exc:
        inp, result, ok = {}, {"error": type(exc).__name__, "message": str(exc)}, False
    doc = {"command": args.command, "input": inp, "result": result, "ok": bool(ok)}
    text = json.dumps(doc, indent=2)
    if args.command == "verify-paper":
        for line in result.get("lines", []):
            print(line)
        if args.output:
            Path(args.output).write_text(text + "\n")
    elif args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return 0 if ok else 2


def main() -> None:
    sys.exit(run())
