"""Polynomials and rational functions in one complex variable.

Coefficients are stored in ascending order (``c[0] + c[1] z + ...``).  Root
finding uses the Aberth-Ehrlich simultaneous iteration followed by a couple of
Newton polishing steps; no companion-matrix eigen-solver is involved, which
keeps :func:`numpy.roots` available as an independent oracle in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateAlpha, InvalidRationalFn, MultipleRoots, NonConvergence, NotCoprime

#: Coefficients whose modulus is at most this fraction of the largest one are
#: dropped from the top end of a polynomial.
TRIM_RTOL = 1e-12
#: Minimal distance between a root of p and a root of q for p/q to count as coprime.
COPRIME_TOL = 1e-8
#: Default separation below which two preimages are considered to collide.
OMEGA_SEP = 1e-6

_EPS = np.finfo(float).eps

ComplexLike = complex | float | int


def _as_complex_array(values: Iterable[ComplexLike] | np.ndarray) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    return np.atleast_1d(arr).ravel()


class Poly:
    """Immutable complex polynomial.

    Parameters
    ----------
    coeffs:
        Ascending coefficients.  Trailing coefficients that are tiny relative
        to the largest one are discarded, so the stored leading coefficient is
        always significant.  An empty or all-zero input gives the zero
        polynomial, whose :attr:`degree` is ``-1``.
    trim:
        Relative trimming threshold (default :data:`TRIM_RTOL`).
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[ComplexLike] | np.ndarray = (), trim: float = TRIM_RTOL):
        c = _as_complex_array(coeffs) if not isinstance(coeffs, Poly) else coeffs.coeffs.copy()
        if c.size:
            scale = float(np.max(np.abs(c)))
            if scale == 0.0 or not np.isfinite(scale):
                if not np.isfinite(scale):
                    raise ValueError("polynomial coefficients must be finite")
                c = c[:0]
            else:
                keep = np.nonzero(np.abs(c) > trim * scale)[0]
                c = c[: keep[-1] + 1].copy()
        c.setflags(write=False)
        self._c = c

    # -- basic structure -------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return self._c.size - 1

    @property
    def leading(self) -> complex:
        if self.is_zero:
            return 0j
        return complex(self._c[-1])

    @property
    def is_zero(self) -> bool:
        return self._c.size == 0

    def is_real(self, rtol: float = 1e-14) -> bool:
        if self.is_zero:
            return True
        return bool(np.max(np.abs(self._c.imag)) <= rtol * np.max(np.abs(self._c)))

    @classmethod
    def monomial(cls, k: int, coeff: ComplexLike = 1.0) -> "Poly":
        c = np.zeros(k + 1, dtype=complex)
        c[k] = coeff
        return cls(c)

    @classmethod
    def from_roots(cls, roots: Sequence[ComplexLike], lead: ComplexLike = 1.0) -> "Poly":
        c = np.array([lead], dtype=complex)
        for root in roots:
            c = np.concatenate(([0j], c)) - root * np.concatenate((c, [0j]))
        return cls(c)

    # -- evaluation ------------------------------------------------------
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for a in self._c[::-1]:
            out = out * z + a
        return out[()] if out.ndim == 0 else out

    def eval_with_derivative(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Horner evaluation of p and p' together."""
        z = np.asarray(z, dtype=complex)
        val = np.zeros_like(z)
        der = np.zeros_like(z)
        for a in self._c[::-1]:
            der = der * z + val
            val = val * z + a
        return val, der

    def deriv(self, order: int = 1) -> "Poly":
        c = self._c
        for _ in range(order):
            if c.size <= 1:
                return Poly()
            c = c[1:] * np.arange(1, c.size)
        return Poly(c, trim=0.0)

    def conj(self) -> "Poly":
        return Poly(self._c.conj(), trim=0.0)

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly([other], trim=0.0)

    def __add__(self, other) -> "Poly":
        o = self._coerce(other)
        n = max(self._c.size, o._c.size)
        c = np.zeros(n, dtype=complex)
        c[: self._c.size] += self._c
        c[: o._c.size] += o._c
        return Poly(c)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-self._c, trim=0.0)

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly(self._c * complex(other), trim=0.0)
        if self.is_zero or other.is_zero:
            return Poly()
        return Poly(np.convolve(self._c, other._c), trim=0.0)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly([1.0])
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Long division ``self = quot * other + rem`` with ``deg rem < deg other``."""
        if other.is_zero:
            raise ZeroDivisionError("division by the zero polynomial")
        num = self._c.copy()
        m = other.degree
        if self.degree < m:
            return Poly(), Poly(num)
        quot = np.zeros(self.degree - m + 1, dtype=complex)
        lead = other._c[-1]
        for k in range(self.degree - m, -1, -1):
            coef = num[k + m] / lead
            quot[k] = coef
            num[k : k + m + 1] -= coef * other._c
        return Poly(quot, trim=0.0), Poly(num[:m], trim=0.0)

    def deflate(self, root: complex, times: int = 1) -> "Poly":
        """Divide by ``(z - root)**times`` with synthetic division, dropping remainders."""
        c = self._c
        for _ in range(times):
            if c.size <= 1:
                return Poly()
            out = np.zeros(c.size - 1, dtype=complex)
            acc = 0j
            for k in range(c.size - 1, 0, -1):
                acc = acc * root + c[k]
                out[k - 1] = acc
            c = out
        return Poly(c, trim=0.0)

    def shift_quotient(self, a: complex) -> "Poly":
        """Return ``(p(z) - p(a)) / (z - a)`` as a polynomial."""
        return (self - self(a)).deflate(a)

    # -- misc ------------------------------------------------------------
    def to_json(self) -> list:
        return [[float(c.real), float(c.imag)] for c in self._c]

    def __repr__(self) -> str:
        terms = ", ".join(f"{c:.6g}" for c in self._c)
        return f"Poly([{terms}])"

    def __len__(self) -> int:
        return self._c.size


def as_poly(p: Poly | Iterable[ComplexLike]) -> Poly:
    return p if isinstance(p, Poly) else Poly(p)


# ----------------------------------------------------------------------------
# Root finding
# ----------------------------------------------------------------------------


def _root_key(z: complex) -> tuple[float, float]:
    # Round the real part so that members of a conjugate pair, whose real parts
    # may differ in the last bit, are ordered by imaginary part.
    return (round(z.real, 10) + 0.0, z.imag)


def _aberth(c: np.ndarray, maxiter: int) -> np.ndarray:
    """Aberth-Ehrlich iteration on ascending coefficients with ``c[0] != 0``."""
    m = c.size - 1
    a = c / c[-1]
    if m == 1:
        return np.array([-a[0]])
    poly = Poly(a, trim=0.0)
    abs_poly = Poly(np.abs(a), trim=0.0)
    radius = float(np.abs(a[0])) ** (1.0 / m)
    angles = 2.0 * np.pi * np.arange(m) / m + np.pi / (2 * m) + 0.25
    z = radius * np.exp(1j * angles)
    active = np.ones(m, dtype=bool)
    for _ in range(maxiter):
        val, der = poly.eval_with_derivative(z)
        bound = abs_poly(np.abs(z)).real
        active &= ~(np.abs(val) <= 4.0 * _EPS * bound)
        if not active.any():
            break
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        safe_der = np.where(der == 0, _EPS * (1 + bound), der)
        ratio = val / safe_der
        step = ratio / (1.0 - ratio * s)
        step = np.where(np.isfinite(step), step, 1e-3 * (1 + np.abs(z)))
        z = np.where(active, z - step, z)
    return z


def _polish(poly: Poly, z: np.ndarray, steps: int = 2) -> np.ndarray:
    z = z.copy()
    for _ in range(steps):
        val, der = poly.eval_with_derivative(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = z - val / der
        better = np.isfinite(cand) & (np.abs(poly(cand)) < np.abs(val))
        z = np.where(better, cand, z)
    return z


def _pair_conjugates(z: np.ndarray) -> np.ndarray:
    """Force exact conjugate symmetry on the roots of a real polynomial."""
    n = z.size
    out = z.copy()
    used = np.zeros(n, dtype=bool)
    for i in np.argsort(-np.abs(z.imag), kind="stable"):
        if used[i]:
            continue
        used[i] = True
        free = np.nonzero(~used)[0]
        if free.size:
            dist = np.abs(z[free] - np.conj(z[i]))
            j = free[int(np.argmin(dist))]
            if dist.min() < 2.0 * abs(z[i].imag):
                mid = 0.5 * (z[i] + np.conj(z[j]))
                out[i], out[j] = mid, np.conj(mid)
                used[j] = True
                continue
        out[i] = z[i].real
    return out


def poly_roots(p: Poly | Iterable[ComplexLike], tol: float = 1e-10, maxiter: int = 500) -> list[complex]:
    """All roots of ``p`` with multiplicity, sorted by (real, imaginary) part.

    Exact zero low-order coefficients are split off as exact roots at the
    origin.  The remaining roots come from the Aberth-Ehrlich iteration and a
    Newton polish.  For real polynomials conjugate pairs are symmetrised.

    Raises
    ------
    NonConvergence
        If some root still has a backward error above ``tol`` times the
        running-error bound ``sum |a_k| |z|^k``.
    """
    p = as_poly(p)
    if p.degree < 1:
        raise ValueError("poly_roots needs a nonconstant polynomial")
    c = p.coeffs
    nz = int(np.argmax(c != 0))
    roots = np.zeros(nz, dtype=complex)
    if p.degree > nz:
        tail = c[nz:]
        found = _aberth(tail, maxiter)
        reduced = Poly(tail, trim=0.0)
        found = _polish(reduced, found)
        bound = Poly(np.abs(tail), trim=0.0)(np.abs(found)).real
        resid = np.abs(reduced(found))
        if np.any(resid > tol * bound):
            worst = int(np.argmax(resid / bound))
            raise NonConvergence(
                f"root iteration stalled: |p(z)| = {resid[worst]:.3e} at z = {found[worst]:.6g}"
            )
        roots = np.concatenate((roots, found))
    if p.is_real():
        roots = _pair_conjugates(roots)
    return sorted((complex(z) for z in roots), key=_root_key)


def cluster_roots(roots: Sequence[complex], rtol: float = 1e-5) -> list[tuple[complex, int]]:
    """Group numerically coincident roots into (centre, multiplicity) pairs.

    A multiple root comes out of any root finder as a small cloud of radius
    roughly ``eps**(1/m)``; the cloud is replaced by its mean.
    """
    remaining = list(roots)
    groups: list[tuple[complex, int]] = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        changed = True
        while changed:
            changed = False
            for z in list(remaining):
                if any(abs(z - m) <= rtol * (1 + abs(m)) for m in members):
                    members.append(z)
                    remaining.remove(z)
                    changed = True
        centre = complex(np.mean(members))
        if all(m.imag == 0 for m in members):
            centre = complex(centre.real, 0.0)
        groups.append((centre, len(members)))
    groups.sort(key=lambda g: _root_key(g[0]))
    return groups


# ----------------------------------------------------------------------------
# Rational functions
# ----------------------------------------------------------------------------

_REAL_SAMPLES = np.array([0.3 + 0.7j, -0.45 + 0.2j, 1.3 - 0.6j, -0.8 - 1.1j, 0.05 + 2.1j, 2.4 + 0.35j])


class RationalFn:
    """A rational function ``r = p / q`` with ``deg p >= deg q``.

    ``N = deg p`` is the number of preimages of a generic value.  The
    constructor rejects constant numerators, ``deg p < deg q`` (pass the
    reciprocal instead) and numerically non-coprime pairs.
    """

    def __init__(self, p: Poly | Iterable[ComplexLike], q: Poly | Iterable[ComplexLike] = (1.0,),
                 coprime_tol: float = COPRIME_TOL):
        p, q = as_poly(p), as_poly(q)
        if q.is_zero:
            raise InvalidRationalFn("denominator is the zero polynomial")
        if p.degree < 1:
            raise InvalidRationalFn("numerator must be nonconstant")
        if p.degree < q.degree:
            raise InvalidRationalFn(
                f"deg p = {p.degree} < deg q = {q.degree}; use the reciprocal function instead"
            )
        self.p = p
        self.q = q
        if q.degree >= 1:
            zp = np.array(self.zeros)
            zq = np.array(self.poles)
            gap = float(np.min(np.abs(zp[:, None] - zq[None, :])))
            if gap <= coprime_tol:
                raise NotCoprime(f"p and q share a root (distance {gap:.2e})")

    # -- construction helpers -----------------------------------------------
    @classmethod
    def identity(cls) -> "RationalFn":
        return cls([0.0, 1.0])

    @classmethod
    def blaschke(cls, zeros: Sequence[ComplexLike]) -> "RationalFn":
        """Finite Blaschke product ``prod (z - a) / (1 - conj(a) z)``."""
        zeros = [complex(a) for a in zeros]
        p = Poly([1.0])
        q = Poly([1.0])
        for a in zeros:
            p = p * Poly([-a, 1.0])
            q = q * Poly([1.0, -a.conjugate()])
        return cls(p, q)

    @classmethod
    def from_json(cls, obj: dict) -> "RationalFn":
        return cls(decode_coeffs(obj["p"]), decode_coeffs(obj.get("q", [1.0])))

    def to_json(self) -> dict:
        return {"p": self.p.to_json(), "q": self.q.to_json()}

    # -- structure ---------------------------------------------------------
    @property
    def N(self) -> int:
        return self.p.degree

    @cached_property
    def zeros(self) -> list[complex]:
        return poly_roots(self.p)

    @cached_property
    def poles(self) -> list[complex]:
        """Finite poles with multiplicity (roots of q)."""
        return poly_roots(self.q) if self.q.degree >= 1 else []

    @property
    def at_infinity(self) -> complex | None:
        """``r(inf)`` when finite (deg p = deg q), otherwise ``None``."""
        if self.q.degree == self.p.degree:
            return self.p.leading / self.q.leading
        return None

    def is_real(self, rtol: float = 1e-10) -> bool:
        """Check ``r(z) == conj(r(conj z))`` on a fixed set of sample points."""
        z = _REAL_SAMPLES
        if self.poles:
            dist = np.min(np.abs(z[:, None] - np.array(self.poles)[None, :]), axis=1)
            z = z[dist > 1e-3]
        a = self(z)
        b = np.conj(self(np.conj(z)))
        return bool(np.all(np.abs(a - b) <= rtol * (1 + np.abs(a))))

    # -- evaluation --------------------------------------------------------
    def __call__(self, z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.p(z) / self.q(z)

    @cached_property
    def _derivative_polys(self) -> tuple[Poly, Poly, Poly]:
        p, q = self.p, self.q
        num1 = p.deriv() * q - p * q.deriv()
        num2 = (p.deriv(2) * q - p * q.deriv(2)) * q - 2 * (q.deriv() * num1)
        return num1, num2, q

    def derivative(self, z, order: int = 1):
        """First or second derivative of r."""
        num1, num2, q = self._derivative_polys
        qz = q(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            if order == 1:
                return num1(z) / qz**2
            if order == 2:
                return num2(z) / qz**3
        raise ValueError("only orders 1 and 2 are supported")

    def __repr__(self) -> str:
        return f"RationalFn(p={self.p!r}, q={self.q!r})"


@dataclass(frozen=True)
class PartialFractionExpansion:
    """``1/(r(z) - alpha) = constant_term + sum residue / (z - w)``."""

    alpha: complex
    constant_term: complex
    poles: tuple[tuple[complex, complex], ...]

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.constant_term, dtype=complex)
        for w, res in self.poles:
            out = out + res / (z - w)
        return out[()] if out.ndim == 0 else out


def preimages(r: RationalFn, alpha: ComplexLike, tol: float = 1e-10) -> list[complex]:
    """Roots of ``p - alpha q``, i.e. the solutions of ``r(z) = alpha``.

    Raises
    ------
    DegenerateAlpha
        If ``p - alpha q`` has degree below ``N`` (``alpha`` equals ``r(inf)``),
        or if a computed root sits on a pole of ``r``.
    """
    alpha = complex(alpha)
    poly = r.p - r.q * alpha
    if poly.degree < r.N:
        raise DegenerateAlpha(
            f"deg(p - alpha q) = {max(poly.degree, 0)} < N = {r.N}; alpha = {alpha} is r(infinity)"
        )
    roots = poly_roots(poly, tol=tol)
    if r.poles:
        poles = np.array(r.poles)
        for w in roots:
            if np.min(np.abs(poles - w)) <= tol * (1 + abs(w)):
                raise DegenerateAlpha(f"preimage {w} coincides with a pole of r")
    return roots


def in_omega(r: RationalFn, alpha: ComplexLike, sep: float = OMEGA_SEP) -> bool:
    """True when r - alpha has N roots with pairwise distances above ``sep``."""
    try:
        roots = preimages(r, alpha)
    except (DegenerateAlpha, NonConvergence):
        return False
    z = np.array(roots)
    if z.size < 2:
        return True
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, np.inf)
    return bool(d.min() > sep)


def require_omega(r: RationalFn, alpha: ComplexLike, sep: float = OMEGA_SEP) -> list[complex]:
    """Return the preimages of ``alpha`` or raise :class:`DegenerateAlpha`."""
    roots = preimages(r, alpha)
    z = np.array(roots)
    if z.size > 1:
        d = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(d, np.inf)
        if d.min() <= sep:
            raise DegenerateAlpha(f"alpha = {complex(alpha)} has colliding preimages (gap {d.min():.2e})")
    return roots


def partial_fraction(r: RationalFn, alpha: ComplexLike) -> PartialFractionExpansion:
    """Partial fractions of ``1/(r - alpha)`` for ``alpha`` in Omega(r).

    The residue at each preimage ``w`` is ``1/r'(w)`` and the constant term is
    ``1/(r(inf) - alpha)`` (zero when ``deg p > deg q``).
    """
    alpha = complex(alpha)
    roots = require_omega(r, alpha)
    inf_val = r.at_infinity
    const = 0j if inf_val is None else 1.0 / (inf_val - alpha)
    res = [1.0 / complex(r.derivative(w)) for w in roots]
    return PartialFractionExpansion(alpha, const, tuple(zip(roots, res)))


def hankel_roots_check(p: Poly, sep: float = OMEGA_SEP) -> list[complex]:
    roots = poly_roots(p)
    z = np.array(roots)
    if z.size > 1:
        d = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(d, np.inf)
        if d.min() <= sep:
            raise MultipleRoots(f"polynomial has a repeated root (gap {d.min():.2e})")
    return roots


# ----------------------------------------------------------------------------
# JSON helpers for complex numbers
# ----------------------------------------------------------------------------


def decode_complex(x) -> complex:
    """Accept ``[re, im]``, a bare number, or a string such as ``"1+2j"``."""
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex numbers are encoded as [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", "").replace("i", "j"))
    if isinstance(x, bool):
        raise ValueError("booleans are not numbers")
    return complex(x)


def decode_coeffs(values) -> list[complex]:
    return [decode_complex(v) for v in values]


def encode_complex(z: ComplexLike) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]
