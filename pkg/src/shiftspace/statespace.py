"""The state space of a rational function and its realization.

For ``r = p/q`` of degree ``N`` the state space is the span of the difference
quotients ``(r(z) - r(a)) / (z - a)``.  Every element has the form
``m(z)/q(z)`` with ``deg m <= N - 1``, so a basis is stored as a list of
numerator polynomials over the common denominator ``q``.  All structure maps
(evaluation at the centre, the difference-quotient operator, the
coordinates of ``R_a r``) then reduce to polynomial arithmetic followed by
one N x N solve.

The default basis is built from partial fractions: monomials
``1, z, ..., z**(N - deg q - 1)`` followed, for every distinct pole ``c`` of
multiplicity ``m``, by ``(1 - z/c)**-k`` (or ``z**-k`` when ``c = 0``) for
``k = 1..m``.  For polynomials this is ``1, z, ..., z**(N-1)``, for Blaschke
products it is ``1/(1 - conj(a_n) z)``, and for ``z + 1/z`` it is ``(1, 1/z)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PoleAtOrigin, PoleOfR
from .polyrat import Poly, RationalFn, cluster_roots, require_omega

#: Candidate centres tried, in order, when the origin is a pole of r.
CENTER_GRID: tuple[complex, ...] = (
    0.0, 0.5, -0.5, 1.0, -1.0, 0.5j, -0.5j, 1.5, -1.5, 1j, -1j, 2.0, -2.0,
    0.5 + 0.5j, 0.5 - 0.5j, -0.5 + 0.5j, -0.5 - 0.5j, 3.0, -3.0, 2j, -2j,
)
#: Minimal distance between a realization centre and a pole of r.
CENTER_CLEARANCE = 0.3


@dataclass(frozen=True)
class Realization:
    """``r(z) = d + (z - center) G (I - (z - center) T)^{-1} b``.

    With ``center = 0`` this is the usual form ``d + z G (I - zT)^{-1} b``
    and ``d = r(0)``.
    """

    d: complex
    G: np.ndarray
    T: np.ndarray
    b: np.ndarray
    center: complex = 0j

    @property
    def N(self) -> int:
        return self.T.shape[0]

    def resolvent_rows(self, z) -> np.ndarray:
        """``G (I - (z - center) T)^{-1}`` for an array of points (trailing axis N)."""
        z = np.asarray(z, dtype=complex)
        u = (z - self.center).reshape(-1)
        eye = np.eye(self.N)
        mats = eye[None, :, :] - u[:, None, None] * self.T[None, :, :]
        rhs = np.broadcast_to(self.G.reshape(1, self.N, 1), (u.size, self.N, 1))
        rows = np.linalg.solve(np.swapaxes(mats, 1, 2), rhs)[..., 0]
        return rows.reshape(z.shape + (self.N,))

    def state_vector(self, w) -> np.ndarray:
        """``(I - (w - center) T)^{-1} b`` (trailing axis N)."""
        w = np.asarray(w, dtype=complex)
        u = (w - self.center).reshape(-1)
        eye = np.eye(self.N)
        mats = eye[None, :, :] - u[:, None, None] * self.T[None, :, :]
        rhs = np.broadcast_to(self.b.reshape(1, self.N, 1), (u.size, self.N, 1))
        vec = np.linalg.solve(mats, rhs)[..., 0]
        return vec.reshape(w.shape + (self.N,))

    def evaluate(self, z):
        """Evaluate r through the realization."""
        z = np.asarray(z, dtype=complex)
        rows = self.resolvent_rows(z)
        out = self.d + (z - self.center) * (rows @ self.b[:, 0])
        return out[()] if out.ndim == 0 else out

    def observability_matrix(self) -> np.ndarray:
        blocks = [self.G.reshape(1, -1)]
        for _ in range(self.N - 1):
            blocks.append(blocks[-1] @ self.T)
        return np.vstack(blocks)

    def to_json(self) -> dict:
        def enc(a):
            a = np.atleast_2d(a)
            return [[[float(x.real), float(x.imag)] for x in row] for row in a]

        return {
            "d": [float(np.real(self.d)), float(np.imag(self.d))],
            "G": enc(self.G),
            "T": enc(self.T),
            "b": enc(self.b),
            "center": [float(np.real(self.center)), float(np.imag(self.center))],
        }


def _clean(a: np.ndarray, real: bool) -> np.ndarray:
    if real:
        return np.asarray(a).real.astype(float)
    return np.asarray(a, dtype=complex)


def _pad(c: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    k = min(n, c.size)
    out[:k] = c[:k]
    if c.size > n and np.max(np.abs(c[n:])) > 1e-9 * max(1.0, float(np.max(np.abs(c)))):
        raise ValueError("numerator degree exceeds N - 1; function is not in the state space")
    return out


def choose_center(r: RationalFn) -> complex:
    """First point of :data:`CENTER_GRID` kept away from every pole of r."""
    poles = np.array(r.poles)
    for a in CENTER_GRID:
        if poles.size == 0 or np.min(np.abs(poles - a)) >= CENTER_CLEARANCE:
            return complex(a)
    raise PoleAtOrigin("no admissible realization centre on the default grid")


class StateBasis:
    """A basis ``e_1, ..., e_N`` of the state space of ``r``.

    Parameters
    ----------
    r:
        The rational function.
    numerators:
        Polynomials ``m_j`` with ``e_j = m_j / q``; each of degree at most N-1.
    labels:
        Human readable names of the basis functions.
    center:
        Realization centre.  ``None`` picks the origin when it is not a pole
        and otherwise the first safe point of :data:`CENTER_GRID` (a
        translation of the variable).  An explicit centre that is a pole
        raises :class:`PoleAtOrigin`.
    """

    def __init__(self, r: RationalFn, numerators: Sequence[Poly], labels: Sequence[str] | None = None,
                 center: complex | None = None):
        self.r = r
        self.N = r.N
        if len(numerators) != self.N:
            raise ValueError(f"need {self.N} basis functions, got {len(numerators)}")
        self.numerators = tuple(numerators)
        self.labels = tuple(labels) if labels is not None else tuple(f"e{j + 1}" for j in range(self.N))
        self.coeff_matrix = np.column_stack([_pad(m.coeffs, self.N) for m in self.numerators])
        sv = np.linalg.svd(self.coeff_matrix, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0]:
            raise ValueError("basis functions are linearly dependent")
        self.real = r.is_real() and all(m.is_real(1e-12) for m in self.numerators)
        if center is None:
            center = choose_center(r)
        self.realization = _realize(r, self, complex(center))

    # -- constructors ---------------------------------------------------------
    @classmethod
    def canonical(cls, r: RationalFn, center: complex | None = None) -> "StateBasis":
        """Partial-fraction basis described in the module docstring."""
        q = r.q
        numerators: list[Poly] = []
        labels: list[str] = []
        n_poly = r.N - q.degree
        for k in range(n_poly):
            numerators.append(q * Poly.monomial(k))
            labels.append("1" if k == 0 else ("z" if k == 1 else f"z^{k}"))
        groups = cluster_roots(r.poles) if q.degree >= 1 else []
        real = r.is_real()
        done: set[int] = set()
        for i, (c, mult) in enumerate(groups):
            if i in done:
                continue
            partner = None
            if real and abs(c.imag) > 1e-12:
                for j, (c2, m2) in enumerate(groups):
                    if j != i and j not in done and m2 == mult and abs(c2 - c.conjugate()) <= 1e-7 * (1 + abs(c)):
                        partner = j
                        break
            if partner is None:
                for k in range(1, mult + 1):
                    numerators.append(_pole_numerator(q, c, k))
                    labels.append(_pole_label(c, k))
                done.add(i)
                continue
            # Conjugate pair: use real and imaginary parts so the basis stays real.
            cp = c if c.imag > 0 else c.conjugate()
            for k in range(1, mult + 1):
                mp = _pole_numerator(q, cp, k)
                mm = _pole_numerator(q, cp.conjugate(), k)
                numerators.append(Poly((mp.coeffs + _pad(mm.coeffs, mp.coeffs.size)) / 2, trim=0.0))
                numerators.append(Poly((mp.coeffs - _pad(mm.coeffs, mp.coeffs.size)) / 2j, trim=0.0))
                labels.append("Re " + _pole_label(cp, k))
                labels.append("Im " + _pole_label(cp, k))
            done.update({i, partner})
        if real:
            numerators = [Poly(m.coeffs.real, trim=0.0) for m in numerators]
        return cls(r, numerators, labels, center)

    @classmethod
    def blaschke(cls, zeros: Sequence[complex], center: complex | None = None) -> "StateBasis":
        """Basis ``1/(1 - conj(a_n) z)`` of a Blaschke product, in the given zero order."""
        zeros = [complex(a) for a in zeros]
        r = RationalFn.blaschke(zeros)
        numerators = []
        for n in range(len(zeros)):
            m = Poly([1.0])
            for k, a in enumerate(zeros):
                if k != n:
                    m = m * Poly([1.0, -a.conjugate()])
            numerators.append(m)
        # r.q is the product of the same factors, so m_n / q = 1/(1 - conj(a_n) z).
        labels = [f"1/(1-z*conj({a:.4g}))" for a in zeros]
        return cls(r, numerators, labels, center)

    def transformed(self, S: np.ndarray) -> "StateBasis":
        """Basis ``e'_j = sum_i e_i S_ij`` (so that ``Z' = Z S``)."""
        S = np.asarray(S, dtype=complex)
        new = self.coeff_matrix @ S
        numerators = [Poly(new[:, j], trim=0.0) for j in range(self.N)]
        if np.max(np.abs(S.imag)) == 0:
            numerators = [Poly(m.coeffs.real, trim=0.0) if self.real else m for m in numerators]
        labels = [f"e'{j + 1}" for j in range(self.N)]
        return StateBasis(self.r, numerators, labels, self.realization.center)

    # -- evaluation -----------------------------------------------------------
    def _check_poles(self, z: np.ndarray) -> None:
        if self.r.q.degree < 1:
            return
        qv = np.abs(self.r.q(z))
        bound = Poly(np.abs(self.r.q.coeffs), trim=0.0)(np.abs(z)).real
        bad = qv <= 1e-13 * bound
        if np.any(bad):
            where = np.asarray(z).reshape(-1)[np.argmax(np.asarray(bad).reshape(-1))]
            raise PoleOfR(f"z = {complex(where)} is a pole of r")

    def Z(self, z) -> np.ndarray:
        """Row ``Z_r(z) = G (I - (z - center) T)^{-1}``; trailing axis of length N."""
        z = np.asarray(z, dtype=complex)
        self._check_poles(z)
        return self.realization.resolvent_rows(z)

    def Z_direct(self, z) -> np.ndarray:
        """Evaluate ``m_j(z) / q(z)`` directly (independent of the realization)."""
        z = np.asarray(z, dtype=complex)
        self._check_poles(z)
        qz = self.r.q(z)
        return np.stack([m(z) / qz for m in self.numerators], axis=-1)

    def Z_derivative(self, z) -> np.ndarray:
        """``Z_r'(z) = Z_r(z) T (I - (z - center) T)^{-1}``."""
        z = np.asarray(z, dtype=complex)
        rows = self.Z(z)
        R = self.realization
        u = (z - R.center).reshape(-1)
        mats = np.eye(self.N)[None] - u[:, None, None] * R.T[None]
        tmp = rows.reshape(-1, self.N) @ R.T
        out = np.linalg.solve(np.swapaxes(mats, 1, 2), tmp[..., None])[..., 0]
        return out.reshape(z.shape + (self.N,))

    def state_vector(self, w) -> np.ndarray:
        """``v(w)`` with ``(r(z) - r(w)) / (z - w) = Z_r(z) v(w)``."""
        w = np.asarray(w, dtype=complex)
        self._check_poles(w)
        return self.realization.state_vector(w)

    def coordinates(self, numerator: Poly) -> np.ndarray:
        """Coordinates of ``numerator / q`` in this basis."""
        return np.linalg.solve(self.coeff_matrix, _pad(numerator.coeffs, self.N))

    def __repr__(self) -> str:
        return f"StateBasis(N={self.N}, labels={list(self.labels)}, center={self.realization.center})"


def _pole_numerator(q: Poly, c: complex, k: int) -> Poly:
    m = q.deflate(c, k)
    if c != 0:
        m = m * ((-c) ** k)
    return m


def _pole_label(c: complex, k: int) -> str:
    power = "" if k == 1 else f"^{k}"
    if c == 0:
        return f"1/z{power}"
    cs = f"{c.real:.6g}" if c.imag == 0 else f"({c:.6g})"
    return f"1/(1-z/{cs}){power}"


def _realize(r: RationalFn, basis: StateBasis, a: complex) -> Realization:
    q = r.q
    qa = complex(q(a))
    bound = float(np.sum(np.abs(q.coeffs) * np.abs(a) ** np.arange(q.coeffs.size)))
    if abs(qa) <= 1e-12 * bound:
        raise PoleAtOrigin(f"r has a pole at the realization centre {a}")
    N = basis.N
    M = basis.coeff_matrix
    G = np.array([complex(m(a)) / qa for m in basis.numerators]).reshape(1, N)
    T = np.zeros((N, N), dtype=complex)
    for j, m in enumerate(basis.numerators):
        num = (m * qa - q * complex(m(a))).deflate(a)
        T[:, j] = np.linalg.solve(M, _pad(num.coeffs, N)) / qa
    num_r = (r.p * qa - q * complex(r.p(a))).deflate(a)
    b = (np.linalg.solve(M, _pad(num_r.coeffs, N)) / qa).reshape(N, 1)
    d = complex(r.p(a)) / qa
    real = basis.real and a.imag == 0
    return Realization(
        d=float(d.real) if real else d,
        G=_clean(G, real),
        T=_clean(T, real),
        b=_clean(b, real),
        center=a,
    )


def realize(r: RationalFn, center: complex | str = 0.0) -> Realization:
    """Realization of ``r`` in the canonical basis.

    ``center=0`` (the default) requires ``q(0) != 0`` and raises
    :class:`PoleAtOrigin` otherwise; ``center="auto"`` translates to the first
    safe point of :data:`CENTER_GRID`.
    """
    c = None if center == "auto" else complex(center)
    return StateBasis.canonical(r, center=c).realization


def eval_Z(basis: StateBasis, z) -> np.ndarray:
    return basis.Z(z)


def divided_difference(r: RationalFn, basis: StateBasis, z, w):
    """``Z_r(z) (I - (w - center) T)^{-1} b``.

    Equals ``(r(z) - r(w)) / (z - w)`` off the diagonal and ``r'(z)`` on it.
    """
    _same(r, basis)
    out = np.sum(basis.Z(z) * basis.state_vector(w), axis=-1)
    return out[()] if np.ndim(out) == 0 else out


def sum_formula(basis: StateBasis, r: RationalFn, f_coeffs, alpha: complex, z):
    """``sum_n f(w_n) / (r'(w_n) (z - w_n))`` for ``f = Z_r f_coeffs``.

    For ``f`` in the state space this equals ``f(z) / (r(z) - alpha)``.
    """
    _same(r, basis)
    roots = np.array(require_omega(r, alpha))
    c = np.asarray(f_coeffs, dtype=complex)
    fw = basis.Z(roots) @ c
    rp = r.derivative(roots)
    z = np.asarray(z, dtype=complex)
    out = np.sum(fw / (rp * (z[..., None] - roots)), axis=-1)
    return out[()] if out.ndim == 0 else out


def lagrange_element(r: RationalFn, alpha: complex, values):
    """The element ``sum c_n / r'(w_n) (r(z) - alpha) / (z - w_n)`` of the state space.

    It takes the value ``c_m`` at the preimage ``w_m``; these functions span
    the kernel of the generalized backward shift.
    """
    roots = np.array(require_omega(r, alpha))
    c = np.asarray(values, dtype=complex)
    rp = r.derivative(roots)
    alpha = complex(alpha)

    def f(z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for wn, cn, rn in zip(roots, c, rp):
            with np.errstate(divide="ignore", invalid="ignore"):
                term = (r(z) - alpha) / (z - wn)
            term = np.where(np.abs(z - wn) == 0, rn, term)
            out = out + cn / rn * term
        return out[()] if out.ndim == 0 else out

    return f


def _same(r: RationalFn, basis: StateBasis) -> None:
    if r is basis.r:
        return
    probe = np.array([0.31 + 0.77j, -0.52 + 0.18j, 1.21 - 0.43j])
    a, b = r(probe), basis.r(probe)
    if r.N != basis.N or not np.allclose(a, b, rtol=1e-10, atol=1e-12):
        raise ValueError("basis was built for a different rational function")
