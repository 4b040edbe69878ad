"""The associated symmetric matrix ``X(J, r)`` and its signature factorization.

For a real rational function ``r`` with state basis ``Z_r`` and a real
signature matrix ``J``::

    X(J, r) = sum_n (Z_r(w_n) (x) I_p)^T J (Z_r(w_n) (x) I_p) / r'(w_n)

where ``w_1..w_N`` are the preimages of any ``alpha`` in ``Omega(r)``.  The
sum is a transpose (not an adjoint), it is real, symmetric, invertible and
does not depend on ``alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (DegenerateAlpha, NotRealRational, NotSignature, SingularX,
                     ZeroOutsideDisk, ZerosNotDistinct)
from .polyrat import OMEGA_SEP, RationalFn, as_poly, hankel_roots_check, in_omega, require_omega
from .statespace import StateBasis

SIGNATURE_TOL = 1e-12
SYMMETRY_TOL = 1e-9
INVERTIBILITY_RTOL = 1e-8
#: Separation demanded of the preimages when alpha is chosen automatically.
DEFAULT_ALPHA_SEP = 1e-3


def _default_alpha_grid() -> list[complex]:
    grid = [0j]
    for radius in (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0):
        for k in range(8):
            grid.append(complex(radius * np.exp(1j * (0.3 + 2 * np.pi * k / 8))))
    return grid


#: Candidates for the default alpha, in order of increasing modulus.
ALPHA_GRID: tuple[complex, ...] = tuple(_default_alpha_grid())


class SignatureMatrix:
    """A real matrix with ``J = J^T = J^{-1}``.

    Accepts an ``s x s`` array, a scalar ``+-1``, a list of diagonal signs,
    or the strings ``"identity"`` / ``"1"``.
    """

    def __init__(self, J):
        if isinstance(J, SignatureMatrix):
            J = J.J
        if isinstance(J, str):
            if J.lower() in ("identity", "1", "i"):
                J = np.eye(1)
            else:
                raise NotSignature(f"unknown signature matrix name {J!r}")
        arr = np.asarray(J)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = np.diag(arr)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise NotSignature(f"J must be square, got shape {arr.shape}")
        if np.iscomplexobj(arr):
            if np.max(np.abs(arr.imag)) > 0:
                raise NotSignature("J must have real entries")
            arr = arr.real
        arr = arr.astype(float)
        if np.max(np.abs(arr - arr.T)) > SIGNATURE_TOL:
            raise NotSignature("J is not symmetric")
        if np.max(np.abs(arr @ arr - np.eye(arr.shape[0]))) > SIGNATURE_TOL:
            raise NotSignature("J^2 != I")
        self.J = arr

    @property
    def size(self) -> int:
        return self.J.shape[0]

    @classmethod
    def identity(cls, s: int = 1) -> "SignatureMatrix":
        return cls(np.eye(s))

    @classmethod
    def diag(cls, signs: Sequence[int]) -> "SignatureMatrix":
        return cls(np.diag(np.asarray(signs, dtype=float)))

    @property
    def inertia(self) -> tuple[int, int]:
        ev = np.linalg.eigvalsh(self.J)
        return int(np.sum(ev > 0)), int(np.sum(ev < 0))

    def __array__(self, dtype=None, copy=None):
        return self.J if dtype is None else self.J.astype(dtype)

    def __repr__(self) -> str:
        return f"SignatureMatrix({self.J.tolist()})"


@dataclass(frozen=True)
class AssocSymMatrix:
    """``X(J, r)`` together with the data it came from and its diagnostics."""

    X: np.ndarray
    J: SignatureMatrix
    r: RationalFn
    basis_labels: tuple[str, ...]
    alpha: complex
    symmetry_residual: float
    imag_residual: float
    min_singular_value: float

    @property
    def inertia(self) -> tuple[int, int]:
        ev = np.linalg.eigvalsh(self.X)
        return int(np.sum(ev > 0)), int(np.sum(ev < 0))

    def to_json(self) -> dict:
        return {
            "X": self.X.tolist(),
            "J": self.J.J.tolist(),
            "alpha": [self.alpha.real, self.alpha.imag],
            "basis": list(self.basis_labels),
            "symmetry_residual": self.symmetry_residual,
            "imag_residual": self.imag_residual,
            "min_singular_value": self.min_singular_value,
        }


def default_alpha(r: RationalFn, sep: float = DEFAULT_ALPHA_SEP) -> complex:
    """First point of :data:`ALPHA_GRID` lying in ``Omega(r)`` with the given separation."""
    for alpha in ALPHA_GRID:
        if in_omega(r, alpha, sep):
            return alpha
    raise DegenerateAlpha("no point of the default alpha grid lies in Omega(r)")


def _residue_sum(r: RationalFn, basis: StateBasis, J: np.ndarray, alpha: complex) -> np.ndarray:
    roots = np.array(require_omega(r, alpha))
    Z = basis.Z(roots)
    rp = r.derivative(roots)
    s = J.shape[0]
    I = np.eye(s)
    X = np.zeros((basis.N * s, basis.N * s), dtype=complex)
    for n in range(roots.size):
        M = np.kron(Z[n][None, :], I)
        X += M.T @ J @ M / rp[n]
    return X


def assoc_sym_matrix(r: RationalFn, basis: StateBasis | None = None, J=1, alpha: complex | None = None,
                     check_real: bool = True) -> AssocSymMatrix:
    """Compute ``X(J, r)`` by the residue sum at the preimages of ``alpha``.

    Parameters
    ----------
    r:
        A real rational function.
    basis:
        State basis; defaults to :meth:`StateBasis.canonical`.
    J:
        Real signature matrix (anything accepted by :class:`SignatureMatrix`).
    alpha:
        Point of ``Omega(r)``; defaults to :func:`default_alpha`.
    check_real:
        Reject non-real ``r`` (raises :class:`NotRealRational`).  With
        ``False`` the complex sum is returned in ``X`` unchanged.
    """
    Jm = SignatureMatrix(J)
    if check_real and not r.is_real():
        raise NotRealRational("X(J, r) needs r(z) = conj(r(conj z))")
    if basis is None:
        basis = StateBasis.canonical(r)
    if alpha is None:
        alpha = default_alpha(r)
    alpha = complex(alpha)
    X = _residue_sum(r, basis, Jm.J, alpha)
    scale = 1.0 + float(np.max(np.abs(X)))
    imag = float(np.max(np.abs(X.imag)))
    sym = float(np.max(np.abs(X - X.T)))
    if check_real:
        X = X.real
    sv = np.linalg.svd(X, compute_uv=False)
    if sv[-1] <= INVERTIBILITY_RTOL * sv[0]:
        raise SingularX(f"X(J, r) is numerically singular (sigma_min = {sv[-1]:.3e})")
    return AssocSymMatrix(X, Jm, r, tuple(basis.labels), alpha, sym / scale, imag / scale, float(sv[-1]))


def alpha_independence_report(r: RationalFn, basis: StateBasis | None, J, alphas: Sequence[complex]) -> float:
    """Largest ``||X(alpha_i) - X(alpha_j)||_inf`` over all pairs of ``alphas``."""
    if basis is None:
        basis = StateBasis.canonical(r)
    mats = [assoc_sym_matrix(r, basis, J, a).X for a in alphas]
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            worst = max(worst, float(np.linalg.norm(mats[i] - mats[j], ord=np.inf)))
    return worst


def hankel_moments(p) -> list[complex]:
    """``h_n = sum_i w_i^n / p'(w_i)`` for ``n = 0 .. 2N - 2``.

    These are the entries of ``X(1, p)`` in the monomial basis; ``h_n``
    vanishes for ``n <= N - 2``.  Raises :class:`MultipleRoots` for repeated
    roots.
    """
    p = as_poly(p)
    if p.degree < 1:
        raise ValueError("p must be nonconstant")
    roots = np.array(hankel_roots_check(p))
    dp = p.deriv()(roots)
    h = []
    for n in range(2 * p.degree - 1):
        val = complex(np.sum(roots ** n / dp))
        h.append(val.real + 0j if abs(val.imag) <= 1e-12 * (1 + abs(val)) and p.is_real() else val)
    return h


def blaschke_X(zeros: Sequence[complex]) -> np.ndarray:
    """Closed form of ``X(1, b)`` for the Blaschke product with the given zeros.

    Entry ``(u, v)`` is ``sum_n 1 / (b'(a_n) (1 - a_n conj(a_u)) (1 - a_n conj(a_v)))``
    in the basis ``1 / (1 - conj(a_u) z)``.
    """
    a = np.array([complex(x) for x in zeros])
    if a.size == 0:
        raise ValueError("need at least one zero")
    if np.any(np.abs(a) >= 1):
        raise ZeroOutsideDisk("Blaschke zeros must lie in the open unit disk")
    diff = np.abs(a[:, None] - a[None, :]) + np.eye(a.size)
    if np.min(diff) <= OMEGA_SEP:
        raise ZerosNotDistinct("Blaschke zeros must be pairwise distinct")
    b = RationalFn.blaschke(a)
    bp = b.derivative(a)
    C = 1.0 / (1.0 - a[:, None] * a.conj()[None, :])  # C[n, u] = 1/(1 - a_n conj(a_u))
    X = np.einsum("n,nu,nv->uv", 1.0 / bp, C, C)
    if np.max(np.abs(X.imag)) <= SYMMETRY_TOL * (1 + np.max(np.abs(X))):
        X = X.real
    return X


@dataclass(frozen=True)
class SignatureFactorization:
    """``X = Y^T J0 Y`` with ``J0 = diag(+1, .., +1, -1, .., -1)``."""

    Y: np.ndarray
    J0: SignatureMatrix

    @property
    def negative_count(self) -> int:
        return self.J0.inertia[1]

    def residual(self, X) -> float:
        X = X.X if isinstance(X, AssocSymMatrix) else np.asarray(X)
        return float(np.max(np.abs(self.Y.T @ self.J0.J @ self.Y - X)))


def factor_signature(X) -> SignatureFactorization:
    """Factor a real symmetric invertible matrix as ``Y^T J0 Y``.

    Uses ``X = Q diag(lam) Q^T``, ``Y = |lam|^{1/2} Q^T`` and ``J0 = sign(lam)``.
    Positive eigenvalues come first (in decreasing order), each eigenvector is
    normalized so its first nonzero entry is positive.
    """
    X = X.X if isinstance(X, AssocSymMatrix) else np.asarray(X)
    if np.iscomplexobj(X):
        if np.max(np.abs(X.imag)) > SYMMETRY_TOL * (1 + np.max(np.abs(X))):
            raise ValueError("X must be real")
        X = X.real
    X = np.atleast_2d(X.astype(float))
    if np.max(np.abs(X - X.T)) > SYMMETRY_TOL * (1 + np.max(np.abs(X))):
        raise ValueError("X must be symmetric")
    lam, Q = np.linalg.eigh((X + X.T) / 2)
    if np.min(np.abs(lam)) <= INVERTIBILITY_RTOL * max(np.max(np.abs(lam)), 1e-300):
        raise SingularX("X is numerically singular")
    order = sorted(range(lam.size), key=lambda i: (lam[i] < 0, -abs(lam[i])))
    lam, Q = lam[order], Q[:, order]
    for j in range(Q.shape[1]):
        col = Q[:, j]
        k = int(np.argmax(np.abs(col) > 1e-12))
        if col[k] < 0:
            Q[:, j] = -col
    Y = np.sqrt(np.abs(lam))[:, None] * Q.T
    return SignatureFactorization(Y, SignatureMatrix(np.diag(np.sign(lam))))
