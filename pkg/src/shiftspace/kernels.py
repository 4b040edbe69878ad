"""Kernel builders and identity checks.

Every family is lifted from a kernel ``K(zeta, omega)`` in the variable
``zeta = r(z)`` to::

    (Z_r(z) (x) I_p) K(r(z), r(w)) (Z_r(w) (x) I_p)^*.

Families provided: finite dimensional invariant subspaces (pencil data
``C, A, B, P``), Theta kernels on the line and on the circle, S kernels,
E+/E- kernels, Nevanlinna kernels and the Hardy space analogue.  The
functions ``Theta``, ``S``, ``E+``, ``E-`` and ``N`` are supplied by the
caller as callables returning matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .analytic import AnalyticFn, Kernel
from .errors import DiagonalSingularity, RankDeficientAtAlpha, SingularPencil, SingularSteinOperator
from .resolvent import apply_resolvent
from .statespace import StateBasis
from .symmat import AssocSymMatrix, SignatureMatrix

#: Kernel denominators below this modulus raise :class:`DiagonalSingularity`.
DENOMINATOR_TOL = 1e-12
PENCIL_RCOND = 1e-13
STEIN_RCOND = 1e-12

MatrixFn = Callable[[complex], np.ndarray]


def _mat(x) -> np.ndarray:
    return np.atleast_2d(np.asarray(x, dtype=complex))


def _lift(basis: StateBasis, z: complex, m: int) -> np.ndarray:
    """``Z_r(z) (x) I_m`` as an ``m x N m`` matrix."""
    return np.kron(basis.Z(complex(z))[None, :], np.eye(m))


def _solve_pencil(A: np.ndarray, B: np.ndarray, zeta: complex) -> np.ndarray:
    L = A - zeta * B
    s = np.linalg.svd(L, compute_uv=False)
    if s[-1] <= PENCIL_RCOND * max(s[0], 1.0):
        raise SingularPencil(f"A - zeta B is singular at zeta = {zeta}")
    return np.linalg.inv(L)


def _x_matrix(X) -> np.ndarray:
    if isinstance(X, AssocSymMatrix):
        return X.X.astype(complex)
    return _mat(X)


# ---------------------------------------------------------------------------
# invariant subspaces and the Stein equation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantSubspaceData:
    """Pencil data of ``M(z) = (Z_r(z) (x) I_m) C (A - r(z) B)^{-1}``.

    ``C`` has shape ``(m N, M)``; ``A`` and ``B`` are ``M x M``; ``P`` is an
    optional Hermitian invertible Gram matrix (required for kernels).
    """

    C: np.ndarray
    A: np.ndarray
    B: np.ndarray
    P: np.ndarray | None = None

    def __post_init__(self):
        C, A, B = _mat(self.C), _mat(self.A), _mat(self.B)
        M = A.shape[0]
        if A.shape != (M, M) or B.shape != (M, M) or C.shape[1] != M:
            raise ValueError("need C (mN x M), A and B (M x M)")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if self.P is not None:
            P = _mat(self.P)
            if P.shape != (M, M):
                raise ValueError("P must be M x M")
            if np.max(np.abs(P - P.conj().T)) > 1e-12 * (1 + np.max(np.abs(P))):
                raise ValueError("P must be Hermitian")
            object.__setattr__(self, "P", P)

    @property
    def M(self) -> int:
        return self.A.shape[0]

    def m(self, N: int) -> int:
        if self.C.shape[0] % N:
            raise ValueError(f"C has {self.C.shape[0]} rows, not a multiple of N = {N}")
        return self.C.shape[0] // N

    def with_P(self, P) -> "InvariantSubspaceData":
        return InvariantSubspaceData(self.C, self.A, self.B, P)

    def normalized(self, alpha: complex) -> "InvariantSubspaceData":
        """Equivalent data with ``A - alpha B = I``.

        Right multiplication by ``S = (A - alpha B)^{-1}`` leaves ``M`` and
        the Stein equation for ``P`` unchanged, so ``P`` is kept.
        """
        S = _solve_pencil(self.A, self.B, complex(alpha))
        return InvariantSubspaceData(self.C @ S, self.A @ S, self.B @ S, self.P)

    def F(self, zeta: complex) -> np.ndarray:
        """``C (A - zeta B)^{-1}``."""
        return self.C @ _solve_pencil(self.A, self.B, complex(zeta))


def invariant_M(data: InvariantSubspaceData, basis: StateBasis) -> AnalyticFn:
    """The ``m x M`` matrix function ``(Z_r (x) I_m) C (A - r B)^{-1}``."""
    m = data.m(basis.N)
    r = basis.r

    def f(z):
        z = np.asarray(z, dtype=complex)
        flat = z.reshape(-1)
        out = np.array([_lift(basis, t, m) @ data.F(r(t)) for t in flat])
        return out.reshape(z.shape + (m, data.M))

    return AnalyticFn(f, (m, data.M), name="M")


def invariance_residual(data: InvariantSubspaceData, basis: StateBasis, alpha: complex, samples) -> float:
    """``max |R_alpha M - M B (A - alpha B)^{-1}|`` over ``samples`` (columnwise shift)."""
    Mf = invariant_M(data, basis)
    z = np.asarray(samples, dtype=complex).reshape(-1)
    lhs = apply_resolvent(basis.r, Mf, alpha)(z)
    right = data.B @ _solve_pencil(data.A, data.B, complex(alpha))
    rhs = Mf(z) @ right
    return float(np.max(np.abs(lhs - rhs)))


def invariant_kernel(data: InvariantSubspaceData, basis: StateBasis) -> Kernel:
    """``M(z) P^{-1} M(w)^*``."""
    if data.P is None:
        raise ValueError("the kernel needs P")
    m = data.m(basis.N)
    Pinv = np.linalg.inv(data.P)
    r = basis.r

    def k(z, w):
        Mz = _lift(basis, z, m) @ data.F(r(z))
        Mw = _lift(basis, w, m) @ data.F(r(w))
        return Mz @ Pinv @ Mw.conj().T

    return Kernel(k, m, name="invariant")


def stein_operator(A, B) -> np.ndarray:
    """Matrix of ``vec(P) -> vec(A^* P A - B^* P B)`` (column-major ``vec``)."""
    A, B = _mat(A), _mat(B)
    return np.kron(A.T, A.conj().T) - np.kron(B.T, B.conj().T)


def stein_residual(A, B, C, J, P) -> float:
    A, B, C, P = _mat(A), _mat(B), _mat(C), _mat(P)
    Jm = SignatureMatrix(J).J
    R = A.conj().T @ P @ A - B.conj().T @ P @ B - C.conj().T @ Jm @ C
    return float(np.max(np.abs(R)))


def solve_stein(A, B, C, J) -> np.ndarray:
    """Hermitian ``P`` with ``A^* P A - B^* P B = C^* J C``.

    Solves the ``M^2`` dimensional vectorized system; raises
    :class:`SingularSteinOperator` when it is numerically singular.
    """
    A, B, C = _mat(A), _mat(B), _mat(C)
    Jm = SignatureMatrix(J).J
    M = A.shape[0]
    if C.shape[0] != Jm.shape[0]:
        raise ValueError("C must have as many rows as J")
    L = stein_operator(A, B)
    s = np.linalg.svd(L, compute_uv=False)
    if s[-1] <= STEIN_RCOND * max(s[0], 1e-300):
        raise SingularSteinOperator(f"Stein operator is singular (sigma_min = {s[-1]:.2e}, sigma_max = {s[0]:.2e})")
    rhs = (C.conj().T @ Jm @ C).reshape(-1, order="F")
    P = np.linalg.solve(L, rhs).reshape(M, M, order="F")
    return (P + P.conj().T) / 2


def theta_from_stein(data: InvariantSubspaceData, J, mu: complex = 1.0) -> MatrixFn:
    """``Theta(zeta) = I - (1 - zeta conj(mu)) F(zeta) P^{-1} F(mu)^* J`` with ``|mu| = 1``.

    When ``P`` solves the Stein equation this ``Theta`` gives
    ``F(zeta) P^{-1} F(omega)^* = (J - Theta(zeta) J Theta(omega)^*) / (1 - zeta conj(omega))``.
    """
    if data.P is None:
        raise ValueError("need P")
    mu = complex(mu)
    if abs(abs(mu) - 1) > 1e-12:
        raise ValueError("mu must lie on the unit circle")
    Jm = SignatureMatrix(J).J
    Pinv = np.linalg.inv(data.P)
    tail = Pinv @ data.F(mu).conj().T @ Jm
    I = np.eye(Jm.shape[0])

    def theta(zeta):
        zeta = complex(zeta)
        return I - (1 - zeta * mu.conjugate()) * data.F(zeta) @ tail

    return theta


def theta_kernel_check(data: InvariantSubspaceData, J, Theta: MatrixFn, basis: StateBasis, grid) -> float:
    """``max |M(z) P^{-1} M(w)^* - (Z (x) I)(J - Theta J Theta^*)/(1 - r(z) conj r(w))(Z (x) I)^*|``."""
    Jm = SignatureMatrix(J).J
    K = invariant_kernel(data, basis)
    m = data.m(basis.N)
    r = basis.r
    pts = [complex(x) for x in np.asarray(grid).reshape(-1)]
    worst = 0.0
    for z in pts:
        for w in pts:
            den = 1 - r(z) * np.conj(r(w))
            if abs(den) < DENOMINATOR_TOL:
                raise DiagonalSingularity("1 - r(z) conj(r(w)) vanishes")
            mid = (Jm - _mat(Theta(r(z))) @ Jm @ _mat(Theta(r(w))).conj().T) / den
            form = _lift(basis, z, m) @ mid @ _lift(basis, w, m).conj().T
            worst = max(worst, float(np.max(np.abs(K(z, w) - form))))
    return worst


# ---------------------------------------------------------------------------
# kernel families
# ---------------------------------------------------------------------------

def _line_den(a: complex, b: complex) -> complex:
    den = -1j * (a - np.conj(b))
    if abs(den) < DENOMINATOR_TOL:
        raise DiagonalSingularity("r(z) - conj(r(w)) vanishes")
    return den


def _circle_den(a: complex, b: complex) -> complex:
    den = 1 - a * np.conj(b)
    if abs(den) < DENOMINATOR_TOL:
        raise DiagonalSingularity("1 - r(z) conj(r(w)) vanishes")
    return den


def lifted_kernel(core: Callable[[complex, complex], np.ndarray], basis: StateBasis, p: int = 1,
                  name: str = "K") -> Kernel:
    """``(z, w) -> (Z_r(z) (x) I_p) core(r(z), r(w)) (Z_r(w) (x) I_p)^*``."""
    r = basis.r

    def k(z, w):
        mid = _mat(core(complex(r(z)), complex(r(w))))
        return _lift(basis, z, p) @ mid @ _lift(basis, w, p).conj().T

    return Kernel(k, p, name=name)


def line_theta_kernel(X, Theta: MatrixFn, basis: StateBasis, p: int = 1) -> Kernel:
    """``(X^{-1} - Theta(r(z)) X Theta(r(w))^*) / (-i (r(z) - conj r(w)))``, lifted."""
    Xm = _x_matrix(X)
    Xinv = np.linalg.inv(Xm)

    def core(a, b):
        return (Xinv - _mat(Theta(a)) @ Xm @ _mat(Theta(b)).conj().T) / _line_den(a, b)

    return lifted_kernel(core, basis, p, "theta-line")


def circle_theta_kernel(X, Theta: MatrixFn, basis: StateBasis, p: int = 1) -> Kernel:
    """``(X^{-1} - Theta(r(z)) X Theta(r(w))^*) / (1 - r(z) conj r(w))``, lifted."""
    Xm = _x_matrix(X)
    Xinv = np.linalg.inv(Xm)

    def core(a, b):
        return (Xinv - _mat(Theta(a)) @ Xm @ _mat(Theta(b)).conj().T) / _circle_den(a, b)

    return lifted_kernel(core, basis, p, "theta-circle")


def s_kernel(X, S: MatrixFn, basis: StateBasis, p: int = 1) -> Kernel:
    """``(X^{-1} - S(r(z)) S(r(w))^*) / (1 - r(z) conj r(w))``, lifted."""
    Xinv = np.linalg.inv(_x_matrix(X))

    def core(a, b):
        Sa, Sb = _mat(S(a)), _mat(S(b))
        return (Xinv - Sa @ Sb.conj().T) / _circle_den(a, b)

    return lifted_kernel(core, basis, p, "s")


def epm_kernel(E_plus: MatrixFn, E_minus: MatrixFn, J, basis: StateBasis, variant: str = "line",
               p: int = 1) -> Kernel:
    """``(E+(r(z)) J E+(r(w))^* - E-(r(z)) J E-(r(w))^*) / den``, lifted.

    ``den`` is ``-i (r(z) - conj r(w))`` for ``variant="line"`` and
    ``1 - r(z) conj r(w)`` for ``variant="circle"``.
    """
    Jm = SignatureMatrix(J).J
    den = {"line": _line_den, "circle": _circle_den}.get(variant)
    if den is None:
        raise ValueError("variant must be 'line' or 'circle'")

    def core(a, b):
        Pa, Pb, Ma, Mb = _mat(E_plus(a)), _mat(E_plus(b)), _mat(E_minus(a)), _mat(E_minus(b))
        return (Pa @ Jm @ Pb.conj().T - Ma @ Jm @ Mb.conj().T) / den(a, b)

    return lifted_kernel(core, basis, p, f"epm-{variant}")


def nevanlinna_kernel(Nfn: MatrixFn, basis: StateBasis, p: int = 1) -> Kernel:
    """``(N(r(z)) - N(r(w))^*) / (r(z) - conj r(w))``, lifted."""

    def core(a, b):
        d = a - np.conj(b)
        if abs(d) < DENOMINATOR_TOL:
            raise DiagonalSingularity("r(z) - conj(r(w)) vanishes")
        return (_mat(Nfn(a)) - _mat(Nfn(b)).conj().T) / d

    return lifted_kernel(core, basis, p, "nevanlinna")


def hardy_kernel(basis: StateBasis, p: int = 1) -> Kernel:
    """Hardy space analogue ``Z_r(z) Z_r(w)^* / (-i (r(z) - conj r(w)))``.

    This is the Nevanlinna kernel of the constant ``N = (i/2) I``; it is
    positive where ``Im r > 0``.
    """
    size = basis.N * p
    k = nevanlinna_kernel(lambda a: 0.5j * np.eye(size), basis, p)
    k.name = "hardy"
    return k


@dataclass(frozen=True)
class InvariantSubspace:
    data: InvariantSubspaceData


@dataclass(frozen=True)
class ThetaLine:
    X: object
    Theta: MatrixFn


@dataclass(frozen=True)
class ThetaCircle:
    X: object
    Theta: MatrixFn


@dataclass(frozen=True)
class SSpace:
    X: object
    S: MatrixFn


@dataclass(frozen=True)
class EPlusMinus:
    E_plus: MatrixFn
    E_minus: MatrixFn
    J: object = 1
    variant: str = "line"


@dataclass(frozen=True)
class NevanlinnaL:
    N: MatrixFn


@dataclass(frozen=True)
class HardyAnalog:
    pass


KernelSpec = Union[InvariantSubspace, ThetaLine, ThetaCircle, SSpace, EPlusMinus, NevanlinnaL, HardyAnalog]


def build_kernel(family: KernelSpec, basis: StateBasis, p: int = 1) -> Kernel:
    """Dispatch a :data:`KernelSpec` to its builder."""
    if isinstance(family, InvariantSubspace):
        return invariant_kernel(family.data, basis)
    if isinstance(family, ThetaLine):
        return line_theta_kernel(family.X, family.Theta, basis, p)
    if isinstance(family, ThetaCircle):
        return circle_theta_kernel(family.X, family.Theta, basis, p)
    if isinstance(family, SSpace):
        return s_kernel(family.X, family.S, basis, p)
    if isinstance(family, EPlusMinus):
        return epm_kernel(family.E_plus, family.E_minus, family.J, basis, family.variant, p)
    if isinstance(family, NevanlinnaL):
        return nevanlinna_kernel(family.N, basis, p)
    if isinstance(family, HardyAnalog):
        return hardy_kernel(basis, p)
    raise TypeError(f"unknown kernel family {family!r}")


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def gram_matrix(K: Kernel, grid) -> np.ndarray:
    return K.gram(grid)


def negative_squares(K: Kernel, grid, tol: float = 1e-9) -> int:
    """Number of Gram eigenvalues below ``-tol * ||G||``; a lower bound for the negative index."""
    G = K.gram(grid)
    G = (G + G.conj().T) / 2
    ev = np.linalg.eigvalsh(G)
    scale = max(float(np.max(np.abs(ev))), 1e-300)
    return int(np.sum(ev < -tol * scale))


def min_gram_eigenvalue(K: Kernel, grid) -> float:
    G = K.gram(grid)
    return float(np.linalg.eigvalsh((G + G.conj().T) / 2).min())


def hermitian_swap_residual(K: Kernel, grid) -> float:
    """``max |K(z, w) - K(w, z)^*|`` over grid pairs."""
    G = K.gram(grid)
    return float(np.max(np.abs(G - G.conj().T)))


def theta_split_residual(X, Theta: MatrixFn, Theta1: MatrixFn, basis: StateBasis, grid, p: int = 1) -> float:
    """Pointwise check of ``K_Theta = K_Theta1 + Theta1(r(z)) K' Theta1(r(w))^*`` (line case).

    ``K'`` has numerator ``X - Theta1^{-1} Theta X Theta^* Theta1^{-*}``
    with ``Theta1^{-*}`` taken at ``r(w)``.
    """
    Xm = _x_matrix(X)
    Xinv = np.linalg.inv(Xm)
    pts = [complex(x) for x in np.asarray(grid).reshape(-1)]
    r = basis.r
    worst = 0.0
    for z in pts:
        for w in pts:
            a, b = complex(r(z)), complex(r(w))
            den = _line_den(a, b)
            Ta, Tb = _mat(Theta(a)), _mat(Theta(b))
            T1a, T1b = _mat(Theta1(a)), _mat(Theta1(b))
            full = (Xinv - Ta @ Xm @ Tb.conj().T) / den
            first = (Xinv - T1a @ Xm @ T1b.conj().T) / den
            inner = (Xm - np.linalg.solve(T1a, Ta) @ Xm @ np.linalg.solve(T1b, Tb).conj().T) / den
            second = T1a @ inner @ T1b.conj().T
            Lz, Lw = _lift(basis, z, p), _lift(basis, w, p)
            diff = Lz @ (full - first - second) @ Lw.conj().T
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def _signature_split(H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``H = M J M^*`` for Hermitian invertible ``H``; ``J`` sorted with +1 first."""
    lam, Q = np.linalg.eigh((H + H.conj().T) / 2)
    order = sorted(range(lam.size), key=lambda i: (lam[i] < 0, -abs(lam[i])))
    lam, Q = lam[order], Q[:, order]
    return Q * np.sqrt(np.abs(lam))[None, :], np.diag(np.sign(lam))


@dataclass
class DeBrangesSplit:
    """``K(z, w) = (E+(z) J+ E+(w)^* - E-(z) J- E-(w)^*) / den(z, w)``.

    ``F_plus`` and ``F_minus`` are the normalized functions built from
    ``K(., alpha)`` and ``K(., alpha')`` with ``alpha' = conj(alpha)`` (line)
    or ``1/conj(alpha)`` (circle); ``E+ = F+ M``, ``E- = F- N`` with
    ``K(alpha, alpha)^{-1} = M J+ M^*`` and ``K(alpha', alpha')^{-1} = N J- N^*``.
    """

    K: Kernel
    alpha: complex
    variant: str
    F_plus: Callable[[complex], np.ndarray]
    F_minus: Callable[[complex], np.ndarray]
    E_plus: Callable[[complex], np.ndarray]
    E_minus: Callable[[complex], np.ndarray]
    J_plus: np.ndarray
    J_minus: np.ndarray
    _den: Callable[[complex, complex], complex] = field(repr=False)

    @property
    def same_signature(self) -> bool:
        return bool(np.array_equal(self.J_plus, self.J_minus))

    def reconstruct(self, z: complex, w: complex) -> np.ndarray:
        z, w = complex(z), complex(w)
        num = self.E_plus(z) @ self.J_plus @ self.E_plus(w).conj().T \
            - self.E_minus(z) @ self.J_minus @ self.E_minus(w).conj().T
        den = self._den(z, w)
        if abs(den) < DENOMINATOR_TOL:
            raise DiagonalSingularity("the split denominator vanishes at (z, w)")
        return num / den

    def residual(self, grid) -> float:
        pts = [complex(x) for x in np.asarray(grid).reshape(-1)]
        return max(float(np.max(np.abs(self.reconstruct(z, w) - self.K(z, w)))) for z in pts for w in pts)


def de_branges_split(K: Kernel, alpha: complex, variant: str = "line", rank_tol: float = 1e-12) -> DeBrangesSplit:
    """Write ``K`` in E+/E- form from its values at ``alpha`` and the reflected point.

    Line case (``Im alpha > 0`` after possibly conjugating ``alpha``)::

        F+(z) = (z - conj a) K(z, a) / sqrt(-i (a - conj a))
        F-(z) = (z - a) K(z, conj a) / sqrt(-i (a - conj a))
        K(z, w) = (F+ K(a,a)^{-1} F+^* - F- K(conj a, conj a)^{-1} F-^*) / (-i (z - conj w))

    Circle case (``0 < |alpha| < 1`` after possibly reflecting)::

        F+(z) = (1 - z conj a) K(z, a) / sqrt(1 - |a|^2)
        F-(z) = (z - a) K(z, 1/conj a) / sqrt(1 - |a|^2)
        K(z, w) = (F+ K(a,a)^{-1} F+^* - F- K(a', a')^{-1} F-^*) / (1 - z conj w)

    The identities hold for kernels of spaces with the corresponding
    division invariance (de Branges spaces); for other kernels the
    :meth:`DeBrangesSplit.residual` measures the defect.
    """
    a = complex(alpha)
    if variant == "line":
        if a.imag == 0:
            raise ValueError("alpha must not be real")
        if a.imag < 0:
            a = a.conjugate()
        refl = a.conjugate()
        scale = np.sqrt((-1j * (a - refl)).real)
        fp = lambda z: (z - refl) / scale  # noqa: E731
        fm = lambda z: (z - a) / scale  # noqa: E731
        den = lambda z, w: -1j * (z - np.conj(w))  # noqa: E731
    elif variant == "circle":
        if a == 0 or abs(abs(a) - 1) < 1e-14:
            raise ValueError("alpha must be nonzero and off the unit circle")
        if abs(a) > 1:
            a = 1 / a.conjugate()
        refl = 1 / a.conjugate()
        scale = np.sqrt(1 - abs(a) ** 2)
        fp = lambda z: (1 - z * a.conjugate()) / scale  # noqa: E731
        fm = lambda z: (z - a) / scale  # noqa: E731
        den = lambda z, w: 1 - z * np.conj(w)  # noqa: E731
    else:
        raise ValueError("variant must be 'line' or 'circle'")

    Kaa, Kbb = K(a, a), K(refl, refl)
    for name, H in (("K(alpha, alpha)", Kaa), ("K at the reflected point", Kbb)):
        s = np.linalg.svd(H, compute_uv=False)
        if s[-1] <= rank_tol * max(s[0], 1.0):
            raise RankDeficientAtAlpha(f"{name} is not invertible")
    Mp, Jp = _signature_split(np.linalg.inv(Kaa))
    Mm, Jm = _signature_split(np.linalg.inv(Kbb))

    def F_plus(z):
        return fp(complex(z)) * K(z, a)

    def F_minus(z):
        return fm(complex(z)) * K(z, refl)

    return DeBrangesSplit(K, a, variant, F_plus, F_minus, lambda z: F_plus(z) @ Mp, lambda z: F_minus(z) @ Mm,
                          Jp, Jm, den)
