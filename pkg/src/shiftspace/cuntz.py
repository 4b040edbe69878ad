"""Weighted composition operators ``T_n`` and their adjoints on truncated spaces.

With ``f(z) = sum_n e_n(z) F_n(r(z))`` the analysis operators are
``T_n f = F_n`` and the synthesis operators ``T_n^* g = e_n g(r)``.  They
satisfy ``sum_n T_n^* T_n = I`` and ``T_n T_m^* = delta_nm I``.

For a polynomial ``r`` of degree ``N`` and ``e_n = z^(n-1)`` everything is
exact polynomial bookkeeping: ``F_n`` is read off the base-``r`` expansion
``f = sum_k c_k(z) r(z)^k`` with ``deg c_k < N``.  Any other ``r`` goes
through :func:`representation.decompose`, so results carry the quadrature
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analytic import AnalyticFn, Kernel
from .errors import DegreeOverflow
from .polyrat import Poly, RationalFn, as_poly
from .representation import DecompositionResult, decompose, build_cover, DiskCover
from .statespace import StateBasis

DEFAULT_DEGREE = 32


def _is_monomial_basis(r: RationalFn, basis: StateBasis) -> bool:
    if r.q.degree != 0:
        return False
    q0 = r.q.coeffs[0]
    for n, m in enumerate(basis.numerators):
        c = m.coeffs / q0
        target = np.zeros(max(c.size, n + 1), dtype=complex)
        target[n] = 1.0
        padded = np.zeros_like(target)
        padded[: c.size] = c
        if np.max(np.abs(padded - target)) > 1e-12:
            return False
    return True


@dataclass(frozen=True)
class CuntzReport:
    """Residuals of the completeness and orthogonality relations."""

    completeness: float
    orthogonality: float
    mode: str
    degree: int

    def to_json(self) -> dict:
        return {"completeness": self.completeness, "orthogonality": self.orthogonality,
                "mode": self.mode, "degree": self.degree}


class CuntzFamily:
    """The operators ``T_1..T_N`` and ``T_1^*..T_N^*`` for ``r`` with degree cap ``D``.

    Parameters
    ----------
    r, basis:
        Rational function and state basis ``e_1..e_N``.  The polynomial mode
        is used when ``r`` is a polynomial and ``e_n = z^(n-1)``.
    D:
        Degree cap of the truncated coefficient space.
    mode:
        ``"auto"``, ``"polynomial"`` or ``"quadrature"``.
    """

    def __init__(self, r: RationalFn, basis: StateBasis | None = None, D: int = DEFAULT_DEGREE,
                 mode: str = "auto", quad_nodes: int = 2048, cover: DiskCover | None = None):
        self.r = r
        self.basis = basis if basis is not None else StateBasis.canonical(r)
        self.N = r.N
        self.D = int(D)
        if self.D < 0:
            raise ValueError("degree cap must be nonnegative")
        poly_ok = _is_monomial_basis(r, self.basis)
        if mode == "auto":
            mode = "polynomial" if poly_ok else "quadrature"
        if mode == "polynomial" and not poly_ok:
            raise ValueError("polynomial mode needs a polynomial r and the basis 1, z, .., z^(N-1)")
        if mode not in ("polynomial", "quadrature"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.quad_nodes = quad_nodes
        self._cover = cover
        if mode == "polynomial":
            self.r_poly = Poly(r.p.coeffs / r.q.coeffs[0])
            self.synthesis_matrices = [self._synthesis_matrix(n) for n in range(1, self.N + 1)]
            self.analysis_matrix = self._analysis_matrix()

    # -- sizes ----------------------------------------------------------------
    def component_degree(self, n: int) -> int:
        """Largest ``k`` with ``deg(z^(n-1) r^k) <= D``."""
        self._check_index(n)
        return (self.D - n + 1) // self.N if self.D >= n - 1 else -1

    def _check_index(self, n: int) -> None:
        if not 1 <= n <= self.N:
            raise IndexError(f"component index must be in 1..{self.N}")

    @property
    def cover(self) -> DiskCover:
        if self._cover is None:
            self._cover = build_cover(self.r)
        return self._cover

    # -- polynomial mode ------------------------------------------------------
    def _synthesis_matrix(self, n: int) -> np.ndarray:
        K = self.component_degree(n)
        cols = []
        power = Poly([1.0])
        shift = Poly.monomial(n - 1)
        for _ in range(K + 1):
            col = np.zeros(self.D + 1, dtype=complex)
            c = (shift * power).coeffs
            col[: c.size] = c
            cols.append(col)
            power = power * self.r_poly
        return np.column_stack(cols) if cols else np.zeros((self.D + 1, 0), complex)

    def _analysis_matrix(self) -> np.ndarray:
        """Rows stacked by component: block ``n`` has ``component_degree(n) + 1`` rows."""
        cols = [np.concatenate(self._expand(Poly.monomial(k))) for k in range(self.D + 1)]
        return np.column_stack(cols)

    def _expand(self, f: Poly) -> list[np.ndarray]:
        comps = [np.zeros(self.component_degree(n) + 1, dtype=complex) for n in range(1, self.N + 1)]
        k = 0
        rest = f
        while not rest.is_zero:
            rest, rem = rest.divmod(self.r_poly)
            for i, c in enumerate(rem.coeffs):
                if k >= comps[i].size:
                    raise DegreeOverflow(f"component {i + 1} would exceed degree {comps[i].size - 1}")
                comps[i][k] = c
            k += 1
        return comps

    # -- public API -----------------------------------------------------------
    def analysis(self, f) -> list:
        """Components ``F_1..F_N`` of ``f``.

        In polynomial mode ``f`` is a coefficient vector (ascending powers,
        degree at most ``D``) and each ``F_n`` is a coefficient vector of
        length ``component_degree(n) + 1``.  In quadrature mode ``f`` may also
        be an :class:`AnalyticFn`; each ``F_n`` is its Taylor coefficient
        vector up to ``floor(D / N)``.
        """
        if self.mode == "polynomial":
            c = as_poly(f)
            if c.degree > self.D:
                raise DegreeOverflow(f"deg f = {c.degree} exceeds the cap {self.D}")
            vec = np.zeros(self.D + 1, dtype=complex)
            vec[: c.coeffs.size] = c.coeffs
            flat = self.analysis_matrix @ vec
            sizes = [self.component_degree(n) + 1 for n in range(1, self.N + 1)]
            return list(np.split(flat, np.cumsum(sizes)[:-1]))
        res = self.decomposition(f)
        K = self.D // self.N
        return [res.taylor[: K + 1, n] for n in range(self.N)]

    def decomposition(self, f) -> DecompositionResult:
        """Full :class:`DecompositionResult` of ``f`` (quadrature path)."""
        if not isinstance(f, AnalyticFn):
            c = as_poly(f)
            if c.degree > self.D:
                raise DegreeOverflow(f"deg f = {c.degree} exceeds the cap {self.D}")
            f = AnalyticFn.from_poly(c)
        return decompose(self.r, self.basis, f, self.cover, quad_nodes=self.quad_nodes,
                         taylor_order=max(self.D // self.N, 1), validate=0)

    def synthesis(self, n: int, g):
        """``T_n^* g = e_n g(r)``.

        Polynomial mode returns the coefficient vector (length ``D + 1``);
        quadrature mode returns an :class:`AnalyticFn`.
        """
        self._check_index(n)
        g = as_poly(g)
        if self.mode == "polynomial":
            K = self.component_degree(n)
            if g.degree > K:
                raise DegreeOverflow(f"deg(e_{n} g(r)) would exceed the cap {self.D}")
            vec = np.zeros(K + 1, dtype=complex)
            vec[: g.coeffs.size] = g.coeffs
            return self.synthesis_matrices[n - 1] @ vec
        basis, r = self.basis, self.r

        def h(z):
            z = np.asarray(z, dtype=complex)
            return basis.Z(z)[..., n - 1] * g(r(z))

        return AnalyticFn(h, name=f"T{n}*g")

    def verify_cuntz(self, samples: int = 40) -> CuntzReport:
        """Residuals of ``sum_n T_n^* T_n = I`` and ``T_n T_m^* = delta_nm I``.

        Completeness is checked on all monomials up to ``D``.  Orthogonality
        is checked for ``T_m^* w^j`` with ``j`` up to ``component_degree(m)``
        (at most ``floor(D / N)``), so that ``z^(m-1) r^j`` stays within the cap.  In quadrature mode the
        completeness residual is measured on validation points of
        ``Omega_0``.
        """
        N, D = self.N, self.D
        if self.mode == "polynomial":
            total = sum(self.synthesis_matrices[n] @ self._block(n) for n in range(N))
            comp = float(np.max(np.abs(total - np.eye(D + 1))))
            orth = 0.0
            for m in range(1, N + 1):
                for j in range(self.component_degree(m) + 1):
                    comps = self.analysis(self.synthesis(m, Poly.monomial(j)))
                    for n, Fn in enumerate(comps, start=1):
                        target = np.zeros(Fn.size, dtype=complex)
                        if n == m:
                            target[j] = 1.0
                        orth = max(orth, float(np.max(np.abs(Fn - target))) if Fn.size else 0.0)
            return CuntzReport(comp, orth, self.mode, D)
        from .representation import validation_points

        pts = validation_points(self.r, self.cover.rho, samples)
        comp = 0.0
        for k in range(D + 1):
            res = self.decomposition(Poly.monomial(k))
            comp = max(comp, float(np.max(np.abs(res.reconstruct(pts) - pts ** k))))
        orth = 0.0
        for m in range(1, N + 1):
            for j in range(max(self.component_degree(m), 0) + 1):
                comps = self.analysis(self.synthesis(m, Poly.monomial(j)))
                for n, Fn in enumerate(comps, start=1):
                    target = np.zeros(Fn.size, dtype=complex)
                    if n == m:
                        target[j] = 1.0
                    orth = max(orth, float(np.max(np.abs(Fn - target))))
        return CuntzReport(comp, orth, self.mode, D)

    def _block(self, idx: int) -> np.ndarray:
        sizes = [self.component_degree(n) + 1 for n in range(1, self.N + 1)]
        start = int(np.sum(sizes[:idx]))
        return self.analysis_matrix[start:start + sizes[idx]]

    def analysis_block(self, n: int) -> np.ndarray:
        """Matrix of ``T_n`` on the truncated coefficient space (polynomial mode)."""
        self._check_index(n)
        if self.mode != "polynomial":
            raise ValueError("explicit matrices exist only in polynomial mode")
        return self._block(n - 1)


def kernel_fixed_point_check(k: Kernel, r: RationalFn, basis: StateBasis | None, grid: Sequence[complex]) -> float:
    """``max |k(z, w) - (sum_n e_n(z) conj(e_n(w))) k(r(z), r(w))|`` over grid pairs.

    A diagnostic for the functional equation linking ``k`` to ``r``.
    """
    if basis is None:
        basis = StateBasis.canonical(r)
    pts = np.asarray(grid, dtype=complex).reshape(-1)
    Z = basis.Z(pts)
    rz = r(pts)
    worst = 0.0
    for i, z in enumerate(pts):
        for j, w in enumerate(pts):
            weight = complex(np.sum(Z[i] * np.conj(Z[j])))
            diff = k(z, w) - weight * k(rz[i], rz[j])
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst


class TruncatedSpace:
    """Polynomials of degree at most ``D`` with a Hermitian positive Gram matrix.

    ``norm2(c) = c^* gram c`` for a coefficient vector ``c``.
    """

    def __init__(self, D: int, gram: np.ndarray | None = None):
        self.D = int(D)
        g = np.eye(self.D + 1, dtype=complex) if gram is None else np.asarray(gram, dtype=complex)
        if g.shape != (self.D + 1, self.D + 1):
            raise ValueError(f"Gram matrix must be {(self.D + 1,) * 2}")
        if np.max(np.abs(g - g.conj().T)) > 1e-9 * (1 + np.max(np.abs(g))):
            raise ValueError("Gram matrix is not Hermitian")
        if np.linalg.eigvalsh((g + g.conj().T) / 2).min() < -1e-9 * (1 + np.max(np.abs(g))):
            raise ValueError("Gram matrix is not positive semidefinite")
        self.gram = g

    @property
    def dim(self) -> int:
        return self.D + 1

    @classmethod
    def l2(cls, D: int) -> "TruncatedSpace":
        return cls(D)

    @classmethod
    def from_kernel(cls, k: Kernel, D: int, radius: float = 0.5, nodes: int = 128) -> "TruncatedSpace":
        """Gram matrix of ``H(k)`` on ``1, z, .., z^D``.

        The coefficients ``C_ij`` of ``k(z, w) = sum C_ij z^i conj(w)^j`` are
        read by a two dimensional FFT on ``|z| = |w| = radius``; the Gram
        matrix of the monomials is ``C^{-1}`` restricted to degree ``D``,
        which is exact when ``C`` is diagonal.
        """
        if k.size != 1:
            raise ValueError("scalar kernels only")
        theta = 2 * np.pi * np.arange(nodes) / nodes
        pts = radius * np.exp(1j * theta)
        vals = np.array([[k(z, w)[0, 0] for w in pts] for z in pts])
        # k(z_a, w_b) = sum C_ij radius^(i+j) e^{i i theta_a} e^{-i j theta_b}
        coeffs = np.fft.ifft(np.fft.fft(vals, axis=0), axis=1) / nodes
        C = coeffs[: D + 1, : D + 1] / np.outer(radius ** np.arange(D + 1), radius ** np.arange(D + 1))
        return cls(D, np.linalg.inv(C))

    def norm2(self, coeffs) -> float:
        c = np.zeros(self.D + 1, dtype=complex)
        v = np.asarray(coeffs, dtype=complex).reshape(-1)
        if v.size > self.D + 1 and np.any(np.abs(v[self.D + 1:]) > 0):
            raise DegreeOverflow("coefficient vector exceeds the space dimension")
        c[: min(v.size, self.D + 1)] = v[: self.D + 1]
        return float(np.real(c.conj() @ self.gram @ c))
