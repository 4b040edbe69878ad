"""The generalized backward shift attached to a rational function.

For ``alpha`` with ``N`` simple preimages ``w_1..w_N`` under ``r``::

    (R_alpha f)(z) = f(z) / (r(z) - alpha) - sum_n f(w_n) / (r'(w_n) (z - w_n)).

The right-hand side has removable singularities at the ``w_n``.  Exactly at
``w_m`` the limit is::

    f'(w_m)/r'(w_m) - f(w_m) r''(w_m) / (2 r'(w_m)**2)
        - sum_{n != m} f(w_n) / (r'(w_n) (w_m - w_n))

and in a small punctured neighbourhood the value is recovered from a Cauchy
integral over a circle on which the direct formula is well conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .analytic import AnalyticFn, composite
from .errors import EvaluationAtPoleOfR
from .polyrat import RationalFn, require_omega
from .statespace import StateBasis

#: Points closer than ``SWITCH_TOL * (1 + |w|)`` to a preimage use the
#: singularity-free branches.
SWITCH_TOL = 1e-5
#: Number of trapezoidal nodes on the interpolation circle.
CAUCHY_NODES = 32

_IDENTITY = RationalFn([0.0, 1.0])


def _expand(a: np.ndarray, extra: int) -> np.ndarray:
    return a.reshape(a.shape + (1,) * extra)


@dataclass(frozen=True)
class ResolventApplication:
    """The image ``g = R_alpha f`` together with the data it was built from."""

    r: RationalFn
    f: AnalyticFn
    alpha: complex
    preimages: tuple[complex, ...]
    switch_tol: float = SWITCH_TOL
    g: AnalyticFn = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "g", AnalyticFn(self._evaluate, self.f.shape, name=f"R[{self.f.name}]"))

    # -- cached data ---------------------------------------------------------
    @cached_property
    def _w(self) -> np.ndarray:
        return np.array(self.preimages, dtype=complex)

    @cached_property
    def residues(self) -> np.ndarray:
        """``1 / r'(w_n)``."""
        return 1.0 / self.r.derivative(self._w)

    @cached_property
    def _fw(self) -> np.ndarray:
        return np.asarray(self.f(self._w), dtype=complex)

    @cached_property
    def _radii(self) -> np.ndarray:
        w = self._w
        others = [np.delete(w, m) for m in range(w.size)]
        poles = np.array(self.r.poles, dtype=complex)
        radii = []
        for m in range(w.size):
            obstacles = np.concatenate((others[m], poles))
            base = 1e-2 * (1 + abs(w[m]))
            if obstacles.size:
                base = min(base, 0.3 * float(np.min(np.abs(obstacles - w[m]))))
            radii.append(base)
        return np.array(radii)

    # -- evaluation ----------------------------------------------------------
    def _direct(self, z: np.ndarray) -> np.ndarray:
        extra = len(self.f.shape)
        p, q = self.r.p, self.r.q
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = q(z) / (p(z) - self.alpha * q(z))
            out = self.f(z) * _expand(inv, extra)
            for wn, res, fw in zip(self._w, self.residues, self._fw):
                out = out - fw * _expand(res / (z - wn), extra)
        return out

    def derivative_branch(self, m: int) -> np.ndarray:
        """Exact value of ``R_alpha f`` at the preimage ``w_m``."""
        w = self._w[m]
        r1 = complex(self.r.derivative(w))
        r2 = complex(self.r.derivative(w, order=2))
        out = self.f.derivative(w) / r1 - self._fw[m] * r2 / (2 * r1 * r1)
        for n, wn in enumerate(self._w):
            if n != m:
                out = out - self._fw[n] * self.residues[n] / (w - wn)
        return np.asarray(out, dtype=complex)

    def _cauchy(self, m: int, z: np.ndarray) -> np.ndarray:
        w, h = self._w[m], self._radii[m]
        theta = 2 * np.pi * np.arange(CAUCHY_NODES) / CAUCHY_NODES
        s = w + h * np.exp(1j * theta)
        gs = self._direct(s)
        kernel = (s - w)[None, :] / (s[None, :] - z[:, None]) / CAUCHY_NODES
        return np.tensordot(kernel, gs, axes=(1, 0))

    def _evaluate(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        flat = z.reshape(-1)
        out = self._direct(flat)
        for m, w in enumerate(self._w):
            dist = np.abs(flat - w)
            near = dist < self.switch_tol * (1 + abs(w))
            if not near.any():
                continue
            exact = near & (dist <= 1e-15 * (1 + abs(w)))
            if exact.any():
                out[exact] = self.derivative_branch(m)
            rest = near & ~exact
            if rest.any():
                out[rest] = self._cauchy(m, flat[rest])
        bad = ~np.isfinite(out.reshape(flat.size, -1)).all(axis=1)
        if bad.any():
            raise EvaluationAtPoleOfR(f"R_alpha f is not computable at z = {complex(flat[np.argmax(bad)])}")
        return out.reshape(z.shape + self.f.shape)

    def __call__(self, z):
        return self.g(z)


def apply_resolvent(r: RationalFn, f, alpha: complex, switch_tol: float = SWITCH_TOL) -> ResolventApplication:
    """Build ``R_alpha f`` for the rational function ``r``.

    Raises :class:`DegenerateAlpha` unless ``alpha`` has ``N`` simple preimages.
    """
    f = AnalyticFn.coerce(f)
    alpha = complex(alpha)
    roots = tuple(require_omega(r, alpha))
    return ResolventApplication(r, f, alpha, roots, switch_tol)


def backward_shift(F, alpha: complex) -> ResolventApplication:
    """Classical ``(F(w) - F(alpha)) / (w - alpha)``."""
    return apply_resolvent(_IDENTITY, F, alpha)


def check_resolvent_identity(r: RationalFn, f, alpha: complex, beta: complex, samples,
                             relative: bool = False) -> float:
    """Largest deviation from ``R_a - R_b = (a - b) R_a R_b`` on ``samples``.

    With ``relative=True`` the deviation is divided by
    ``1 + max |R_a f|, |R_b f|, |a - b| |R_a R_b f|`` over the samples.
    """
    alpha, beta = complex(alpha), complex(beta)
    if alpha == beta:
        raise ValueError("the resolvent identity needs alpha != beta")
    f = AnalyticFn.coerce(f)
    z = np.asarray(samples, dtype=complex)
    ra = apply_resolvent(r, f, alpha)
    rb = apply_resolvent(r, f, beta)
    rab = apply_resolvent(r, rb.g, alpha)
    a_val, b_val, ab_val = ra(z), rb(z), (alpha - beta) * rab(z)
    resid = float(np.max(np.abs(a_val - b_val - ab_val)))
    if relative:
        scale = max(float(np.max(np.abs(v))) for v in (a_val, b_val, ab_val))
        resid /= 1.0 + scale
    return resid


@dataclass(frozen=True)
class IntertwineResult:
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def difference(self) -> float:
        return float(np.max(np.abs(np.asarray(self.lhs) - np.asarray(self.rhs))))


def intertwine(r: RationalFn, basis: StateBasis, F, alpha: complex, z) -> IntertwineResult:
    """Both sides of ``R_alpha (Z_r F(r)) = Z_r (R_alpha F)(r)`` at ``z``.

    The left side applies the generalized shift to the composite function,
    the right side applies the classical backward shift to ``F``.
    """
    F = AnalyticFn.coerce(F)
    f = composite(basis, F)
    lhs = apply_resolvent(r, f, alpha)(z)
    shifted = backward_shift(F, alpha).g
    rhs = composite(basis, AnalyticFn(shifted, F.shape))(z)
    return IntertwineResult(np.asarray(lhs), np.asarray(rhs))


def eigenfunction(basis: StateBasis, a: complex, b: complex) -> AnalyticFn:
    """``z -> Z_r(z) / (a - r(z) b)``, a C^N-valued eigenvector of every R_alpha.

    Its eigenvalue for ``R_alpha`` is ``b / (a - alpha b)``.
    """
    a, b = complex(a), complex(b)
    r = basis.r

    def f(z):
        z = np.asarray(z, dtype=complex)
        return basis.Z(z) / (a - r(z) * b)[..., None]

    return AnalyticFn(f, (basis.N,), name="eigen")


def eigen_residual(basis: StateBasis, a: complex, b: complex, alpha: complex, samples) -> tuple[float, complex]:
    """``max |R_alpha f - lam f|`` for the eigenfunction and its eigenvalue ``lam``."""
    a, b, alpha = complex(a), complex(b), complex(alpha)
    f = eigenfunction(basis, a, b)
    lam = b / (a - alpha * b)
    z = np.asarray(samples, dtype=complex)
    g = apply_resolvent(basis.r, f, alpha)(z)
    return float(np.max(np.abs(g - lam * f(z)))), lam


def model_action(r: RationalFn, basis: StateBasis, f, h_coeffs) -> AnalyticFn:
    """``z -> r(z) f(z) + (Z_r(z) (x) I_p) h``."""
    f = AnalyticFn.coerce(f)
    h = np.asarray(h_coeffs, dtype=complex).reshape(-1)
    N = basis.N
    p = f.p
    if h.size != N * p:
        raise ValueError(f"h must have N*p = {N * p} entries")
    H = h.reshape(N, p)

    def g(z):
        z = np.asarray(z, dtype=complex)
        rz = r(z)
        val = f(z) * _expand(rz, len(f.shape))
        corr = basis.Z(z) @ H
        return val + (corr[..., 0] if not f.shape else corr.reshape(z.shape + f.shape))

    return AnalyticFn(g, f.shape, name="A_r f")


def resolvent_h_coeffs(r: RationalFn, basis: StateBasis, f, alpha: complex) -> np.ndarray:
    """Coefficients of ``h`` with ``(r - alpha) R_alpha f + Z_r h = f``.

    ``h = sum_n v(w_n) (x) f(w_n) / r'(w_n)`` where ``v`` is the state vector
    of the realization.  For ``f = Z_r F(r)`` this equals ``F(alpha)``.
    """
    f = AnalyticFn.coerce(f)
    roots = np.array(require_omega(r, alpha))
    v = basis.state_vector(roots)
    fw = np.asarray(f(roots), dtype=complex).reshape(roots.size, -1)
    rp = r.derivative(roots)
    h = sum(np.kron(v[n], fw[n]) / rp[n] for n in range(roots.size))
    return np.asarray(h)
