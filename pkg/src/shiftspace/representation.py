"""Representation ``f(z) = (Z_r(z) (x) I_p) F(r(z))`` of analytic functions.

Disks ``D_l`` are placed around the distinct zeros of ``r``.  With
``rho = min |r|`` over their boundaries, every ``f`` analytic near the closed
disks is written through::

    F(w) = 1/(2 pi i) sum_l  int_{dD_l} v(s) (x) f(s) / (r(s) - w) ds,    |w| < rho,

where ``v(s)`` is the state vector of the realization.  Taylor coefficients
of ``F`` at the origin follow by expanding ``1/(r(s) - w)`` in powers of
``w / r(s)``, which is legitimate because ``|r(s)| >= rho`` on the contours.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .analytic import AnalyticFn, Kernel, composite
from .errors import (CoverConstructionFailed, DegenerateAlpha, EvalOutsideRho, QuadratureDivergence,
                     ZeroFunctional)
from .polyrat import RationalFn, cluster_roots, poly_roots, require_omega
from .statespace import StateBasis

log = logging.getLogger(__name__)

#: Default number of trapezoidal nodes per circle.
QUAD_NODES = 2048
#: Default truncation order of the Taylor series of F.
TAYLOR_ORDER = 32
#: Relative disagreement tolerated between the n and n/2 node rules.
QUAD_TOL = 1e-8


@dataclass(frozen=True)
class CoverPolicy:
    """How disk radii are chosen and how the inclusion condition is sampled.

    Radii start at ``initial_fraction`` times the distance from each zero to
    the nearest other zero or pole (``isolated_radius`` if there is none)
    and are multiplied by ``shrink`` until the sampled check passes.
    """

    initial_fraction: float = 0.5
    isolated_radius: float = 1.0
    shrink: float = 0.7
    max_shrinks: int = 40
    boundary_samples: int = 4096
    grid_size: int = 201
    probe_rays: int = 64
    probe_steps: int = 40
    margin: float = 1e-6


@dataclass(frozen=True)
class DiskCover:
    """Disjoint disks around the distinct zeros of ``r`` and the radius ``rho``."""

    centers: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    radii: tuple[float, ...]
    rho: float
    policy: CoverPolicy = field(default_factory=CoverPolicy)
    grid_box: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    shrinks: int = 0

    def contains(self, z, closed: bool = True) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        inside = np.zeros(z.shape, dtype=bool)
        for c, rad in zip(self.centers, self.radii):
            d = np.abs(z - c)
            inside |= (d <= rad) if closed else (d < rad)
        return inside

    def nodes(self, n: int) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per disk: points ``s_j`` and weights ``(s_j - c) / n`` of the trapezoidal rule.

        With these weights ``sum_j w_j g(s_j)`` approximates
        ``1/(2 pi i) int g(s) ds`` over the positively oriented circle.
        """
        theta = 2 * np.pi * np.arange(n) / n
        out = []
        for c, rad in zip(self.centers, self.radii):
            e = rad * np.exp(1j * theta)
            out.append((c + e, e / n))
        return out

    def to_json(self) -> dict:
        return {
            "centers": [[c.real, c.imag] for c in self.centers],
            "multiplicities": list(self.multiplicities),
            "radii": list(self.radii),
            "rho": self.rho,
            "grid_box": list(self.grid_box),
            "shrinks": self.shrinks,
        }


def _circle_min(r: RationalFn, c: complex, rad: float, samples: int) -> float:
    theta = 2 * np.pi * np.arange(samples) / samples
    vals = np.abs(r(c + rad * np.exp(1j * theta)))
    j = int(np.argmin(vals))
    best = float(vals[j])
    step = 2 * np.pi / samples
    g = lambda t: float(np.abs(r(c + rad * np.exp(1j * t))))  # noqa: E731
    try:
        res = minimize_scalar(g, bracket=(theta[j] - step, theta[j], theta[j] + step), method="golden",
                              options={"xtol": 1e-10})
        if np.isfinite(res.fun):
            best = min(best, float(res.fun))
    except ValueError:
        # The sampled minimum is not strictly bracketed (flat |r|); keep the sample.
        pass
    return best


def _rho(r: RationalFn, centers, radii, samples: int) -> float:
    return min(_circle_min(r, c, rad, samples) for c, rad in zip(centers, radii))


def _violation(r: RationalFn, centers, radii, rho: float, policy: CoverPolicy):
    """Return ``(point, box)``; ``point`` is None when the sampled inclusion holds."""
    threshold = rho * (1 - policy.margin)
    lead = r.at_infinity
    if lead is not None and abs(lead) < threshold:
        return complex(np.inf), (0.0, 0.0, 0.0, 0.0)
    pts = np.array(list(centers) + list(r.poles), dtype=complex)
    mid = complex(np.mean(pts))
    extent = float(np.max(np.abs(pts - mid))) + max(radii)
    half = 2 * extent + 1.0
    box = (mid.real - half, mid.real + half, mid.imag - half, mid.imag + half)
    xs = np.linspace(box[0], box[1], policy.grid_size)
    ys = np.linspace(box[2], box[3], policy.grid_size)
    Zg = xs[None, :] + 1j * ys[:, None]
    probes_r = half * np.geomspace(1.0, 1e6, policy.probe_steps)
    ang = 2 * np.pi * (np.arange(policy.probe_rays) + 0.5) / policy.probe_rays
    probes = mid + probes_r[:, None] * np.exp(1j * ang)[None, :]
    for cloud in (Zg, probes):
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.abs(r.p(cloud)) < threshold * np.abs(r.q(cloud))
        inside = np.zeros(cloud.shape, dtype=bool)
        for c, rad in zip(centers, radii):
            inside |= np.abs(cloud - c) <= rad
        bad = vals & ~inside
        if bad.any():
            return complex(cloud[bad][0]), box
    return None, box


def build_cover(r: RationalFn, policy: CoverPolicy | None = None) -> DiskCover:
    """Choose disks around the zeros of ``r`` satisfying the sampled inclusion check.

    Raises :class:`CoverConstructionFailed` (naming the offending grid point)
    when the check still fails after ``policy.max_shrinks`` shrink steps.
    """
    policy = policy or CoverPolicy()
    groups = cluster_roots(r.zeros)
    centers = [c for c, _ in groups]
    mults = [m for _, m in groups]
    poles = list(r.poles)
    radii = []
    for i, c in enumerate(centers):
        others = [abs(c - x) for j, x in enumerate(centers) if j != i] + [abs(c - x) for x in poles]
        radii.append(policy.initial_fraction * min(others) if others else policy.isolated_radius)
    last_bad = None
    for step in range(policy.max_shrinks + 1):
        rho = _rho(r, centers, radii, policy.boundary_samples)
        bad, box = _violation(r, centers, radii, rho, policy)
        if bad is None and rho > 0:
            log.debug("cover found after %d shrink steps, rho = %.6g", step, rho)
            return DiskCover(tuple(complex(c) for c in centers), tuple(mults), tuple(float(x) for x in radii),
                             float(rho), policy, box, step)
        last_bad = bad
        radii = [policy.shrink * x for x in radii]
    raise CoverConstructionFailed(
        f"|r(z)| < rho outside the disks at z = {last_bad} after {policy.max_shrinks} shrink steps")


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------

def _flat_values(f: AnalyticFn, s: np.ndarray) -> np.ndarray:
    return np.asarray(f(s), dtype=complex).reshape(s.size, -1)


@dataclass
class DecompositionResult:
    """``F`` with ``f = (Z_r (x) I_p) F(r)``; components are ordered ``n * p + l``."""

    r: RationalFn
    basis: StateBasis
    cover: DiskCover
    taylor: np.ndarray  # shape (order + 1, N p); row k holds the coefficient of w^k
    p: int
    quad_nodes: int
    _s: np.ndarray = field(repr=False)
    _weights: np.ndarray = field(repr=False)
    _rs: np.ndarray = field(repr=False)
    _vf: np.ndarray = field(repr=False)
    roundtrip_error: float = float("nan")
    roundtrip_scale: float = float("nan")
    validation_points: np.ndarray = field(default_factory=lambda: np.zeros(0, complex), repr=False)

    @property
    def rho(self) -> float:
        return self.cover.rho

    @property
    def order(self) -> int:
        return self.taylor.shape[0] - 1

    def _check(self, w: np.ndarray, extended: bool) -> None:
        if extended:
            gap = np.min(np.abs(w.reshape(-1, 1) - self._rs[None, :]), axis=1) if w.size else np.zeros(0)
            if np.any(gap <= 1e-8 * (1 + np.abs(w.reshape(-1)))):
                raise EvalOutsideRho("w lies on the image of a contour; F is not defined there")
        elif np.any(np.abs(w) >= self.rho):
            raise EvalOutsideRho(f"|w| must be < rho = {self.rho:.6g}")

    def evaluate(self, w, extended: bool = False) -> np.ndarray:
        """Quadrature value of ``F(w)``, shape ``w.shape + (N p,)``.

        ``extended=True`` allows any ``w`` off the images ``r(dD_l)``, where
        the integral still defines an analytic function.
        """
        w = np.asarray(w, dtype=complex)
        self._check(w, extended)
        flat = w.reshape(-1)
        M = self._weights[None, :] / (self._rs[None, :] - flat[:, None])
        return (M @ self._vf).reshape(w.shape + (self._vf.shape[1],))

    @property
    def F(self) -> AnalyticFn:
        return AnalyticFn(self.evaluate, (self._vf.shape[1],), name="F")

    def taylor_eval(self, w) -> np.ndarray:
        """Truncated Taylor series of ``F`` at ``w``."""
        w = np.asarray(w, dtype=complex)
        self._check(w, False)
        powers = w.reshape(-1, 1) ** np.arange(self.order + 1)[None, :]
        return (powers @ self.taylor).reshape(w.shape + (self.taylor.shape[1],))

    def reconstruct(self, z, use_taylor: bool = False) -> np.ndarray:
        """``(Z_r(z) (x) I_p) F(r(z))``."""
        z = np.asarray(z, dtype=complex)
        rz = self.r(z)
        vals = self.taylor_eval(rz) if use_taylor else self.evaluate(rz)
        Z = self.basis.Z(z)
        out = np.einsum("...n,...np->...p", Z, vals.reshape(z.shape + (self.basis.N, self.p)))
        return out[..., 0] if self.p == 1 else out

    def shifted(self, alpha: complex) -> AnalyticFn:
        """``R_alpha F`` from the contour formula with ``1/((r(s) - alpha)(r(s) - w))``."""
        alpha = complex(alpha)
        if np.min(np.abs(self._rs - alpha)) <= 1e-8 * (1 + abs(alpha)):
            raise EvalOutsideRho("alpha lies on the image of a contour")

        def g(w):
            w = np.asarray(w, dtype=complex)
            self._check(w, True)
            flat = w.reshape(-1)
            M = self._weights[None, :] / ((self._rs - alpha)[None, :] * (self._rs[None, :] - flat[:, None]))
            return (M @ self._vf).reshape(w.shape + (self._vf.shape[1],))

        return AnalyticFn(g, (self._vf.shape[1],), name=f"R_{alpha}F")

    def to_json(self) -> dict:
        return {
            "taylor": [[[c.real, c.imag] for c in row] for row in self.taylor.T],
            "rho": self.rho,
            "roundtrip_error": self.roundtrip_error,
            "cover": self.cover.to_json(),
            "quad_nodes": self.quad_nodes,
            "basis": list(self.basis.labels),
        }


def _moments(weights, rs, vf, rho, order):
    """Scaled Taylor moments ``rho^k c_k``; each row ``k`` is a quadrature sum."""
    base = weights / rs  # 1/(2 pi i) ds / r(s)
    ratio = rho / rs
    out = np.empty((order + 1, vf.shape[1]), dtype=complex)
    cur = base.copy()
    for k in range(order + 1):
        out[k] = cur @ vf
        cur = cur * ratio
    return out


def validation_points(r: RationalFn, rho: float, count: int = 100, fraction: float = 0.8) -> np.ndarray:
    """Deterministic points of ``Omega_0``: preimages of a spiral in ``|w| <= fraction rho``."""
    n_w = int(np.ceil(count / r.N))
    golden = np.pi * (3 - np.sqrt(5))
    pts = []
    for j in range(n_w):
        w = fraction * rho * np.sqrt((j + 0.5) / n_w) * np.exp(1j * golden * j)
        poly = r.p - w * r.q
        if poly.degree < r.N:
            continue
        pts.extend(poly_roots(poly, tol=1e-8))
    return np.array(pts[:count], dtype=complex)


def decompose(r: RationalFn, basis: StateBasis | None, f, cover: DiskCover | None = None,
              quad_nodes: int = QUAD_NODES, taylor_order: int = TAYLOR_ORDER, quad_tol: float = QUAD_TOL,
              taylor_method: str = "moments", validate: int = 100) -> DecompositionResult:
    """Compute ``F`` with ``f(z) = (Z_r(z) (x) I_p) F(r(z))`` on ``Omega_0``.

    Parameters
    ----------
    f:
        Scalar or ``C^p``-valued :class:`AnalyticFn` (or anything
        :meth:`AnalyticFn.coerce` accepts), analytic near the closed disks.
    quad_nodes:
        Trapezoidal nodes per circle; must be even.  The rule on every other
        node is used to detect divergence (:class:`QuadratureDivergence`).
    taylor_method:
        ``"moments"`` integrates ``v f / r^(k+1)`` on the disk boundaries;
        ``"contour"`` samples ``F`` on ``|w| = rho / 2`` and applies an FFT.
    validate:
        Number of validation points for ``roundtrip_error`` (0 disables).
    """
    if basis is None:
        basis = StateBasis.canonical(r)
    if quad_nodes < 8 or quad_nodes % 2:
        raise ValueError("quad_nodes must be an even integer >= 8")
    f = AnalyticFn.coerce(f)
    if len(f.shape) > 1:
        raise ValueError("f must be scalar or vector valued")
    cover = cover or build_cover(r)
    p = f.p
    rho = cover.rho

    parts = cover.nodes(quad_nodes)
    s = np.concatenate([pt for pt, _ in parts])
    weights = np.concatenate([wt for _, wt in parts])
    rs = r(s)
    v = basis.state_vector(s)  # (M, N)
    fs = _flat_values(f, s)  # (M, p)
    vf = (v[:, :, None] * fs[:, None, :]).reshape(s.size, -1)
    if not np.all(np.isfinite(vf)):
        raise QuadratureDivergence("f or the state vector is not finite on the contours")

    full = _moments(weights, rs, vf, rho, taylor_order)
    half_idx = np.concatenate([np.arange(0, quad_nodes, 2) + l * quad_nodes for l in range(len(parts))])
    half = _moments(2 * weights[half_idx], rs[half_idx], vf[half_idx], rho, taylor_order)
    scale = 1.0 + float(np.max(np.abs(full)))
    gap = float(np.max(np.abs(full - half)))
    if gap > quad_tol * scale:
        raise QuadratureDivergence(
            f"{quad_nodes} and {quad_nodes // 2} node rules differ by {gap:.3e} (scale {scale:.3e})")

    res = DecompositionResult(r, basis, cover, np.zeros((taylor_order + 1, vf.shape[1]), complex), p,
                              quad_nodes, s, weights, rs, vf)
    if taylor_method == "moments":
        res.taylor = full / (rho ** np.arange(taylor_order + 1))[:, None]
    elif taylor_method == "contour":
        res.taylor = taylor_by_contour(res.evaluate, rho / 2, taylor_order, vf.shape[1])
    else:
        raise ValueError(f"unknown taylor_method {taylor_method!r}")

    if validate:
        pts = validation_points(r, rho, validate)
        fz = _flat_values(f, pts)
        rec = np.asarray(res.reconstruct(pts)).reshape(pts.size, -1)
        res.validation_points = pts
        res.roundtrip_error = float(np.max(np.abs(fz - rec))) if pts.size else 0.0
        res.roundtrip_scale = float(np.max(np.abs(fz))) if pts.size else 0.0
    return res


def taylor_by_contour(F: Callable, radius: float, order: int, width: int, nodes: int | None = None) -> np.ndarray:
    """Taylor coefficients at 0 from samples of ``F`` on ``|w| = radius``."""
    nodes = nodes or max(4 * (order + 1), 128)
    w = radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    vals = np.asarray(F(w)).reshape(nodes, width)
    coeffs = np.fft.fft(vals, axis=0) / nodes
    return coeffs[: order + 1] / (radius ** np.arange(order + 1))[:, None]


# ---------------------------------------------------------------------------
# uniqueness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniquenessReport:
    """Outcome of :func:`uniqueness_check`.

    ``injective`` says the sampled map from Taylor coefficients (up to
    ``order``) of ``F`` to values of ``Z_r F(r)`` has full column rank;
    ``holds`` is the implication "values vanish => coefficients vanish".
    """

    vanishes: bool
    coefficient_norm: float
    value_norm: float
    sigma_min: float
    sigma_max: float
    order: int
    injective: bool
    holds: bool

    @property
    def condition(self) -> float:
        return self.sigma_max / self.sigma_min if self.sigma_min > 0 else float("inf")

    def __bool__(self) -> bool:
        return self.holds


def uniqueness_check(r: RationalFn, basis: StateBasis | None, F, samples, order: int | None = None,
                     tol: float = 1e-9, taylor_radius: float = 0.25) -> UniquenessReport:
    """Check on ``samples`` that ``Z_r F(r) = 0`` forces ``F = 0``.

    The samples should lie in ``r^{-1}`` of a neighbourhood of 0.  Taylor
    coefficients of ``F`` are read from its values on ``|w| = taylor_radius``.
    """
    if basis is None:
        basis = StateBasis.canonical(r)
    F = AnalyticFn.coerce(F)
    z = np.asarray(samples, dtype=complex).reshape(-1)
    N = basis.N
    if order is None:
        order = max(0, min(6, z.size // N - 1))
    Z = basis.Z(z)
    rz = r(z)
    A = np.concatenate([Z * (rz ** k)[:, None] for k in range(order + 1)], axis=1)
    sv = np.linalg.svd(A, compute_uv=False)
    smax = float(sv[0]) if sv.size else 0.0
    smin = float(sv[-1]) if sv.size and A.shape[0] >= A.shape[1] else 0.0
    injective = smin > 1e-10 * max(smax, 1e-300)
    width = F.shape[0] if F.shape else 1
    coeffs = taylor_by_contour(F, taylor_radius, order, width)
    cnorm = float(np.max(np.abs(coeffs)))
    vals = composite(basis, F)(z) if width == N else None
    if vals is None:
        raise ValueError(f"F must be C^{N}-valued")
    vnorm = float(np.max(np.abs(vals)))
    vanishes = vnorm <= tol
    holds = injective and ((not vanishes) or cnorm <= 1e3 * tol)
    return UniquenessReport(vanishes, cnorm, vnorm, smin, smax, order, injective, holds)


# ---------------------------------------------------------------------------
# kernels and interpolation
# ---------------------------------------------------------------------------

def kernel_transform(K0: Kernel, r: RationalFn, basis: StateBasis | None = None, p: int = 1) -> Kernel:
    """``(z, w) -> (Z_r(z) (x) I_p) K0(r(z), r(w)) (Z_r(w) (x) I_p)^*``.

    ``K0`` must be of size ``N p``.
    """
    if basis is None:
        basis = StateBasis.canonical(r)
    if K0.size != basis.N * p:
        raise ValueError(f"K0 must have size N p = {basis.N * p}")
    I = np.eye(p)

    def k(z, w):
        Zz = np.kron(basis.Z(z)[None, :], I)
        Zw = np.kron(basis.Z(w)[None, :], I)
        return Zz @ K0(r(z), r(w)) @ Zw.conj().T

    return Kernel(k, p, name=f"transformed {K0.name}")


@dataclass(frozen=True)
class MultipointSolution:
    """Solution of ``sum_n c_n f(w_n) = gamma`` through ``c F(alpha) = gamma``."""

    f: AnalyticFn
    F: AnalyticFn
    c: np.ndarray
    alpha: complex
    projector: np.ndarray
    constraint_residual: float
    orthogonality_residual: float


def multipoint_interpolate(r: RationalFn, basis: StateBasis | None, K0: Kernel, c_weights: Sequence[complex],
                           w_points: Sequence[complex], gamma: complex, image_tol: float = 1e-9) -> MultipointSolution:
    """Particular solution ``F(z) = K0(z, alpha) K0(alpha, alpha)^{-1} c^* gamma / (c c^*)``.

    The points ``w_n`` must share the image ``alpha = r(w_n)``, which must lie
    in ``Omega(r)``.  ``c = sum_n c_n Z_r(w_n)``; the general solution adds
    ``(I - c^* c / (c c^*)) G`` for arbitrary ``G``.  The orthogonality
    residual is ``|(I - c^* c/(c c^*)) K0(alpha, alpha)^{-1} c^*| |gamma| / (c c^*)``,
    the largest inner product in ``H(K0)`` between the particular solution
    and a unit-valued element of the complementary family at ``alpha``.
    """
    if basis is None:
        basis = StateBasis.canonical(r)
    w = np.array([complex(x) for x in w_points])
    cw = np.array([complex(x) for x in c_weights])
    if w.size != cw.size or w.size == 0:
        raise ValueError("need as many weights as points")
    images = r(w)
    alpha = complex(images[0])
    if np.max(np.abs(images - alpha)) > image_tol * (1 + abs(alpha)):
        raise DegenerateAlpha("the points w_n do not share a common image under r")
    require_omega(r, alpha)
    c = (cw[:, None] * basis.Z(w)).sum(axis=0)[None, :]  # 1 x N
    cc = float(np.real(c @ c.conj().T)[0, 0])
    if cc <= 1e-24:
        raise ZeroFunctional("c = sum c_n Z_r(w_n) vanishes")
    gamma = complex(gamma)
    Kaa = K0(alpha, alpha)
    x = np.linalg.solve(Kaa, c.conj().T) * gamma / cc  # N x 1
    N = basis.N
    P = np.eye(N) - c.conj().T @ c / cc

    def Fz(zv):
        zv = np.asarray(zv, dtype=complex)
        flat = zv.reshape(-1)
        out = np.array([(K0(t, alpha) @ x)[:, 0] for t in flat]).reshape(zv.shape + (N,))
        return out

    F = AnalyticFn(Fz, (N,), name="F_min")
    f = composite(basis, F)
    constraint = abs(complex(np.sum(cw * f(w))) - gamma)
    orth = float(np.linalg.norm(P @ x))
    return MultipointSolution(f, F, c[0], alpha, P, float(constraint), orth)
