"""A small evaluation interface for (vector- or matrix-valued) analytic functions."""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from .polyrat import Poly, RationalFn, as_poly


def _fd_step(z: np.ndarray) -> np.ndarray:
    return 1e-6 * (1.0 + np.abs(z))


class AnalyticFn:
    """Wrap ``z -> value`` where each value is an array of shape ``shape``.

    Parameters
    ----------
    func:
        Callable evaluated on complex arrays.  With ``vectorized=True`` (the
        default) it receives an array ``z`` and must return an array of shape
        ``z.shape + shape`` (anything broadcastable to that is accepted).
        With ``vectorized=False`` it is called once per point.
    shape:
        Shape of a single value; ``()`` for scalar functions.
    derivative:
        Optional exact derivative with the same calling convention.  Without
        it :meth:`derivative` falls back to a central difference with step
        ``1e-6 * (1 + |z|)``.
    domain_hint:
        Free-form description of where the function is analytic.
    """

    def __init__(self, func: Callable, shape: tuple[int, ...] = (), derivative: Callable | None = None,
                 vectorized: bool = True, name: str = "f", domain_hint: str | None = None):
        self._func = func
        self.shape = tuple(shape)
        self._derivative = derivative
        self.vectorized = vectorized
        self.name = name
        self.domain_hint = domain_hint

    @property
    def p(self) -> int:
        return int(np.prod(self.shape)) if self.shape else 1

    def _apply(self, func: Callable, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.vectorized:
            val = np.asarray(func(z), dtype=complex)
        else:
            flat = z.reshape(-1)
            vals = [np.asarray(func(complex(x)), dtype=complex) for x in flat]
            val = np.array(vals, dtype=complex).reshape(z.shape + self.shape) if vals else np.zeros(z.shape + self.shape, complex)
        target = z.shape + self.shape
        if val.shape != target:
            val = np.broadcast_to(val, target).copy()
        return val

    def __call__(self, z) -> np.ndarray:
        val = self._apply(self._func, z)
        return val[()] if val.ndim == 0 else val

    def derivative(self, z) -> np.ndarray:
        if self._derivative is not None:
            val = self._apply(self._derivative, z)
        else:
            z = np.asarray(z, dtype=complex)
            h = _fd_step(z)
            hb = h.reshape(h.shape + (1,) * len(self.shape))
            val = (self._apply(self._func, z + h) - self._apply(self._func, z - h)) / (2 * hb)
        return val[()] if val.ndim == 0 else val

    @property
    def has_exact_derivative(self) -> bool:
        return self._derivative is not None

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_poly(cls, p: Poly | Iterable, name: str = "poly") -> "AnalyticFn":
        p = as_poly(p)
        dp = p.deriv()
        return cls(p, (), derivative=dp, name=name)

    @classmethod
    def from_rational(cls, r: RationalFn, name: str = "rational") -> "AnalyticFn":
        return cls(r, (), derivative=lambda z: r.derivative(z), name=name)

    @classmethod
    def constant(cls, value) -> "AnalyticFn":
        value = np.asarray(value, dtype=complex)
        return cls(lambda z: np.broadcast_to(value, np.shape(z) + value.shape),
                   value.shape, derivative=lambda z: np.zeros(np.shape(z) + value.shape, complex),
                   name="const")

    @classmethod
    def poly_vector(cls, coeff_lists: Sequence[Iterable], name: str = "polyvec") -> "AnalyticFn":
        """Vector of polynomials, one per component."""
        polys = [as_poly(c) for c in coeff_lists]
        derivs = [p.deriv() for p in polys]

        def f(z):
            return np.stack([p(z) * np.ones(np.shape(z)) for p in polys], axis=-1)

        def df(z):
            return np.stack([p(z) * np.ones(np.shape(z)) for p in derivs], axis=-1)

        return cls(f, (len(polys),), derivative=df, name=name)

    @classmethod
    def stack(cls, parts: Sequence["AnalyticFn"]) -> "AnalyticFn":
        """Stack scalar functions into a vector-valued one."""
        def f(z):
            return np.stack([np.asarray(g(z)) * np.ones(np.shape(z)) for g in parts], axis=-1)

        def df(z):
            return np.stack([np.asarray(g.derivative(z)) * np.ones(np.shape(z)) for g in parts], axis=-1)

        exact = all(g.has_exact_derivative for g in parts)
        return cls(f, (len(parts),), derivative=df if exact else None, name="stack")

    @classmethod
    def coerce(cls, f) -> "AnalyticFn":
        if isinstance(f, AnalyticFn):
            return f
        if isinstance(f, Poly):
            return cls.from_poly(f)
        if isinstance(f, RationalFn):
            return cls.from_rational(f)
        if callable(f):
            return cls(f)
        return cls.constant(f)

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other: "AnalyticFn") -> "AnalyticFn":
        other = AnalyticFn.coerce(other)
        exact = self.has_exact_derivative and other.has_exact_derivative
        return AnalyticFn(lambda z: self(z) + other(z), self.shape,
                          derivative=(lambda z: self.derivative(z) + other.derivative(z)) if exact else None,
                          name=f"({self.name}+{other.name})")

    def __sub__(self, other: "AnalyticFn") -> "AnalyticFn":
        return self + (-1.0) * AnalyticFn.coerce(other)

    def __mul__(self, c: complex) -> "AnalyticFn":
        c = complex(c)
        return AnalyticFn(lambda z: c * self(z), self.shape,
                          derivative=(lambda z: c * self.derivative(z)) if self.has_exact_derivative else None,
                          name=f"{c}*{self.name}")

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"AnalyticFn({self.name}, shape={self.shape})"


def composite(basis, F: AnalyticFn) -> AnalyticFn:
    """``f(z) = (Z_r(z) (x) I_p) F(r(z))`` for ``F`` with values in C^{N p}.

    Components of ``F`` are ordered ``n * p + l`` (state index major).  A
    C^N-valued ``F`` gives a scalar ``f``.
    """
    F = AnalyticFn.coerce(F)
    N = basis.N
    r = basis.r
    if len(F.shape) != 1 or F.shape[0] % N:
        raise ValueError(f"F must take values in C^(N p) with N = {N}, got shape {F.shape}")
    p = F.shape[0] // N
    scalar = p == 1

    def f(z):
        z = np.asarray(z, dtype=complex)
        Z = basis.Z(z)
        vals = F(r(z)).reshape(z.shape + (N, p))
        out = np.einsum("...n,...np->...p", Z, vals)
        return out[..., 0] if scalar else out

    def df(z):
        z = np.asarray(z, dtype=complex)
        Z = basis.Z(z)
        dZ = basis.Z_derivative(z)
        rz = r(z)
        vals = F(rz).reshape(z.shape + (N, p))
        dvals = F.derivative(rz).reshape(z.shape + (N, p)) * r.derivative(z)[..., None, None]
        out = np.einsum("...n,...np->...p", dZ, vals) + np.einsum("...n,...np->...p", Z, dvals)
        return out[..., 0] if scalar else out

    return AnalyticFn(f, () if scalar else (p,), derivative=df, name=f"Z*{F.name}(r)")


class Kernel:
    """A matrix-valued kernel ``(z, w) -> K(z, w)`` of size ``size x size``.

    ``func`` is called with two complex scalars and must return something
    broadcastable to ``(size, size)``.
    """

    def __init__(self, func: Callable, size: int = 1, name: str = "K"):
        self._func = func
        self.size = int(size)
        self.name = name

    def __call__(self, z, w) -> np.ndarray:
        val = np.asarray(self._func(complex(z), complex(w)), dtype=complex)
        return np.broadcast_to(val, (self.size, self.size)).copy()

    def gram(self, points: Sequence[complex], points_w: Sequence[complex] | None = None) -> np.ndarray:
        """Block matrix ``(K(z_i, w_j))_{ij}``; ``points_w`` defaults to ``points``."""
        zs = [complex(z) for z in np.asarray(points).reshape(-1)]
        ws = zs if points_w is None else [complex(w) for w in np.asarray(points_w).reshape(-1)]
        s = self.size
        out = np.empty((len(zs) * s, len(ws) * s), dtype=complex)
        for i, z in enumerate(zs):
            for j, w in enumerate(ws):
                out[i * s:(i + 1) * s, j * s:(j + 1) * s] = self(z, w)
        return out

    def __repr__(self) -> str:
        return f"Kernel({self.name}, size={self.size})"
