from __future__ import annotations

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftspace import (AnalyticFn, Poly, RationalFn, StateBasis, apply_resolvent, backward_shift,
                        check_resolvent_identity, eigenfunction, intertwine, preimages)
from shiftspace.errors import DegenerateAlpha
from shiftspace.resolvent import eigen_residual, model_action, resolvent_h_coeffs
from shiftspace.statespace import lagrange_element

from conftest import FIXTURES, random_alpha, sample_points


def _symbolic_resolvent(p_coeffs, q_coeffs, f_coeffs, alpha):
    """Closed form of the shift computed with exact rational arithmetic."""
    z = sp.symbols("z")
    p = sum(sp.nsimplify(c) * z ** k for k, c in enumerate(p_coeffs))
    q = sum(sp.nsimplify(c) * z ** k for k, c in enumerate(q_coeffs))
    f = sum(sp.nsimplify(c) * z ** k for k, c in enumerate(f_coeffs))
    a = sp.nsimplify(alpha)
    r = p / q
    roots = sp.solve(sp.Eq(p - a * q, 0), z)
    rp = sp.diff(r, z)
    expr = f / (r - a) - sum(f.subs(z, w) / (rp.subs(z, w) * (z - w)) for w in roots)
    return sp.lambdify(z, sp.simplify(sp.together(expr)), "numpy"), [complex(w) for w in roots]


@pytest.mark.parametrize("p_coeffs,q_coeffs,f_coeffs,alpha", [
    ([0, 0, 1], [1], [1, 0, 0, 1], sp.Rational(1, 4)),
    ([1, 0, 1], [0, 1], [0, 2, 0, 1], sp.Rational(1, 2)),
    ([0, 0, 0, 1], [1], [1, 1, 1, 1, 1], sp.Integer(8)),
])
def test_against_exact_symbolic_shift(p_coeffs, q_coeffs, f_coeffs, alpha):
    exact, roots = _symbolic_resolvent(p_coeffs, q_coeffs, f_coeffs, alpha)
    r = RationalFn(p_coeffs, q_coeffs)
    g = apply_resolvent(r, Poly(f_coeffs), complex(alpha))
    pts = [0.7 + 0.2j, -1.1 + 0.4j, 1.3 - 0.9j]
    pts += [w for w in roots] + [w + 1e-7 for w in roots] + [w + 3e-3j for w in roots]
    for z in pts:
        ref = complex(exact(z))
        assert abs(complex(g(z)) - ref) <= 1e-8 * (1 + abs(ref)), z


def test_classical_backward_shift():
    F = Poly([1.0, -2.0, 0.5, 3.0])
    alpha = 0.4 - 0.3j
    g = backward_shift(F, alpha)
    z = np.array([0.2, 1.5j, -0.7 + 0.1j, alpha])
    direct = (F(z[:3]) - F(alpha)) / (z[:3] - alpha)
    assert np.max(np.abs(g(z[:3]) - direct)) < 1e-12
    assert abs(g(alpha) - F.deriv()(alpha)) < 1e-10


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(sorted(FIXTURES)), st.integers(0, 2 ** 31 - 1))
def test_resolvent_identity(name, seed):
    rng = np.random.default_rng(seed)
    r = FIXTURES[name]
    f = Poly(rng.normal(size=5))
    alpha, beta = random_alpha(rng, r), random_alpha(rng, r)
    z = sample_points(rng, r, 20)
    assert check_resolvent_identity(r, f, alpha, beta, z, relative=True) <= 1e-9


def test_identity_needs_distinct_points():
    with pytest.raises(ValueError):
        check_resolvent_identity(FIXTURES["z^2"], Poly([1.0]), 0.5, 0.5, [0.1])


def test_degenerate_alpha():
    with pytest.raises(DegenerateAlpha):
        apply_resolvent(FIXTURES["z^2"], Poly([1.0, 1.0]), 0.0)


def test_intertwining(fixture_r, rng):
    b = StateBasis.canonical(fixture_r)
    F = AnalyticFn.poly_vector([rng.normal(size=4) for _ in range(fixture_r.N)])
    alpha = random_alpha(rng, fixture_r, 0.8)
    z = sample_points(rng, fixture_r, 12, box=1.5)
    res = intertwine(fixture_r, b, F, alpha, z)
    assert res.difference <= 1e-8 * (1 + np.max(np.abs(res.rhs)))


def test_eigenfunctions(fixture_r, rng):
    b = StateBasis.canonical(fixture_r)
    alpha = random_alpha(rng, fixture_r)
    a0, b0 = 1.0, 0.2 + 0.1j
    z = sample_points(rng, fixture_r, 10, box=1.2)
    z = z[np.abs(a0 - fixture_r(z) * b0) > 0.2]
    resid, lam = eigen_residual(b, a0, b0, alpha, z)
    assert lam == pytest.approx(b0 / (a0 - alpha * b0))
    scale = np.max(np.abs(eigenfunction(b, a0, b0)(z)))
    assert resid <= 1e-8 * (1 + scale)


def test_model_action_inverts_the_shift(fixture_r, rng):
    b = StateBasis.canonical(fixture_r)
    f = AnalyticFn.from_poly(Poly(rng.normal(size=6)))
    alpha = random_alpha(rng, fixture_r)
    g = apply_resolvent(fixture_r, f, alpha).g
    h = resolvent_h_coeffs(fixture_r, b, f, alpha)
    back = model_action(fixture_r, b, g, h)
    z = sample_points(rng, fixture_r, 10)
    lhs = back(z) - alpha * g(z)
    assert np.max(np.abs(lhs - f(z))) <= 1e-8 * (1 + np.max(np.abs(f(z))))


def test_h_coefficients_of_a_composite(fixture_r, rng):
    from shiftspace import composite

    b = StateBasis.canonical(fixture_r)
    F = AnalyticFn.poly_vector([rng.normal(size=3) for _ in range(fixture_r.N)])
    alpha = random_alpha(rng, fixture_r, 0.8)
    h = resolvent_h_coeffs(fixture_r, b, composite(b, F), alpha)
    assert np.max(np.abs(h - F(alpha))) < 1e-8 * (1 + np.max(np.abs(F(alpha))))


def test_kernel_of_the_shift_is_spanned_by_lagrange_elements(fixture_r, rng):
    alpha = random_alpha(rng, fixture_r)
    f = lagrange_element(fixture_r, alpha, rng.normal(size=fixture_r.N))
    g = apply_resolvent(fixture_r, AnalyticFn(f), alpha)
    z = sample_points(rng, fixture_r, 10, avoid=preimages(fixture_r, alpha))
    assert np.max(np.abs(g(z))) < 1e-8 * (1 + np.max(np.abs(f(z))))


def test_values_near_preimages_are_continuous():
    r = FIXTURES["z+1/z"]
    f = Poly([0.3, -1.0, 2.0, 0.5])
    alpha = 0.5 + 0.2j
    g = apply_resolvent(r, f, alpha)
    for w in g.preimages:
        vals = [complex(g(w + d)) for d in (0.0, 1e-9, 1e-6j, 2e-5, 1e-3)]
        assert max(abs(v - vals[0]) for v in vals[:4]) < 1e-4
        assert abs(vals[4] - vals[0]) < 1e-1
