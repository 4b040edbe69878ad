from __future__ import annotations

import numpy as np
import pytest

from shiftspace import (AnalyticFn, Kernel, Poly, StateBasis, build_cover, decompose,
                        kernel_transform, multipoint_interpolate, uniqueness_check)
from shiftspace.errors import DegenerateAlpha, EvalOutsideRho, QuadratureDivergence, ZeroFunctional
from shiftspace.representation import validation_points

from conftest import FIXTURES

SAMPLE_FUNCTIONS = {
    "z": Poly([0.0, 1.0]),
    "1+z^3-2z^5": Poly([1.0, 0.0, 0.0, 1.0, 0.0, -2.0]),
    "exp": AnalyticFn(np.exp, derivative=np.exp, name="exp"),
    "1/(z-3)": AnalyticFn(lambda z: 1 / (np.asarray(z) - 3), name="1/(z-3)"),
}


def test_cover_separates_zeros(fixture_r):
    cover = build_cover(fixture_r)
    assert cover.rho > 0
    zeros = np.array(fixture_r.zeros)
    assert np.all(cover.contains(zeros))
    poles = np.array(fixture_r.poles)
    if poles.size:
        assert not np.any(cover.contains(poles))
    for (s, _) in cover.nodes(256):
        assert np.min(np.abs(fixture_r(s))) >= cover.rho * (1 - 1e-6)


@pytest.mark.parametrize("fname", sorted(SAMPLE_FUNCTIONS))
def test_round_trip(fixture_r, fname):
    f = SAMPLE_FUNCTIONS[fname]
    res = decompose(fixture_r, None, f)
    assert res.roundtrip_error <= 1e-7 * (1 + res.roundtrip_scale)


def test_decomposition_of_z_for_z_plus_inverse():
    res = decompose(FIXTURES["z+1/z"], None, Poly([0.0, 1.0]))
    expected = np.zeros_like(res.taylor)
    expected[1, 0] = 1.0
    expected[0, 1] = -1.0
    assert np.max(np.abs(res.taylor - expected)) <= 1e-8


def test_contour_route_matches_moment_route():
    r = FIXTURES["z^2+1/z"]
    f = SAMPLE_FUNCTIONS["exp"]
    a = decompose(r, None, f, taylor_method="moments", taylor_order=10)
    b = decompose(r, None, f, taylor_method="contour", taylor_order=10)
    scale = a.rho ** np.arange(11)[:, None]
    assert np.max(np.abs((a.taylor - b.taylor) * scale)) < 1e-9


def test_node_doubling(fixture_r):
    f = SAMPLE_FUNCTIONS["1+z^3-2z^5"]
    a = decompose(fixture_r, None, f, quad_nodes=1024, taylor_order=9, validate=0)
    b = decompose(fixture_r, None, f, quad_nodes=2048, taylor_order=9, validate=0)
    # compare rho^k c_k: the quadrature computes these, dividing by rho^k
    # only magnifies roundoff when rho is small
    scale = b.rho ** np.arange(10)[:, None]
    assert np.max(np.abs(a.taylor - b.taylor) * scale) <= 1e-9 * (1 + np.max(np.abs(b.taylor) * scale))


def test_vector_valued_round_trip():
    r = FIXTURES["z^3"]
    f = AnalyticFn.poly_vector([[1.0, 2.0], [0.0, 0.0, 0.0, 0.0, 1.0]])
    res = decompose(r, None, f)
    assert res.p == 2
    assert res.roundtrip_error < 1e-9


def test_quadrature_divergence_is_detected():
    # a pole of f very close to a contour spoils the trapezoid rule
    r = FIXTURES["z^2"]
    cover = build_cover(r)
    near = cover.centers[0] + cover.radii[0] * 1.0005
    f = AnalyticFn(lambda z: 1 / (np.asarray(z) - near))
    with pytest.raises(QuadratureDivergence):
        decompose(r, None, f, cover=cover, quad_nodes=64)


def test_evaluation_outside_rho():
    res = decompose(FIXTURES["z^2"], None, Poly([1.0, 1.0]))
    with pytest.raises(EvalOutsideRho):
        res.evaluate(2 * res.rho)


def test_shifted_representation_matches_classical_shift():
    r = FIXTURES["z+1/z"]
    res = decompose(r, None, SAMPLE_FUNCTIONS["exp"])
    alpha = 0.3 * res.rho
    g = res.shifted(alpha)
    w = 0.5 * res.rho * np.exp(1j * np.array([0.3, 1.7, 4.0]))
    direct = (res.evaluate(w) - res.evaluate(alpha)[None, :]) / (w - alpha)[:, None]
    assert np.max(np.abs(g(w) - direct)) < 1e-8


def test_validation_points_lie_in_preimage_of_disk(fixture_r):
    cover = build_cover(fixture_r)
    pts = validation_points(fixture_r, cover.rho, 40)
    assert pts.size == 40
    assert np.all(np.abs(fixture_r(pts)) < cover.rho)


def test_uniqueness(fixture_r):
    b = StateBasis.canonical(fixture_r)
    cover = build_cover(fixture_r)
    pts = validation_points(fixture_r, cover.rho * 0.5, 30)
    zero = AnalyticFn(lambda w: np.zeros(np.shape(w) + (b.N,)), (b.N,))
    rep = uniqueness_check(fixture_r, b, zero, pts, taylor_radius=0.1 * cover.rho)
    assert rep.vanishes and rep.injective and rep.holds
    F = AnalyticFn.poly_vector([[1.0, 2.0]] + [[0.0]] * (b.N - 1))
    rep = uniqueness_check(fixture_r, b, F, pts, taylor_radius=0.1 * cover.rho)
    assert not rep.vanishes and rep.holds


def test_kernel_transform_is_positive_for_szego():
    r = FIXTURES["z^2"]
    N = r.N
    K0 = Kernel(lambda a, b: np.eye(N) / (1 - a * np.conj(b)), N)
    K = kernel_transform(K0, r)
    pts = 0.8 * np.exp(1j * np.linspace(0, 6, 9)) * np.linspace(0.2, 1, 9)
    G = K.gram(pts)
    assert np.linalg.eigvalsh(G).min() > -1e-10
    # for r = z^2 the lifted Szego kernel is Szego itself
    ref = 1 / (1 - pts[:, None] * pts.conj()[None, :])
    assert np.max(np.abs(G - ref)) < 1e-12


def test_multipoint_interpolation():
    r = FIXTURES["z^2"]
    N = r.N
    K0 = Kernel(lambda a, b: np.eye(N) / (1 - a * np.conj(b)), N)
    sol = multipoint_interpolate(r, None, K0, [1.0, 2.0], [0.5, -0.5], 1.5)
    assert sol.constraint_residual < 1e-12
    assert sol.orthogonality_residual < 1e-12
    assert sol.alpha == pytest.approx(0.25)
    with pytest.raises(DegenerateAlpha):
        multipoint_interpolate(r, None, K0, [1.0, 1.0], [0.5, 0.4], 1.0)
    with pytest.raises(ZeroFunctional):
        multipoint_interpolate(r, None, K0, [0.0, 0.0], [0.5, -0.5], 1.0)
