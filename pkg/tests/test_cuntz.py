from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftspace import CuntzFamily, Kernel, Poly, RationalFn, TruncatedSpace, kernel_fixed_point_check
from shiftspace.errors import DegreeOverflow

from conftest import FIXTURES

SZEGO = Kernel(lambda z, w: 1 / (1 - z * np.conj(w)))


@pytest.mark.parametrize("name", ["z^2", "z^3"])
def test_polynomial_relations(name):
    rep = CuntzFamily(FIXTURES[name], None, 32).verify_cuntz()
    assert rep.mode == "polynomial"
    assert rep.completeness <= 1e-12
    assert rep.orthogonality <= 1e-12


def test_polynomial_relations_for_a_general_polynomial():
    rep = CuntzFamily(RationalFn([1.0, -2.0, 0.5, 1.0]), None, 20).verify_cuntz()
    assert rep.completeness <= 1e-10 and rep.orthogonality <= 1e-10


def test_quadrature_relations():
    fam = CuntzFamily(FIXTURES["z+1/z"], None, 32)
    assert fam.mode == "quadrature"
    rep = fam.verify_cuntz()
    assert rep.completeness <= 1e-7
    assert rep.orthogonality <= 1e-7


def test_component_degrees():
    fam = CuntzFamily(FIXTURES["z^3"], None, 10)
    assert [fam.component_degree(n) for n in (1, 2, 3)] == [3, 3, 2]
    fam = CuntzFamily(FIXTURES["z^3"], None, 9)
    assert [fam.component_degree(n) for n in (1, 2, 3)] == [3, 2, 2]


def test_analysis_of_z_cubed_for_z_squared():
    comps = CuntzFamily(FIXTURES["z^2"], None, 8).analysis(Poly([0.0, 0.0, 0.0, 1.0]))
    assert np.array_equal(comps[0], np.zeros(5))
    assert np.array_equal(comps[1][:2], np.array([0.0, 1.0]))
    assert not np.any(comps[1][2:])


def test_degree_overflow():
    fam = CuntzFamily(FIXTURES["z^2"], None, 4)
    with pytest.raises(DegreeOverflow):
        fam.analysis(Poly.monomial(5))
    with pytest.raises(DegreeOverflow):
        fam.synthesis(2, Poly.monomial(2))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.lists(st.floats(-2, 2), min_size=1, max_size=5), st.integers(1, 4))
def test_synthesis_is_isometric_in_coefficient_norm(N, coeffs, n):
    n = min(n, N)
    r = RationalFn([0.0] * N + [1.0])
    fam = CuntzFamily(r, None, 24)
    g = Poly(coeffs)
    if g.degree > fam.component_degree(n):
        return
    space = TruncatedSpace.l2(24)
    out = fam.synthesis(n, g)
    assert space.norm2(out) == pytest.approx(float(np.sum(np.abs(g.coeffs) ** 2)), rel=1e-12, abs=1e-14)


def test_analysis_block_is_adjoint_of_synthesis():
    fam = CuntzFamily(FIXTURES["z^3"], None, 15)
    for n in (1, 2, 3):
        assert np.allclose(fam.analysis_block(n), fam.synthesis_matrices[n - 1].conj().T)


def test_szego_fixed_point_for_monomials():
    pts = 0.6 * np.exp(1j * np.linspace(0, 5, 7)) * np.linspace(0.3, 1, 7)
    for name in ("z^2", "z^3"):
        assert kernel_fixed_point_check(SZEGO, FIXTURES[name], None, pts) < 1e-12


def test_fixed_point_fails_for_a_non_inner_function():
    pts = 0.4 * np.exp(1j * np.linspace(0, 5, 5))
    assert kernel_fixed_point_check(SZEGO, RationalFn([0.0, 0.5, 0.5]), None, pts) > 1e-3


def test_truncated_space_from_szego_is_l2():
    space = TruncatedSpace.from_kernel(SZEGO, 10)
    assert np.max(np.abs(space.gram - np.eye(11))) < 1e-10
    with pytest.raises(ValueError):
        TruncatedSpace(1, np.array([[1.0, 2.0], [0.0, 1.0]]))
