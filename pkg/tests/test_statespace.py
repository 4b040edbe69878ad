from __future__ import annotations

import numpy as np
import pytest

from shiftspace import RationalFn, StateBasis, realize
from shiftspace.errors import PoleOfR
from shiftspace.statespace import divided_difference, lagrange_element, sum_formula

from conftest import FIXTURES, random_alpha, sample_points


def test_canonical_labels():
    assert StateBasis.canonical(FIXTURES["z+1/z"]).labels == ("1", "1/z")
    assert StateBasis.canonical(FIXTURES["z^2+1/z"]).labels == ("1", "z", "1/z")
    assert StateBasis.canonical(FIXTURES["z^3"]).labels == ("1", "z", "z^2")


def test_divided_difference_against_direct_quotient(fixture_r, rng):
    b = StateBasis.canonical(fixture_r)
    z = sample_points(rng, fixture_r, 15)
    w = sample_points(rng, fixture_r, 15)
    dd = divided_difference(fixture_r, b, z, w)
    direct = (fixture_r(z) - fixture_r(w)) / (z - w)
    assert np.max(np.abs(dd - direct)) <= 1e-9 * (1 + np.max(np.abs(direct)))
    diag = divided_difference(fixture_r, b, z, z)
    assert np.max(np.abs(diag - fixture_r.derivative(z))) <= 1e-9 * (1 + np.max(np.abs(diag)))


def test_realization_and_numerators_agree(fixture_r, rng):
    b = StateBasis.canonical(fixture_r)
    z = sample_points(rng, fixture_r, 10)
    assert np.max(np.abs(b.Z(z) - b.Z_direct(z))) < 1e-10 * (1 + np.max(np.abs(b.Z(z))))
    rl = b.realization
    assert np.linalg.matrix_rank(rl.observability_matrix()) == fixture_r.N
    assert np.max(np.abs(rl.evaluate(z) - fixture_r(z))) < 1e-9 * (1 + np.max(np.abs(fixture_r(z))))


def test_realize_centre_outside_poles():
    rl = realize(FIXTURES["z+1/z"], center="auto")
    assert abs(rl.center) > 0


def test_sum_formula_reproduces_state_space_elements(fixture_r, rng):
    b = StateBasis.canonical(fixture_r)
    alpha = random_alpha(rng, fixture_r)
    c = rng.normal(size=fixture_r.N) + 1j * rng.normal(size=fixture_r.N)
    z = sample_points(rng, fixture_r, 10, avoid=list(np.roots((fixture_r.p - alpha * fixture_r.q).coeffs[::-1])))
    lhs = sum_formula(b, fixture_r, c, alpha, z)
    rhs = (b.Z(z) @ c) / (fixture_r(z) - alpha)
    assert np.max(np.abs(lhs - rhs)) <= 1e-8 * (1 + np.max(np.abs(rhs)))


def test_lagrange_element_interpolates(fixture_r, rng):
    from shiftspace import preimages

    alpha = random_alpha(rng, fixture_r)
    vals = rng.normal(size=fixture_r.N)
    f = lagrange_element(fixture_r, alpha, vals)
    w = np.array(preimages(fixture_r, alpha))
    assert np.max(np.abs(f(w) - vals)) < 1e-9


def test_transformed_basis(fixture_r, rng):
    b = StateBasis.canonical(fixture_r)
    S = rng.normal(size=(b.N, b.N)) + np.eye(b.N) * 3
    b2 = b.transformed(S)
    z = sample_points(rng, fixture_r, 6)
    assert np.max(np.abs(b2.Z(z) - b.Z(z) @ S)) < 1e-9 * (1 + np.max(np.abs(b.Z(z))))


def test_pole_raises():
    b = StateBasis.canonical(FIXTURES["z+1/z"])
    with pytest.raises(PoleOfR):
        b.Z(0.0)


def test_blaschke_basis_spans_the_same_space(rng):
    zeros = [0.3, -0.5]
    b1 = StateBasis.blaschke(zeros)
    b0 = StateBasis.canonical(RationalFn.blaschke(zeros))
    z = sample_points(rng, b0.r, 8)
    S, *_ = np.linalg.lstsq(b0.Z(z), b1.Z(z), rcond=None)
    assert np.max(np.abs(b0.Z(z) @ S - b1.Z(z))) < 1e-10
    assert np.allclose(b1.Z(np.array([0.0])), 1.0)
