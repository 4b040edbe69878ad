from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftspace import Poly, RationalFn, cluster_roots, partial_fraction, poly_roots, preimages
from shiftspace.errors import DegenerateAlpha, InvalidRationalFn, NotCoprime
from shiftspace.polyrat import decode_complex, encode_complex, in_omega

from conftest import FIXTURES, random_alpha, sample_points

coef = st.floats(min_value=-3, max_value=3, allow_nan=False, allow_infinity=False)


def _match(a, b) -> float:
    """Largest distance after greedy matching of two root lists."""
    b = list(b)
    worst = 0.0
    for x in a:
        k = int(np.argmin([abs(x - y) for y in b]))
        worst = max(worst, abs(x - b.pop(k)))
    return worst


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(coef, coef), min_size=1, max_size=7))
def test_roots_agree_with_companion_eigenvalues(roots):
    z = [complex(a, b) for a, b in roots]
    if min((abs(x - y) for i, x in enumerate(z) for y in z[i + 1:]), default=1.0) < 1e-2:
        return
    p = Poly.from_roots(z)
    ours = poly_roots(p)
    ref = np.roots(p.coeffs[::-1])
    assert len(ours) == len(z)
    assert _match(ours, ref) <= 1e-7 * (1 + max(abs(x) for x in z))
    assert _match(ours, z) <= 1e-7 * (1 + max(abs(x) for x in z))


def test_repeated_roots_are_clustered():
    clusters = cluster_roots(poly_roots(Poly.from_roots([1.0, 1.0, 2.0])))
    assert [m for _, m in clusters] == [2, 1]
    assert abs(clusters[0][0] - 1) < 1e-6


def test_poly_arithmetic_and_derivative():
    p = Poly([1.0, -2.0, 0.0, 3.0])
    assert np.allclose(p.deriv().coeffs, [-2.0, 0.0, 9.0])
    q, rem = (p * Poly([1.0, 1.0]) + Poly([5.0])).divmod(Poly([1.0, 1.0]))
    assert np.allclose(q.coeffs, p.coeffs)
    assert np.allclose(rem.coeffs, [5.0])


def test_preimages_solve_the_equation(rng):
    for r in FIXTURES.values():
        alpha = random_alpha(rng, r)
        w = preimages(r, alpha)
        assert len(w) == r.N
        assert max(abs(r(x) - alpha) for x in w) < 1e-9 * (1 + abs(alpha))


def test_value_at_infinity_is_degenerate():
    r = RationalFn([1.0, 0.0, 1.0], [-4.0, 0.0, 1.0])
    assert r.at_infinity == 1
    with pytest.raises(DegenerateAlpha):
        preimages(r, 1.0)
    assert not in_omega(r, 1.0)


def test_critical_value_is_not_in_omega():
    assert not in_omega(FIXTURES["z^2"], 0.0)
    assert not in_omega(FIXTURES["z+1/z"], 2.0)
    assert in_omega(FIXTURES["z+1/z"], 0.5)


def test_partial_fraction_matches_direct_evaluation(rng):
    for r in FIXTURES.values():
        alpha = random_alpha(rng, r)
        pf = partial_fraction(r, alpha)
        z = sample_points(rng, r, 20, avoid=[w for w, _ in pf.poles], gap=0.1)
        assert np.max(np.abs(pf(z) - 1 / (r(z) - alpha))) < 1e-8


def test_invalid_rational_functions():
    with pytest.raises(NotCoprime):
        RationalFn([-1.0, 0.0, 1.0], [-1.0, 1.0])
    with pytest.raises(InvalidRationalFn):
        RationalFn([1.0], [1.0, 1.0])


def test_realness():
    assert FIXTURES["z+1/z"].is_real()
    assert not RationalFn([1j, 1.0]).is_real()


def test_json_round_trip():
    for r in FIXTURES.values():
        again = RationalFn.from_json(r.to_json())
        assert again.to_json() == r.to_json()
    for z in (1.5, -2j, 0.25 + 3j):
        assert decode_complex(encode_complex(z)) == z
    assert decode_complex("1+2i") == 1 + 2j
