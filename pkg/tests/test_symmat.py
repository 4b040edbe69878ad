from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftspace import (Poly, RationalFn, StateBasis, SignatureMatrix, alpha_independence_report, assoc_sym_matrix,
                        blaschke_X, factor_signature, hankel_moments)
from shiftspace.cli import golden_x_cases
from shiftspace.errors import NotRealRational, NotSignature, SingularX, ZeroOutsideDisk, ZerosNotDistinct

from conftest import FIXTURES, random_alpha


@pytest.mark.parametrize("name,r,expected", golden_x_cases(), ids=[c[0] for c in golden_x_cases()])
def test_worked_examples(name, r, expected):
    X = assoc_sym_matrix(r)
    assert np.max(np.abs(X.X - expected)) <= 1e-9


def test_worked_example_by_hand_at_zero():
    # r = z^2 + 1/z, alpha = 0: roots of z^3 = -1 and r'(w) = 3 w.
    w = np.exp(1j * np.pi * np.array([1, 1 / 3, -1 / 3]))
    Z = np.stack([np.ones(3), w, 1 / w], axis=1)
    X = sum(np.outer(Z[n], Z[n]) / (3 * w[n]) for n in range(3))
    assert np.max(np.abs(X - assoc_sym_matrix(FIXTURES["z^2+1/z"], alpha=0.0).X)) < 1e-12


def test_alpha_independence(fixture_r, rng):
    alphas = [random_alpha(rng, fixture_r) for _ in range(6)]
    b = StateBasis.canonical(fixture_r)
    assert alpha_independence_report(fixture_r, b, 1, alphas) <= 1e-8


def test_symmetric_real_invertible(fixture_r):
    X = assoc_sym_matrix(fixture_r)
    assert X.symmetry_residual < 1e-10
    assert X.imag_residual < 1e-10
    assert X.min_singular_value > 0


def _laurent_at_infinity(p: Poly, count: int) -> list[float]:
    """Coefficients ``h_n`` of ``1/p(z) = sum h_n z^(-n-1)`` by long division."""
    c = p.coeffs.real
    N = c.size - 1
    lead = c[-1]
    # t_m = coefficient of z^(-N-m) in 1/p; recurrence from p * (1/p) = 1
    t = []
    for m in range(count):
        s = 1.0 if m == 0 else 0.0
        for j in range(1, min(m, N) + 1):
            s -= c[N - j] * t[m - j]
        t.append(s / lead)
    # h_n = coefficient of z^(-n-1): nonzero from n = N-1 on
    h = [0.0] * (N - 1) + t
    return h[:count]


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2 ** 31 - 1))
def test_hankel_moments_against_laurent_recurrence(N, seed):
    rng = np.random.default_rng(seed)
    roots = np.sort(rng.uniform(-3, 3, size=N))
    if np.min(np.diff(roots)) < 0.2:
        return
    p = Poly.from_roots(list(roots), lead=rng.uniform(0.5, 2))
    h = np.array(hankel_moments(p))
    ref = np.array(_laurent_at_infinity(p, 2 * N - 1))
    assert np.max(np.abs(h - ref)) <= 1e-8 * (1 + np.max(np.abs(ref)))
    X = assoc_sym_matrix(RationalFn(p.coeffs)).X
    for k in range(N):
        for l in range(N):
            assert abs(X[k, l] - h[k + l].real) <= 1e-8 * (1 + np.max(np.abs(h)))
            if k + l <= N - 2:
                assert abs(X[k, l]) <= 1e-8


def test_kron_with_signature(fixture_r):
    J = np.diag([1.0, -1.0])
    X1 = assoc_sym_matrix(fixture_r, J=1).X
    XJ = assoc_sym_matrix(fixture_r, J=J).X
    assert np.max(np.abs(XJ - np.kron(X1, J))) < 1e-9 * (1 + np.max(np.abs(X1)))


def test_blaschke_closed_form():
    for zeros in ([0.3, -0.5], [0.2 + 0.3j, 0.2 - 0.3j, -0.6]):
        b = StateBasis.blaschke(zeros)
        X = assoc_sym_matrix(b.r, b, check_real=False).X
        assert np.max(np.abs(X - blaschke_X(zeros))) < 1e-10


def test_blaschke_errors():
    with pytest.raises(ZeroOutsideDisk):
        blaschke_X([1.2])
    with pytest.raises(ZerosNotDistinct):
        blaschke_X([0.3, 0.3])


def test_signature_factorization(fixture_r):
    X = assoc_sym_matrix(fixture_r)
    fac = factor_signature(X)
    assert fac.residual(X) < 1e-10 * (1 + np.max(np.abs(X.X)))
    assert fac.J0.inertia == X.inertia
    signs = np.diag(fac.J0.J)
    assert np.all(np.diff(signs) <= 0)


def test_z_plus_inverse_has_one_negative_square():
    assert assoc_sym_matrix(FIXTURES["z+1/z"]).inertia == (1, 1)
    assert factor_signature(np.diag([1.0, -1.0])).negative_count == 1


def test_errors():
    with pytest.raises(NotRealRational):
        assoc_sym_matrix(RationalFn([1j, 0.0, 1.0]))
    with pytest.raises(NotSignature):
        SignatureMatrix([[0.0, 2.0], [0.5, 0.0]])
    with pytest.raises(NotSignature):
        SignatureMatrix(np.array([[1j]]))
    with pytest.raises(SingularX):
        factor_signature(np.zeros((2, 2)))
