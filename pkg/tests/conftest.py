from __future__ import annotations

import numpy as np
import pytest

from shiftspace import RationalFn, StateBasis

#: Criterion number -> (passed, detail); filled by test_acceptance.py.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def fixture_functions() -> dict[str, RationalFn]:
    """Real rational functions used throughout the suite."""
    return {
        "z^2": RationalFn([0.0, 0.0, 1.0]),
        "z^3": RationalFn([0.0, 0.0, 0.0, 1.0]),
        "z+1/z": RationalFn([1.0, 0.0, 1.0], [0.0, 1.0]),
        "z^2+1/z": RationalFn([1.0, 0.0, 0.0, 1.0], [0.0, 1.0]),
        "blaschke": RationalFn.blaschke([0.3, -0.5]),
        "(z^3+2z)/(z^2-4)": RationalFn([0.0, 2.0, 0.0, 1.0], [-4.0, 0.0, 1.0]),
    }


FIXTURES = fixture_functions()


@pytest.fixture(params=sorted(FIXTURES))
def fixture_r(request) -> RationalFn:
    return FIXTURES[request.param]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def random_alpha(rng: np.random.Generator, r: RationalFn, scale: float = 1.5) -> complex:
    from shiftspace.polyrat import in_omega

    while True:
        a = complex(rng.normal() * scale, rng.normal() * scale)
        if in_omega(r, a, 1e-2):
            return a


def sample_points(rng: np.random.Generator, r: RationalFn, count: int, box: float = 2.0,
                  avoid: list[complex] | None = None, gap: float = 0.05) -> np.ndarray:
    """Random points in a box, away from the poles of ``r`` and from ``avoid``."""
    bad = np.array(list(r.poles) + list(avoid or []), dtype=complex)
    out: list[complex] = []
    while len(out) < count:
        z = complex(rng.uniform(-box, box), rng.uniform(-box, box))
        if bad.size and np.min(np.abs(bad - z)) < gap:
            continue
        out.append(z)
    return np.array(out)


def basis_of(r: RationalFn) -> StateBasis:
    return StateBasis.canonical(r)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
