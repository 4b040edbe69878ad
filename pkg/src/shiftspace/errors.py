"""Exception hierarchy.

Every failure raised on purpose by the package derives from
:class:`ShiftSpaceError`, so callers can catch the whole family at once.
Most classes also inherit from ``ValueError`` or ``ArithmeticError`` so
that generic handlers keep working.
"""

from __future__ import annotations


class ShiftSpaceError(Exception):
    """Base class for all errors raised by :mod:`shiftspace`."""


class InvalidRationalFn(ShiftSpaceError, ValueError):
    """The pair (p, q) does not describe an admissible rational function."""


class NotCoprime(InvalidRationalFn):
    """Numerator and denominator share a root up to the coprimality tolerance."""


class NonConvergence(ShiftSpaceError, ArithmeticError):
    """An iterative solver stopped before meeting its stopping criterion."""


class DegenerateAlpha(ShiftSpaceError, ValueError):
    """The value alpha does not have N simple preimages under r."""


class PoleAtOrigin(ShiftSpaceError, ValueError):
    """A realization centred at zero was requested but r has a pole there."""


class PoleOfR(ShiftSpaceError, ValueError):
    """Evaluation requested at (or numerically at) a pole of r."""


class EvaluationAtPoleOfR(PoleOfR):
    """A resolvent image could not be evaluated at a pole of r."""


class NotRealRational(ShiftSpaceError, ValueError):
    """The operation needs r(z) = conj(r(conj z)) and that fails."""


class NotSignature(ShiftSpaceError, ValueError):
    """The matrix is not a real signature matrix (J = J^T = J^{-1})."""


class MultipleRoots(ShiftSpaceError, ValueError):
    """A polynomial that must have simple roots has a repeated root."""


class ZerosNotDistinct(ShiftSpaceError, ValueError):
    """Blaschke zeros collide."""


class ZeroOutsideDisk(ShiftSpaceError, ValueError):
    """A Blaschke zero lies on or outside the unit circle."""


class SingularX(ShiftSpaceError, ArithmeticError):
    """The symmetric matrix is numerically singular."""


class CoverConstructionFailed(ShiftSpaceError, ArithmeticError):
    """No admissible disk cover was found within the shrink schedule."""


class QuadratureDivergence(ShiftSpaceError, ArithmeticError):
    """Trapezoidal sums on n and n/2 nodes disagree beyond tolerance."""


class EvalOutsideRho(ShiftSpaceError, ValueError):
    """A representation was queried at |w| >= rho."""


class ZeroFunctional(ShiftSpaceError, ValueError):
    """The interpolation functional c vanishes."""


class DegreeOverflow(ShiftSpaceError, ValueError):
    """A polynomial would exceed the degree cap of a truncated space."""


class SingularPencil(ShiftSpaceError, ArithmeticError):
    """A - lambda B is singular at the requested point."""


class SingularSteinOperator(ShiftSpaceError, ArithmeticError):
    """The map P -> A*PA - B*PB is not invertible."""


class DiagonalSingularity(ShiftSpaceError, ArithmeticError):
    """A kernel denominator vanishes (for instance on the diagonal)."""


class RankDeficientAtAlpha(ShiftSpaceError, ArithmeticError):
    """K(alpha, alpha) or its reflected partner is not invertible."""


__all__ = [name for name in dir() if name[0].isupper()]
