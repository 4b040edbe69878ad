"""Generalized backward shifts, state spaces and kernels attached to a rational function."""

from __future__ import annotations

from .analytic import AnalyticFn, Kernel, composite
from .cuntz import CuntzFamily, CuntzReport, TruncatedSpace, kernel_fixed_point_check
from .errors import *  # noqa: F401,F403
from .kernels import (DeBrangesSplit, InvariantSubspaceData, circle_theta_kernel, de_branges_split, epm_kernel,
                      gram_matrix, hardy_kernel, hermitian_swap_residual, invariance_residual, invariant_kernel,
                      invariant_M, line_theta_kernel, negative_squares, nevanlinna_kernel, s_kernel, solve_stein,
                      stein_residual, theta_from_stein, theta_kernel_check, theta_split_residual)
from .polyrat import Poly, RationalFn, cluster_roots, partial_fraction, poly_roots, preimages
from .representation import (DecompositionResult, DiskCover, build_cover, decompose, kernel_transform,
                             multipoint_interpolate, uniqueness_check)
from .resolvent import apply_resolvent, backward_shift, check_resolvent_identity, eigenfunction, intertwine
from .statespace import StateBasis, realize
from .symmat import (SignatureMatrix, alpha_independence_report, assoc_sym_matrix, blaschke_X, factor_signature,
                     hankel_moments)

__version__ = "0.1.0"
