"""Dense linear algebra and quadrature helpers at small fixed dimension.

Everything here operates on plain numpy arrays.  Dimensions are tiny
(N <= ~10), so the implementations favour determinism and accuracy over
speed: the matrix exponential uses scipy's scaling-and-squaring Pade
core, square roots go through a full symmetric eigendecomposition, and
the quadrature is a fixed-order composite Gauss-Legendre rule with a
panel-doubling self-check.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import expm

from .errors import (
    AccuracyError,
    DefinitenessError,
    DimensionError,
    DomainError,
    SymmetryError,
)

SYMMETRY_TOL = 1e-12
GAUSS_ORDER = 10
DEFAULT_PANELS = 8
REFINE_TOL = 1e-10


@dataclass(frozen=True)
class SpdReport:
    """Outcome of a positive-definiteness check."""

    min_eigenvalue: float
    is_spd: bool
    tolerance: float


def _as_square(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    return M


def mat_exp(M):
    """Matrix exponential exp(M) of a small dense square matrix."""
    M = _as_square(M)
    with np.errstate(over="ignore", invalid="ignore"):
        out = expm(M)
    if not np.all(np.isfinite(out)):
        raise AccuracyError("overflow in matrix exponential")
    return out


def sqrt_spd(A):
    """Symmetric positive square root S of an SPD matrix, S @ S = A."""
    A = _as_square(A)
    if not np.allclose(A, A.T, atol=SYMMETRY_TOL, rtol=0.0):
        raise SymmetryError("matrix is not symmetric")
    w, V = np.linalg.eigh(A)
    if w.min() <= 0.0:
        raise DefinitenessError(f"matrix is not positive definite (min eig {w.min():g})")
    return (V * np.sqrt(w)) @ V.T


def spd_min_eigen(S, tol=1e-10):
    """Smallest eigenvalue of a symmetric matrix with an SPD verdict."""
    S = _as_square(S)
    if not np.allclose(S, S.T, atol=SYMMETRY_TOL, rtol=0.0):
        raise SymmetryError("matrix is not symmetric beyond 1e-12")
    w_min = float(np.linalg.eigvalsh(S)[0])
    return SpdReport(min_eigenvalue=w_min, is_spd=w_min > tol, tolerance=tol)


def _gauss_panels(t, panels):
    nodes, weights = leggauss(GAUSS_ORDER)
    edges = np.linspace(0.0, t, panels + 1)
    half = np.diff(edges) / 2.0
    mids = (edges[:-1] + edges[1:]) / 2.0
    pts = (mids[:, None] + half[:, None] * nodes[None, :]).ravel()
    wts = (half[:, None] * weights[None, :]).ravel()
    return pts, wts


def _quad_matrix(M, t, panels):
    pts, wts = _gauss_panels(t, panels)
    acc = None
    for s, w in zip(pts, wts):
        val = w * np.asarray(M(s), dtype=float)
        acc = val if acc is None else acc + val
    return acc


def integrate_matrix(M, t, panels=DEFAULT_PANELS, check=True):
    """Entry-wise integral of the matrix-valued map M over [0, t].

    Composite Gauss-Legendre of fixed order per panel.  With ``check``
    the panel count is doubled once and the two results must agree to
    1e-10 (relative to the larger entry scale), otherwise AccuracyError.
    """
    if t <= 0.0:
        raise DomainError(f"integration endpoint must be positive, got {t}")
    coarse = _quad_matrix(M, t, panels)
    if not check:
        return coarse
    fine = _quad_matrix(M, t, 2 * panels)
    scale = max(1.0, float(np.abs(fine).max()))
    if np.abs(fine - coarse).max() > REFINE_TOL * scale:
        raise AccuracyError(
            "panel doubling changed the integral by more than 1e-10; "
            "integrand may be non-smooth"
        )
    return fine
