"""Small dense complex linear algebra used by the analysis modules.

Everything here goes through LAPACK (via numpy): ``zgeev`` reduces to upper
Hessenberg form and runs a shifted QR iteration, which is what the analysis
needs for the small matrices (n <= 10 or so) that appear in practice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class EigenvalueError(RuntimeError):
    """The eigenvalue iteration failed to converge."""


@dataclass(frozen=True)
class EigenSet:
    values: np.ndarray
    backward_error: float


@dataclass(frozen=True)
class PolyRoots:
    coefficients: np.ndarray  # ascending degree, trimmed
    roots: np.ndarray


def sort_complex(z: np.ndarray) -> np.ndarray:
    """Sort by real part, then imaginary part.

    Real parts that agree to about 1e-12 relative are treated as equal, so
    rounding noise does not reorder conjugate pairs.
    """
    z = np.asarray(z)
    if z.size == 0:
        return z
    q = 1e-12 * max(1.0, float(np.max(np.abs(z))))
    return z[np.lexsort((z.imag, np.round(z.real / q)))]


def _as_square(M) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def eigenvalues(M) -> EigenSet:
    """All eigenvalues of ``M`` with multiplicity, ordered by (Re, Im).

    The backward error is ``max_j ||M v_j - l_j v_j|| / ||M||`` over the unit
    eigenvectors returned alongside.
    """
    M = _as_square(M)
    try:
        w, v = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise EigenvalueError(str(exc)) from exc
    scale = max(np.linalg.norm(M), np.finfo(float).tiny)
    res = np.linalg.norm(M @ v - v * w, axis=0)
    berr = float(np.max(res) / scale) if res.size else 0.0
    return EigenSet(sort_complex(w), berr)


def eigvals_batch(stack: np.ndarray) -> np.ndarray:
    """Eigenvalues of a stack of matrices (unsorted), shape ``(..., n)``."""
    try:
        return np.linalg.eigvals(stack)
    except np.linalg.LinAlgError as exc:
        raise EigenvalueError(str(exc)) from exc


def spectral_abscissa(M) -> float:
    return float(np.max(eigenvalues(M).values.real))


def spectral_radius(M) -> float:
    return float(np.max(np.abs(eigenvalues(M).values)))


def determinant(M) -> complex:
    M = _as_square(M)
    if M.shape == (1, 1):
        return complex(M[0, 0])
    # LU with partial pivoting (LAPACK getrf)
    return complex(np.linalg.det(M))


def numerical_rank(M, rtol: float = 1e-10) -> int:
    M = np.asarray(M, dtype=complex)
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * np.linalg.norm(M)))


def poly_roots(coeffs) -> PolyRoots:
    """Roots of ``sum_k c_k z**k`` (ascending coefficients).

    Exactly-zero high-order coefficients are trimmed first; the roots are the
    eigenvalues of the companion matrix of the monic polynomial.
    """
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    nz = np.flatnonzero(c)
    if nz.size == 0:
        raise ValueError("all-zero coefficient vector has no well-defined roots")
    c = c[: nz[-1] + 1]
    deg = c.size - 1
    if deg == 0:
        return PolyRoots(c, np.empty(0, dtype=complex))
    comp = np.zeros((deg, deg), dtype=complex)
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    return PolyRoots(c, eigenvalues(comp).values)
