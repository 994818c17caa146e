"""Dense complex-matrix primitives shared by every other module.

Conventions fixed here and relied on downstream:

* eigenvalues of Hermitian matrices are returned in *descending* order;
* ``psd_sqrt`` returns ``U @ diag(sqrt(lam))`` with the columns belonging to
  numerically-zero eigenvalues dropped, so the factor has exactly ``rank``
  columns;
* the pseudo-inverse cuts singular values below ``rel_tol * sigma_max``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NotPSDError

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
PINV_RCOND = 1e-12


@dataclass(frozen=True)
class EvdResult:
    """Eigen-decomposition ``M = V diag(lam) V^H`` with ``lam`` descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(m):
    """Return ``m`` as a 2-D complex array, rejecting empty shapes."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidInputError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    return a


def hermitian_part(m):
    return 0.5 * (m + m.conj().T)


def is_hermitian(m, tol=HERMITIAN_TOL):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return True
    return np.linalg.norm(m - m.conj().T) <= tol * scale


def hermitian_evd(m):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending.

    Raises:
        InvalidInputError: if ``m`` is not square or not Hermitian to
            ``1e-12`` relative Frobenius norm.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"matrix must be square, got {a.shape}")
    if not is_hermitian(a):
        raise InvalidInputError("matrix is not Hermitian")
    lam, vecs = np.linalg.eigh(hermitian_part(a))
    # eigh sorts ascending; a stable reversal keeps tie order deterministic
    order = np.argsort(-lam, kind="stable")
    return EvdResult(eigenvalues=lam[order], eigenvectors=vecs[:, order])


def psd_sqrt(s, tol=PSD_TOL):
    """Square-root factor ``R`` of a PSD matrix with ``R R^H = s``.

    ``R`` has one column per numerically non-zero eigenvalue, so a rank-``r``
    input yields an ``n x r`` factor (``n x 0`` for the zero matrix).
    Eigenvalues in ``[-tol*lam_max, 0)`` are treated as zero.
    """
    evd = hermitian_evd(s)
    lam = evd.eigenvalues
    lam_max = max(lam[0], 0.0)
    if lam[-1] < -tol * lam_max or (lam_max == 0.0 and lam[-1] < 0.0):
        raise NotPSDError(f"minimum eigenvalue {lam[-1]:.3e} is negative beyond tolerance")
    keep = lam > tol * lam_max
    return evd.eigenvectors[:, keep] * np.sqrt(lam[keep])


def pseudo_inverse(m, rel_tol=PINV_RCOND):
    """Moore-Penrose pseudo-inverse; singular values below ``rel_tol*sigma_max`` are dropped."""
    if not 0.0 < rel_tol < 1.0:
        raise InvalidInputError("rel_tol must lie in (0, 1)")
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise InvalidInputError(f"expected a 2-D matrix, got shape {a.shape}")
    if a.size == 0 or not np.any(a):
        return np.zeros((a.shape[1], a.shape[0]), dtype=complex)
    return np.linalg.pinv(a, rcond=rel_tol)


def numerical_rank(m, rel_tol=1e-9):
    """Number of singular values above ``rel_tol * sigma_max``."""
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))


def projector(u):
    """Orthogonal projector ``u u^H`` onto the span of orthonormal columns."""
    u = np.asarray(u, dtype=complex)
    return u @ u.conj().T


def subspace_distance(u1, u2):
    """Frobenius distance between the projectors onto ``span(u1)`` and ``span(u2)``.

    Both inputs must have orthonormal columns and the same number of rows.
    Either may have zero columns (the zero subspace).
    """
    u1 = np.asarray(u1, dtype=complex)
    u2 = np.asarray(u2, dtype=complex)
    if u1.ndim != 2 or u2.ndim != 2 or u1.shape[0] != u2.shape[0]:
        raise InvalidInputError(
            f"bases must be 2-D with equal row counts, got {u1.shape} and {u2.shape}"
        )
    return float(np.linalg.norm(projector(u1) - projector(u2)))


def orthonormal_basis(m, rel_tol=1e-9):
    """Orthonormal basis for the column space of ``m`` (via SVD)."""
    a = np.asarray(m, dtype=complex)
    u, sv, _ = np.linalg.svd(a, full_matrices=False)
    if sv.size == 0 or sv[0] == 0.0:
        return u[:, :0]
    return u[:, sv > rel_tol * sv[0]]


def random_unitary(n, rng):
    """Haar-distributed unitary matrix (QR of a complex Gaussian with phase fix)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
