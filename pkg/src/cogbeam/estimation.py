"""Blind estimation of the PR signal covariance, its rank and the EIC.

Two maximum-likelihood estimators are provided, one for a known noise
power and one that estimates it jointly with the rank (MDL). Both return
an :class:`EicEstimate` holding the signal subspace ``v_hat``, the null
space ``u_hat`` used for CR beamforming and the EIC ``g_eff``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .numerics import hermitian_evd, hermitian_part

EIG_FLOOR = 1e-300


@dataclass(frozen=True)
class EicEstimate:
    """Estimated PR signal covariance and the subspaces derived from it.

    Attributes:
        q_s_hat: estimated signal covariance (PSD Hermitian).
        d_eff_hat: estimated rank of the signal covariance.
        v_hat: ``m_t x d_eff_hat`` signal-subspace basis.
        u_hat: ``m_t x (m_t - d_eff_hat)`` null-space basis.
        rho_0_hat: noise power used or estimated.
        g_eff: EIC, ``d_eff_hat x m_t``, with ``g_eff^H g_eff = q_s_hat``.
        eigenvalues: eigenvalues of the input covariance, descending.
        degenerate: True when no null space is left (``d_eff_hat == m_t``).
    """

    q_s_hat: np.ndarray
    d_eff_hat: int
    v_hat: np.ndarray
    u_hat: np.ndarray
    rho_0_hat: float
    g_eff: np.ndarray
    eigenvalues: np.ndarray
    degenerate: bool


def sample_covariance(y):
    """``(1/N) sum_n y(n) y(n)^H`` for an :class:`ObservationBatch` or raw ``m_t x N`` array."""
    y = np.asarray(getattr(y, "y", y), dtype=complex)
    if y.ndim != 2 or y.shape[1] < 1:
        raise InvalidInputError("need at least one observation column")
    return hermitian_part(y @ y.conj().T) / y.shape[1]


def _build(evd, d, shrink, rho_0_hat):
    # shrink[i] = lam_i - rho, clamped below at 0, for the first d eigenvalues
    vecs = evd.eigenvectors
    v_hat = vecs[:, :d]
    u_hat = vecs[:, d:]
    amp = np.sqrt(np.clip(shrink[:d], 0.0, None))
    g_eff = amp[:, None] * v_hat.conj().T
    q_s_hat = hermitian_part(g_eff.conj().T @ g_eff)
    return EicEstimate(
        q_s_hat=q_s_hat,
        d_eff_hat=int(d),
        v_hat=v_hat,
        u_hat=u_hat,
        rho_0_hat=float(rho_0_hat),
        g_eff=g_eff,
        eigenvalues=evd.eigenvalues,
        degenerate=d == vecs.shape[0],
    )


def _check_rank(rank, m_t):
    if not 0 <= rank <= m_t:
        raise InvalidInputError(f"rank must lie in [0, {m_t}], got {rank}")


def noise_edge(rho_0, m_t, n_samples):
    """Upper edge ``rho_0 (1 + sqrt(m_t/N))^2`` of the noise-only sample eigenvalue spread."""
    return rho_0 * (1.0 + np.sqrt(m_t / n_samples)) ** 2


def estimate_known_noise(q_y_hat, rho_0, n_samples=None, rank=None):
    """ML estimate of the signal covariance when the noise power is known.

    Eigenvalues are soft-thresholded, ``(lam_i - rho_0)^+``. The rank is the
    number of eigenvalues above ``rho_0``. If ``n_samples`` is given, an
    eigenvalue must also clear :func:`noise_edge`, since finite-sample noise
    eigenvalues scatter above ``rho_0``. Passing ``rank`` fixes the split
    between signal and null space.
    """
    if rho_0 < 0:
        raise InvalidInputError("rho_0 must be non-negative")
    evd = hermitian_evd(q_y_hat)
    lam = evd.eigenvalues
    m_t = lam.size
    if rank is None:
        threshold = rho_0
        if n_samples is not None:
            if n_samples < 1:
                raise InvalidInputError("n_samples must be positive")
            threshold = max(rho_0, noise_edge(rho_0, m_t, n_samples))
        rank = int(np.sum(lam > threshold))
    _check_rank(rank, m_t)
    return _build(evd, rank, lam - rho_0, rho_0)


def mdl_scores(eigenvalues, n):
    """MDL criterion for each candidate rank ``k = 0, ..., m-1``."""
    lam = np.sort(np.maximum(np.asarray(eigenvalues, dtype=float), EIG_FLOOR))[::-1]
    m = lam.size
    if m < 2:
        raise InvalidInputError("need at least two eigenvalues")
    if n < 2:
        raise InvalidInputError("need at least two samples")
    scores = np.empty(m)
    for k in range(m):
        tail = lam[k:]
        log_am_over_gm = np.log(tail.mean()) - np.log(tail).mean()
        scores[k] = (m - k) * n * max(log_am_over_gm, 0.0) + 0.5 * k * (2 * m - k) * np.log(n)
    return scores


def estimate_rank_mdl(eigenvalues, n):
    """Number of signal eigenvalues by minimum description length."""
    return int(np.argmin(mdl_scores(eigenvalues, n)))


def estimate_unknown_noise(q_y_hat, n, rank=None):
    """Joint ML estimate of noise power and signal covariance, rank by MDL.

    The noise power is the mean of the trailing ``m_t - d`` eigenvalues. The
    shrunk signal eigenvalues ``lam_i - rho_0_hat`` are clamped at zero. If
    the rank comes out as ``m_t``, no eigenvalues are left to average, so
    ``rho_0_hat`` is 0 and the estimate is flagged ``degenerate``.
    """
    evd = hermitian_evd(q_y_hat)
    lam = evd.eigenvalues
    m_t = lam.size
    d = estimate_rank_mdl(lam, n) if rank is None else rank
    _check_rank(d, m_t)
    rho_0_hat = float(np.mean(np.maximum(lam[d:], 0.0))) if d < m_t else 0.0
    return _build(evd, d, lam - rho_0_hat, rho_0_hat)


def estimate_oracle(q_s, rho_0=0.0, rel_tol=1e-9):
    """Perfect-learning EIC built from the true signal covariance.

    The rank counts eigenvalues above ``rel_tol * lam_max``.
    """
    evd = hermitian_evd(q_s)
    lam = evd.eigenvalues
    d = int(np.sum(lam > rel_tol * lam[0])) if lam[0] > 0 else 0
    return _build(evd, d, lam, rho_0)


def estimate(kind, q_y_hat, rho_0, n, rank=None):
    """Dispatch to the known- or unknown-noise estimator by name."""
    if kind == "known_noise":
        return estimate_known_noise(q_y_hat, rho_0, n_samples=n, rank=rank)
    if kind == "unknown_noise":
        return estimate_unknown_noise(q_y_hat, n, rank=rank)
    raise InvalidInputError(f"unknown estimator {kind!r}")
