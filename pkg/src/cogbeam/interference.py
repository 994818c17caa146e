"""Leakage interference at the PR terminals caused by imperfect null-space learning."""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NoExactSolutionError, UndefinedBoundError
from .numerics import hermitian_evd, pseudo_inverse


@dataclass(frozen=True)
class LeakageReport:
    """Per-PR leakage, index 0 for PR_1 and 1 for PR_2.

    ``i_j`` is the raw interference power after receive beamforming.
    ``i_bar_j`` normalises it by the processed noise ``rho_0 Tr(B_j B_j^H)``.
    ``bound_j`` holds the matching upper bounds when activity and sample
    count were supplied, else ``None``.
    """

    i_j: tuple
    i_bar_j: tuple
    bound_j: tuple = None


def _lam_max(m):
    return hermitian_evd(m).eigenvalues[0]


def _lam_min(m):
    return hermitian_evd(m).eigenvalues[-1]


def leakage_power(b, g, s_cr):
    """``Tr(B G S_CR G^H B^H)``, the closed-form mean of ``||B G s_CR(n)||^2``."""
    bg = np.asarray(b) @ np.asarray(g)
    return float(np.real(np.trace(bg @ s_cr @ bg.conj().T)))


def leakage_metrics(design, channels, cb, rho_0, alphas=None, n=None):
    """Closed-form leakage at both PR terminals for a CR design.

    Args:
        design: PR link design (receive beamformers ``b_j``).
        channels: channel realization (``g_j``).
        cb: CR design; its ``s_cr`` is the transmit covariance.
        rho_0: noise power at the PR terminals.
        alphas: optional ``(alpha_1, alpha_2)``; with ``n`` enables bounds.
        n: optional number of learning samples.
    """
    if rho_0 <= 0:
        raise InvalidInputError("rho_0 must be positive")
    s_cr = cb.s_cr
    raw, norm = [], []
    for j in (1, 2):
        b = design.b(j)
        i = leakage_power(b, channels.g(j), s_cr)
        raw.append(i)
        norm.append(i / (rho_0 * float(np.real(np.trace(b @ b.conj().T)))))
    bounds = None
    if alphas is not None and n is not None:
        trace_c = float(np.real(np.trace(cb.c_cr))) if cb.c_cr.size else 0.0
        bounds = tuple(
            leakage_bound(trace_c, alphas[j - 1], n, channels.g(j), design.a(j)) for j in (1, 2)
        )
    return LeakageReport(i_j=tuple(raw), i_bar_j=tuple(norm), bound_j=bounds)


def eigen_ratio(g, a):
    """``lam_max(G G^H) / lam_min(A^H G G^H A)``; the scale of ``G`` cancels."""
    g = np.asarray(g, dtype=complex)
    a = np.asarray(a, dtype=complex)
    ag = a.conj().T @ g
    lam_min = _lam_min(ag @ ag.conj().T)
    if lam_min <= 0:
        raise InvalidInputError("A^H G must have full row rank")
    return _lam_max(g @ g.conj().T) / lam_min


def leakage_bound(c_cr_trace, alpha_j, n, g_j, a_j):
    """Upper bound on the effective leakage at PR_j after ``n`` learning samples.

        Tr(C_CR) / (alpha_j n) * lam_max(G G^H) / lam_min(A^H G G^H A)

    Raises:
        UndefinedBoundError: when ``alpha_j == 0`` (PR_j never transmits).
    """
    if alpha_j <= 0:
        raise UndefinedBoundError("PR terminal is silent; the leakage bound is undefined")
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    return c_cr_trace / (alpha_j * n) * eigen_ratio(g_j, a_j)


def gamma_coefficient(zeta_j, alpha_j, gamma_cap, t_s, g_j, a_j):
    """Power-per-learning-time slope ``gamma_j`` keeping the leakage bound at ``zeta_j * Gamma``.

    ``Tr(C_CR) <= gamma_j * tau`` then keeps PR_j's bound below the cap.
    """
    if not 0 < zeta_j <= 1:
        raise InvalidInputError("zeta_j must lie in (0, 1]")
    if gamma_cap <= 0 or t_s <= 0:
        raise InvalidInputError("gamma_cap and t_s must be positive")
    return zeta_j * alpha_j * gamma_cap / t_s / eigen_ratio(g_j, a_j)


def perturbation_predict(y_signal, z_noise, u_true):
    """First-order null-space perturbation ``-(Y_s^H)^+ Z^H U``.

    Accuracy degrades at low PR SNR; use as a diagnostic only.
    """
    y_signal = np.asarray(y_signal, dtype=complex)
    z_noise = np.asarray(z_noise, dtype=complex)
    if y_signal.shape != z_noise.shape:
        raise InvalidInputError("Y_s and Z must have the same shape")
    return -pseudo_inverse(y_signal.conj().T) @ z_noise.conj().T @ np.asarray(u_true, dtype=complex)


def solve_coupling_matrix(a_j, b_j, g_j, rel_tol=1e-8):
    """Least-squares ``W`` with ``B G = W A^H G``.

    Raises:
        NoExactSolutionError: if the residual exceeds ``rel_tol * ||B G||_F``,
            i.e. the row space of ``A^H G`` does not contain that of ``B G``.
    """
    ag = np.asarray(a_j, dtype=complex).conj().T @ np.asarray(g_j, dtype=complex)
    bg = np.asarray(b_j, dtype=complex) @ np.asarray(g_j, dtype=complex)
    w = bg @ pseudo_inverse(ag)
    residual = float(np.linalg.norm(bg - w @ ag))
    if residual > rel_tol * np.linalg.norm(bg):
        raise NoExactSolutionError(f"no exact coupling matrix (residual {residual:.3e})", residual)
    return w


def coupling_trace_bound(a_j, b_j, g_j):
    """``lam_max(G G^H) Tr(B B^H) / lam_min(A^H G G^H A)``, an upper bound on ``Tr(W W^H)``."""
    b = np.asarray(b_j, dtype=complex)
    return eigen_ratio(g_j, a_j) * float(np.real(np.trace(b @ b.conj().T)))
