"""CR transmit design in the null space of the EIC.

Contents: the water-filling value function ``f(z)`` in closed piecewise
form, the CB covariance design, throughput evaluation, the projected-channel
SVD (P-SVD) baseline and the degrees-of-freedom formulas.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .numerics import hermitian_evd, orthonormal_basis

ZERO_GAIN_TOL = 1e-12


@dataclass(frozen=True)
class WaterfillSolution:
    value: float
    allocation: np.ndarray
    water_level: float
    active_count: int


class WaterfillCurve:
    """Closed-form ``f(z) = max sum log(1 + s_i x_i / rho_1)`` s.t. ``sum x_i <= z``.

    Gains at or below ``1e-12`` times the largest gain carry no power and
    are excluded before the breakpoints are formed. The breakpoint ``q_k``
    is the budget at which dimension ``k+1`` starts receiving power:

        q_k = k rho_1 / s_{k+1} - sum_{i<=k} rho_1 / s_i,   q_0 = 0, q_K = inf

    On ``[q_{k-1}, q_k]`` the water level is ``(z + sum_{i<=k} rho_1/s_i) / k``.
    ``value`` and ``slope`` accept scalars or arrays.
    """

    def __init__(self, sigma_sq, rho_1):
        s = np.asarray(sigma_sq, dtype=float).ravel()
        if rho_1 <= 0:
            raise InvalidInputError("rho_1 must be positive")
        if np.any(s < 0):
            raise InvalidInputError("channel gains must be non-negative")
        if np.any(np.diff(s) > 1e-12 * max(s.max(initial=0.0), 1.0)):
            raise InvalidInputError("channel gains must be sorted in descending order")
        self.sigma_sq = s
        self.rho_1 = float(rho_1)
        top = s[0] if s.size else 0.0
        self.active = int(np.sum(s > ZERO_GAIN_TOL * top)) if top > 0 else 0
        k_all = np.arange(1, self.active + 1)
        inv = self.rho_1 / s[: self.active]
        self._inv = inv
        self._cum_inv = np.cumsum(inv)
        self._cum_log_inv = np.cumsum(np.log(inv))
        # breakpoints q_1 .. q_K (q_K = inf)
        q = np.full(self.active, np.inf)
        if self.active > 1:
            q[:-1] = k_all[:-1] * inv[1:] - self._cum_inv[:-1]
        self.breakpoints = q

    def _segment(self, z):
        # smallest k with z <= q_k; ties land on the lower segment
        return np.searchsorted(self.breakpoints, z, side="left") + 1

    def water_level(self, z):
        z = np.asarray(z, dtype=float)
        if self.active == 0:
            return np.zeros_like(z)[()]
        k = self._segment(z)
        return ((z + self._cum_inv[k - 1]) / k)[()]

    def value(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z < 0):
            raise InvalidInputError("budget must be non-negative")
        if self.active == 0:
            return np.zeros_like(z)[()]
        k = self._segment(z)
        level = (z + self._cum_inv[k - 1]) / k
        return (k * np.log(level) - self._cum_log_inv[k - 1])[()]

    def slope(self, z):
        """``f'(z)``, the reciprocal water level (zero when no gain is usable)."""
        z = np.asarray(z, dtype=float)
        if self.active == 0:
            return np.zeros_like(z)[()]
        k = self._segment(z)
        return (k / (z + self._cum_inv[k - 1]))[()]

    def solve(self, z):
        if z < 0:
            raise InvalidInputError("budget must be non-negative")
        x = np.zeros(self.sigma_sq.size)
        if self.active == 0:
            return WaterfillSolution(value=0.0, allocation=x, water_level=0.0, active_count=0)
        k = int(self._segment(z))
        level = (z + self._cum_inv[k - 1]) / k
        x[:k] = np.maximum(level - self._inv[:k], 0.0)
        return WaterfillSolution(
            value=float(self.value(z)),
            allocation=x,
            water_level=float(level),
            active_count=int(np.count_nonzero(x)),
        )


def waterfill(sigma_sq, rho_1, z):
    """Water-filling power allocation over parallel channels with gains ``sigma_sq``.

    With no usable gain the value is 0 and every dimension gets zero power.
    """
    return WaterfillCurve(sigma_sq, rho_1).solve(z)


@dataclass(frozen=True)
class CbDesign:
    """CR transmit design ``A_CR = U C_CR^{1/2}`` confined to ``span(u_basis)``."""

    u_basis: np.ndarray
    c_cr: np.ndarray
    a_cr: np.ndarray
    d_cr: int
    power_used: float
    rate: float
    sigma_sq: np.ndarray

    @property
    def s_cr(self):
        return self.a_cr @ self.a_cr.conj().T


def effective_gains(h, u_basis):
    """Eigen-decomposition of ``U^H H^H H U``; gains clamped at zero, descending."""
    hu = np.asarray(h, dtype=complex) @ u_basis
    evd = hermitian_evd(hu.conj().T @ hu)
    return np.maximum(evd.eigenvalues, 0.0), evd.eigenvectors


def design_cb(u_basis, h, budget, rho_1):
    """Rate-optimal CR covariance restricted to the null-space basis ``u_basis``.

    The covariance is diagonalised by the eigenvectors of ``U^H H^H H U``
    and powered by water-filling over its eigenvalues.
    """
    u_basis = np.asarray(u_basis, dtype=complex)
    if budget < 0:
        raise InvalidInputError("budget must be non-negative")
    m_t, n_free = u_basis.shape
    if n_free == 0:
        return CbDesign(
            u_basis=u_basis,
            c_cr=np.zeros((0, 0), dtype=complex),
            a_cr=np.zeros((m_t, 0), dtype=complex),
            d_cr=0,
            power_used=0.0,
            rate=0.0,
            sigma_sq=np.zeros(0),
        )
    sigma_sq, u_h = effective_gains(h, u_basis)
    sol = waterfill(sigma_sq, rho_1, budget)
    x = sol.allocation
    on = x > 0
    c_cr = (u_h * x) @ u_h.conj().T
    a_cr = u_basis @ (u_h[:, on] * np.sqrt(x[on]))
    return CbDesign(
        u_basis=u_basis,
        c_cr=c_cr,
        a_cr=a_cr,
        d_cr=int(on.sum()),
        power_used=float(x.sum()),
        rate=sol.value,
        sigma_sq=sigma_sq,
    )


def throughput(h, u_basis, c_cr, rho_1, learning_fraction=0.0):
    """Effective rate ``(1 - tau/T) log|I + H U C U^H H^H / rho_1|`` in nats."""
    if not 0.0 <= learning_fraction < 1.0:
        raise InvalidInputError("learning_fraction must lie in [0, 1)")
    h = np.asarray(h, dtype=complex)
    u_basis = np.asarray(u_basis, dtype=complex)
    if u_basis.shape[1] == 0:
        return 0.0
    hu = h @ u_basis
    m = np.eye(h.shape[0]) + hu @ np.asarray(c_cr) @ hu.conj().T / rho_1
    sign, logdet = np.linalg.slogdet(m)
    return float((1.0 - learning_fraction) * logdet)


def psvd_capacity(h, g1, g2, budget, rho_1, rel_tol=1e-9):
    """Capacity of the P-SVD baseline, which transmits orthogonally to the stacked CR-to-PR channels.

    ``g1``/``g2`` may be ``None`` or have zero rows, in which case they
    impose no restriction.
    """
    h = np.asarray(h, dtype=complex)
    m_t = h.shape[1]
    blocks = [np.asarray(g, dtype=complex) for g in (g1, g2) if g is not None]
    blocks = [g for g in blocks if g.shape[0] > 0]
    if blocks:
        stacked = np.vstack(blocks)
        if stacked.shape[1] != m_t:
            raise InvalidInputError("CR-to-PR channels must have m_t columns")
        row_space = orthonormal_basis(stacked.conj().T, rel_tol)
        proj = np.eye(m_t) - row_space @ row_space.conj().T
    else:
        proj = np.eye(m_t)
    sv = np.linalg.svd(h @ proj, compute_uv=False)
    return float(WaterfillCurve(np.sort(sv**2)[::-1], rho_1).value(budget))


def dof(m_t, m_r, a, b):
    """``min((m_t - a - b)^+, m_r)``.

    With ``(a, b) = (d_1, d_2)`` this bounds the proposed scheme's streams.
    With ``(a, b) = (m_1, m_2)`` it gives the P-SVD baseline.
    """
    for v in (m_t, m_r, a, b):
        if v < 0:
            raise InvalidInputError("dimensions must be non-negative")
    return int(min(max(m_t - a - b, 0), m_r))
