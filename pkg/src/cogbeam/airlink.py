"""PR TDD transmissions as observed by the CR transmitter during learning."""
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidInputError
from .scenario import sample_cscg_matrix


@dataclass(frozen=True)
class TddSchedule:
    """Activity indicators ``q1``/``q2`` (0/1 ints) over ``n`` symbols; never both 1."""

    q1: np.ndarray
    q2: np.ndarray

    @property
    def n(self):
        return self.q1.size

    @property
    def counts(self):
        """``(|N_1|, |N_2|)``, the number of symbols each PR transmits."""
        return int(self.q1.sum()), int(self.q2.sum())


@dataclass(frozen=True)
class ObservationBatch:
    """Samples received at CR-Tx: ``y = signal_only + noise``.

    ``signal_only`` and ``symbols`` (the stacked ``[s_1; s_2]``) are kept
    for diagnostics only; estimators must read ``y`` alone.
    """

    y: np.ndarray
    schedule: TddSchedule
    rho_0: float
    signal_only: np.ndarray
    symbols: np.ndarray

    @property
    def n(self):
        return self.y.shape[1]

    @property
    def noise(self):
        return self.y - self.signal_only


def generate_tdd_schedule(n, alpha_1, alpha_2, block_len=1, rng=None):
    """Draw which PR terminal (if any) transmits in each of ``n`` symbols.

    Runs of ``block_len`` symbols share one categorical draw from
    ``{PR_1: alpha_1, PR_2: alpha_2, idle: 1 - alpha_1 - alpha_2}``;
    ``block_len=1`` gives independent per-symbol draws.
    """
    if alpha_1 < 0 or alpha_2 < 0 or alpha_1 + alpha_2 > 1.0 + 1e-12:
        raise ConfigError("activity probabilities must be non-negative with sum <= 1", key="alpha_2")
    if n < 0 or block_len < 1:
        raise InvalidInputError("n must be >= 0 and block_len >= 1")
    rng = np.random.default_rng() if rng is None else rng
    n_blocks = -(-n // block_len)
    idle = max(0.0, 1.0 - alpha_1 - alpha_2)
    p = np.array([alpha_1, alpha_2, idle])
    state = rng.choice(3, size=n_blocks, p=p / p.sum())
    state = np.repeat(state, block_len)[:n]
    return TddSchedule(q1=(state == 0).astype(np.int8), q2=(state == 1).astype(np.int8))


def pr_symbols(schedule, d_1, d_2, rng):
    """Gated PR symbols ``s_j(n) = q_j(n) t_j(n)`` with ``t_j ~ CN(0, I)``, stacked as ``[s_1; s_2]``."""
    n = schedule.n
    t1 = sample_cscg_matrix(d_1, max(n, 1), rng)[:, :n]
    t2 = sample_cscg_matrix(d_2, max(n, 1), rng)[:, :n]
    return np.vstack([t1 * schedule.q1, t2 * schedule.q2])


def effective_pr_matrix(channels, design):
    """``[G_1^H A_1, G_2^H A_2]``, mapping stacked PR symbols onto CR-Tx antennas."""
    return np.hstack([channels.g1.conj().T @ design.a1, channels.g2.conj().T @ design.a2])


def observe_pr_signals(channels, design, schedule, rho_0, rng):
    """Received samples at CR-Tx over the schedule, with CN(0, rho_0 I) noise."""
    if rho_0 < 0:
        raise InvalidInputError("rho_0 must be non-negative")
    m_t = channels.g1.shape[1]
    s = pr_symbols(schedule, design.d1, design.d2, rng)
    y_s = effective_pr_matrix(channels, design) @ s
    if schedule.n and rho_0 > 0:
        noise = np.sqrt(rho_0) * sample_cscg_matrix(m_t, schedule.n, rng)
    else:
        noise = np.zeros((m_t, schedule.n), dtype=complex)
    return ObservationBatch(y=y_s + noise, schedule=schedule, rho_0=rho_0, signal_only=y_s, symbols=s)


def true_signal_covariance(channels, design, alpha_1, alpha_2):
    """``alpha_1 G_1^H S_1 G_1 + alpha_2 G_2^H S_2 G_2``."""
    g1, g2 = channels.g1, channels.g2
    q = alpha_1 * (g1.conj().T @ design.s1 @ g1) + alpha_2 * (g2.conj().T @ design.s2 @ g2)
    return 0.5 * (q + q.conj().T)
