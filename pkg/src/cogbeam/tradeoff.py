"""Optimal split of a block between channel learning and data transmission.

A block of ``T`` symbols spends ``tau`` learning the EIC. The power
available during the remaining ``T - tau`` symbols is ``J(tau)``, the
smaller of the power budget and the interference allowance ``gamma*tau``.
The budget is ``P`` under a peak constraint and ``T P / (T - tau)`` under
an average one. The objective is ``(T - tau)/T * f(J(tau))`` with ``f``
the water-filling value, and it decomposes into three curves:

    g1(tau) = (T - tau)/T * f(P)
    g2(tau) = (T - tau)/T * f(gamma tau)
    g3(tau) = (T - tau)/T * f(T P / (T - tau))
"""
from dataclasses import dataclass, field

import numpy as np

from .beamforming import WaterfillCurve, effective_gains
from .errors import InvalidInputError

BRANCHES = ("interior_g2", "corner_p_over_gamma", "corner_tau_l", "always_g2")
CONSTRAINT_MODES = ("peak", "average")


@dataclass(frozen=True)
class TradeoffProblem:
    """Inputs to the learning-time optimisation.

    Attributes:
        sigma_sq: descending eigenvalues of ``U^H H^H H U``.
        rho_1: CR receiver noise power.
        t_block: block length ``T`` in symbols.
        tau_min: smallest admissible learning time.
        p_cr: CR power budget.
        gamma: interference allowance slope, ``min(gamma_1, gamma_2)``.
        constraint_mode: ``"peak"`` or ``"average"``.
    """

    sigma_sq: np.ndarray
    rho_1: float
    t_block: float
    tau_min: float
    p_cr: float
    gamma: float
    constraint_mode: str = "peak"
    curve: WaterfillCurve = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidInputError("gamma must be positive")
        if not 0 <= self.tau_min < self.t_block:
            raise InvalidInputError("tau_min must lie in [0, t_block)")
        if not self.p_cr > 0:
            raise InvalidInputError("p_cr must be positive")
        if self.constraint_mode not in CONSTRAINT_MODES:
            raise InvalidInputError(f"constraint_mode must be one of {CONSTRAINT_MODES}")
        object.__setattr__(self, "curve", WaterfillCurve(self.sigma_sq, self.rho_1))

    @classmethod
    def from_channel(cls, h, u_basis, cfg, gamma, constraint_mode="peak"):
        """Problem for CR channel ``h`` restricted to ``u_basis`` with ``cfg``'s timing and power."""
        sigma_sq, _ = effective_gains(h, u_basis)
        return cls(
            sigma_sq=sigma_sq,
            rho_1=cfg.rho_1,
            t_block=cfg.t_block,
            tau_min=cfg.tau_min,
            p_cr=cfg.p_cr,
            gamma=gamma,
            constraint_mode=constraint_mode,
        )

    def with_power(self, p_cr):
        return TradeoffProblem(
            self.sigma_sq, self.rho_1, self.t_block, self.tau_min, p_cr, self.gamma, self.constraint_mode
        )


@dataclass(frozen=True)
class TradeoffSolution:
    """Optimal learning time and the resulting effective throughput (nats/dim)."""

    tau_star: float
    tau_star_symbols: int
    value: float
    branch: str
    allocation: np.ndarray
    tau_2_star: float


def _check_tau(problem, tau):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0) or np.any(tau >= problem.t_block):
        raise InvalidInputError("tau must lie in [0, t_block)")
    return tau


def eval_g(problem, tau, branch):
    """Evaluate ``g1``, ``g2`` or ``g3`` at ``tau`` (scalar or array)."""
    tau = _check_tau(problem, tau)
    t = problem.t_block
    scale = (t - tau) / t
    if branch == "g1":
        budget = np.full_like(tau, problem.p_cr)
    elif branch == "g2":
        budget = problem.gamma * tau
    elif branch == "g3":
        budget = t * problem.p_cr / (t - tau)
    else:
        raise InvalidInputError(f"unknown branch {branch!r}")
    return (scale * problem.curve.value(budget))[()]


def power_limit(problem, tau):
    """``J(tau)``, the transmit-power ceiling after learning for ``tau`` symbols."""
    tau = _check_tau(problem, tau)
    t = problem.t_block
    budget = problem.p_cr if problem.constraint_mode == "peak" else t * problem.p_cr / (t - tau)
    return np.minimum(budget, problem.gamma * tau)[()]


def objective(problem, tau):
    """Effective throughput ``(T - tau)/T * f(J(tau))``."""
    tau = _check_tau(problem, tau)
    return ((problem.t_block - tau) / problem.t_block * problem.curve.value(power_limit(problem, tau)))[()]


def g2_slope(problem, tau):
    """Analytic derivative of ``g2``: ``-f(gamma tau)/T + (T - tau)/T * gamma f'(gamma tau)``."""
    t, gamma = problem.t_block, problem.gamma
    z = gamma * tau
    return -problem.curve.value(z) / t + (t - tau) / t * gamma * problem.curve.slope(z)


def maximize_g2(problem, rel_tol=1e-10):
    """Maximise the concave ``g2`` over ``[tau_min, T)`` by bisection on its derivative.

    Returns:
        ``(tau_2_star, g2(tau_2_star))``; ``tau_min`` when ``g2`` is already
        non-increasing there.
    """
    lo, hi = float(problem.tau_min), float(problem.t_block)
    if problem.curve.active == 0 or g2_slope(problem, lo) <= 0:
        return lo, float(eval_g(problem, lo, "g2"))
    while hi - lo > rel_tol * problem.t_block:
        mid = 0.5 * (lo + hi)
        if g2_slope(problem, mid) > 0:
            lo = mid
        else:
            hi = mid
    tau = 0.5 * (lo + hi)
    return tau, float(eval_g(problem, tau, "g2"))


def average_roots(p_cr, gamma, t_block):
    """Roots ``tau_l < tau_u`` of ``gamma tau (T - tau) = T P``, or ``None``.

    ``None`` is returned when ``P/gamma >= T/4`` (no strict interval, the
    double root included).
    """
    if p_cr <= 0 or gamma <= 0 or t_block <= 0:
        raise InvalidInputError("inputs must be positive")
    disc = (gamma * t_block) ** 2 - 4.0 * gamma * t_block * p_cr
    if disc <= 0:
        return None
    # gamma tau^2 - gamma T tau + T P = 0, stable form avoids cancellation in tau_l
    q = 0.5 * (gamma * t_block + np.sqrt(disc))
    return t_block * p_cr / q, q / gamma


def _round_tau(problem, tau):
    sym = int(np.floor(tau + 0.5))
    return int(min(max(sym, int(np.ceil(problem.tau_min))), int(np.ceil(problem.t_block)) - 1))


def _solution(problem, tau, value, branch, tau_2):
    alloc = problem.curve.solve(float(power_limit(problem, tau))).allocation
    return TradeoffSolution(
        tau_star=float(tau),
        tau_star_symbols=_round_tau(problem, tau),
        value=float(value),
        branch=branch,
        allocation=alloc,
        tau_2_star=float(tau_2),
    )


def solve_peak(problem):
    """Optimal learning time under a peak power constraint.

    ``tau_2*`` wins if it lies left of the corner ``P/gamma``; otherwise the
    corner (clamped up to ``tau_min``) is optimal since ``g1`` decreases.
    When ``P/gamma >= T`` the interference allowance always binds.
    """
    tau_2, v_2 = maximize_g2(problem)
    corner = problem.p_cr / problem.gamma
    if corner >= problem.t_block:
        return _solution(problem, tau_2, v_2, "always_g2", tau_2)
    if tau_2 < corner:
        return _solution(problem, tau_2, v_2, "interior_g2", tau_2)
    tau = max(corner, float(problem.tau_min))
    return _solution(problem, tau, eval_g(problem, tau, "g1"), "corner_p_over_gamma", tau_2)


def solve_average(problem):
    """Optimal learning time under an average power constraint.

    Between the roots ``tau_l < tau_u`` the power budget binds and the
    decreasing ``g3`` applies, so the best point there is ``tau_l``.
    """
    tau_2, v_2 = maximize_g2(problem)
    roots = average_roots(problem.p_cr, problem.gamma, problem.t_block)
    if roots is None or problem.tau_min >= roots[1]:
        return _solution(problem, tau_2, v_2, "always_g2", tau_2)
    tau_l = roots[0]
    if tau_2 < tau_l:
        return _solution(problem, tau_2, v_2, "interior_g2", tau_2)
    tau = max(tau_l, float(problem.tau_min))
    return _solution(problem, tau, eval_g(problem, tau, "g3"), "corner_tau_l", tau_2)


def solve(problem):
    return solve_peak(problem) if problem.constraint_mode == "peak" else solve_average(problem)
