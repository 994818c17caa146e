"""Seeded Monte-Carlo experiments wiring the whole learning/beamforming chain.

Each experiment runs ``trials`` independent channel realizations. Trial
``i`` draws its random numbers from ``SeedSequence(seed, spawn_key=(i, ...))``,
so results do not depend on execution order or worker count. Per-trial
outputs are reduced in trial-index order.
"""
import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .airlink import generate_tdd_schedule, observe_pr_signals, true_signal_covariance
from .beamforming import design_cb, psvd_capacity
from .errors import ConfigError, InvalidInputError
from .estimation import estimate, estimate_oracle, sample_covariance
from .interference import leakage_metrics
from .scenario import SystemConfig, design_pr_link, draw_channels
from .tradeoff import CONSTRAINT_MODES, TradeoffProblem, objective, solve

ESTIMATORS = ("known_noise", "unknown_noise", "oracle")

# Two-user CR link against a 2x2 beamforming-mode PR link.
CAPACITY_CONFIG = SystemConfig(m_t=5, m_r=3, m_1=2, m_2=2, d_1=1, d_2=1)
# Single-antenna PR terminals, unequal activity, 15 dB PR SNR.
INTERFERENCE_CONFIG = SystemConfig(
    m_t=4, m_r=2, m_1=1, m_2=1, d_1=1, d_2=1,
    alpha_1=0.3, alpha_2=0.6, p_1=10**1.5, p_2=10**1.5, p_cr=100.0,
)
TRADEOFF_CONFIG = SystemConfig()


@dataclass(frozen=True)
class _Experiment:
    config: SystemConfig
    sweep_name: str
    sweep_values: tuple
    trials: int
    estimator: str
    gammas: tuple = ()


EXPERIMENTS = {
    "fig2_capacity": _Experiment(
        CAPACITY_CONFIG, "cr_snr_db", tuple(range(0, 55, 5)), 500, "oracle"
    ),
    "fig4_interference": _Experiment(
        INTERFERENCE_CONFIG, "n", (200, 400, 600, 800, 1000), 2000, "known_noise"
    ),
    "fig5_throughput_vs_tau": _Experiment(
        TRADEOFF_CONFIG, "tau", tuple(range(10, 1000, 10)), 500, "known_noise", (0.2, 0.6)
    ),
    "fig6_max_throughput": _Experiment(
        TRADEOFF_CONFIG, "cr_snr_db", tuple(range(-10, 55, 5)), 500, "oracle", (0.2, 0.6, 1.0)
    ),
    "fig7_opt_tau": _Experiment(
        TRADEOFF_CONFIG, "cr_snr_db", tuple(range(-10, 55, 5)), 500, "oracle", (0.2, 0.6, 1.0)
    ),
}

DESCRIPTIONS = {
    "fig2_capacity": "CR capacity vs CR SNR: EIC null-space scheme against the P-SVD baseline",
    "fig4_interference": "effective leakage interference at both PRs vs learning samples, with bounds",
    "fig5_throughput_vs_tau": "CR throughput vs learning time, true and estimated null space",
    "fig6_max_throughput": "maximum CR throughput vs CR SNR for several gamma",
    "fig7_opt_tau": "optimal learning time vs CR SNR for several gamma",
}


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully specified experiment run.

    ``assume_true_rank`` splits the estimated eigenvectors at the true
    ``d_eff`` instead of the estimated rank. This isolates subspace error
    from rank detection errors.
    """

    name: str
    config: SystemConfig
    sweep_name: str
    sweep_values: tuple
    trials: int
    seed: int = 0
    estimator: str = "known_noise"
    gammas: tuple = ()
    constraint_mode: str = "peak"
    assume_true_rank: bool = True

    def validate(self):
        if self.name not in EXPERIMENTS:
            raise InvalidInputError(f"unknown experiment {self.name!r}")
        self.config.validate()
        if self.trials < 1:
            raise ConfigError("trials must be at least 1", key="trials")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative", key="seed")
        values = np.asarray(self.sweep_values, dtype=float)
        if values.size == 0 or np.any(np.diff(values) <= 0) or not np.all(np.isfinite(values)):
            raise ConfigError("sweep values must be finite and strictly increasing", key="sweep")
        if self.sweep_name in ("n", "tau"):
            if np.any(values != np.round(values)) or values[0] < 1:
                raise ConfigError(f"{self.sweep_name} sweep needs positive integers", key="sweep")
            if self.sweep_name == "tau" and values[-1] >= self.config.t_block:
                raise ConfigError("tau sweep must stay below t_block", key="sweep")
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"estimator must be one of {ESTIMATORS}", key="estimator")
        if self.constraint_mode not in CONSTRAINT_MODES:
            raise ConfigError(f"constraint_mode must be one of {CONSTRAINT_MODES}", key="constraint_mode")
        if any(g <= 0 for g in self.gammas):
            raise ConfigError("gamma values must be positive", key="gammas")
        if EXPERIMENTS[self.name].gammas and not self.gammas:
            raise ConfigError("this experiment needs at least one gamma", key="gammas")
        return self


def default_spec(name, **overrides):
    """ExperimentSpec with the experiment's default config, sweep, trial count and estimator."""
    if name not in EXPERIMENTS:
        raise InvalidInputError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    exp = EXPERIMENTS[name]
    spec = ExperimentSpec(
        name=name,
        config=exp.config,
        sweep_name=exp.sweep_name,
        sweep_values=exp.sweep_values,
        trials=exp.trials,
        estimator=exp.estimator,
        gammas=exp.gammas,
    )
    return replace(spec, **overrides)


@dataclass
class ResultTable:
    """Named columns, one row per sweep value, plus a metadata echo."""

    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name):
        idx = self.columns.index(name)
        return np.array([row[idx] for row in self.rows], dtype=float)

    def to_csv(self):
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}: {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def trial_rng(seed, trial, *stream):
    """Independent generator for ``(seed, trial, *stream)``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, *stream)))


def average_trials(samples):
    """Mean over the trial axis (axis 0), exactly rounded so trial order is irrelevant."""
    arr = np.asarray(samples, dtype=float)
    flat = arr.reshape(arr.shape[0], -1)
    out = np.array([math.fsum(flat[:, i]) / arr.shape[0] for i in range(flat.shape[1])])
    return out.reshape(arr.shape[1:])


def _draw_scenario(spec, trial):
    cfg = spec.config
    rng = trial_rng(spec.seed, trial, 0)
    channels = draw_channels(cfg, rng)
    design = design_pr_link(cfg, channels.f)
    q_s = true_signal_covariance(channels, design, cfg.alpha_1, cfg.alpha_2)
    truth = estimate_oracle(q_s, cfg.rho_0)
    return channels, design, truth


def _learn(spec, trial, stream, n, channels, design, truth):
    """Null-space estimate from ``n`` fresh observations (or the truth for the oracle)."""
    cfg = spec.config
    if spec.estimator == "oracle":
        return truth
    rng = trial_rng(spec.seed, trial, 1, stream)
    schedule = generate_tdd_schedule(n, cfg.alpha_1, cfg.alpha_2, rng=rng)
    batch = observe_pr_signals(channels, design, schedule, cfg.rho_0, rng)
    rank = truth.d_eff_hat if spec.assume_true_rank else None
    return estimate(spec.estimator, sample_covariance(batch), cfg.rho_0, n, rank=rank)


def _power(cfg, snr_db):
    return cfg.rho_1 * 10.0 ** (snr_db / 10.0)


def _trial_capacity(spec, trial):
    cfg = spec.config
    channels, design, truth = _draw_scenario(spec, trial)
    est = _learn(spec, trial, 0, cfg.t_block, channels, design, truth)
    out = []
    for snr_db in spec.sweep_values:
        p = _power(cfg, snr_db)
        out.append([
            design_cb(est.u_hat, channels.h, p, cfg.rho_1).rate,
            psvd_capacity(channels.h, channels.g1, channels.g2, p, cfg.rho_1),
        ])
    return out


def _trial_interference(spec, trial):
    cfg = spec.config
    channels, design, truth = _draw_scenario(spec, trial)
    out = []
    for idx, n in enumerate(spec.sweep_values):
        est = _learn(spec, trial, idx, int(n), channels, design, truth)
        cb = design_cb(est.u_hat, channels.h, cfg.p_cr, cfg.rho_1)
        rep = leakage_metrics(design, channels, cb, cfg.rho_0, (cfg.alpha_1, cfg.alpha_2), int(n))
        out.append([rep.i_bar_j[0], rep.bound_j[0], rep.i_bar_j[1], rep.bound_j[1]])
    return out


def _trial_throughput_vs_tau(spec, trial):
    cfg = spec.config
    channels, design, truth = _draw_scenario(spec, trial)
    exact = [TradeoffProblem.from_channel(channels.h, truth.u_hat, cfg, g, spec.constraint_mode)
             for g in spec.gammas]
    out = []
    for idx, tau in enumerate(spec.sweep_values):
        est = _learn(spec, trial, idx, int(tau), channels, design, truth)
        row = []
        for gamma, prob in zip(spec.gammas, exact):
            learned = TradeoffProblem.from_channel(channels.h, est.u_hat, cfg, gamma, spec.constraint_mode)
            row += [objective(prob, tau), objective(learned, tau)]
        out.append(row)
    return out


def _trial_optimum(spec, trial, what):
    cfg = spec.config
    channels, _, truth = _draw_scenario(spec, trial)
    base = [TradeoffProblem.from_channel(channels.h, truth.u_hat, cfg, g, spec.constraint_mode)
            for g in spec.gammas]
    out = []
    for snr_db in spec.sweep_values:
        p = _power(cfg, snr_db)
        out.append([getattr(solve(prob.with_power(p)), what) for prob in base])
    return out


def _run_trial(spec, trial):
    if spec.name == "fig2_capacity":
        return _trial_capacity(spec, trial)
    if spec.name == "fig4_interference":
        return _trial_interference(spec, trial)
    if spec.name == "fig5_throughput_vs_tau":
        return _trial_throughput_vs_tau(spec, trial)
    if spec.name == "fig6_max_throughput":
        return _trial_optimum(spec, trial, "value")
    if spec.name == "fig7_opt_tau":
        return _trial_optimum(spec, trial, "tau_star")
    raise InvalidInputError(f"unknown experiment {spec.name!r}")


def run_trials(spec, workers=1):
    """Per-trial outputs stacked as ``(trials, sweep, series)``, in trial order."""
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_trial, [spec] * spec.trials, range(spec.trials)))
    else:
        results = [_run_trial(spec, t) for t in range(spec.trials)]
    return np.asarray(results, dtype=float)


def _columns(spec):
    if spec.name == "fig2_capacity":
        return ["proposed", "psvd"]
    if spec.name == "fig4_interference":
        return [
            "median_ibar_1", "median_bound_1", "median_ibar_2", "median_bound_2",
            "inv_median_ibar_1", "inv_median_bound_1", "inv_median_ibar_2", "inv_median_bound_2",
            "frac_below_bound_1", "frac_below_bound_2",
        ]
    if spec.name == "fig5_throughput_vs_tau":
        cols = []
        for g in spec.gammas:
            cols += [f"theoretical_gamma_{g:g}", f"numerical_gamma_{g:g}"]
        return cols
    prefix = "max_throughput" if spec.name == "fig6_max_throughput" else "opt_tau"
    return [f"{prefix}_gamma_{g:g}" for g in spec.gammas]


def _reduce(spec, samples):
    if spec.name != "fig4_interference":
        return average_trials(samples)
    med = np.median(samples, axis=0)
    below = average_trials(samples[:, :, [0, 2]] <= samples[:, :, [1, 3]])
    return np.hstack([med, 1.0 / med, below])


def metadata(spec):
    meta = {
        "artifact": f"cogbeam {__version__}",
        "experiment": spec.name,
        "seed": spec.seed,
        "trials": spec.trials,
        "estimator": spec.estimator,
        "assume_true_rank": spec.assume_true_rank,
        "constraint_mode": spec.constraint_mode,
        "sweep": spec.sweep_name,
    }
    if spec.gammas:
        meta["gammas"] = " ".join(f"{g:g}" for g in spec.gammas)
    for key, value in spec.config.as_items():
        meta[f"config.{key}"] = value
    return meta


def run_experiment(spec, workers=1):
    """Run ``spec`` and aggregate its trials into a :class:`ResultTable`.

    Means are used throughout, except the interference experiment. That one
    reports medians, their reciprocals and the fraction of trials at or below
    the bound.
    """
    spec.validate()
    agg = _reduce(spec, run_trials(spec, workers))
    rows = [[v] + list(agg[i]) for i, v in enumerate(spec.sweep_values)]
    table = ResultTable(columns=["sweep_value"] + _columns(spec), rows=rows, metadata=metadata(spec))
    if not np.all(np.isfinite(agg)):
        raise ArithmeticError(f"{spec.name}: non-finite aggregate")
    return table
