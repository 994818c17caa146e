"""Scenario construction: system parameters, Rayleigh channel draws and PR link designs."""
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidInputError
from .numerics import numerical_rank

PR_MODES = ("eigenmode", "spatial_mux")


@dataclass(frozen=True)
class SystemConfig:
    """Antenna counts, PR activity, powers, noise levels and block timing.

    Powers and noise levels are linear. ``t_block`` and ``tau_min`` are in
    symbol periods. Defaults are the six-antenna eigenmode setup with a
    20 dB PR SNR.
    """

    m_t: int = 6
    m_r: int = 3
    m_1: int = 4
    m_2: int = 2
    d_1: int = 2
    d_2: int = 2
    alpha_1: float = 0.5
    alpha_2: float = 0.5
    p_1: float = 100.0
    p_2: float = 100.0
    p_cr: float = 100.0
    rho_0: float = 1.0
    rho_1: float = 1.0
    t_block: int = 1000
    tau_min: int = 10
    pr_mode: str = "eigenmode"

    def validate(self):
        """Raise :class:`ConfigError` naming the first violated invariant."""
        for name in ("m_t", "m_r", "m_1", "m_2", "d_1", "d_2", "t_block", "tau_min"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise ConfigError(f"{name} must be an integer", key=name)
        if self.m_t <= 1:
            raise ConfigError("m_t must exceed 1", key="m_t")
        for name in ("m_r", "m_1", "m_2"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1", key=name)
        for j in (1, 2):
            d, m = getattr(self, f"d_{j}"), getattr(self, f"m_{j}")
            if not 1 <= d <= m:
                raise ConfigError(f"d_{j} must lie in [1, m_{j}]", key=f"d_{j}")
        for name in ("alpha_1", "alpha_2"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]", key=name)
        if self.alpha_1 + self.alpha_2 > 1.0 + 1e-12:
            raise ConfigError("alpha_1 + alpha_2 must not exceed 1", key="alpha_2")
        for name in ("p_1", "p_2", "p_cr", "rho_0", "rho_1"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be positive", key=name)
        if not 1 <= self.tau_min < self.t_block:
            raise ConfigError("tau_min must satisfy 1 <= tau_min < t_block", key="tau_min")
        if self.pr_mode not in PR_MODES:
            raise ConfigError(f"pr_mode must be one of {PR_MODES}", key="pr_mode")
        if self.pr_mode == "eigenmode":
            limit = min(self.m_1, self.m_2)
            for j in (1, 2):
                if getattr(self, f"d_{j}") > limit:
                    raise ConfigError(
                        f"eigenmode transmission needs d_{j} <= min(m_1, m_2) = {limit}",
                        key=f"d_{j}",
                    )
        else:
            for j in (1, 2):
                if getattr(self, f"d_{j}") != getattr(self, f"m_{j}"):
                    raise ConfigError(
                        f"spatial multiplexing uses every antenna: d_{j} must equal m_{j}",
                        key=f"d_{j}",
                    )
        return self

    def replace(self, **changes):
        values = asdict(self)
        unknown = set(changes) - set(values)
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}", key=sorted(unknown)[0])
        values.update(changes)
        return SystemConfig(**values)

    def as_items(self):
        """``(key, value)`` pairs in declaration order."""
        return [(f.name, getattr(self, f.name)) for f in fields(self)]

    @classmethod
    def from_text(cls, text):
        """Parse flat ``key = value`` lines; ``#`` starts a comment.

        Keys not present in the file keep their defaults. Unknown or
        repeated keys and malformed values raise :class:`ConfigError`.
        """
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}", key=key)
            if key in values:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}", key=key)
            kind = types[key]
            try:
                if kind in (int, "int"):
                    values[key] = int(value)
                elif kind in (float, "float"):
                    values[key] = float(value)
                else:
                    values[key] = value
            except ValueError:
                raise ConfigError(f"line {lineno}: bad value {value!r} for {key}", key=key) from None
        return cls(**values).validate()

    @classmethod
    def from_file(cls, path):
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
        return cls.from_text(text)

    def to_text(self):
        return "".join(f"{k} = {v}\n" for k, v in self.as_items())


@dataclass(frozen=True)
class ChannelSet:
    """One channel realization.

    ``h`` is CR-Tx to CR-Rx (m_r x m_t), ``g1``/``g2`` are CR-Tx to PR_j
    (m_j x m_t) and ``f`` is PR_1 to PR_2 (m_2 x m_1). The reverse PR channel
    is ``f^H`` and is never stored.
    """

    h: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    f: np.ndarray

    def g(self, j):
        return self.g1 if j == 1 else self.g2


@dataclass(frozen=True)
class PrLinkDesign:
    """PR transmit beamformers ``a_j``, receive beamformers ``b_j`` and covariances ``s_j = a_j a_j^H``.

    Shapes: a1 (m_1 x d_1), a2 (m_2 x d_2), b1 (d_2 x m_1), b2 (d_1 x m_2).
    In spatial multiplexing ``b_j`` is the identity on PR_j's antennas.
    """

    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    mode: str

    def a(self, j):
        return self.a1 if j == 1 else self.a2

    def b(self, j):
        return self.b1 if j == 1 else self.b2

    def s(self, j):
        return self.s1 if j == 1 else self.s2

    @property
    def d1(self):
        return self.a1.shape[1]

    @property
    def d2(self):
        return self.a2.shape[1]

    @property
    def beamforming_mode(self):
        """True for single-stream eigenmode transmission in both directions."""
        return self.mode == "eigenmode" and self.d1 == 1 and self.d2 == 1


def sample_cscg_matrix(rows, cols, rng):
    """``rows x cols`` matrix of i.i.d. CN(0, 1) entries."""
    if rows < 1 or cols < 1:
        raise InvalidInputError("rows and cols must be at least 1")
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) / np.sqrt(2.0)


def draw_channels(cfg, rng):
    """Draw H, G_1, G_2, F in that fixed order from ``rng``."""
    h = sample_cscg_matrix(cfg.m_r, cfg.m_t, rng)
    g1 = sample_cscg_matrix(cfg.m_1, cfg.m_t, rng)
    g2 = sample_cscg_matrix(cfg.m_2, cfg.m_t, rng)
    f = sample_cscg_matrix(cfg.m_2, cfg.m_1, rng)
    return ChannelSet(h=h, g1=g1, g2=g2, f=f)


def _split(power_split, j, d, p):
    if power_split is None:
        return np.full(d, p / d)
    lam = np.asarray(power_split[j - 1], dtype=float)
    if lam.shape != (d,) or np.any(lam <= 0):
        raise ConfigError(f"power split for PR_{j} needs {d} positive entries", key=f"p_{j}")
    if not np.isclose(lam.sum(), p, rtol=1e-9, atol=0.0):
        raise ConfigError(f"power split for PR_{j} must sum to p_{j} = {p}", key=f"p_{j}")
    return lam


def design_pr_link(cfg, f, mode=None, power_split=None):
    """Build the PR beamformers for spatial multiplexing or eigenmode transmission.

    Args:
        cfg: system configuration (antenna and stream counts, PR powers).
        f: forward PR channel, ``m_2 x m_1``.
        mode: ``"spatial_mux"`` or ``"eigenmode"``; defaults to ``cfg.pr_mode``.
        power_split: optional pair of per-stream power vectors
            ``(lam_1, lam_2)`` for eigenmode; each must sum to ``p_j``.
            Equal split across the strongest singular directions by default.

    Raises:
        ConfigError: eigenmode with ``d_j > min(m_1, m_2)``, or spatial
            multiplexing with ``d_j != m_j``.
    """
    mode = cfg.pr_mode if mode is None else mode
    f = np.asarray(f, dtype=complex)
    if f.shape != (cfg.m_2, cfg.m_1):
        raise InvalidInputError(f"f must be {cfg.m_2}x{cfg.m_1}, got {f.shape}")
    if mode == "spatial_mux":
        for j in (1, 2):
            if getattr(cfg, f"d_{j}") != getattr(cfg, f"m_{j}"):
                raise ConfigError(f"spatial multiplexing needs d_{j} = m_{j}", key=f"d_{j}")
        a1 = np.sqrt(cfg.p_1 / cfg.m_1) * np.eye(cfg.m_1, dtype=complex)
        a2 = np.sqrt(cfg.p_2 / cfg.m_2) * np.eye(cfg.m_2, dtype=complex)
        b1 = np.eye(cfg.m_1, dtype=complex)
        b2 = np.eye(cfg.m_2, dtype=complex)
    elif mode == "eigenmode":
        limit = min(cfg.m_1, cfg.m_2)
        for j in (1, 2):
            if getattr(cfg, f"d_{j}") > limit:
                raise ConfigError(f"eigenmode needs d_{j} <= min(m_1, m_2) = {limit}", key=f"d_{j}")
        u_f, _, vh_f = np.linalg.svd(f)
        v_f = vh_f.conj().T
        lam1 = _split(power_split, 1, cfg.d_1, cfg.p_1)
        lam2 = _split(power_split, 2, cfg.d_2, cfg.p_2)
        a1 = v_f[:, : cfg.d_1] * np.sqrt(lam1)
        b1 = v_f[:, : cfg.d_2].conj().T
        a2 = u_f[:, : cfg.d_2] * np.sqrt(lam2)
        b2 = u_f[:, : cfg.d_1].conj().T
    else:
        raise ConfigError(f"unknown PR mode {mode!r}", key="pr_mode")
    return PrLinkDesign(
        a1=a1, a2=a2, b1=b1, b2=b2,
        s1=a1 @ a1.conj().T, s2=a2 @ a2.conj().T,
        mode=mode,
    )


def check_subsume_condition(a, b, g, rel_tol=1e-9):
    """True iff the row space of ``a^H g`` contains the row space of ``b g``.

    Equivalently ``a^H g e = 0`` implies ``b g e = 0`` for every ``e``. Each
    block is scaled to unit Frobenius norm before the rank comparison so the
    test does not depend on relative power levels.
    """
    x = np.asarray(a, dtype=complex).conj().T @ np.asarray(g, dtype=complex)
    y = np.asarray(b, dtype=complex) @ np.asarray(g, dtype=complex)
    ny = np.linalg.norm(y)
    if ny == 0.0:
        return True
    nx = np.linalg.norm(x)
    if nx == 0.0:
        return False
    stacked = np.vstack([x / nx, y / ny])
    return numerical_rank(stacked, rel_tol) == numerical_rank(x / nx, rel_tol)
