import numpy as np
import pytest

from cogbeam.errors import ConfigError
from cogbeam.scenario import (
    SystemConfig,
    check_subsume_condition,
    design_pr_link,
    draw_channels,
    sample_cscg_matrix,
)


class TestSystemConfig:
    def test_defaults_validate(self):
        SystemConfig().validate()

    @pytest.mark.parametrize(
        "changes, key",
        [
            ({"m_t": 1}, "m_t"),
            ({"d_1": 5}, "d_1"),
            ({"alpha_1": 0.7, "alpha_2": 0.5}, "alpha_2"),
            ({"p_cr": 0.0}, "p_cr"),
            ({"tau_min": 1000}, "tau_min"),
            ({"pr_mode": "mimo"}, "pr_mode"),
            ({"pr_mode": "spatial_mux"}, "d_1"),
        ],
    )
    def test_invalid_names_key(self, changes, key):
        with pytest.raises(ConfigError) as info:
            SystemConfig().replace(**changes).validate()
        assert info.value.key == key

    def test_text_round_trip(self):
        cfg = SystemConfig(m_t=5, alpha_1=0.3, pr_mode="spatial_mux", d_1=4, d_2=2)
        assert SystemConfig.from_text(cfg.to_text()) == cfg

    def test_comments_and_partial(self):
        cfg = SystemConfig.from_text("# header\nm_t = 7  # more antennas\n\np_cr = 10\n")
        assert cfg.m_t == 7 and cfg.p_cr == 10.0 and cfg.m_r == 3

    @pytest.mark.parametrize("text", ["bogus = 1\n", "m_t = 5\nm_t = 6\n", "m_t = five\n", "m_t 5\n"])
    def test_rejects_bad_text(self, text):
        with pytest.raises(ConfigError):
            SystemConfig.from_text(text)

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError) as info:
            SystemConfig.from_text("bogus = 1\n")
        assert info.value.key == "bogus"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            SystemConfig.from_file(tmp_path / "nope.cfg")


class TestChannels:
    def test_same_seed_identical(self):
        cfg = SystemConfig()
        a = draw_channels(cfg, np.random.default_rng(5))
        b = draw_channels(cfg, np.random.default_rng(5))
        for x, y in zip((a.h, a.g1, a.g2, a.f), (b.h, b.g1, b.g2, b.f)):
            np.testing.assert_array_equal(x, y)

    def test_shapes(self, rng):
        ch = draw_channels(SystemConfig(), rng)
        assert ch.h.shape == (3, 6) and ch.g1.shape == (4, 6) and ch.g2.shape == (2, 6) and ch.f.shape == (2, 4)
        assert ch.g(1) is ch.g1 and ch.g(2) is ch.g2

    def test_cscg_moments(self, rng):
        x = sample_cscg_matrix(100_000, 1, rng)
        assert abs(x.mean()) < 0.02
        assert abs(np.mean(np.abs(x) ** 2) - 1.0) < 0.02
        # circular symmetry: E[x^2] = 0
        assert abs(np.mean(x**2)) < 0.02


class TestDesignPrLink:
    def test_spatial_mux(self, rng):
        cfg = SystemConfig(m_1=2, m_2=2, d_1=2, d_2=2, p_1=4.0, p_2=4.0, pr_mode="spatial_mux")
        d = design_pr_link(cfg, sample_cscg_matrix(2, 2, rng))
        np.testing.assert_allclose(d.s1, 2 * np.eye(2))
        np.testing.assert_allclose(d.a1, np.sqrt(2) * np.eye(2))
        np.testing.assert_allclose(d.b1, np.eye(2))

    def test_eigenmode_beamforming_mode(self, rng):
        cfg = SystemConfig(m_t=5, m_1=2, m_2=2, d_1=1, d_2=1)
        assert design_pr_link(cfg, sample_cscg_matrix(2, 2, rng)).beamforming_mode
        assert not design_pr_link(SystemConfig(), sample_cscg_matrix(2, 4, rng)).beamforming_mode

    def test_eigenmode_too_many_streams(self, rng):
        cfg = SystemConfig(m_1=4, m_2=2, d_1=3, d_2=2)
        with pytest.raises(ConfigError):
            design_pr_link(cfg, sample_cscg_matrix(2, 4, rng))

    def test_power_split(self, rng):
        cfg = SystemConfig()
        d = design_pr_link(cfg, sample_cscg_matrix(2, 4, rng), power_split=([70.0, 30.0], [50.0, 50.0]))
        assert np.real(np.trace(d.s1)) == pytest.approx(100.0)
        with pytest.raises(ConfigError):
            design_pr_link(cfg, sample_cscg_matrix(2, 4, rng), power_split=([70.0, 20.0], [50.0, 50.0]))

    @pytest.mark.parametrize(
        "cfg",
        [
            SystemConfig(),
            SystemConfig(m_t=5, m_1=2, m_2=2, d_1=1, d_2=1),
            SystemConfig(m_1=3, m_2=2, d_1=3, d_2=2, pr_mode="spatial_mux", p_1=7.0),
        ],
    )
    def test_trace_and_rank(self, cfg, rng):
        for _ in range(20):
            d = design_pr_link(cfg, draw_channels(cfg, rng).f)
            for j in (1, 2):
                p = getattr(cfg, f"p_{j}")
                assert np.real(np.trace(d.s(j))) == pytest.approx(p, rel=1e-9)
                assert np.linalg.matrix_rank(d.a(j)) == getattr(cfg, f"d_{j}")


class TestSubsumeCondition:
    def test_spatial_mux_holds(self, rng):
        cfg = SystemConfig(m_1=2, m_2=2, d_1=2, d_2=2, pr_mode="spatial_mux")
        for _ in range(20):
            ch = draw_channels(cfg, rng)
            d = design_pr_link(cfg, ch.f)
            assert check_subsume_condition(d.a1, d.b1, ch.g1)
            assert check_subsume_condition(d.a2, d.b2, ch.g2)

    def test_eigenmode_equal_streams_holds(self, rng):
        cfg = SystemConfig()
        for _ in range(100):
            ch = draw_channels(cfg, rng)
            d = design_pr_link(cfg, ch.f)
            assert check_subsume_condition(d.a1, d.b1, ch.g1)
            assert check_subsume_condition(d.a2, d.b2, ch.g2)

    def test_unequal_streams_fails_for_fewer_tx_streams(self, rng):
        # PR_2 sends one stream but PR_2 receives two: B_2 G_2 has more rows than A_2^H G_2
        cfg = SystemConfig(m_1=2, m_2=2, d_1=2, d_2=1)
        for _ in range(20):
            ch = draw_channels(cfg, rng)
            d = design_pr_link(cfg, ch.f)
            assert check_subsume_condition(d.a1, d.b1, ch.g1)
            assert not check_subsume_condition(d.a2, d.b2, ch.g2)

    def test_zero_b_trivially_holds(self):
        assert check_subsume_condition(np.eye(2)[:, :1], np.zeros((1, 2)), np.eye(2))
