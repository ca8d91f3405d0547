import math

import numpy as np
import pytest

from cvqpv.channel import ChallengeDraw, ChannelParams, honest_response, sample_challenge


class TestFeasibility:
    def test_ideal_channel(self):
        assert ChannelParams(1.0, 0.0).feasible()

    def test_half_transmission(self):
        assert not ChannelParams(0.5, 0.0).feasible()

    def test_reference_point(self):
        assert ChannelParams(0.8, 0.05).feasible()

    def test_monotone(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            t = rng.uniform(0.0, 1.0)
            u = rng.uniform(0.0, 0.4)
            ch = ChannelParams(t, u)
            if ch.feasible():
                assert ChannelParams(min(1.0, t + 0.1), u).feasible()
            else:
                assert not ChannelParams(t, u + 0.1).feasible()

    def test_validation(self):
        with pytest.raises(ValueError):
            ChannelParams(1.2, 0.0)
        with pytest.raises(ValueError):
            ChannelParams(0.5, -0.1)

    def test_regime_flags(self):
        assert "generic-attack-regime" in ChannelParams(0.4, 0.0).regime_flags()
        assert "channel-infeasible" in ChannelParams(0.6, 0.3).regime_flags()
        assert ChannelParams(1.0, 0.0).regime_flags() == set()


class TestSampleChallenge:
    def test_theta_zero_algebra(self):
        rng = np.random.default_rng(0)
        draw = sample_challenge(2.0, lambda x, y: 0, 3, 5, rng)
        assert draw.theta == 0.0
        assert draw.x0 == pytest.approx(draw.r)
        assert draw.p0 == pytest.approx(-draw.r_perp)

    def test_theta_pi_half_algebra(self):
        rng = np.random.default_rng(1)
        draw = sample_challenge(2.0, lambda x, y: 1, 3, 5, rng)
        assert draw.theta == pytest.approx(math.pi / 2.0)
        assert draw.x0 == pytest.approx(draw.r_perp)
        assert draw.p0 == pytest.approx(draw.r)

    def test_rotation_preserves_norm(self):
        rng = np.random.default_rng(2)
        for bit in (0, 1):
            for _ in range(50):
                d = sample_challenge(3.0, lambda x, y, b=bit: b, 0, 0, rng)
                assert d.x0**2 + d.p0**2 == pytest.approx(d.r**2 + d.r_perp**2, rel=1e-12)

    def test_empirical_variance(self):
        rng = np.random.default_rng(3)
        rs = np.array([sample_challenge(2.0, lambda x, y: 0, 0, 0, rng).r for _ in range(10**4)])
        assert rs.var() == pytest.approx(4.0, abs=0.25)

    def test_invalid_sigma(self):
        with pytest.raises(ValueError):
            sample_challenge(0.0, lambda x, y: 0, 0, 0, np.random.default_rng(0))


class TestHonestResponse:
    def test_deterministic_limit(self):
        draw = ChallengeDraw(r=1.7, r_perp=-0.3, theta=0.0, x=0, y=0)
        ch = ChannelParams(1.0, 0.0)
        rng = np.random.default_rng(0)
        assert honest_response(draw, ch, rng, variance_override=0.0) == pytest.approx(1.7)

    def test_conditional_moments(self):
        # r' ~ N(sqrt(t) r, 1/2 + u): moment test at 3 sigma
        ch = ChannelParams(0.8, 0.05)
        rng = np.random.default_rng(4)
        draw = ChallengeDraw(r=2.5, r_perp=0.0, theta=0.0, x=0, y=0)
        n = 10**5
        out = np.array([honest_response(draw, ch, rng) for _ in range(n)])
        var = 0.5 + ch.u
        se_mean = math.sqrt(var / n)
        assert out.mean() == pytest.approx(math.sqrt(0.8) * 2.5, abs=3 * se_mean)
        se_var = var * math.sqrt(2.0 / n)
        assert out.var() == pytest.approx(var, abs=3 * se_var)

    def test_mean_attenuation(self):
        # fixed r = 5, t = 0.64: mean of r'/r -> 0.8 within 1%
        ch = ChannelParams(0.64, 0.0)
        rng = np.random.default_rng(5)
        draw = ChallengeDraw(r=5.0, r_perp=0.0, theta=0.0, x=0, y=0)
        out = np.array([honest_response(draw, ch, rng) for _ in range(10**5)])
        assert (out / 5.0).mean() == pytest.approx(0.8, abs=0.008)
