import math

import numpy as np
import pytest

from laserentropy.dynamics import (
    CoherenceDecay,
    Regime,
    bec_model,
    below_threshold_field_rate,
    below_threshold_mean_rate,
    coherence_decay_factor,
    constant_rate_model,
    evolve,
    evolve_diagonal,
    laser_model,
    linewidth,
    mean_field_envelope,
    phase_diffusion,
    sampled_spectrum_fwhm,
    schawlow_townes_fwhm,
    steady_state,
    table_model,
)
from laserentropy.errors import InstabilityError, NonNormalizableError
from laserentropy.fock import (
    BecParams,
    LaserParams,
    bec_ground_distribution,
    laser_exact_distribution,
    moments,
    point_mass,
    thermal_distribution,
    total_variation,
)


class TestModel:
    def test_rates_at_the_edges(self):
        m = constant_rate_model(2.0, 3.0, 4)
        assert m.up_rates().tolist() == [2.0, 4.0, 6.0, 8.0, 0.0]
        assert m.down_rates().tolist() == [0.0, 3.0, 6.0, 9.0, 12.0]
        assert m.max_escape_rate() == 17.0
        assert m.stable_dt() == pytest.approx(1 / 18.7)

    def test_generator_conserves(self):
        m = laser_model(LaserParams.from_ratio(2.0, 20.0))
        rng = np.random.default_rng(1)
        p = rng.random(m.n_max + 1)
        assert abs(m.generator()(p).sum()) < 1e-10 * m.max_escape_rate()

    def test_rejects_negative_rates(self):
        with pytest.raises(ValueError):
            constant_rate_model(-1.0, 1.0, 3)

    def test_bec_rates(self):
        m = bec_model(BecParams(10, 0.5, kappa_wall=2.0))
        up = m.up_rates()
        # κ(N − n0)(n0 + 1) out of n0
        assert up[0] == pytest.approx(2.0 * 10 * 1)
        assert up[3] == pytest.approx(2.0 * 7 * 4)
        assert up[10] == 0.0
        assert m.down_rates()[4] == pytest.approx(2.0 * 1.25 * 4)


class TestSteadyState:
    def test_laser_matches_exact(self):
        p = LaserParams.from_ratio(1.7, 60.0)
        m = laser_model(p)
        assert total_variation(steady_state(m), laser_exact_distribution(p)) < 1e-12

    def test_bec_matches_closed_form(self):
        b = BecParams(300, 0.4)
        d = steady_state(bec_model(b))
        assert np.max(np.abs(d.probs - bec_ground_distribution(b).probs)) < 1e-8

    def test_constant_gain_is_thermal(self):
        m = constant_rate_model(1.0, 2.0, 200)
        d = steady_state(m)
        assert total_variation(d, thermal_distribution(1.0)) < 1e-12

    def test_is_fixed_point(self):
        m = laser_model(LaserParams.from_ratio(2.5, 30.0))
        ss = steady_state(m)
        after = evolve(m, ss, m.stable_dt(), dt=m.stable_dt()).final
        assert total_variation(ss, after) < 1e-10

    def test_non_normalizable(self):
        m = table_model([0.0, 2.0, 2.0, 2.0], [1.0, 1.0, 1.0, 1.0])
        with pytest.raises(NonNormalizableError):
            steady_state(m)

    def test_table_with_decaying_tail(self):
        m = table_model([0.0, 2.0, 2.0, 0.5], [1.0, 1.0, 1.0, 1.0])
        ss = steady_state(m)
        assert ss.probs == pytest.approx(np.array([1, 2, 4, 2]) / 9)

    def test_needs_loss(self):
        with pytest.raises(ValueError):
            steady_state(constant_rate_model(1.0, 0.0, 5))


class TestEvolve:
    def test_pure_loss_mean(self):
        m = constant_rate_model(0.0, 1.0, 5)
        d = evolve_diagonal(m, point_mass(5), 1.0)
        assert moments(d).mean == pytest.approx(5 * math.exp(-1.0), abs=1e-4)

    def test_pure_loss_is_binomial(self):
        m = constant_rate_model(0.0, 1.0, 5)
        d = evolve_diagonal(m, point_mass(5), 1.0, dt=1e-3)
        q = math.exp(-1.0)
        expected = [math.comb(5, k) * q**k * (1 - q) ** (5 - k) for k in range(6)]
        assert np.allclose(d.probs, expected, atol=1e-10)

    def test_laser_relaxes(self):
        p = LaserParams.from_ratio(2.0, 20.0)
        m = laser_model(p)
        d = evolve_diagonal(m, point_mass(0, m.n_max), 60.0, method="power")
        assert total_variation(d, laser_exact_distribution(p)) < 1e-6

    def test_distance_shrinks(self):
        p = LaserParams.from_ratio(1.5, 20.0)
        m = laser_model(p)
        ss = steady_state(m)
        run = evolve(m, point_mass(0, m.n_max), 20.0, sample_every=50)
        tv = [total_variation(ss, np.clip(s.probs, 0, None)) for s in run.samples]
        assert all(b <= a + 1e-12 for a, b in zip(tv, tv[1:]))
        assert tv[-1] < tv[0]

    def test_bec_mean(self):
        b = BecParams(200, 0.3)
        d = evolve_diagonal(bec_model(b), point_mass(0, 200), 0.5)
        assert moments(d).mean == pytest.approx(200 * (1 - 0.3**3), rel=0.01)

    def test_power_equals_step(self):
        m = laser_model(LaserParams.from_ratio(0.6, 5.0))
        start = point_mass(3, m.n_max)
        a = evolve(m, start, 7.3, sample_every=17)
        b = evolve(m, start, 7.3, sample_every=17, method="power")
        assert a.steps == b.steps and len(a.samples) == len(b.samples)
        assert np.allclose(a.final.probs, b.final.probs, atol=1e-12)
        for sa, sb in zip(a.samples, b.samples):
            assert sa.t == pytest.approx(sb.t)

    def test_dt_too_large(self):
        m = constant_rate_model(1.0, 1.0, 50)
        with pytest.raises(InstabilityError) as exc:
            evolve(m, point_mass(0, 50), 1.0, dt=1.0)
        assert exc.value.suggested_dt == pytest.approx(m.stable_dt())
        assert "dt <=" in str(exc.value)

    def test_zero_time(self):
        m = constant_rate_model(1.0, 1.0, 5)
        run = evolve(m, point_mass(2, 5), 0.0)
        assert run.steps == 0 and run.final.probs[2] == 1.0

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            evolve(constant_rate_model(1.0, 1.0, 5), point_mass(0), 1.0, method="euler")

    def test_initial_above_top(self):
        with pytest.raises(ValueError):
            evolve(constant_rate_model(1.0, 1.0, 5), point_mass(9), 1.0)


class TestCoherence:
    def test_decay_factor(self):
        c = CoherenceDecay(eta=3, d_coefficient=0.01)
        assert c.rate == pytest.approx(0.09)
        assert coherence_decay_factor(c, 10.0) == pytest.approx(math.exp(-0.9))
        assert coherence_decay_factor(CoherenceDecay(0, 5.0), 100.0) == 1.0

    def test_phase_diffusion(self):
        p = LaserParams(alpha=2.0, beta=2e-4, gamma=1.0)
        assert phase_diffusion(p) == pytest.approx(2.0 / (4 * 1e4))
        with pytest.raises(ValueError):
            phase_diffusion(LaserParams(0.5, 1e-3, 1.0))

    def test_envelope(self):
        p = LaserParams(alpha=2.0, beta=2e-4, gamma=1.0)
        env = mean_field_envelope(p, 3.0, 1e4, frequency=2.0)
        assert env.ratio == pytest.approx(math.exp(-0.5))
        assert env.amplitude == pytest.approx(3.0 * math.exp(-0.5))
        assert env.phase == 2e4


class TestLinewidth:
    def test_above(self):
        p = LaserParams(alpha=2.0, beta=2e-4, gamma=1.0)
        s = linewidth(p)
        assert s.regime is Regime.ABOVE
        assert s.fwhm == pytest.approx(1e-4)
        assert s.fwhm == pytest.approx(2 * phase_diffusion(p))

    def test_below_equals_gap(self):
        p = LaserParams(alpha=0.75, beta=1e-6, gamma=1.0)
        s = linewidth(p)
        assert s.regime is Regime.BELOW
        assert s.fwhm == pytest.approx(0.25, rel=1e-12)

    def test_factor_two(self):
        for n in (1.0, 10.0, 1e6):
            ratio = schawlow_townes_fwhm(1.3, n, "below_threshold") / schawlow_townes_fwhm(1.3, n, "above_threshold")
            assert abs(ratio - 2.0) < 1e-12

    def test_threshold_rejected(self):
        with pytest.raises(ValueError):
            linewidth(LaserParams(1.0, 1e-3, 1.0))

    def test_wrong_regime(self):
        with pytest.raises(ValueError):
            linewidth(LaserParams(2.0, 1e-3, 1.0), Regime.BELOW)

    def test_sampled_spectrum(self):
        nu = 1.0
        D = 1e-3 * nu
        assert sampled_spectrum_fwhm(D, nu) == pytest.approx(2 * D, rel=0.01)


class TestBelowThreshold:
    def test_mean_rate_vanishes_at_fixed_point(self):
        p = LaserParams(alpha=0.4, beta=1e-6, gamma=1.0)
        n_bar = p.below_threshold_n_bar()
        assert below_threshold_mean_rate(p, n_bar) == pytest.approx(0.0, abs=1e-14)
        assert below_threshold_mean_rate(p, 0.0) == 0.4

    def test_field_rate_identity(self):
        r = below_threshold_field_rate(LaserParams(alpha=0.4, beta=1e-6, gamma=1.0))
        assert r.rate == pytest.approx(-0.3)
        assert r.via_occupation == pytest.approx(r.rate, abs=1e-12)

    def test_field_rate_above_rejected(self):
        with pytest.raises(ValueError):
            below_threshold_field_rate(LaserParams(2.0, 1e-3, 1.0))
