import math

import numpy as np
import pytest

from photocount.moments import accumulate_moments, cumulants_from_moments
from photocount.sampler import (
    AliasingError,
    PulseSpec,
    QuadratureBatch,
    SpecError,
    StateSpec,
    TimeTrace,
    sample_quadratures,
    sample_timetrace,
)

import analytic_oracles as ora

N = 1_000_000


def moments_of(batch):
    return accumulate_moments(batch)


class TestStateSpec:
    def test_vacuum_takes_no_occupation(self):
        with pytest.raises(SpecError):
            StateSpec("vacuum", mean_photons=1.0)

    def test_coherent_requires_occupation(self):
        with pytest.raises(SpecError):
            StateSpec("coherent")
        with pytest.raises(SpecError):
            StateSpec.coherent(-0.1)

    def test_squeezed_requires_r(self):
        with pytest.raises(SpecError):
            StateSpec("squeezed_vacuum")
        with pytest.raises(SpecError):
            StateSpec.squeezed(-0.5)

    def test_squeeze_params_only_on_squeezed(self):
        with pytest.raises(SpecError):
            StateSpec("thermal", mean_photons=1.0, squeeze_r=0.3)

    def test_unknown_kind(self):
        with pytest.raises(SpecError):
            StateSpec("fock")

    def test_added_noise_nonnegative(self):
        with pytest.raises(SpecError):
            StateSpec.vacuum(added_noise=-1.0)

    def test_roundtrip_dict(self):
        spec = StateSpec.squeezed(0.5, 0.2, added_noise=1.5)
        assert StateSpec.from_dict(spec.to_dict()) == spec


class TestQuadratureBatchType:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            QuadratureBatch(np.array([0.0, np.inf]))

    def test_fixed_mode_needs_theta(self):
        with pytest.raises(ValueError):
            QuadratureBatch(np.zeros(4), phase_mode="fixed")


class TestQuadratureMarginals:
    def test_vacuum_variance(self):
        m = moments_of(sample_quadratures(StateSpec.vacuum(), "averaged", N, seed=11))
        se = math.sqrt((m.m4 - m.m2**2) / N)
        assert abs(m.m2 - 0.5) < 5 * se

    def test_thermal_variance_and_kurtosis(self):
        m = moments_of(
            sample_quadratures(StateSpec.thermal(1.0), "averaged", N, seed=12)
        )
        se = math.sqrt((m.m4 - m.m2**2) / N)
        assert abs(m.m2 - 1.5) < 5 * se
        excess = m.m4 / m.m2**2 - 3.0
        assert abs(excess) < 5 * math.sqrt(24.0 / N)

    def test_coherent_fixed_phase_mean(self):
        theta = 0.7
        b = sample_quadratures(StateSpec.coherent(1.0), "fixed", N, seed=13, theta=theta)
        m = moments_of(b)
        se = math.sqrt(m.m2 / N)
        assert abs(m.mean - math.sqrt(2.0) * math.cos(theta)) < 5 * se
        assert abs(m.m2 - 0.5) < 5 * math.sqrt((m.m4 - m.m2**2) / N)

    def test_coherent_averaged_fourth_cumulant(self):
        c = cumulants_from_moments(
            moments_of(sample_quadratures(StateSpec.coherent(1.0), "averaged", N, seed=14))
        )
        # 5 s.e. of the order-4 plug-in estimator at this size is 0.040
        assert abs(c.c4 - (-1.5)) < 0.040
        assert abs(c.c6 - 10.0) < 0.36

    def test_squeezed_averaged_moments(self):
        c = cumulants_from_moments(
            moments_of(sample_quadratures(StateSpec.squeezed(0.5), "averaged", N, seed=15))
        )
        c2_exp, c4_exp, _ = ora.squeezed_averaged_cumulants(0.5)
        assert abs(c.c2 - c2_exp) < 0.0057  # 5 s.e.
        assert abs(c.c4 - c4_exp) < 0.034  # 5 s.e.

    @pytest.mark.parametrize(
        "spec", [StateSpec.coherent(1.0), StateSpec.squeezed(0.5)], ids=["coherent", "squeezed"]
    )
    def test_averaged_odd_moments_vanish(self, spec):
        m = moments_of(sample_quadratures(spec, "averaged", N, seed=16))
        assert abs(m.mean) < 5 * math.sqrt(m.m2 / N)
        assert abs(m.m3) < 5 * math.sqrt(m.m6 / N)

    def test_added_noise_variance_adds(self):
        m = moments_of(
            sample_quadratures(StateSpec.vacuum(added_noise=2.0), "averaged", N, seed=17)
        )
        se = math.sqrt((m.m4 - m.m2**2) / N)
        assert abs(m.m2 - 2.5) < 5 * se


class TestSeeding:
    def test_deterministic(self):
        a = sample_quadratures(StateSpec.squeezed(0.3), "averaged", 10_000, seed=5)
        b = sample_quadratures(StateSpec.squeezed(0.3), "averaged", 10_000, seed=5)
        assert np.array_equal(a.samples, b.samples)

    def test_seed_changes_stream(self):
        a = sample_quadratures(StateSpec.vacuum(), "averaged", 1_000, seed=5)
        b = sample_quadratures(StateSpec.vacuum(), "averaged", 1_000, seed=6)
        assert not np.array_equal(a.samples, b.samples)

    def test_noise_stream_independent_of_signal(self):
        # the added-noise stream is split from the amplitude stream, so the
        # same seed with and without noise shares its signal part exactly
        n = 200_000
        with_noise = sample_quadratures(
            StateSpec.coherent(0.5, added_noise=2.0), "averaged", n, seed=21
        )
        without = sample_quadratures(StateSpec.coherent(0.5), "averaged", n, seed=21)
        noise = with_noise.samples - without.samples
        corr = np.corrcoef(noise, without.samples)[0, 1]
        assert abs(corr) < 5 / math.sqrt(n)
        assert np.var(noise) == pytest.approx(2.0, rel=0.02)

    def test_invalid_count(self):
        with pytest.raises(ValueError):
            sample_quadratures(StateSpec.vacuum(), "averaged", 0, seed=1)

    def test_fixed_needs_theta(self):
        with pytest.raises(SpecError):
            sample_quadratures(StateSpec.coherent(1.0), "fixed", 10, seed=1)


class TestTimeTraceSampling:
    def setup_method(self):
        self.pulse = PulseSpec(carrier_hz=5e9, sigma_s=10e-9, amplitude_v=1e-6)

    def test_peak_at_center(self):
        tr = sample_timetrace(self.pulse, fs=25e9, duration=200e-9, impedance=50.0, seed=0)
        i = np.argmax(np.abs(tr.samples))
        assert abs(tr.times[i]) < 1.0 / tr.fs
        assert np.abs(tr.samples).max() == pytest.approx(1e-6, rel=1e-3)

    def test_noiseless_energy_closed_form(self):
        z = 50.0
        tr = sample_timetrace(self.pulse, fs=25e9, duration=200e-9, impedance=z, seed=0)
        energy = float(tr.samples @ tr.samples) / tr.fs / z
        expected = self.pulse.amplitude_v**2 * self.pulse.sigma_s * math.sqrt(math.pi) / (2 * z)
        assert energy == pytest.approx(expected, rel=1e-3)

    def test_deterministic(self):
        kw = dict(fs=25e9, duration=200e-9, impedance=50.0, seed=7)
        noisy = PulseSpec(5e9, 10e-9, 1e-6, noise_floor=1e-22)
        a = sample_timetrace(noisy, **kw)
        b = sample_timetrace(noisy, **kw)
        assert np.array_equal(a.samples, b.samples)

    def test_noise_power(self):
        quiet = PulseSpec(5e9, 10e-9, 0.0, noise_floor=1e-20)
        tr = sample_timetrace(quiet, fs=25e9, duration=400e-9, impedance=50.0, seed=3)
        # variance per sample is the two-sided density times the rate;
        # 5 s.e. of a 10^4-sample variance estimate is 7%
        expected = 1e-20 * 25e9
        assert np.var(tr.samples) == pytest.approx(expected, rel=0.07)

    def test_undersampled_carrier(self):
        with pytest.raises(AliasingError):
            sample_timetrace(self.pulse, fs=15e9, duration=200e-9, impedance=50.0, seed=0)

    def test_short_window(self):
        with pytest.raises(ValueError):
            sample_timetrace(self.pulse, fs=25e9, duration=50e-9, impedance=50.0, seed=0)

    def test_trace_validation(self):
        with pytest.raises(ValueError):
            TimeTrace(fs=-1.0, impedance=50.0, samples=np.zeros(4))
        with pytest.raises(ValueError):
            TimeTrace(fs=1.0, impedance=0.0, samples=np.zeros(4))
        with pytest.raises(ValueError):
            TimeTrace(fs=1.0, impedance=50.0, samples=np.array([1.0]))
