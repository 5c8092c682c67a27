import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from sienv.model import (
    FidParams,
    GaussianNoise,
    HarmonicNoise,
    JohnsonNoise,
    NoiseSpec,
    RicianNoise,
    add_signals,
    fid_at,
    gen_noise,
    lorentzian_density,
    synth_fid,
    synth_rect_pulse,
)
from sienv.signals import RealSignal

PARAMS = FidParams()


def only(**components):
    """NoiseSpec with every component off except the ones given."""
    base = NoiseSpec.silent(components.pop("seed", 7))
    from dataclasses import replace

    return replace(base, **components)


# ---------------------------------------------------------------- Lorentzian


def test_lorentzian_peak_and_half_width():
    p = FidParams(m0=2.0, omega0=30.0, delta_omega0=1.5)
    assert lorentzian_density(p.omega0, p) == pytest.approx(p.m0 / p.delta_omega0, rel=1e-15)
    for s in (+1, -1):
        assert lorentzian_density(p.omega0 + s * p.delta_omega0, p) == pytest.approx(
            p.m0 / (2 * p.delta_omega0), rel=1e-15
        )


def test_lorentzian_quadrature_normalization():
    p = FidParams(m0=3.0, omega0=2 * math.pi * 5, delta_omega0=2.0)
    lo = p.omega0 - 1e4 * p.delta_omega0
    hi = p.omega0 + 1e4 * p.delta_omega0
    val, _ = integrate.quad(lambda w: lorentzian_density(w, p), lo, hi, points=[p.omega0], limit=500)
    assert val == pytest.approx(math.pi * p.m0, rel=1e-3)


@given(st.integers(0, 2**30))
def test_lorentzian_exact_symmetry(steps):
    # dyadic centre and offsets: omega0 +- delta is exact, so the two sides must be bit-identical
    p = FidParams(omega0=32.0, delta_omega0=0.75)
    delta = steps * 2.0**-20
    assert lorentzian_density(p.omega0 + delta, p) == lorentzian_density(p.omega0 - delta, p)


@given(st.floats(0, 1e6, allow_nan=False))
def test_lorentzian_symmetry_arbitrary_offsets(delta):
    left = lorentzian_density(PARAMS.omega0 - delta, PARAMS)
    right = lorentzian_density(PARAMS.omega0 + delta, PARAMS)
    assert right == pytest.approx(left, rel=1e-9)


def test_lorentzian_degenerate():
    with pytest.raises(ValueError, match="degenerate Lorentzian"):
        lorentzian_density(1.0, FidParams(delta_omega0=0.0))


def test_decay_rate_is_exact_sum():
    p = FidParams(t2=0.37, delta_omega0=1.25)
    assert p.decay_rate == 1 / 0.37 + 1.25


@pytest.mark.parametrize("bad", [dict(t2=0.0), dict(t2=-1.0), dict(delta_omega0=-0.1), dict(m0=-1.0)])
def test_fid_params_validation(bad):
    with pytest.raises(ValueError):
        FidParams(**bad)


# ---------------------------------------------------------------- FID synthesis


def test_fid_initial_value():
    p = FidParams(m0=1.7, alpha=0.6, phase0=0.0)
    z = synth_fid(p, "laboratory", 50.0, 1.0).samples[0]
    assert z.real == pytest.approx(math.pi * math.sin(0.6) * 1.7, rel=1e-15)
    assert z.imag == 0.0


def test_rotating_frame_at_t2_star():
    p = FidParams()
    z = fid_at(p, p.t2_star, "rotating")
    assert abs(abs(z) - p.peak / math.e) < 1e-12


def test_reference_scenario_sample_count():
    sig = synth_fid(PARAMS, "laboratory", 100.0, 6 * math.pi)
    assert len(sig) == 1885
    assert sig.fs == 100.0
    assert PARAMS.peak == pytest.approx(10.0)
    assert PARAMS.t2_star == pytest.approx(0.25)
    assert PARAMS.omega0 == pytest.approx(2 * math.pi * 5)


def test_lab_and_rotating_magnitudes_agree():
    lab = synth_fid(PARAMS, "laboratory", 100.0, 5.0)
    rot = synth_fid(PARAMS, "rotating", 100.0, 5.0)
    np.testing.assert_allclose(lab.amplitude, rot.amplitude, rtol=0, atol=1e-12)


def test_rotating_strictly_decreasing():
    rot = synth_fid(PARAMS, "rotating", 100.0, 3.0)
    assert np.all(np.diff(rot.amplitude) < 0)


def test_projection_accessors():
    lab = synth_fid(PARAMS, "laboratory", 100.0, 1.0)
    np.testing.assert_array_equal(lab.real().samples, lab.samples.real)
    np.testing.assert_array_equal(lab.imag().samples, lab.samples.imag)


@pytest.mark.parametrize("fs,duration", [(0, 1), (-1, 1), (100, 0), (100, -2)])
def test_synth_fid_rejects_bad_arguments(fs, duration):
    with pytest.raises(ValueError):
        synth_fid(PARAMS, "laboratory", fs, duration)


# ---------------------------------------------------------------- noise


def test_silent_noise_is_zero():
    out = gen_noise(NoiseSpec.silent(), 500, 100.0)
    np.testing.assert_array_equal(out.samples, np.zeros(500))


def test_gaussian_std():
    spec = only(gaussian=GaussianNoise(std=0.15, amplitude=1.0))
    out = gen_noise(spec, 10**6, 100.0)
    assert np.std(out.samples) == pytest.approx(0.15, rel=0.01)


def test_gaussian_amplitude_is_a_gain():
    spec = only(gaussian=GaussianNoise(std=0.15, amplitude=3.0))
    out = gen_noise(spec, 10**5, 100.0)
    assert np.std(out.samples) == pytest.approx(0.45, rel=0.02)


def _brute_dft_mag(x):
    n = len(x)
    mags = []
    for k in range(n // 2 + 1):
        re = sum(x[i] * math.cos(2 * math.pi * k * i / n) for i in range(n))
        im = sum(x[i] * math.sin(2 * math.pi * k * i / n) for i in range(n))
        mags.append(math.hypot(re, im))
    return np.array(mags)


def test_harmonic_single_dominant_bin():
    fs, n = 1000.0, 400
    spec = only(harmonic=HarmonicNoise(freq=50.0, amplitude=0.3))
    x = gen_noise(spec, n, fs).samples
    mags = _brute_dft_mag(list(x))
    k50 = int(round(50 * n / fs))
    assert np.argmax(mags) == k50
    others = np.delete(mags, k50)
    assert others.max() < 1e-9 * mags[k50]
    assert np.max(np.abs(x)) == pytest.approx(0.3, rel=1e-3)


def test_rician_component_zero_mean_and_peak():
    spec = only(rician=RicianNoise(1.0, 0.3, 7.0))
    x = gen_noise(spec, 5000, 100.0).samples
    assert abs(x.mean()) < 1e-12
    assert np.max(np.abs(x)) == pytest.approx(7.0, rel=1e-12)


def test_rician_draws_follow_rice_distribution():
    from sienv.model import _rician_draws

    draws = _rician_draws(np.random.default_rng(3), 20000, 1.0, 0.3)
    # noncentral chi with 2 dof, noncentrality 1, scale 0.3 == Rice(b=1, scale=0.3)
    p = stats.kstest(draws, stats.rice(1.0, scale=0.3).cdf).pvalue
    assert p > 1e-3


def test_johnson_rms():
    j = JohnsonNoise(temperature_c=43.0, resistance_ohm=1e9, bandwidth_hz=300.0)
    expected = math.sqrt(4 * 1.380649e-23 * (43 + 273.15) * 1e9 * 300.0)
    assert j.rms == pytest.approx(expected, rel=1e-9)
    x = gen_noise(only(johnson=j), 200000, 100.0).samples
    assert np.std(x) == pytest.approx(expected, rel=0.01)


def test_noise_determinism_and_seed_independence():
    a = gen_noise(NoiseSpec(seed=1), 100000, 100.0).samples
    b = gen_noise(NoiseSpec(seed=1), 100000, 100.0).samples
    c = gen_noise(NoiseSpec(seed=2), 100000, 100.0).samples
    assert a.tobytes() == b.tobytes()
    # the harmonic is common to both seeds; compare the random parts
    h = gen_noise(only(harmonic=HarmonicNoise(), seed=1), 100000, 100.0).samples
    assert abs(np.corrcoef(a - h, c - h)[0, 1]) < 0.05


@pytest.mark.parametrize(
    "kw",
    [
        dict(rician=RicianNoise(scale=-1)),
        dict(gaussian=GaussianNoise(std=-0.1)),
        dict(johnson=JohnsonNoise(bandwidth_hz=-1)),
        dict(harmonic=HarmonicNoise(amplitude=-0.3)),
        dict(seed=-1),
    ],
)
def test_noise_spec_validation(kw):
    with pytest.raises(ValueError):
        NoiseSpec(**kw)


def test_gen_noise_rejects_empty():
    with pytest.raises(ValueError):
        gen_noise(NoiseSpec(), 0, 100.0)


# ---------------------------------------------------------------- pulses and sums


def test_rect_pulse_layout():
    p = synth_rect_pulse(3, 4, 10, 2.5, 100.0)
    np.testing.assert_array_equal(p.samples, [0, 0, 0, 2.5, 2.5, 2.5, 2.5, 0, 0, 0])
    assert p.fs == 100.0


def test_rect_pulse_full_width_is_constant():
    np.testing.assert_array_equal(synth_rect_pulse(0, 8, 8, 1.0).samples, np.ones(8))


def test_rect_pulse_delay_shifts_support():
    a = synth_rect_pulse(5, 3, 40).samples
    b = synth_rect_pulse(10, 3, 40).samples
    np.testing.assert_array_equal(np.roll(a, 5), b)


def test_rect_pulse_overflow():
    with pytest.raises(ValueError):
        synth_rect_pulse(8, 3, 10)


@settings(max_examples=30)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30))
def test_add_signals_identity_and_commutativity(vals):
    a = RealSignal(vals, 10.0)
    b = RealSignal(np.arange(len(vals), dtype=float), 10.0)
    zero = RealSignal(np.zeros(len(vals)), 10.0)
    np.testing.assert_array_equal(add_signals(a, zero).samples, a.samples)
    np.testing.assert_array_equal(add_signals(a, b).samples, add_signals(b, a).samples)


def test_add_signals_mismatch():
    with pytest.raises(ValueError):
        add_signals(RealSignal([1, 2], 10.0), RealSignal([1, 2], 20.0))
    with pytest.raises(ValueError):
        add_signals(RealSignal([1, 2], 10.0), RealSignal([1, 2, 3], 10.0))


def test_noisy_fid_composition():
    from sienv.model import synth_noisy_fid

    noisy, clean = synth_noisy_fid(PARAMS, NoiseSpec(seed=5))
    noise = gen_noise(NoiseSpec(seed=5), len(clean), 100.0)
    np.testing.assert_array_equal(noisy.samples, clean.samples + noise.samples)
    assert len(noisy) == 1885
