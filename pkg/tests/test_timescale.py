import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sienv.measure import dominant_bin, fit_decay
from sienv.model import FidParams, synth_fid
from sienv.signals import ComplexSignal, RealSignal
from sienv.timescale import scale_padded, scale_time, zero_pad

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_zero_pad_example():
    out = zero_pad(RealSignal([1.0, 2.0], 10.0), 3)
    np.testing.assert_array_equal(out.samples, [1, 2, 0, 0, 0, 0])
    assert out.fs == 10.0


@given(st.lists(finite, min_size=1, max_size=50), st.integers(1, 6))
def test_zero_pad_properties(vals, m):
    x = RealSignal(vals, 5.0)
    out = zero_pad(x, m)
    assert len(out) == m * len(x)
    np.testing.assert_array_equal(out.samples[: len(x)], x.samples)
    assert np.all(out.samples[len(x) :] == 0)
    assert math.fsum(out.samples**2) == math.fsum(x.samples**2)


def test_zero_pad_identity_and_errors():
    x = RealSignal([3.0, 1.0], 2.0)
    np.testing.assert_array_equal(zero_pad(x, 1).samples, x.samples)
    with pytest.raises(ValueError):
        zero_pad(x, 1.5)
    with pytest.raises(ValueError):
        zero_pad(x, 0)


@given(st.lists(finite, min_size=1, max_size=50))
def test_scale_time_identity(vals):
    x = RealSignal(vals, 5.0)
    np.testing.assert_array_equal(scale_time(x, 1).samples, x.samples)


def test_scale_time_picks_every_mth_sample_for_integer_m():
    x = RealSignal(np.arange(10.0), 1.0)
    np.testing.assert_array_equal(scale_time(x, 3).samples, [0, 3, 6, 9])


def test_scale_time_interpolates_linearly():
    x = RealSignal([0.0, 10.0, 20.0, 30.0], 1.0)
    np.testing.assert_allclose(scale_time(x, 1.5).samples, [0, 15, 30])


def test_scale_time_complex():
    z = ComplexSignal(np.arange(6) * (1 + 2j), 1.0)
    np.testing.assert_array_equal(scale_time(z, 2).samples, [0, 2 + 4j, 4 + 8j])


def test_cosine_frequency_doubles():
    fs, n = 100.0, 1000
    x = RealSignal(np.cos(2 * np.pi * 5 * np.arange(n) / fs), fs)
    y = scale_padded(x, 2)
    # 5 Hz is bin 50 of 1000; after compression the tone is 10 Hz at the same rate
    assert dominant_bin(x) == 50
    assert dominant_bin(y) == 100
    assert dominant_bin(scale_time(x, 2)) * fs / len(scale_time(x, 2)) == pytest.approx(10.0)


def test_rotating_decay_halves():
    p = FidParams()
    rot = synth_fid(p, "rotating", 100.0, 6 * math.pi).real()
    y = scale_padded(rot, 2)
    tau0, tau1 = fit_decay(rot), fit_decay(y)
    assert tau0 == pytest.approx(p.t2_star, rel=1e-6)
    assert tau1 == pytest.approx(tau0 / 2, rel=0.05)
    support = y.samples[y.samples > 0]
    assert np.all(np.diff(support) < 0)


@given(st.integers(2, 300), st.integers(1, 5))
def test_length_bookkeeping(n, m):
    x = RealSignal(np.random.default_rng(n).normal(size=n), 10.0)
    assert len(scale_time(x, m)) == math.ceil(n / m)
    padded = scale_padded(x, m)
    assert len(padded) == n
    # the compressed original occupies the head, the padding's image the rest
    k = math.ceil(n / m)
    np.testing.assert_array_equal(padded.samples[:k], scale_time(x, m).samples)
    assert np.all(padded.samples[k:] == 0)


def test_scale_time_rejects_bad_input():
    with pytest.raises(ValueError):
        scale_time(RealSignal([1.0, 2.0], 1.0), 0.5)
    with pytest.raises(ValueError):
        scale_time(ComplexSignal(np.zeros(0, complex), 1.0), 2)
