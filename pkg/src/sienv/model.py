"""Synthetic FID signals, Lorentzian line shape, pulses and the composite noise model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import constants

from .signals import ComplexSignal, RealSignal

DEFAULT_SEED = 20250101


@dataclass(frozen=True)
class FidParams:
    """Physical parameters of a free induction decay.

    The defaults describe the reference synthetic scenario: a 5 Hz Larmor
    line with a 10 V peak, effective decay time T2* = 250 ms and zero
    initial phase. Only T2* is observable, so it is split as T2 = 0.5 s and
    a Lorentzian half-width of 2 rad/s.
    """

    m0: float = 10.0 / math.pi
    alpha: float = math.pi / 2
    omega0: float = 2 * math.pi * 5.0
    t2: float = 0.5
    delta_omega0: float = 2.0
    phase0: float = 0.0

    def __post_init__(self):
        if not self.t2 > 0:
            raise ValueError(f"t2 must be positive, got {self.t2}")
        if self.delta_omega0 < 0:
            raise ValueError(f"delta_omega0 must be non-negative, got {self.delta_omega0}")
        if self.m0 < 0:
            raise ValueError(f"m0 must be non-negative, got {self.m0}")

    @property
    def decay_rate(self) -> float:
        """Effective decay rate 1/T2* = 1/T2 + delta_omega0, in 1/s."""
        return 1.0 / self.t2 + self.delta_omega0

    @property
    def t2_star(self) -> float:
        return 1.0 / self.decay_rate

    @property
    def peak(self) -> float:
        """Signal magnitude at t = 0: pi * sin(alpha) * m0."""
        return math.pi * math.sin(self.alpha) * self.m0

    def envelope(self, t) -> np.ndarray:
        """Closed-form envelope ``peak * exp(-t / T2*)``; zero before t = 0."""
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0, self.peak * np.exp(-self.decay_rate * np.clip(t, 0, None)), 0.0)


@dataclass(frozen=True)
class RicianNoise:
    noncentrality: float = 1.0
    scale: float = 0.3
    amplitude: float = 7.0


@dataclass(frozen=True)
class GaussianNoise:
    std: float = 0.15
    amplitude: float = 3.0


@dataclass(frozen=True)
class JohnsonNoise:
    temperature_c: float = 43.0
    resistance_ohm: float = 50.0
    bandwidth_hz: float = 300.0

    @property
    def rms(self) -> float:
        """Thermal noise voltage sqrt(4 k_B T R df)."""
        kelvin = self.temperature_c + 273.15
        return math.sqrt(4 * constants.k * kelvin * self.resistance_ohm * self.bandwidth_hz)


@dataclass(frozen=True)
class HarmonicNoise:
    freq: float = 50.0
    amplitude: float = 0.3


@dataclass(frozen=True)
class NoiseSpec:
    """Composite noise model: Rician + Gaussian + Johnson + mains harmonic."""

    rician: RicianNoise = field(default_factory=RicianNoise)
    gaussian: GaussianNoise = field(default_factory=GaussianNoise)
    johnson: JohnsonNoise = field(default_factory=JohnsonNoise)
    harmonic: HarmonicNoise = field(default_factory=HarmonicNoise)
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        checks = {
            "rician.scale": self.rician.scale,
            "rician.amplitude": self.rician.amplitude,
            "gaussian.std": self.gaussian.std,
            "gaussian.amplitude": self.gaussian.amplitude,
            "johnson.resistance_ohm": self.johnson.resistance_ohm,
            "johnson.bandwidth_hz": self.johnson.bandwidth_hz,
            "harmonic.amplitude": self.harmonic.amplitude,
        }
        for name, value in checks.items():
            if value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")
        if self.johnson.temperature_c < -273.15:
            raise ValueError("johnson.temperature_c is below absolute zero")
        if self.seed < 0:
            raise ValueError("seed must be an unsigned integer")

    @classmethod
    def silent(cls, seed: int = DEFAULT_SEED) -> "NoiseSpec":
        """A spec with every component switched off."""
        return cls(
            rician=RicianNoise(amplitude=0.0),
            gaussian=GaussianNoise(amplitude=0.0),
            johnson=JohnsonNoise(resistance_ohm=0.0),
            harmonic=HarmonicNoise(amplitude=0.0),
            seed=seed,
        )


def lorentzian_density(omega, params: FidParams):
    """Lorentzian spectral density of the spins.

    Args:
        omega: angular frequency (rad/s), scalar or array.
        params: FID parameters supplying ``m0``, ``omega0`` and ``delta_omega0``.

    Returns:
        ``m0 * dw / (dw**2 + (omega - omega0)**2)``.

    Raises:
        ValueError: if ``delta_omega0`` is zero (the density degenerates to a delta).
    """
    dw = params.delta_omega0
    if dw <= 0:
        raise ValueError("degenerate Lorentzian: delta_omega0 must be > 0")
    # |omega - omega0| keeps the two sides of the line bit-identical
    u = np.abs(np.asarray(omega, dtype=float) - params.omega0)
    return params.m0 * dw / (dw * dw + u * u)


def sample_count(fs: float, duration: float) -> int:
    """Number of samples on the half-open interval [0, duration)."""
    return int(math.ceil(duration * fs - 1e-9))


def synth_fid(
    params: FidParams,
    frame: Literal["laboratory", "rotating"] = "laboratory",
    fs: float = 100.0,
    duration: float = 6 * math.pi,
) -> ComplexSignal:
    """Sample the complex FID in the laboratory or rotating frame.

    The laboratory frame carries the ``exp(i (omega0 t + phase0))`` carrier;
    the rotating frame drops the Larmor term and keeps only the initial phase.
    Use ``.real()`` for the trace an oscilloscope would record.
    """
    if not fs > 0:
        raise ValueError(f"fs must be positive, got {fs}")
    if not duration > 0:
        raise ValueError(f"duration must be positive, got {duration}")
    if frame not in ("laboratory", "rotating"):
        raise ValueError(f"unknown frame {frame!r}")
    t = np.arange(sample_count(fs, duration)) / fs
    return ComplexSignal(fid_at(params, t, frame), fs)


def fid_at(params: FidParams, t, frame: Literal["laboratory", "rotating"] = "laboratory"):
    """Evaluate the complex FID at arbitrary times ``t`` (seconds)."""
    t = np.asarray(t, dtype=float)
    env = params.peak * np.exp(-t / params.t2) * np.exp(-params.delta_omega0 * t)
    if frame == "laboratory":
        phase = params.omega0 * t + params.phase0
    elif frame == "rotating":
        phase = np.full_like(t, params.phase0)
    else:
        raise ValueError(f"unknown frame {frame!r}")
    return env * np.exp(1j * phase)


def _rician_draws(rng: np.random.Generator, n: int, noncentrality: float, scale: float) -> np.ndarray:
    # noncentral chi with 2 degrees of freedom: scale * |(nu + z1, z2)|
    z = rng.standard_normal((2, n))
    return scale * np.hypot(noncentrality + z[0], z[1])


def gen_noise(spec: NoiseSpec, n: int, fs: float) -> RealSignal:
    """Draw ``n`` samples of the composite noise model.

    Each random component has its own child stream of ``spec.seed``, so
    switching one component off leaves the others unchanged.
    """
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    rician_ss, gauss_ss, johnson_ss = np.random.SeedSequence(spec.seed).spawn(3)
    t = np.arange(n) / float(fs)
    out = np.zeros(n)

    rc = spec.rician
    if rc.amplitude > 0:
        r = _rician_draws(np.random.default_rng(rician_ss), n, rc.noncentrality, rc.scale)
        r -= r.mean()
        peak = np.max(np.abs(r))
        if peak > 0:
            out += r * (rc.amplitude / peak)

    g = spec.gaussian
    if g.amplitude > 0 and g.std > 0:
        out += np.random.default_rng(gauss_ss).standard_normal(n) * g.std * g.amplitude

    j_rms = spec.johnson.rms
    if j_rms > 0:
        out += np.random.default_rng(johnson_ss).standard_normal(n) * j_rms

    h = spec.harmonic
    if h.amplitude > 0:
        out += h.amplitude * np.sin(2 * np.pi * h.freq * t)

    return RealSignal(out, fs)


def synth_rect_pulse(delay_d: int, width: int, n_total: int, height: float = 1.0, fs: float = 100.0) -> RealSignal:
    """Rectangular pulse: ``delay_d`` zeros, ``width`` samples at ``height``, zeros to ``n_total``."""
    if delay_d < 0 or width < 0 or n_total <= 0:
        raise ValueError("delay_d, width must be >= 0 and n_total > 0")
    if delay_d + width > n_total:
        raise ValueError(f"pulse [{delay_d}, {delay_d + width}) does not fit in {n_total} samples")
    x = np.zeros(n_total)
    x[delay_d : delay_d + width] = height
    return RealSignal(x, fs)


def add_signals(a: RealSignal, b: RealSignal) -> RealSignal:
    if a.fs != b.fs:
        raise ValueError(f"sampling frequencies differ: {a.fs} vs {b.fs}")
    if len(a) != len(b):
        raise ValueError(f"lengths differ: {len(a)} vs {len(b)}")
    return RealSignal(a.samples + b.samples, a.fs, a.t0)


def synth_noisy_fid(params: FidParams, noise: NoiseSpec, fs: float = 100.0, duration: float = 6 * math.pi):
    """Laboratory-frame FID trace plus composite noise.

    Returns:
        (noisy, clean) pair of RealSignal.
    """
    clean = synth_fid(params, "laboratory", fs, duration).real()
    return add_signals(clean, gen_noise(noise, len(clean), fs)), clean
