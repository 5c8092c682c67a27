"""Uniformly sampled signal containers shared by every stage of the library."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _check_fs(fs: float) -> float:
    fs = float(fs)
    if not np.isfinite(fs) or fs <= 0:
        raise ValueError(f"sampling frequency must be positive, got {fs}")
    return fs


@dataclass(frozen=True)
class RealSignal:
    """Real-valued waveform sampled at ``fs`` Hz.

    Sample ``i`` sits at time ``t0 + i / fs``.
    """

    samples: np.ndarray
    fs: float
    t0: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "fs", _check_fs(self.fs))
        object.__setattr__(self, "t0", float(self.t0))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.fs

    def with_samples(self, samples, fs: float | None = None, t0: float | None = None) -> "RealSignal":
        return RealSignal(samples, self.fs if fs is None else fs, self.t0 if t0 is None else t0)


@dataclass(frozen=True)
class ComplexSignal:
    """Complex-valued waveform, e.g. an analytic signal.

    The modulus is the instantaneous amplitude and the argument the
    instantaneous phase, wrapped to (-pi, pi].
    """

    samples: np.ndarray
    fs: float
    t0: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=complex)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "fs", _check_fs(self.fs))
        object.__setattr__(self, "t0", float(self.t0))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.fs

    @property
    def amplitude(self) -> np.ndarray:
        return np.abs(self.samples)

    @property
    def phase(self) -> np.ndarray:
        psi = np.angle(self.samples)
        # np.angle returns -pi for negative reals with a -0.0 imaginary part
        return np.where(psi <= -np.pi, np.pi, psi)

    def real(self) -> RealSignal:
        return RealSignal(self.samples.real.copy(), self.fs, self.t0)

    def imag(self) -> RealSignal:
        return RealSignal(self.samples.imag.copy(), self.fs, self.t0)


Signal = RealSignal | ComplexSignal


def as_array(x) -> np.ndarray:
    """Return the sample array of a signal container, or ``x`` itself as an array."""
    if isinstance(x, (RealSignal, ComplexSignal)):
        return x.samples
    return np.asarray(x)
