"""Fringes in the forward transform of a delayed rectangular pulse.

Delaying a pulse by ``d`` samples multiplies its transform by a phase ramp,
so ``|Re X[k]|`` shows fringes whose spacing in k obeys

    y_m = m * h0 * N * fs / (d * f_o)

with an empirical constant ``h0``. Measuring the spacing lets one recover
either the delay or the transfer frequency once ``h0`` is calibrated.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import maximum_filter1d
from scipy.signal import find_peaks

from .errors import InsufficientFringesError
from .model import synth_rect_pulse
from .transform import Spectrum, TransformConfig, forward_discrete

PROMINENCE_FRACTION = 0.10
MIN_PEAK_DISTANCE = 2
ENVELOPE_WINDOW = 5


@dataclass(frozen=True)
class FringeReport:
    peak_indices: np.ndarray
    spacings: np.ndarray
    mean_spacing: float
    h0_estimate: float | None = None
    recovered_delay_samples: float | None = None
    recovered_transfer_freq: float | None = None

    def as_dict(self) -> dict:
        return {
            "peak_indices": [int(i) for i in self.peak_indices],
            "spacings": [float(s) for s in self.spacings],
            "mean_spacing": self.mean_spacing,
            "h0_estimate": self.h0_estimate,
            "recovered_delay_samples": self.recovered_delay_samples,
            "recovered_transfer_freq": self.recovered_transfer_freq,
        }


def fringe_spacing_model(m: float, h0: float, n: int, fs: float, d: float, f_o: float) -> float:
    """Distance of the m-th fringe, ``m * h0 * n * fs / (d * f_o)``, in k-bins."""
    if d == 0 or f_o == 0:
        raise ValueError("undelayed pulse has no fringes (d and f_o must be non-zero)")
    if d < 0 or f_o < 0:
        raise ValueError("d and f_o must be positive")
    return m * h0 * n * fs / (d * f_o)


def fringe_profile(spec: Spectrum) -> np.ndarray:
    return np.abs(spec.coeffs.real)


def fringe_envelope(spec: Spectrum) -> np.ndarray:
    """Moving maximum of ``|Re X[k]|``; for plotting only."""
    return maximum_filter1d(fringe_profile(spec), size=ENVELOPE_WINDOW, mode="nearest")


def detect_fringes(spec: Spectrum) -> FringeReport:
    """Locate the fringes of ``|Re X[k]|`` and their spacings.

    Peaks are interior local maxima whose prominence is at least 10% of the
    global maximum, at least two bins apart.

    Raises:
        InsufficientFringesError: fewer than two peaks were found.
    """
    prof = fringe_profile(spec)
    top = float(prof.max()) if prof.size else 0.0
    if top <= 0:
        raise InsufficientFringesError("insufficient fringes: spectrum is identically zero")
    peaks, _ = find_peaks(prof, prominence=PROMINENCE_FRACTION * top, distance=MIN_PEAK_DISTANCE)
    if peaks.size < 2:
        raise InsufficientFringesError(f"insufficient fringes: found {peaks.size} peak(s), need 2")
    spacings = np.diff(peaks).astype(float)
    return FringeReport(peaks, spacings, float(spacings.mean()))


def calibrate_h0(report: FringeReport, n: int, fs: float, d: float, f_o: float) -> float:
    """Fit h0 from one run with known delay and transfer frequency."""
    return report.mean_spacing * d * f_o / (n * fs)


def recover_parameters(
    report: FringeReport,
    h0: float,
    n: int,
    fs: float,
    f_o: float | None = None,
    d: float | None = None,
) -> FringeReport:
    """Invert the spacing law for whichever of ``d`` / ``f_o`` is not given."""
    if (f_o is None) == (d is None):
        raise ValueError("give exactly one of f_o (to recover d) or d (to recover f_o)")
    if not report.mean_spacing > 0:
        raise ValueError(f"mean spacing must be positive, got {report.mean_spacing}")
    known = f_o if f_o is not None else d
    unknown = h0 * n * fs / (report.mean_spacing * known)
    if f_o is not None:
        return replace(report, h0_estimate=h0, recovered_delay_samples=unknown)
    return replace(report, h0_estimate=h0, recovered_transfer_freq=unknown)


@dataclass(frozen=True)
class PulseScenario:
    label: str
    delay: int
    f_o: float
    spectrum: Spectrum
    report: FringeReport


@dataclass(frozen=True)
class PulseStudy:
    fs: float
    n: int
    width: int
    scenarios: tuple[PulseScenario, ...]
    h0: float

    def as_dict(self) -> dict:
        return {
            "fs": self.fs,
            "n": self.n,
            "width": self.width,
            "h0": self.h0,
            "scenarios": [
                {"label": s.label, "delay": s.delay, "f_o": s.f_o, **s.report.as_dict()} for s in self.scenarios
            ],
        }


def run_pulse_study(
    fs: float = 100.0, n: int = 1000, width: int = 5, d: int = 100, f_o: float = 10.0
) -> PulseStudy:
    """Three delayed-pulse runs: (d, f_o), (2d, f_o) and (d, 2 f_o).

    h0 is calibrated on the first run; the delay of every run is then
    recovered from its own fringes given the known transfer frequency.
    """
    cases = [("D", d, f_o), ("2D", 2 * d, f_o), ("D,2fo", d, 2 * f_o)]
    measured = []
    for label, delay, fo in cases:
        pulse = synth_rect_pulse(delay, width, n, 1.0, fs)
        spec = forward_discrete(pulse, TransformConfig(fo, fs, n))
        measured.append((label, delay, fo, spec, detect_fringes(spec)))
    h0 = calibrate_h0(measured[0][4], n, fs, d, f_o)
    scenarios = tuple(
        PulseScenario(label, delay, fo, spec, recover_parameters(rep, h0, n, fs, f_o=fo))
        for label, delay, fo, spec, rep in measured
    )
    return PulseStudy(fs, n, width, scenarios, h0)
