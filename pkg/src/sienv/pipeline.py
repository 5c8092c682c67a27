"""End-to-end envelope extraction, the Hilbert baseline and comparison metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np

from .errors import ObserverError
from .signals import ComplexSignal, RealSignal
from .transform import TransformConfig, passband_gain, si_analytic

# above this many samples the "auto" method switches from direct summation to chirp-z
AUTO_DIRECT_LIMIT = 4096


@dataclass(frozen=True)
class PipelineConfig:
    """Preprocessing and transform settings.

    The transfer frequency is ``transfer_freq`` Hz when given, otherwise
    ``transfer_ratio`` times the sampling rate of the *input* signal (before
    decimation). With ``normalize`` the envelope is divided by the transform's
    passband gain so a real tone of amplitude A yields an envelope near A.
    """

    delay_samples: int = 0
    remove_mean: bool = True
    downsample_factor: int = 8
    transfer_freq: float | None = None
    transfer_ratio: float = 0.05
    refine: bool = False
    reprocess_passes: int = 0
    normalize: bool = True
    method: Literal["auto", "direct", "czt"] = "auto"

    def __post_init__(self):
        if int(self.downsample_factor) != self.downsample_factor or self.downsample_factor < 1:
            raise ValueError(f"downsample_factor must be a positive integer, got {self.downsample_factor}")
        if int(self.delay_samples) != self.delay_samples or self.delay_samples < 0:
            raise ValueError(f"delay_samples must be a non-negative integer, got {self.delay_samples}")
        if int(self.reprocess_passes) != self.reprocess_passes or self.reprocess_passes < 0:
            raise ValueError(f"reprocess_passes must be >= 0, got {self.reprocess_passes}")
        if self.transfer_freq is not None and not self.transfer_freq > 0:
            raise ValueError(f"transfer_freq must be positive, got {self.transfer_freq}")
        if not 0 < self.transfer_ratio <= 1:
            raise ValueError(f"transfer_ratio must lie in (0, 1], got {self.transfer_ratio}")
        if self.method not in ("auto", "direct", "czt"):
            raise ValueError(f"unknown method {self.method!r}")

    def transfer_frequency(self, input_fs: float) -> float:
        if self.transfer_freq is not None:
            return float(self.transfer_freq)
        return self.transfer_ratio * input_fs

    def method_for(self, n: int) -> str:
        if self.method != "auto":
            return self.method
        return "direct" if n <= AUTO_DIRECT_LIMIT else "czt"


@dataclass(frozen=True)
class EnvelopeResult:
    envelope: RealSignal
    carrier: RealSignal
    analytic: ComplexSignal
    method_label: str

    def __post_init__(self):
        n, fs = len(self.envelope), self.envelope.fs
        for name in ("carrier", "analytic"):
            other = getattr(self, name)
            if len(other) != n or other.fs != fs:
                raise ValueError(f"{name} does not share the envelope's length and rate")

    @classmethod
    def from_envelope(cls, envelope: RealSignal, label: str) -> "EnvelopeResult":
        """Wrap an envelope computed elsewhere (e.g. an external method's CSV)."""
        zeros = np.zeros(len(envelope))
        return cls(
            envelope,
            envelope.with_samples(zeros),
            ComplexSignal(envelope.samples.astype(complex), envelope.fs, envelope.t0),
            label,
        )


def preprocess(x: RealSignal, cfg: PipelineConfig) -> RealSignal:
    """Prepend the delay, remove the mean, then keep every M-th sample.

    The returned signal starts ``delay_samples / fs`` earlier than ``x`` so
    time stamps keep referring to the same instants.
    """
    if len(x) == 0:
        raise ValueError("cannot preprocess an empty signal")
    v = np.concatenate([np.zeros(cfg.delay_samples), x.samples])
    if cfg.remove_mean:
        v = v - v.mean()
    m = cfg.downsample_factor
    return RealSignal(v[::m], x.fs / m, x.t0 - cfg.delay_samples / x.fs)


def _transform_config(x: RealSignal, f_o: float) -> TransformConfig:
    return TransformConfig(f_o, x.fs, len(x))


def extract_envelope(x: RealSignal, cfg: PipelineConfig = PipelineConfig()) -> EnvelopeResult:
    """Envelope of ``x`` through the zoomed-transform round trip.

    Raises:
        ObserverError: if fewer than three samples survive preprocessing.
    """
    f_o = cfg.transfer_frequency(x.fs)
    pre = preprocess(x, cfg)
    if len(pre) < 3:
        raise ObserverError(f"observer needs >= 3 samples, got {len(pre)} after preprocessing")
    tcfg = _transform_config(pre, f_o)
    method = cfg.method_for(len(pre))
    analytic = si_analytic(pre, tcfg, method)
    gain = 1.0 / passband_gain(tcfg) if cfg.normalize else 1.0
    result = EnvelopeResult(
        RealSignal(gain * np.abs(analytic.samples), pre.fs, pre.t0),
        RealSignal(gain * analytic.samples.real, pre.fs, pre.t0),
        analytic,
        "proposed",
    )
    if cfg.refine:
        result = refine_envelope(result, cfg, f_o)
    if cfg.reprocess_passes:
        result = reprocess(result, cfg, f_o)
    return result


def refine_envelope(result: EnvelopeResult, cfg: PipelineConfig, f_o: float | None = None) -> EnvelopeResult:
    """Subtract the carrier's own envelope from the envelope, clamping at zero.

    The carrier's envelope is the modulus of the round trip applied to the
    carrier. Since the carrier carries the same normalization as the
    envelope, the result scales linearly with the input.
    """
    carrier = result.carrier
    if f_o is None:
        f_o = cfg.transfer_frequency(carrier.fs * cfg.downsample_factor)
    tcfg = _transform_config(carrier, f_o)
    carrier_env = np.abs(si_analytic(carrier, tcfg, cfg.method_for(len(carrier))).samples)
    refined = np.maximum(result.envelope.samples - carrier_env, 0.0)
    return replace(
        result, envelope=result.envelope.with_samples(refined), method_label=result.method_label + "+refined"
    )


def reprocess(result: EnvelopeResult, cfg: PipelineConfig, f_o: float) -> EnvelopeResult:
    """Run the round trip ``cfg.reprocess_passes`` times on the envelope itself.

    An envelope is baseband, where the round trip's gain is ``1 / (2 pi r)``
    (twice the gain seen by a real carrier), so passes are normalized by that.
    """
    env = result.envelope
    tcfg = _transform_config(env, f_o)
    gain = 2 * math.pi * tcfg.ratio if cfg.normalize else 1.0
    method = cfg.method_for(len(env))
    for _ in range(cfg.reprocess_passes):
        env = env.with_samples(gain * np.abs(si_analytic(env, tcfg, method).samples))
    label = f"{result.method_label}+reprocessed{cfg.reprocess_passes}"
    return replace(result, envelope=env, method_label=label)


def analytic_signal(x) -> np.ndarray:
    """Analytic signal by the frequency-domain method.

    DFT, drop negative frequencies, double the positive ones (DC and, for
    even lengths, the Nyquist bin are kept as is), inverse DFT.
    """
    v = np.asarray(x, dtype=float)
    n = v.size
    h = np.zeros(n)
    h[0] = 1.0
    if n % 2 == 0:
        h[n // 2] = 1.0
        h[1 : n // 2] = 2.0
    else:
        h[1 : (n + 1) // 2] = 2.0
    return np.fft.ifft(np.fft.fft(v) * h)


def hilbert_envelope(x: RealSignal) -> EnvelopeResult:
    if len(x) < 2:
        raise ValueError("hilbert_envelope needs at least 2 samples")
    a = analytic_signal(x.samples)
    return EnvelopeResult(
        x.with_samples(np.abs(a)),
        x.with_samples(a.real),
        ComplexSignal(a, x.fs, x.t0),
        "hilbert",
    )


@dataclass(frozen=True)
class EnvelopeMetrics:
    method: str
    rmse: float | None
    correlation: float | None
    smoothness: float
    n: int

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "rmse": self.rmse,
            "correlation": self.correlation,
            "smoothness": self.smoothness,
            "n": self.n,
        }


def resample_to(sig: RealSignal, times: np.ndarray) -> np.ndarray:
    """Linear interpolation of ``sig`` onto ``times``; constant beyond the ends."""
    if len(sig) == len(times) and np.allclose(sig.times, times, rtol=0, atol=1e-12 * max(1.0, abs(times).max())):
        return sig.samples.copy()
    return np.interp(times, sig.times, sig.samples)


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    den = math.sqrt(float(a @ a) * float(b @ b))
    return float(a @ b) / den if den > 0 else float("nan")


def compare_envelopes(
    candidates: Sequence[EnvelopeResult], truth: RealSignal | None = None
) -> list[EnvelopeMetrics]:
    """Score envelopes on a shared time grid.

    The grid is ``truth``'s when given, otherwise that of the candidate with
    the most samples. Candidates are mapped onto it by linear interpolation on
    their own time stamps. Smoothness is the mean absolute second difference.
    RMSE and correlation are None without ``truth``.
    """
    if not candidates:
        raise ValueError("no candidate envelopes to compare")
    if truth is not None:
        grid = truth.times
    else:
        grid = max(candidates, key=lambda c: len(c.envelope)).envelope.times
    out = []
    for cand in candidates:
        v = resample_to(cand.envelope, grid)
        smooth = float(np.mean(np.abs(np.diff(v, 2)))) if v.size > 2 else 0.0
        rmse = corr = None
        if truth is not None:
            rmse = float(np.sqrt(np.mean((v - truth.samples) ** 2)))
            corr = _pearson(v, truth.samples)
        out.append(EnvelopeMetrics(cand.method_label, rmse, corr, smooth, int(v.size)))
    return out
