"""Classic discrete time scaling at a fixed sampling rate.

A signal is zero-padded to ``M * N`` samples and then compressed by ``M``:
the kept samples are shifted left onto the original grid, so the sampling
frequency never changes. Non-integer positions are filled by linear
interpolation. No anti-alias filter is applied.
"""

from __future__ import annotations

import math

import numpy as np

from .signals import ComplexSignal, RealSignal


def _check_factor(m: float) -> float:
    if not (m >= 1 and math.isfinite(m)):
        raise ValueError(f"scale factor must be >= 1, got {m}")
    return float(m)


def zero_pad(x: RealSignal, m: int) -> RealSignal:
    """Append ``(m - 1) * N`` zeros so the output holds ``m * N`` samples."""
    m = _check_factor(m)
    if m != int(m):
        raise ValueError("zero_pad needs an integer factor")
    out = np.zeros(int(m) * len(x), dtype=x.samples.dtype)
    out[: len(x)] = x.samples
    return x.with_samples(out) if isinstance(x, RealSignal) else ComplexSignal(out, x.fs, x.t0)


def scale_time(x, m: float):
    """Compress ``x`` in time by ``m`` without changing its sampling rate.

    ``out[n] = x(n * m)`` for ``n < ceil(N / m)``, reading ``x`` at fractional
    indices by linear interpolation. A 5 Hz tone comes back at ``5 * m`` Hz and
    an exponential decay with time constant ``tau`` comes back with ``tau / m``.

    Works on RealSignal and ComplexSignal.
    """
    m = _check_factor(m)
    n = len(x)
    if n == 0:
        raise ValueError("cannot scale an empty signal")
    n_out = math.ceil(n / m - 1e-12)
    pos = np.arange(n_out) * m
    grid = np.arange(n)
    v = x.samples
    if np.iscomplexobj(v):
        out = np.interp(pos, grid, v.real) + 1j * np.interp(pos, grid, v.imag)
        return ComplexSignal(out, x.fs, x.t0)
    return RealSignal(np.interp(pos, grid, v), x.fs, x.t0)


def scale_padded(x, m: int):
    """Zero-pad by ``m`` then compress by ``m``: same length and rate as ``x``."""
    return scale_time(zero_pad(x, m), m)
