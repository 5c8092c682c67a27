"""Small measurements used by the demos: dominant DFT bin and exponential decay fits."""

from __future__ import annotations

import numpy as np

from .signals import as_array


def dominant_bin(x, skip_dc: bool = True) -> int:
    """Index of the largest one-sided DFT magnitude."""
    mag = np.abs(np.fft.rfft(np.real(as_array(x))))
    if skip_dc and mag.size > 1:
        return int(np.argmax(mag[1:]) + 1)
    return int(np.argmax(mag))


def fit_decay(x, fs: float | None = None, floor: float = 1e-3, mask=None) -> float:
    """Time constant of ``|x| ~ A exp(-t / tau)`` by a log-linear least-squares fit.

    Only samples above ``floor * max|x|`` (and inside ``mask`` when given) are
    used. ``tau`` is in seconds when ``fs`` is known, else in samples.
    """
    v = np.abs(as_array(x)).astype(float)
    if fs is None:
        fs = getattr(x, "fs", 1.0)
    keep = v > floor * v.max()
    if mask is not None:
        keep &= np.asarray(mask, dtype=bool)
    if keep.sum() < 2:
        raise ValueError("not enough samples above the floor to fit a decay")
    t = np.flatnonzero(keep) / fs
    slope, _ = np.polyfit(t, np.log(v[keep]), 1)
    if slope >= 0:
        raise ValueError("signal does not decay")
    return float(-1.0 / slope)
