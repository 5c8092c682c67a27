"""Envelope extraction for NMR FID and spin-echo signals with a zoomed discrete transform."""

from .errors import InsufficientFringesError, NumericalError, ObserverError, QuadratureError
from .fringes import FringeReport, detect_fringes, fringe_spacing_model, recover_parameters, run_pulse_study
from .model import (
    FidParams,
    NoiseSpec,
    add_signals,
    gen_noise,
    lorentzian_density,
    synth_fid,
    synth_noisy_fid,
    synth_rect_pulse,
)
from .pipeline import (
    EnvelopeResult,
    PipelineConfig,
    compare_envelopes,
    extract_envelope,
    hilbert_envelope,
    preprocess,
    refine_envelope,
)
from .signals import ComplexSignal, RealSignal
from .timescale import scale_time, zero_pad
from .transform import (
    Spectrum,
    TransformConfig,
    continuous_closed_form,
    continuous_quadrature_oracle,
    envelope_abs,
    forward_discrete,
    inverse_discrete,
    si_analytic,
)

__version__ = "0.1.0"
