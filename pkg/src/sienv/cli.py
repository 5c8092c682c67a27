"""Command-line entry point.

Every setting is a flat key that can come from a ``key = value`` config file
(``#`` starts a comment) or from the matching ``--key`` flag; flags win. A
previous run's ``report.json`` is also accepted as ``--config`` so a run can
be repeated from its echo alone.

Exit status: 0 on success, 1 on usage or input errors, 2 on numerical
failures (non-convergent quadrature, insufficient fringes).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import io
from .errors import NumericalError
from .fringes import fringe_envelope, run_pulse_study
from .measure import dominant_bin, fit_decay
from .model import (
    DEFAULT_SEED,
    FidParams,
    GaussianNoise,
    HarmonicNoise,
    JohnsonNoise,
    NoiseSpec,
    RicianNoise,
    synth_fid,
    synth_noisy_fid,
)
from .pipeline import (
    EnvelopeResult,
    PipelineConfig,
    compare_envelopes,
    extract_envelope,
    hilbert_envelope,
    preprocess,
)
from .signals import RealSignal
from .timescale import scale_padded
from .transform import TransformConfig, forward_discrete, inverse_discrete

log = logging.getLogger("sienv")

COMMANDS = ("synth", "envelope", "transform", "compare", "pulse-study", "timescale-demo")

_fid = FidParams()
_pipe = PipelineConfig()
_noise = NoiseSpec()

# flat key -> default; the default's type drives parsing (None means optional float)
DEFAULTS: dict = {
    "fs": 100.0,
    "duration": 6 * math.pi,
    "noise": True,
    "m0": _fid.m0,
    "alpha": _fid.alpha,
    "omega0": _fid.omega0,
    "t2": _fid.t2,
    "delta_omega0": _fid.delta_omega0,
    "phase0": _fid.phase0,
    "rician_noncentrality": _noise.rician.noncentrality,
    "rician_scale": _noise.rician.scale,
    "rician_amplitude": _noise.rician.amplitude,
    "gaussian_std": _noise.gaussian.std,
    "gaussian_amplitude": _noise.gaussian.amplitude,
    "johnson_temperature_c": _noise.johnson.temperature_c,
    "johnson_resistance_ohm": _noise.johnson.resistance_ohm,
    "johnson_bandwidth_hz": _noise.johnson.bandwidth_hz,
    "harmonic_freq": _noise.harmonic.freq,
    "harmonic_amplitude": _noise.harmonic.amplitude,
    "seed": DEFAULT_SEED,
    "delay_samples": _pipe.delay_samples,
    "remove_mean": _pipe.remove_mean,
    "downsample_factor": _pipe.downsample_factor,
    "transfer_freq": None,
    "transfer_ratio": _pipe.transfer_ratio,
    "refine": _pipe.refine,
    "reprocess_passes": _pipe.reprocess_passes,
    "normalize": _pipe.normalize,
    "method": _pipe.method,
    "pulse_n": 1000,
    "pulse_width": 5,
    "pulse_delay": 100,
    "pulse_transfer_freq": 10.0,
    "scale_factor": 2,
}

PATH_KEYS = ("input", "truth", "external")


class UsageError(Exception):
    pass


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def parse_value(key: str, raw):
    """Coerce ``raw`` to the type of ``DEFAULTS[key]``."""
    default = DEFAULTS[key]
    if not isinstance(raw, str):
        if default is None or isinstance(default, float):
            return None if raw is None else float(raw)
        return type(default)(raw)
    raw = raw.strip()
    if default is None:
        return None if raw.lower() in ("", "none") else float(raw)
    if isinstance(default, bool):
        return _parse_bool(raw)
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def read_config_file(path) -> dict:
    """Read ``key = value`` lines, or the ``config`` block of a report.json."""
    path = Path(path)
    if not path.exists():
        raise UsageError(f"config file not found: {path}")
    text = path.read_text()
    if path.suffix == ".json":
        data = json.loads(text)
        return dict(data.get("config", data))
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


@dataclass
class RunConfig:
    command: str
    outdir: Path = Path("out")
    params: dict = field(default_factory=lambda: dict(DEFAULTS))
    input: str | None = None
    truth: str | None = None
    external: list = field(default_factory=list)

    @property
    def seed(self) -> int:
        return self.params["seed"]

    def echo(self) -> dict:
        """Every setting that can influence the outputs."""
        cfg = dict(self.params)
        cfg["input"] = self.input
        cfg["truth"] = self.truth
        cfg["external"] = list(self.external)
        return cfg

    def fid(self) -> FidParams:
        p = self.params
        return FidParams(p["m0"], p["alpha"], p["omega0"], p["t2"], p["delta_omega0"], p["phase0"])

    def noise(self) -> NoiseSpec:
        p = self.params
        return NoiseSpec(
            RicianNoise(p["rician_noncentrality"], p["rician_scale"], p["rician_amplitude"]),
            GaussianNoise(p["gaussian_std"], p["gaussian_amplitude"]),
            JohnsonNoise(p["johnson_temperature_c"], p["johnson_resistance_ohm"], p["johnson_bandwidth_hz"]),
            HarmonicNoise(p["harmonic_freq"], p["harmonic_amplitude"]),
            p["seed"],
        )

    def pipeline(self) -> PipelineConfig:
        p = self.params
        return PipelineConfig(
            delay_samples=p["delay_samples"],
            remove_mean=p["remove_mean"],
            downsample_factor=p["downsample_factor"],
            transfer_freq=p["transfer_freq"],
            transfer_ratio=p["transfer_ratio"],
            refine=p["refine"],
            reprocess_passes=p["reprocess_passes"],
            normalize=p["normalize"],
            method=p["method"],
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sienv", description="Envelope extraction with a zoomed discrete transform.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="key = value file or a previous report.json")
    parser.add_argument("--outdir", default=None, help="output directory (default: out)")
    parser.add_argument("--input", help="signal CSV (time_s,voltage_v); synthesized when omitted")
    parser.add_argument("--truth", help="reference envelope CSV for compare")
    parser.add_argument(
        "--external", action="append", default=None, metavar="LABEL=PATH", help="extra envelope CSV for compare"
    )
    for key in DEFAULTS:
        parser.add_argument("--" + key.replace("_", "-"), dest=key, default=None, metavar="VALUE")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def config_from_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    params = dict(DEFAULTS)
    file_cfg = read_config_file(ns.config) if ns.config else {}
    paths = {k: file_cfg.pop(k, None) for k in PATH_KEYS}
    for key, raw in file_cfg.items():
        if key not in DEFAULTS:
            raise UsageError(f"unknown config key {key!r}")
        params[key] = _coerce(key, raw)
    for key in DEFAULTS:
        raw = getattr(ns, key)
        if raw is not None:
            params[key] = _coerce(key, raw)
    external = ns.external if ns.external is not None else (paths["external"] or [])
    if isinstance(external, str):
        external = [e for e in external.split(";") if e]
    cfg = RunConfig(
        command=ns.command,
        outdir=Path(ns.outdir or "out"),
        params=params,
        input=ns.input or paths["input"],
        truth=ns.truth or paths["truth"],
        external=list(external),
    )
    for key in ("input", "truth"):
        p = getattr(cfg, key)
        if p is not None and not Path(p).exists():
            raise UsageError(f"{key} file not found: {p}")
    for item in cfg.external:
        if "=" not in item:
            raise UsageError(f"--external expects LABEL=PATH, got {item!r}")
        if not Path(item.split("=", 1)[1]).exists():
            raise UsageError(f"external file not found: {item}")
    return cfg


def _coerce(key, raw):
    try:
        return parse_value(key, raw)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad value for {key}: {raw!r} ({exc})") from exc


# ---------------------------------------------------------------- commands


def _signal(cfg: RunConfig) -> tuple[RealSignal, RealSignal | None]:
    """The input signal and, when synthesized, its clean counterpart."""
    if cfg.input:
        return io.load_signal(cfg.input), None
    p = cfg.params
    noisy, clean = synth_noisy_fid(cfg.fid(), cfg.noise(), p["fs"], p["duration"])
    return (noisy if p["noise"] else clean), clean


def _name(cfg: RunConfig, label: str, suffix: str = ".csv") -> Path:
    return cfg.outdir / io.artifact_name(label, cfg.echo(), suffix)


def _finish(cfg: RunConfig, results=(), metrics=(), artifacts=(), details=None, fringe_report=None):
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    io.save_results(
        results,
        cfg.outdir,
        command=cfg.command,
        config=cfg.echo(),
        seed=cfg.seed,
        metrics=metrics,
        fringe_report=fringe_report,
        artifacts=artifacts,
        details=details,
        timestamp=stamp,
    )


def cmd_synth(cfg: RunConfig):
    p = cfg.params
    noisy, clean = synth_noisy_fid(cfg.fid(), cfg.noise(), p["fs"], p["duration"])
    fid = noisy if p["noise"] else clean
    truth = clean.with_samples(cfg.fid().envelope(clean.times))
    arts = [
        io.save_signal(fid, _name(cfg, "fid")),
        io.save_signal(clean, _name(cfg, "fid-clean")),
        io.save_signal(truth, _name(cfg, "envelope-truth")),
    ]
    _finish(cfg, artifacts=arts, details={"samples": len(fid), "fs": fid.fs})


def cmd_envelope(cfg: RunConfig):
    x, _ = _signal(cfg)
    res = extract_envelope(x, cfg.pipeline())
    arts = [io.save_signal(res.carrier, _name(cfg, io.safe_label(res.method_label) + "-carrier"))]
    metrics = compare_envelopes([res], _truth(cfg, res.envelope))
    _finish(cfg, [res], metrics, arts, details={"samples": len(res.envelope), "fs": res.envelope.fs})


def cmd_transform(cfg: RunConfig):
    x, _ = _signal(cfg)
    pcfg = cfg.pipeline()
    tcfg = TransformConfig(pcfg.transfer_frequency(x.fs), x.fs, len(x))
    method = pcfg.method_for(len(x))
    spec = forward_discrete(x, tcfg, method)
    analytic = inverse_discrete(spec, method, t0=x.t0)
    rows = zip(range(len(spec)), spec.frequencies, spec.coeffs.real, spec.coeffs.imag)
    arts = [
        io.save_table(["k", "freq_hz", "real", "imag"], rows, _name(cfg, "spectrum")),
        io.save_signal(analytic, _name(cfg, "analytic")),
    ]
    details = {"f_o": tcfg.f_o, "f_s": tcfg.f_s, "n": tcfg.n, "ratio": tcfg.ratio, "delta_psi": tcfg.delta_psi}
    _finish(cfg, artifacts=arts, details=details)


def _truth(cfg: RunConfig, like: RealSignal) -> RealSignal | None:
    """Reference envelope: a --truth CSV, or the closed form for synthesized input."""
    if cfg.truth:
        return io.load_signal(cfg.truth)
    if cfg.input:
        return None
    return like.with_samples(cfg.fid().envelope(like.times))


def cmd_compare(cfg: RunConfig):
    x, _ = _signal(cfg)
    pcfg = cfg.pipeline()
    base = extract_envelope(x, replace(pcfg, refine=False))
    refined = extract_envelope(x, replace(pcfg, refine=True))
    hil = hilbert_envelope(preprocess(x, pcfg))
    candidates = [base, refined, hil]
    for item in cfg.external:
        label, path = item.split("=", 1)
        candidates.append(EnvelopeResult.from_envelope(io.load_signal(path), label))
    truth = _truth(cfg, base.envelope)
    metrics = compare_envelopes(candidates, truth)
    rows = [(m.method, m.rmse if m.rmse is not None else "", m.correlation if m.correlation is not None else "",
             m.smoothness, m.n) for m in metrics]
    arts = [io.save_table(["method", "rmse", "correlation", "smoothness", "n"], rows, _name(cfg, "metrics"))]
    if truth is not None and not cfg.truth:
        arts.append(io.save_signal(truth, _name(cfg, "envelope-truth")))
    _finish(cfg, candidates, metrics, arts)


def cmd_pulse_study(cfg: RunConfig):
    p = cfg.params
    study = run_pulse_study(p["fs"], p["pulse_n"], p["pulse_width"], p["pulse_delay"], p["pulse_transfer_freq"])
    arts = []
    for sc in study.scenarios:
        spec = sc.spectrum
        rows = zip(
            range(len(spec)), spec.frequencies, spec.coeffs.real, spec.coeffs.imag,
            np.abs(spec.coeffs.real), fringe_envelope(spec),
        )
        header = ["k", "freq_hz", "real", "imag", "abs_real", "fringe_envelope"]
        arts.append(io.save_table(header, rows, _name(cfg, "spectrum-" + io.safe_label(sc.label))))
    fringes = _name(cfg, "fringes", ".json")
    fringes.write_text(json.dumps(study.as_dict(), indent=2, sort_keys=True) + "\n")
    arts.append(fringes)
    _finish(cfg, artifacts=arts, details=study.as_dict())


def cmd_timescale_demo(cfg: RunConfig):
    p = cfg.params
    m = p["scale_factor"]
    params = cfg.fid()
    lab = synth_fid(params, "laboratory", p["fs"], p["duration"]).real()
    rot = synth_fid(params, "rotating", p["fs"], p["duration"]).real()
    lab_s, rot_s = scale_padded(lab, m), scale_padded(rot, m)
    arts = [
        io.save_signal(lab, _name(cfg, "laboratory")),
        io.save_signal(lab_s, _name(cfg, "laboratory-scaled")),
        io.save_signal(rot, _name(cfg, "rotating")),
        io.save_signal(rot_s, _name(cfg, "rotating-scaled")),
    ]
    details = {
        "scale_factor": m,
        "laboratory_dominant_bin": dominant_bin(lab),
        "laboratory_scaled_dominant_bin": dominant_bin(lab_s),
        "rotating_decay_s": fit_decay(rot),
        "rotating_scaled_decay_s": fit_decay(rot_s),
    }
    _finish(cfg, artifacts=arts, details=details)


HANDLERS = {
    "synth": cmd_synth,
    "envelope": cmd_envelope,
    "transform": cmd_transform,
    "compare": cmd_compare,
    "pulse-study": cmd_pulse_study,
    "timescale-demo": cmd_timescale_demo,
}


def run_command(cfg: RunConfig) -> int:
    try:
        cfg.outdir.mkdir(parents=True, exist_ok=True)
        HANDLERS[cfg.command](cfg)
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return 2
    except (ValueError, OSError, UsageError) as exc:
        log.error("%s", exc)
        return 1
    return 0


class _StderrHandler(logging.StreamHandler):
    # looks sys.stderr up on every record so redirection after setup is honoured
    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


def _setup_logging(verbose: bool) -> None:
    if not any(isinstance(h, _StderrHandler) for h in log.handlers):
        handler = _StderrHandler()
        handler.setFormatter(logging.Formatter("sienv: %(levelname)s: %(message)s"))
        log.addHandler(handler)
        log.propagate = False
    log.setLevel(logging.INFO if verbose else logging.WARNING)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    _setup_logging("-v" in argv or "--verbose" in argv)
    try:
        cfg = config_from_args(argv)
    except UsageError as exc:
        log.error("%s", exc)
        return 1
    except (ValueError, json.JSONDecodeError) as exc:
        log.error("bad configuration: %s", exc)
        return 1
    log.info("running %s into %s", cfg.command, cfg.outdir)
    return run_command(cfg)


if __name__ == "__main__":
    sys.exit(main())
