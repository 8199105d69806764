"""Detector time series and a swept-analyzer style spectrum estimate.

Traces are in normalized units: the shot noise of a coherent probe with the
same photon flux has a one-sided PSD of 1 per Hz (0 dB).  Noise is colored by
shaping white Gaussian noise in the frequency domain; the modulation tone is
deterministic, so squeezing changes the floor and leaves the tone alone.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import signal, stats

from .pipeline import ProbeConfig
from .polarimetry import probe_observable
from .sampling import substream

MAX_SAMPLES = 1 << 26
HANN_ENBW_BINS = 1.5
TONE_GUARD_BINS = 2
MIN_POWER = 1e-30


@dataclass(frozen=True)
class NoiseModel:
    """Phenomenological noise spectrum of the squeezed source.

    ``squeeze_floor_db`` is the squeezing at low frequency, rolling off as a
    Lorentzian of half-width ``squeeze_bandwidth_hz``.  Technical noise is an
    excess that grows as 1/f below ``lowfreq_corner_hz`` and vanishes above
    it.  The pump spike is a Gaussian bump that lifts the local spectrum by
    ``spike_height_db``.
    """

    squeeze_floor_db: float = -6.02
    squeeze_bandwidth_hz: float = 20e6
    lowfreq_corner_hz: float = 300e3
    spike_center_hz: float = 1.0e6
    spike_width_hz: float = 15e3
    spike_height_db: float = 10.0
    electronic_floor_db: float = -15.0
    detector_bandwidth_hz: float = 4e6

    def __post_init__(self):
        for name in (
            "squeeze_bandwidth_hz",
            "lowfreq_corner_hz",
            "spike_center_hz",
            "spike_width_hz",
            "detector_bandwidth_hz",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.squeeze_floor_db > 0:
            raise ValueError("squeeze_floor_db must be <= 0")
        if self.spike_height_db < 0:
            raise ValueError("spike_height_db must be >= 0")

    def spike_band(self, widths: float = 4.0) -> tuple[float, float]:
        half = widths * self.spike_width_hz
        return self.spike_center_hz - half, self.spike_center_hz + half

    def unsqueezed(self) -> "NoiseModel":
        return replace(self, squeeze_floor_db=0.0)


def _technical(model: NoiseModel, f):
    return np.clip(model.lowfreq_corner_hz / f - 1.0, 0.0, None)


def _squeezed_floor(model: NoiseModel, f):
    floor = 10 ** (model.squeeze_floor_db / 10)
    return 1.0 - (1.0 - floor) / (1.0 + (f / model.squeeze_bandwidth_hz) ** 2)


def squeezing_psd(model: NoiseModel, freq_hz):
    """Source noise relative to the shot-noise level (1 = SNL) at ``freq_hz``."""
    f = np.asarray(freq_hz, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequencies must be positive")
    fc = model.spike_center_hz
    base = _squeezed_floor(model, f) + _technical(model, f)
    base_c = _squeezed_floor(model, fc) + _technical(model, fc)
    bump = (10 ** (model.spike_height_db / 10) - 1.0) * base_c
    spike = bump * np.exp(-0.5 * ((f - fc) / model.spike_width_hz) ** 2)
    out = base + spike
    return float(out) if out.ndim == 0 else out


def detected_noise_psd(model: NoiseModel, probe: ProbeConfig, freq_hz, electronic: bool = True):
    """Noise PSD at the detector in SNL units.

    Losses admix vacuum: a source spectrum S becomes eta*S + (1 - eta).  A
    coherent probe (r = 0) sees the unsqueezed spectrum.
    """
    eta = probe.total_efficiency
    src = squeezing_psd(model if probe.is_entangled else model.unsqueezed(), freq_hz)
    out = eta * np.asarray(src) + (1.0 - eta)
    if electronic:
        out = out + 10 ** (model.electronic_floor_db / 10)
    return out


@dataclass(frozen=True)
class DetectionTrace:
    samples: np.ndarray
    sample_rate_hz: float
    duration_s: float
    seed: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.array(self.samples, dtype=float, copy=True)
        if s.ndim != 1:
            raise ValueError("trace samples must be one-dimensional")
        if len(s) != round(self.sample_rate_hz * self.duration_s):
            raise ValueError("trace length does not match sample_rate * duration")
        if not np.all(np.isfinite(s)):
            raise ValueError("trace contains non-finite samples")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class Spectrum:
    freqs_hz: np.ndarray
    power_db: np.ndarray
    rbw_hz: float
    vbw_hz: float
    segments: int

    @property
    def enbw_hz(self) -> float:
        return HANN_ENBW_BINS * self.rbw_hz

    @property
    def power(self) -> np.ndarray:
        return 10 ** (self.power_db / 10)

    @property
    def psd_db(self) -> np.ndarray:
        """Per-bin power divided by the equivalent noise bandwidth."""
        return self.power_db - 10 * math.log10(self.enbw_hz)

    def band(self, lo: float, hi: float) -> np.ndarray:
        return (self.freqs_hz >= lo) & (self.freqs_hz <= hi)


def config_hash(payload: dict) -> str:
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def tone_amplitude(probe: ProbeConfig, theta: float, mod_depth: float) -> float:
    """Peak tone amplitude in normalized units for a rotation ``theta``.

    The chiral mean signal (photons/s when alpha**2 is a flux) is scaled by
    the modulation depth and divided by sqrt(2 * shot-noise variance) of the
    coherent probe with the same sample-plane flux.
    """
    coh = probe if not probe.is_entangled else probe.coherent_matched()
    snl_var = probe_observable(coh, 0.0).variance
    if snl_var <= 0:
        raise ValueError("probe carries no light")
    return mod_depth * probe_observable(probe, theta).mean / math.sqrt(2.0 * snl_var)


def synthesize_trace(
    probe: ProbeConfig,
    sample_theta: float,
    model: NoiseModel | None = None,
    f_mod: float = 1.5e6,
    mod_depth: float = 5e-3,
    duration: float = 0.01,
    sample_rate: float = 12e6,
    seed: int = 0,
    *,
    max_samples: int = MAX_SAMPLES,
    stream: tuple[int, ...] = (),
) -> DetectionTrace:
    """Difference-channel photocurrent with a rotation tone at ``f_mod``.

    ``stream`` extends the seed into a substream key so that repetitions of
    one configuration draw independent noise.
    """
    model = NoiseModel() if model is None else model
    if sample_rate < 4 * f_mod:
        raise ValueError(f"sample rate {sample_rate:g} Hz must be at least 4 x f_mod ({4 * f_mod:g} Hz)")
    if f_mod <= 0:
        raise ValueError("modulation frequency must be positive")
    n = round(sample_rate * duration)
    if n < 2:
        raise ValueError("trace too short")
    if n > max_samples:
        raise ValueError(f"trace of {n} samples exceeds the {max_samples}-sample memory guard")

    rng = substream(seed, *stream)
    freqs = np.fft.rfftfreq(n, 1.0 / sample_rate)
    shape = np.empty_like(freqs)
    shape[1:] = np.sqrt(detected_noise_psd(model, probe, freqs[1:], electronic=False))
    shape[0] = 0.0
    white_sigma = math.sqrt(sample_rate / 2.0)
    noise = np.fft.irfft(np.fft.rfft(rng.standard_normal(n)) * shape, n) * white_sigma
    electronic = rng.standard_normal(n) * white_sigma * 10 ** (model.electronic_floor_db / 20)

    t = np.arange(n) / sample_rate
    amp = tone_amplitude(probe, sample_theta, mod_depth)
    samples = amp * np.sin(2 * np.pi * f_mod * t) + noise + electronic
    meta = {
        "config_hash": config_hash(
            {
                "probe": asdict(probe),
                "model": asdict(model),
                "theta": sample_theta,
                "f_mod": f_mod,
                "mod_depth": mod_depth,
                "stream": list(stream),
            }
        ),
        "tone_amplitude": amp,
        "f_mod_hz": f_mod,
    }
    return DetectionTrace(samples, float(sample_rate), float(duration), int(seed), meta)


def spectrum(trace: DetectionTrace, rbw_hz: float, vbw_hz: float) -> Spectrum:
    """Averaged Hann-windowed periodogram with bin spacing ``rbw_hz``.

    Video filtering is emulated by averaging rbw/vbw successive segment
    powers (fewer if the trace is short).  A sine of amplitude A centred on a
    bin reads A**2 / 2.
    """
    fs = trace.sample_rate_hz
    if not rbw_hz > 0 or not vbw_hz > 0:
        raise ValueError("rbw and vbw must be positive")
    if vbw_hz > rbw_hz:
        raise ValueError("vbw must not exceed rbw")
    nperseg = round(fs / rbw_hz)
    if abs(nperseg * rbw_hz - fs) > 1e-9 * fs:
        raise ValueError(f"rbw {rbw_hz:g} Hz does not divide the sample rate {fs:g} Hz")
    if len(trace) < nperseg:
        raise ValueError(
            f"trace of {len(trace)} samples is too short for rbw {rbw_hz:g} Hz ({nperseg} needed)"
        )
    n_seg = max(1, min(round(rbw_hz / vbw_hz), len(trace) // nperseg))
    x = trace.samples[: n_seg * nperseg]
    f, p = signal.welch(
        x,
        fs=fs,
        window="hann",
        nperseg=nperseg,
        noverlap=0,
        detrend=False,
        scaling="spectrum",
        average="mean",
    )
    return Spectrum(f, 10 * np.log10(np.maximum(p, MIN_POWER)), float(rbw_hz), float(vbw_hz), n_seg)


def median_bias(segments: int) -> float:
    """Median over mean of a bin power averaged over ``segments`` periodograms."""
    return float(stats.gamma.median(segments, scale=1.0 / segments))


def noise_level(spec: Spectrum, mask) -> float:
    """Mean noise power per bin, estimated robustly from the median."""
    return float(np.median(spec.power[mask])) / median_bias(spec.segments)


def tone_and_noise(spec: Spectrum, f_signal: float, noise_band: tuple[float, float]) -> tuple[float, float]:
    """Linear tone-bin power and bias-corrected median noise-bin power."""
    f = spec.freqs_hz
    if not f[0] <= f_signal <= f[-1]:
        raise ValueError(f"signal frequency {f_signal:g} Hz outside the spectrum")
    k0 = int(np.argmin(np.abs(f - f_signal)))
    lo, hi = noise_band
    idx = np.arange(len(f))
    mask = (f >= lo) & (f <= hi) & (np.abs(idx - k0) > TONE_GUARD_BINS)
    if not mask.any():
        raise ValueError("noise band contains no usable bins")
    return float(spec.power[k0]), noise_level(spec, mask)


def snr_at(spec: Spectrum, f_signal: float, noise_band: tuple[float, float]) -> float:
    """Tone power above the noise floor, relative to the floor, in dB.

    The bias-corrected median noise power is subtracted from the tone bin before taking the
    ratio, so 0 dB means the signal equals the noise.
    """
    tone, noise = tone_and_noise(spec, f_signal, noise_band)
    return 10 * math.log10(max(tone / noise - 1.0, 1e-12))


# ---------------------------------------------------------------------------
# file formats


def write_spectrum_csv(spec: Spectrum, path) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            fh.write("freq_hz,power_db\n")
            for f, p in zip(spec.freqs_hz, spec.power_db):
                fh.write(f"{float(f)!r},{float(p)!r}\n")
    except OSError as exc:
        raise OSError(f"cannot write spectrum to {path}: {exc}") from exc
    return path


def read_spectrum_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


def write_trace(trace: DetectionTrace, path) -> tuple[Path, Path]:
    """Write samples as little-endian float64 plus a JSON sidecar."""
    path = Path(path)
    bin_path = path.with_suffix(".f64")
    side = path.with_suffix(".json")
    try:
        trace.samples.astype("<f8").tofile(bin_path)
        side.write_text(
            json.dumps(
                {
                    "sample_rate": trace.sample_rate_hz,
                    "duration": trace.duration_s,
                    "seed": trace.seed,
                    "config_hash": trace.metadata.get("config_hash", ""),
                    "samples": len(trace),
                    "dtype": "<f8",
                },
                indent=2,
            )
        )
    except OSError as exc:
        raise OSError(f"cannot write trace to {path}: {exc}") from exc
    return bin_path, side


def read_trace(path) -> DetectionTrace:
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    samples = np.fromfile(path.with_suffix(".f64"), dtype="<f8")
    return DetectionTrace(
        samples,
        meta["sample_rate"],
        meta["duration"],
        meta["seed"],
        {"config_hash": meta.get("config_hash", "")},
    )
