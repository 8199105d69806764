"""Scenario configuration documents.

Configs are YAML (or JSON) mappings validated by pydantic; unknown keys are
rejected so a typo never silently falls back to a default.
"""
from __future__ import annotations

import enum
import json
import math
from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .dsp import NoiseModel
from .errors import ConfigError
from .pipeline import DEFAULT_DETECTOR_QE, DEFAULT_MODE_ETA, ProbeConfig
from .sample import DEFAULT_PATH_LENGTH_DM, DEFAULT_SPECIFIC_ROTATION


class Scenario(str, enum.Enum):
    NOISE_SPECTRUM = "noise-spectrum"
    SNR_VS_ANGLE = "snr-vs-angle"
    CONCENTRATION_SWEEP = "sweep-concentration"
    EE_SWEEP = "sweep-ee"
    SENSITIVITY = "sensitivity"
    VALIDATE = "validate"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _monotone(values: list[float], name: str) -> list[float]:
    if not values:
        raise ValueError(f"{name} must not be empty")
    d = [b - a for a, b in zip(values, values[1:])]
    if not (all(x > 0 for x in d) or all(x < 0 for x in d)):
        raise ValueError(f"{name} must be strictly monotone")
    return values


class ProbeSettings(_Strict):
    r: float = Field(math.log(2.0), ge=0.0, le=3.0, description="squeezing parameter of both PAs")
    alpha: float = Field(1.0e7, gt=0.0, description="carrier amplitude per mode; alpha^2 is photons/s")
    pump_phase_h: float = 0.0
    pump_phase_v: float = math.pi
    mode_eta: list[float] = Field(default_factory=lambda: [DEFAULT_MODE_ETA] * 4, min_length=4, max_length=4)
    detector_qe: float = Field(DEFAULT_DETECTOR_QE, ge=0.0, le=1.0)
    f_mod_hz: float = Field(1.5e6, gt=0.0)
    mod_depth: float = Field(5e-3, gt=0.0)

    @field_validator("mode_eta")
    @classmethod
    def _eta_range(cls, v):
        if any(not 0.0 <= e <= 1.0 for e in v):
            raise ValueError("mode_eta entries must lie in [0, 1]")
        return v

    def probe(self, sample_transmission: float = 1.0) -> ProbeConfig:
        return ProbeConfig(
            r=self.r,
            alpha=self.alpha,
            pump_phase_h=self.pump_phase_h,
            pump_phase_v=self.pump_phase_v,
            mode_eta=tuple(self.mode_eta),
            detector_qe=self.detector_qe,
            sample_transmission=sample_transmission,
        )


class SampleSettings(_Strict):
    specific_rotation: float = Field(
        DEFAULT_SPECIFIC_ROTATION, description="deg mL g^-1 dm^-1; placeholder, not a measured value"
    )
    path_length_dm: float = Field(DEFAULT_PATH_LENGTH_DM, gt=0.0)
    transmission: float = Field(1.0, gt=0.0, le=1.0)
    concentrations: list[float] = Field(
        default_factory=lambda: [0.2, 0.15, 0.1, 0.075, 0.05, 0.025, 0.01],
        description="g/mL of pure L solute",
    )
    ee_grid: list[float] = Field(default_factory=lambda: [0.9, 0.7, 0.5, 0.3, 0.1, 0.05])
    total_conc: float = Field(0.1267, ge=0.0)

    @field_validator("concentrations")
    @classmethod
    def _conc(cls, v):
        _monotone(v, "concentrations")
        if any(c < 0 for c in v):
            raise ValueError("concentrations must be non-negative")
        return v

    @field_validator("ee_grid")
    @classmethod
    def _ee(cls, v):
        _monotone(v, "ee_grid")
        if any(abs(e) > 1 for e in v):
            raise ValueError("ee values must lie in [-1, 1]")
        return v


class NoiseSettings(_Strict):
    squeeze_floor_db: float = Field(-6.02, le=0.0)
    squeeze_bandwidth_hz: float = Field(20e6, gt=0.0)
    lowfreq_corner_hz: float = Field(300e3, gt=0.0)
    spike_center_hz: float = Field(1.0e6, gt=0.0)
    spike_width_hz: float = Field(15e3, gt=0.0)
    spike_height_db: float = Field(10.0, ge=0.0)
    electronic_floor_db: float = -15.0
    detector_bandwidth_hz: float = Field(4e6, gt=0.0)

    def model(self) -> NoiseModel:
        return NoiseModel(**self.model_dump())


class DspSettings(_Strict):
    noise: NoiseSettings = Field(default_factory=NoiseSettings)
    rbw_hz: float = Field(100.0, gt=0.0)
    vbw_hz: float = Field(1.0, gt=0.0)
    sample_rate_hz: float = Field(12e6, gt=0.0)
    noise_band_hz: Optional[list[float]] = Field(
        None, min_length=2, max_length=2, description="[lo, hi]; default f_mod +/- 100 kHz"
    )
    spectrum_band_hz: list[float] = Field(
        default_factory=lambda: [0.6e6, 0.8e6], min_length=2, max_length=2,
        description="band reported by the noise-spectrum scenario",
    )

    @model_validator(mode="after")
    def _bw(self):
        if self.vbw_hz > self.rbw_hz:
            raise ValueError("vbw_hz must not exceed rbw_hz")
        return self


class OutputSettings(_Strict):
    dir: str = "chirasim-out"
    spectra: bool = False


class ScenarioConfig(_Strict):
    scenario: Scenario = Scenario.SENSITIVITY
    seed: int = Field(20250101, ge=0, lt=2**64)
    repetitions: int = Field(5, ge=1)
    probe: ProbeSettings = Field(default_factory=ProbeSettings)
    sample: SampleSettings = Field(default_factory=SampleSettings)
    angles_deg: list[float] = Field(
        default_factory=lambda: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
        description="half-wave-plate axis angles for snr-vs-angle",
    )
    dsp: DspSettings = Field(default_factory=DspSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    @field_validator("angles_deg")
    @classmethod
    def _angles(cls, v):
        return _monotone(v, "angles_deg")

    @model_validator(mode="after")
    def _dsp_vs_probe(self):
        if self.dsp.sample_rate_hz < 4 * self.probe.f_mod_hz:
            raise ValueError("dsp.sample_rate_hz must be at least 4 x probe.f_mod_hz")
        return self

    @property
    def noise_band(self) -> tuple[float, float]:
        if self.dsp.noise_band_hz is not None:
            lo, hi = self.dsp.noise_band_hz
            return float(lo), float(hi)
        f = self.probe.f_mod_hz
        return f - 100e3, f + 100e3


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: not valid {'JSON' if path.suffix == '.json' else 'YAML'}: {exc}") from exc
    return parse_config(data or {}, source=str(path))


def parse_config(data: dict, source: str = "<config>") -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        lines = [f"{source}: invalid configuration"]
        for err in exc.errors():
            loc = ".".join(str(x) for x in err["loc"]) or "<root>"
            lines.append(f"  {loc}: {err['msg']}")
        raise ConfigError("\n".join(lines)) from None


def json_schema() -> dict:
    return ScenarioConfig.model_json_schema()
