"""The four-mode probe: paired parametric amplifiers, polarization combiner,
sample and balanced detection.

Stage numbering follows the optical path: stage 2 is the sample plane,
stage 3 the detectors.  Channel A carries -45 degree light (H/V carrier
phase pi) and channel B +45 degree light, so a rotation of both beams moves
their Stokes differences in opposite directions and the difference
N_a - N_b picks up 8 alpha^2 per radian.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
import math

import numpy as np

from .gaussian import (
    AH,
    AV,
    BH,
    BV,
    CANONICAL_MODES,
    GaussianState,
    PASpec,
    Spatial,
    displace,
    loss_channel,
    polarization_rotate,
    two_mode_squeeze,
    vacuum,
)

# Sign of each mode's photon number in N_3,- = (n_AH - n_AV) - (n_BH - n_BV).
OBSERVABLE_SIGNS = {AH: 1.0, AV: -1.0, BH: -1.0, BV: 1.0}
CARRIER_SIGNS = {AH: 1.0, AV: -1.0, BH: 1.0, BV: 1.0}

DEFAULT_MODE_ETA = 0.95
DEFAULT_DETECTOR_QE = 0.96


@dataclass(frozen=True)
class ProbeConfig:
    """Everything needed to build the probe state at every stage.

    ``alpha`` is the real carrier amplitude per mode at the source; alpha**2
    doubles as the photon flux per mode in photons per second when the
    detection chain turns moments into spectra.
    """

    r: float = math.log(2.0)
    alpha: float = 1.0e7
    pump_phase_h: float = 0.0
    pump_phase_v: float = math.pi
    mode_eta: tuple[float, float, float, float] = (DEFAULT_MODE_ETA,) * 4
    detector_qe: float = DEFAULT_DETECTOR_QE
    sample_transmission: float = 1.0

    def __post_init__(self):
        if self.r < 0 or not math.isfinite(self.r):
            raise ValueError("r must be a finite number >= 0")
        if not self.alpha >= 0:
            raise ValueError("alpha must be >= 0")
        eta = tuple(float(e) for e in self.mode_eta)
        if len(eta) != 4:
            raise ValueError("mode_eta needs one transmissivity per mode")
        for e in eta + (self.detector_qe,):
            if not 0.0 <= e <= 1.0:
                raise ValueError(f"efficiency {e} outside [0, 1]")
        if not 0.0 < self.sample_transmission <= 1.0:
            raise ValueError("sample transmission must lie in (0, 1]")
        object.__setattr__(self, "mode_eta", eta)

    @property
    def is_entangled(self) -> bool:
        return self.r > 0

    @property
    def total_efficiency(self) -> float:
        return float(np.mean(self.mode_eta)) * self.detector_qe * self.sample_transmission

    def lossless(self) -> "ProbeConfig":
        return replace(self, mode_eta=(1.0,) * 4, detector_qe=1.0, sample_transmission=1.0)

    def with_photons(self, n_total: float) -> "ProbeConfig":
        """Same optics, carrier rescaled so the sample plane sees ``n_total`` photons."""
        sq = math.sinh(self.r) ** 2
        eta_sum = sum(self.mode_eta)
        a2 = n_total / eta_sum - sq
        if a2 < 0:
            raise ValueError("photon budget below the squeezed-vacuum contribution")
        return replace(self, alpha=math.sqrt(a2))

    def coherent_matched(self) -> "ProbeConfig":
        """The r = 0 probe with the same photon number at the sample plane."""
        n_t = sample_plane_photons(self)
        return replace(self, r=0.0).with_photons(n_t)


def source_state(cfg: ProbeConfig) -> GaussianState:
    """Seeded PA pair after the polarization combiner, before any loss."""
    st = vacuum(4)
    st = two_mode_squeeze(st, PASpec(cfg.r, cfg.pump_phase_h, (AH, BH)))
    st = two_mode_squeeze(st, PASpec(cfg.r, cfg.pump_phase_v, (AV, BV)))
    for m in CANONICAL_MODES:
        st = displace(st, m, CARRIER_SIGNS[m] * cfg.alpha)
    return st


def sample_plane_state(cfg: ProbeConfig) -> GaussianState:
    """Stage 2: the probe as it reaches the chiral sample."""
    st = source_state(cfg)
    for m, eta in zip(CANONICAL_MODES, cfg.mode_eta):
        st = loss_channel(st, m, eta)
    return st


def sample_plane_photons(cfg: ProbeConfig) -> float:
    return sample_plane_state(cfg).total_photons()


def after_sample(state: GaussianState, theta: float, transmission: float = 1.0) -> GaussianState:
    """Rotate both spatial channels by ``theta`` and apply sample absorption."""
    st = polarization_rotate(state, Spatial.A, theta)
    st = polarization_rotate(st, Spatial.B, theta)
    if transmission != 1.0:
        for m in st.labels:
            st = loss_channel(st, m, transmission)
    return st


def detected_state(cfg: ProbeConfig, theta: float) -> GaussianState:
    """Stage 3: what the photodiodes see."""
    st = after_sample(sample_plane_state(cfg), theta, cfg.sample_transmission)
    for m in st.labels:
        st = loss_channel(st, m, cfg.detector_qe)
    return st


def post_sample_efficiency(cfg: ProbeConfig) -> float:
    return cfg.sample_transmission * cfg.detector_qe
