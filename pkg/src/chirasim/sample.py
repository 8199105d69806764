"""Chiral solutions: Biot's-law rotation and enantiomeric excess.

Specific rotation is taken in deg mL g^-1 dm^-1 and angles leave this module
in radians.  Positive angles belong to L-dominant samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import UndefinedEEError

# placeholder; override per solute in the scenario config
DEFAULT_SPECIFIC_ROTATION = 12.0
DEFAULT_PATH_LENGTH_DM = 3.5


@dataclass(frozen=True)
class ChiralSample:
    specific_rotation: float = DEFAULT_SPECIFIC_ROTATION
    conc_L: float = 0.0
    conc_D: float = 0.0
    path_length: float = DEFAULT_PATH_LENGTH_DM
    transmission: float = 1.0

    def __post_init__(self):
        if self.conc_L < 0 or self.conc_D < 0:
            raise ValueError("concentrations must be non-negative")
        if not self.path_length > 0:
            raise ValueError("path length must be positive")
        if not 0.0 < self.transmission <= 1.0:
            raise ValueError("sample transmission must lie in (0, 1]")

    def mirrored(self) -> "ChiralSample":
        return ChiralSample(self.specific_rotation, self.conc_D, self.conc_L, self.path_length, self.transmission)


def rotation_angle(sample: ChiralSample) -> float:
    deg = sample.specific_rotation * (sample.conc_L - sample.conc_D) * sample.path_length
    return math.radians(deg)


def enantiomeric_excess(sample: ChiralSample) -> float:
    total = sample.conc_L + sample.conc_D
    if total <= 0:
        raise UndefinedEEError("enantiomeric excess is undefined without solute")
    return (sample.conc_L - sample.conc_D) / total


def sample_from_ee(
    ee: float,
    total_conc: float,
    specific_rotation: float = DEFAULT_SPECIFIC_ROTATION,
    path_length: float = DEFAULT_PATH_LENGTH_DM,
    transmission: float = 1.0,
) -> ChiralSample:
    if not -1.0 <= ee <= 1.0:
        raise ValueError(f"enantiomeric excess must lie in [-1, 1], got {ee}")
    if total_conc < 0:
        raise ValueError("total concentration must be non-negative")
    return ChiralSample(
        specific_rotation,
        total_conc * (1 + ee) / 2,
        total_conc * (1 - ee) / 2,
        path_length,
        transmission,
    )
