import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chirasim.errors import UndefinedEEError
from chirasim.sample import ChiralSample, enantiomeric_excess, rotation_angle, sample_from_ee


def test_biot_law():
    s = ChiralSample(specific_rotation=12.0, conc_L=0.1, path_length=2.0)
    assert rotation_angle(s) == pytest.approx(math.radians(2.4))


def test_racemic_gives_zero_rotation():
    assert rotation_angle(ChiralSample(conc_L=0.05, conc_D=0.05)) == 0.0


@given(st.floats(0, 1), st.floats(0, 1), st.floats(-50, 50), st.floats(0.1, 10))
def test_mirror_antisymmetry(cl, cd, spec_rot, length):
    s = ChiralSample(spec_rot, cl, cd, length)
    assert rotation_angle(s.mirrored()) == -rotation_angle(s)


@given(st.floats(-1, 1), st.floats(1e-3, 1.0))
def test_ee_roundtrip(ee, total):
    assert enantiomeric_excess(sample_from_ee(ee, total)) == pytest.approx(ee, abs=1e-12)


def test_undefined_ee():
    with pytest.raises(UndefinedEEError):
        enantiomeric_excess(ChiralSample())


def test_ninety_percent_ee_with_dominant_012():
    s = sample_from_ee(0.9, 0.12 / 0.95)
    assert s.conc_L == pytest.approx(0.12)
    assert enantiomeric_excess(s) == pytest.approx(0.9, abs=1e-12)


@pytest.mark.parametrize("kw", [{"conc_L": -1.0}, {"path_length": 0.0}, {"transmission": 0.0}])
def test_invalid_samples(kw):
    with pytest.raises(ValueError):
        ChiralSample(**kw)


def test_ee_outside_range():
    with pytest.raises(ValueError):
        sample_from_ee(1.2, 0.1)
