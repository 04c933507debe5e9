import math

import numpy as np
import pytest

from oscillab.core import transition_probability_closed
from oscillab.rig import (
    CrystalDoublet,
    PotentiometerCalibration,
    RigState,
    clamp_position,
    clamp_rotation,
    delta_path_length,
    mixing_angle,
    path_length,
    position_to_voltage,
    potentiometer_to_position,
)


def test_path_length_at_zero():
    d = CrystalDoublet()
    assert path_length(RigState(0.0, 0.0), d) == pytest.approx(10e-3)
    assert delta_path_length(RigState(0.0, 0.0), d) == 0.0


def test_full_travel_delta_matches_reference_value():
    d = CrystalDoublet()
    dl = delta_path_length(RigState(5.5, 0.0), d)
    assert dl == pytest.approx(2 * 5.5e-3 * math.tan(math.radians(0.2)), rel=1e-12)
    assert dl == pytest.approx(38e-6, rel=0.02)  # rounded reference figure
    assert dl * 1e6 == pytest.approx(38.4, abs=0.05)


def test_travel_spans_about_3p5_oscillation_lengths():
    d = CrystalDoublet()
    losc = 633e-9 / d.birefringence
    ratio = delta_path_length(RigState(5.5, 0.0), d) / losc
    assert ratio == pytest.approx(3.46, abs=0.01)
    assert ratio == pytest.approx(3.5, rel=0.03)


def test_path_length_affine_slope():
    d = CrystalDoublet()
    s = np.linspace(0.0, 5.5, 23)
    lengths = np.array([path_length(RigState(x, 0.0), d) for x in s])
    slopes = np.diff(lengths) / (np.diff(s) * 1e-3)
    assert np.allclose(slopes, 2 * math.tan(math.radians(0.2)), rtol=1e-12)


def test_position_clamping_flags():
    d = CrystalDoublet()
    assert clamp_position(2.0, d) == (2.0, False)
    assert clamp_position(-1.0, d) == (0.0, True)
    assert clamp_position(9.0, d) == (5.5, True)
    # out-of-range state still yields the end-stop path length
    assert path_length(RigState(99.0, 0.0), d) == path_length(RigState(5.5, 0.0), d)


def test_rotation_clamping():
    assert clamp_rotation(10.0) == (10.0, False)
    assert clamp_rotation(-60.0) == (-45.0, True)
    assert clamp_rotation(50.0) == (45.0, True)


def test_mixing_angle_standard_orientation():
    assert mixing_angle(RigState(0.0, 0.0)).degrees == pytest.approx(45.0)


def test_mixing_angle_alignment_kills_oscillation():
    theta = mixing_angle(RigState(0.0, 45.0))
    assert theta.degrees == pytest.approx(0.0, abs=1e-12)
    assert transition_probability_closed(theta, math.pi).p_appear == pytest.approx(0.0)


def test_mixing_angle_15_degree_rotation():
    theta = mixing_angle(RigState(0.0, 15.0))
    assert theta.degrees == pytest.approx(30.0)
    res = transition_probability_closed(theta, math.pi)
    assert res.p_appear == pytest.approx(0.75, abs=1e-12)


def test_mixing_angle_range_over_admissible_rotations():
    for rho in np.linspace(-45.0, 45.0, 91):
        deg = mixing_angle(RigState(0.0, float(rho))).degrees
        assert 0.0 <= deg <= 90.0


def test_doublet_validation():
    with pytest.raises(ValueError):
        CrystalDoublet(wedge_angle_deg=0.0)
    with pytest.raises(ValueError):
        CrystalDoublet(wedge_angle_deg=7.0)
    with pytest.raises(ValueError):
        CrystalDoublet(travel_mm=-1.0)
    with pytest.raises(ValueError):
        CrystalDoublet(base_thickness_mm=0.0)
    with pytest.raises(ValueError):
        CrystalDoublet(n_ord=1.5, n_extra=1.5)


def test_potentiometer_basic_points():
    d = CrystalDoublet()
    cal = PotentiometerCalibration(v0=0.5, slope=1.8)
    assert potentiometer_to_position(0.5, cal, d) == (0.0, False)
    s, clamped = potentiometer_to_position(0.5 + 1.8 * 5.5, cal, d)
    assert s == pytest.approx(5.5)
    assert not clamped


def test_potentiometer_round_trip():
    d = CrystalDoublet()
    cal = PotentiometerCalibration(v0=-0.2, slope=0.91)
    for s in np.linspace(0.0, 5.5, 17):
        v = position_to_voltage(float(s), cal)
        back, clamped = potentiometer_to_position(v, cal, d)
        assert not clamped
        assert back == pytest.approx(float(s), abs=1e-9)


def test_potentiometer_clamps_out_of_range_voltage():
    d = CrystalDoublet()
    cal = PotentiometerCalibration(v0=0.0, slope=1.0)
    assert potentiometer_to_position(-3.0, cal, d) == (0.0, True)
    assert potentiometer_to_position(50.0, cal, d) == (5.5, True)


def test_degenerate_calibration_rejected():
    with pytest.raises(ValueError):
        PotentiometerCalibration(v0=0.0, slope=0.0)
