"""Geometry and mechanics of the crystal doublet, manipulator and table.

Maps the two rig controls -- manipulator position s and table rotation
rho -- to the physics inputs: path length through birefringent material
and mixing angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import MixingAngle

__all__ = [
    "CrystalDoublet",
    "RigState",
    "PotentiometerCalibration",
    "ROTATION_LIMIT_DEG",
    "clamp_position",
    "clamp_rotation",
    "path_length",
    "delta_path_length",
    "mixing_angle",
    "potentiometer_to_position",
    "position_to_voltage",
]

ROTATION_LIMIT_DEG = 45.0


@dataclass(frozen=True)
class CrystalDoublet:
    """Trapezoidal crystal pair: two wedged crystals translated oppositely.

    Moving each crystal by s changes the total path through birefringent
    material by 2*s*tan(wedge) while the crystal faces stay parallel, so
    the beam is not deflected.  base_thickness_mm is the nominal path at
    s = 0; it shifts the interference phase but not the oscillation period.
    """

    wedge_angle_deg: float = 0.2
    travel_mm: float = 5.5
    base_thickness_mm: float = 10.0
    n_ord: float = 1.552
    n_extra: float = 1.609

    def __post_init__(self):
        if not 0.0 < self.wedge_angle_deg < 5.0:
            raise ValueError(f"wedge angle out of range (0, 5) deg: {self.wedge_angle_deg}")
        if self.travel_mm <= 0:
            raise ValueError(f"travel must be positive, got {self.travel_mm}")
        if self.base_thickness_mm <= 0:
            raise ValueError(f"base thickness must be positive, got {self.base_thickness_mm}")
        if self.n_extra == self.n_ord:
            raise ValueError("indistinguishable indices: n_extra == n_ord")

    @property
    def birefringence(self) -> float:
        """|n_extra - n_ord|, the index difference driving the phase."""
        return abs(self.n_extra - self.n_ord)


@dataclass(frozen=True)
class RigState:
    """Manipulator position s [mm] and table rotation rho [deg]."""

    position_mm: float = 0.0
    table_rotation_deg: float = 0.0


@dataclass(frozen=True)
class PotentiometerCalibration:
    """Linear readout model: voltage = v0 + slope * position."""

    v0: float
    slope: float  # volts per mm

    def __post_init__(self):
        if self.slope == 0:
            raise ValueError("degenerate potentiometer calibration: slope = 0")


def clamp_position(position_mm: float, doublet: CrystalDoublet) -> tuple[float, bool]:
    """Clamp s to the manipulator travel, mirroring a physical end stop."""
    clamped = min(max(position_mm, 0.0), doublet.travel_mm)
    return clamped, clamped != position_mm


def clamp_rotation(rotation_deg: float) -> tuple[float, bool]:
    """Clamp the table rotation to its +-45 degree range."""
    clamped = min(max(rotation_deg, -ROTATION_LIMIT_DEG), ROTATION_LIMIT_DEG)
    return clamped, clamped != rotation_deg


def path_length(rig: RigState, doublet: CrystalDoublet) -> float:
    """Geometric path through birefringent material [m]: affine in s."""
    s, _ = clamp_position(rig.position_mm, doublet)
    l_mm = doublet.base_thickness_mm + 2.0 * s * math.tan(math.radians(doublet.wedge_angle_deg))
    return l_mm * 1e-3


def delta_path_length(rig: RigState, doublet: CrystalDoublet) -> float:
    """Path-length change relative to s = 0 [m]; what the scan records."""
    s, _ = clamp_position(rig.position_mm, doublet)
    return 2.0 * s * math.tan(math.radians(doublet.wedge_angle_deg)) * 1e-3


def mixing_angle(rig: RigState) -> MixingAngle:
    """Mixing angle from the table rotation: theta = 45 deg - rho.

    Standard orientation (rho = 0) gives theta = 45 deg; rho = 45 deg aligns
    the detection basis with the crystal axes and switches oscillation off.
    MixingAngle folds the result into its canonical range.
    """
    rho, _ = clamp_rotation(rig.table_rotation_deg)
    return MixingAngle.from_degrees(45.0 - rho)


def potentiometer_to_position(
    voltage: float, calibration: PotentiometerCalibration, doublet: CrystalDoublet
) -> tuple[float, bool]:
    """Invert the linear readout; returns (position [mm], clamped flag)."""
    s = (voltage - calibration.v0) / calibration.slope
    return clamp_position(s, doublet)


def position_to_voltage(position_mm: float, calibration: PotentiometerCalibration) -> float:
    return calibration.v0 + calibration.slope * position_mm
