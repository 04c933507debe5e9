"""Phase-difference laws for the two parameterizations of the oscillation.

Converts domain parameters -- mass-splitting/energy/baseline on the
particle side, birefringence/wavelength/path-length on the optical side --
into the single phase difference the core engine consumes, with explicit
unit handling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PhysicalConstants",
    "CODATA",
    "NeutrinoParams",
    "OpticalParams",
    "conversion_constant",
    "neutrino_phase_diff",
    "neutrino_phase_diff_natural",
    "optical_phase_diff",
    "oscillation_length_neutrino",
    "oscillation_length_optical",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Single source of truth for unit conversion.

    hbar_c in eV*m (CODATA: 197.3269804 MeV*fm).
    """

    hbar_c_ev_m: float = 1.973269804e-7


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class NeutrinoParams:
    """Mass-squared splitting [eV^2], energy [GeV], baseline [km]."""

    delta_m2_ev2: float
    energy_gev: float
    baseline_km: float

    def __post_init__(self):
        if self.delta_m2_ev2 <= 0:
            raise ValueError(f"delta_m2 must be positive, got {self.delta_m2_ev2}")
        if self.energy_gev <= 0:
            raise ValueError(f"energy must be positive, got {self.energy_gev}")
        if self.baseline_km < 0:
            raise ValueError(f"baseline must be non-negative, got {self.baseline_km}")


@dataclass(frozen=True)
class OpticalParams:
    """Index difference [1], vacuum wavelength [m], path in crystal [m]."""

    delta_n: float
    wavelength_m: float
    path_length_m: float

    def __post_init__(self):
        if self.delta_n <= 0:
            raise ValueError(f"delta_n must be positive, got {self.delta_n}")
        if self.wavelength_m <= 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength_m}")
        if self.path_length_m < 0:
            raise ValueError(f"path length must be non-negative, got {self.path_length_m}")


def conversion_constant(constants: PhysicalConstants = CODATA) -> float:
    """K such that dphi = 2 K dm2[eV^2] L[km] / E[GeV]; K ~ 1.26693.

    K = 10^3 m/km / (4 * 10^9 eV/GeV * hbar_c[eV*m]).
    """
    return 1e3 / (4e9 * constants.hbar_c_ev_m)


def neutrino_phase_diff(p: NeutrinoParams, constants: PhysicalConstants = CODATA) -> float:
    """Phase difference dm2*L/(2E) in practical units, radians."""
    k = conversion_constant(constants)
    return 2.0 * k * p.delta_m2_ev2 * p.baseline_km / p.energy_gev


def neutrino_phase_diff_natural(delta_m2: float, energy: float, baseline: float) -> float:
    """Phase difference dm2*L/(2E) with hbar = c = 1.

    All three arguments must be in one consistent natural-unit system;
    no conversion is applied.  Provided for didactic parity with the
    dimensionless optical law.
    """
    if energy <= 0:
        raise ValueError(f"energy must be positive, got {energy}")
    return delta_m2 * baseline / (2.0 * energy)


def optical_phase_diff(p: OpticalParams) -> float:
    """Phase difference 2 pi dn L / lambda between the two beams, radians."""
    return 2.0 * math.pi * p.delta_n * p.path_length_m / p.wavelength_m


def oscillation_length_neutrino(
    p: NeutrinoParams, constants: PhysicalConstants = CODATA
) -> float:
    """Baseline [km] over which the phase difference advances by 2 pi."""
    k = conversion_constant(constants)
    return math.pi * p.energy_gev / (k * p.delta_m2_ev2)


def oscillation_length_optical(p: OpticalParams) -> float:
    """Path length [m] over which the phase difference advances by 2 pi."""
    return p.wavelength_m / p.delta_n
