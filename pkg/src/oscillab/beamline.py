"""Optical chain: polarizer, crystal doublet, splitter, analyzers, detectors.

Everything here is deterministic and noiseless so the module can serve as
the oracle for the virtual instrument; measurement noise lives in the DAQ.
Spectrum averaging over the laser line produces the washing-out of the
oscillation contrast that distinguishes a broad diode line from a narrow
HeNe line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import MixingAngle, TransitionResult, transition_probability_closed
from .phases import OpticalParams, optical_phase_diff, oscillation_length_optical

__all__ = [
    "LaserSpec",
    "BeamlineConfig",
    "DetectorReading",
    "LASER_PRESETS",
    "MONOCHROMATIC_FWHM_M",
    "laser_preset",
    "monochromatic_probabilities",
    "spectrum_averaged_probabilities",
    "visibility",
    "detector_readings",
    "normalized_probabilities",
]

# Below one picometer the line is numerically monochromatic over any path
# the rig can produce; averaging is bypassed so the degenerate case matches
# the closed form exactly.
MONOCHROMATIC_FWHM_M = 1e-12

_LINESHAPES = ("gaussian", "rectangular")
_FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))


@dataclass(frozen=True)
class LaserSpec:
    """Spectral model of the source: center wavelength, width, lineshape."""

    center_wavelength_m: float = 633e-9
    fwhm_m: float = 1e-12
    lineshape: str = "gaussian"
    power: float = 1.0

    def __post_init__(self):
        if self.center_wavelength_m <= 0:
            raise ValueError(f"center wavelength must be positive: {self.center_wavelength_m}")
        if self.fwhm_m < 0:
            raise ValueError(f"fwhm must be non-negative: {self.fwhm_m}")
        if self.fwhm_m >= self.center_wavelength_m / 10.0:
            raise ValueError(
                f"fwhm {self.fwhm_m} too broad for a laser line "
                f"(limit {self.center_wavelength_m / 10.0:g} m)"
            )
        if self.lineshape not in _LINESHAPES:
            raise ValueError(f"unknown lineshape {self.lineshape!r}; options: {_LINESHAPES}")
        if self.power <= 0:
            raise ValueError(f"power must be positive: {self.power}")


LASER_PRESETS: dict[str, LaserSpec] = {
    # HeNe: narrow enough to stay coherent over everything the rig can do.
    "hene": LaserSpec(center_wavelength_m=633e-9, fwhm_m=1e-12, lineshape="gaussian"),
    # Laser-pointer diode: broad line, washes the pattern out once the
    # retardance approaches its coherence length (~2 mm of LTB).
    "diode": LaserSpec(center_wavelength_m=633e-9, fwhm_m=2e-9, lineshape="gaussian"),
}


def laser_preset(name: str) -> LaserSpec:
    try:
        return LASER_PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown laser preset {name!r}; options: {sorted(LASER_PRESETS)}") from None


@dataclass(frozen=True)
class BeamlineConfig:
    """Splitter ratio, detector gains and dark offsets of the readout chain."""

    splitter_ratio: float = 0.5  # fraction of power to the survival analyzer
    gain1: float = 1.0
    gain2: float = 1.0
    dark1: float = 0.0
    dark2: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.splitter_ratio < 1.0:
            raise ValueError(f"splitter ratio must be in (0, 1): {self.splitter_ratio}")
        if self.gain1 <= 0 or self.gain2 <= 0:
            raise ValueError(f"gains must be positive: {self.gain1}, {self.gain2}")
        if self.dark1 < 0 or self.dark2 < 0:
            raise ValueError(f"dark offsets must be non-negative: {self.dark1}, {self.dark2}")


@dataclass(frozen=True)
class DetectorReading:
    """Intensities at the survival (i1) and appearance (i2) detectors."""

    i1: float
    i2: float

    def __post_init__(self):
        if self.i1 < 0 or self.i2 < 0:
            raise ValueError(f"negative detector reading: ({self.i1}, {self.i2})")


def monochromatic_probabilities(
    theta: MixingAngle, path_length_m: float, wavelength_m: float, delta_n: float
) -> TransitionResult:
    """Single-wavelength probabilities after the crystal path."""
    params = OpticalParams(
        delta_n=delta_n, wavelength_m=wavelength_m, path_length_m=path_length_m
    )
    return transition_probability_closed(theta, optical_phase_diff(params))


def _quadrature_nodes(laser: LaserSpec, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Wavelength nodes and composite-Simpson weights times the lineshape."""
    if laser.lineshape == "gaussian":
        sigma = laser.fwhm_m * _FWHM_TO_SIGMA
        lam = np.linspace(laser.center_wavelength_m - 3 * sigma,
                          laser.center_wavelength_m + 3 * sigma, n)
        shape = np.exp(-0.5 * ((lam - laser.center_wavelength_m) / sigma) ** 2)
    else:
        half = laser.fwhm_m / 2.0
        lam = np.linspace(laser.center_wavelength_m - half,
                          laser.center_wavelength_m + half, n)
        shape = np.ones_like(lam)
    weights = np.ones(n)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return lam, weights * shape


def spectrum_averaged_probabilities(
    theta: MixingAngle,
    path_length_m: float,
    laser: LaserSpec,
    delta_n: float,
    quadrature_points: int = 101,
) -> TransitionResult:
    """Probabilities averaged incoherently over the laser line.

    Fixed-node Simpson quadrature of S(lambda) * P(lambda) across +-3 sigma
    (gaussian) or the full support (rectangular), normalized by the same
    quadrature of S.  Needs an odd node count >= 3.
    """
    if quadrature_points < 3 or quadrature_points % 2 == 0:
        raise ValueError(f"quadrature_points must be odd and >= 3, got {quadrature_points}")
    if path_length_m < 0:
        raise ValueError(f"path length must be non-negative: {path_length_m}")
    if laser.fwhm_m <= MONOCHROMATIC_FWHM_M:
        return monochromatic_probabilities(
            theta, path_length_m, laser.center_wavelength_m, delta_n
        )
    lam, w = _quadrature_nodes(laser, quadrature_points)
    phase = 2.0 * math.pi * delta_n * path_length_m / lam
    amplitude = math.sin(2.0 * theta.theta) ** 2
    p_appear_lam = amplitude * np.sin(0.5 * phase) ** 2
    p_appear = float(np.sum(w * p_appear_lam) / np.sum(w))
    return TransitionResult(p_appear=p_appear, p_survive=1.0 - p_appear)


def visibility(
    path_length_m: float,
    laser: LaserSpec,
    delta_n: float,
    quadrature_points: int = 101,
    samples_per_period: int = 129,
) -> float:
    """Local contrast (max-min)/(max+min) of the averaged appearance signal.

    Evaluated at maximal mixing over one oscillation period centered on the
    given path length (shifted to non-negative paths near zero).
    """
    theta = MixingAngle.from_degrees(45.0)
    period = oscillation_length_optical(
        OpticalParams(delta_n=delta_n, wavelength_m=laser.center_wavelength_m, path_length_m=0.0)
    )
    # Snap the window onto [k, k+1] periods so the grid (odd count) lands
    # exactly on the extrema of the center-wavelength pattern; otherwise the
    # sampled contrast understates V even for a monochromatic line.
    k = max(round(path_length_m / period - 0.5), 0)
    start = k * period
    if samples_per_period % 2 == 0:
        samples_per_period += 1
    grid = np.linspace(start, start + period, samples_per_period)
    p = np.array(
        [
            spectrum_averaged_probabilities(theta, l, laser, delta_n, quadrature_points).p_appear
            for l in grid
        ]
    )
    hi, lo = float(p.max()), float(p.min())
    if hi + lo == 0.0:
        return 0.0
    return (hi - lo) / (hi + lo)


def detector_readings(p: TransitionResult, config: BeamlineConfig) -> DetectorReading:
    """Noiseless detector intensities for given probabilities."""
    return DetectorReading(
        i1=config.gain1 * config.splitter_ratio * p.p_survive + config.dark1,
        i2=config.gain2 * (1.0 - config.splitter_ratio) * p.p_appear + config.dark2,
    )


def normalized_probabilities(i1: float, i2: float, config: BeamlineConfig) -> tuple[float, float]:
    """Invert the detector chain: (p_survive, p_appear) from raw readings.

    Pure algebra, so noisy inputs can fall slightly outside [0, 1]; callers
    that need clamped probabilities must clamp themselves.
    """
    p_survive = (i1 - config.dark1) / (config.gain1 * config.splitter_ratio)
    p_appear = (i2 - config.dark2) / (config.gain2 * (1.0 - config.splitter_ratio))
    return p_survive, p_appear
