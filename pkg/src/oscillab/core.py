"""Two-state mixing and coherent-propagation engine.

The same 2x2 machinery serves both interpretations of the experiment:
flavor states propagating as a superposition of mass states, and
polarization states propagating as a superposition of the ordinary and
extraordinary beams of a birefringent crystal.  Probabilities are computed
two independent ways -- by the explicit matrix chain and by the closed
form sin^2(2*theta) * sin^2(dphi/2) -- so each can serve as the other's
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MixingAngle",
    "PhasePair",
    "TwoStateAmplitudes",
    "TransitionResult",
    "mixing_matrix",
    "propagate",
    "transition_probability_chain",
    "transition_probability_closed",
]

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class MixingAngle:
    """Rotation between the two bases, stored canonically in [0, pi/2].

    All observable probabilities depend on theta only through sin^2(2*theta),
    which is periodic in pi and symmetric about pi/2, so any input angle is
    folded into the canonical range without changing the physics.
    """

    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError(f"mixing angle must be finite, got {self.theta}")
        t = self.theta % math.pi
        if t > math.pi / 2:
            t = math.pi - t
        object.__setattr__(self, "theta", t)

    @classmethod
    def from_degrees(cls, deg: float) -> "MixingAngle":
        return cls(math.radians(deg))

    @property
    def degrees(self) -> float:
        return math.degrees(self.theta)


@dataclass(frozen=True)
class PhasePair:
    """Diagonal propagation phases (phi1, phi2) of the two basis states.

    Only the difference phi2 - phi1 is observable; a common offset is a
    global phase.
    """

    phi1: float
    phi2: float

    def __post_init__(self):
        if not (math.isfinite(self.phi1) and math.isfinite(self.phi2)):
            raise ValueError(f"phases must be finite, got ({self.phi1}, {self.phi2})")

    @property
    def difference(self) -> float:
        return self.phi2 - self.phi1


@dataclass(frozen=True)
class TwoStateAmplitudes:
    """Complex amplitudes of a coherent two-state superposition."""

    a1: complex
    a2: complex

    @property
    def norm_sq(self) -> float:
        return abs(self.a1) ** 2 + abs(self.a2) ** 2

    def require_normalized(self) -> None:
        if abs(self.norm_sq - 1.0) > _NORM_TOL:
            raise ValueError(f"state not normalized: |a|^2 = {self.norm_sq!r}")


@dataclass(frozen=True)
class TransitionResult:
    """Appearance and survival probabilities of one propagation."""

    p_appear: float
    p_survive: float

    def __post_init__(self):
        object.__setattr__(self, "p_appear", _clamp_probability(self.p_appear))
        object.__setattr__(self, "p_survive", _clamp_probability(self.p_survive))


def _clamp_probability(p: float) -> float:
    # Clamp floating-point overshoot so downstream invariants stay exact;
    # anything beyond rounding error is a real bug and must surface.
    if not -_NORM_TOL <= p <= 1.0 + _NORM_TOL:
        raise ValueError(f"probability out of range: {p!r}")
    return min(max(p, 0.0), 1.0)


def mixing_matrix(theta: MixingAngle) -> np.ndarray:
    """Rotation matrix from the propagation basis to the detection basis.

    Returns [[cos t, -sin t], [sin t, cos t]]; orthogonal, so its transpose
    is the inverse transformation.
    """
    c, s = math.cos(theta.theta), math.sin(theta.theta)
    return np.array([[c, -s], [s, c]])


def propagate(state: TwoStateAmplitudes, phases: PhasePair) -> TwoStateAmplitudes:
    """Apply the diagonal propagation phases e^{-i phi_k} to a state."""
    state.require_normalized()
    return TwoStateAmplitudes(
        a1=state.a1 * complex(math.cos(phases.phi1), -math.sin(phases.phi1)),
        a2=state.a2 * complex(math.cos(phases.phi2), -math.sin(phases.phi2)),
    )


def transition_probability_chain(theta: MixingAngle, phases: PhasePair) -> TransitionResult:
    """Transition probabilities by the explicit matrix chain.

    Evaluates U . diag(e^{-i phi1}, e^{-i phi2}) . U^-1 acting on the first
    detection-basis vector and projects on both detection states.  No
    closed-form shortcut: this is the independent route used as an oracle
    for :func:`transition_probability_closed`.
    """
    u = mixing_matrix(theta).astype(complex)
    d = np.array(
        [
            [complex(math.cos(phases.phi1), -math.sin(phases.phi1)), 0.0],
            [0.0, complex(math.cos(phases.phi2), -math.sin(phases.phi2))],
        ]
    )
    chain = u @ d @ u.conj().T  # U^-1 = U^T for a real rotation
    out = chain @ np.array([1.0, 0.0], dtype=complex)
    p_survive = abs(out[0]) ** 2
    p_appear = abs(out[1]) ** 2
    return TransitionResult(p_appear=p_appear, p_survive=p_survive)


def transition_probability_closed(theta: MixingAngle, delta_phi: float) -> TransitionResult:
    """Closed-form probabilities for a full phase difference delta_phi.

    p_appear = sin^2(2 theta) * sin^2(delta_phi / 2); the half angle is what
    turns the phase difference into the familiar quarter-argument of the
    oscillation formulas.
    """
    if not math.isfinite(delta_phi):
        raise ValueError(f"phase difference must be finite, got {delta_phi}")
    amplitude = math.sin(2.0 * theta.theta) ** 2
    p_appear = amplitude * math.sin(0.5 * delta_phi) ** 2
    return TransitionResult(p_appear=p_appear, p_survive=1.0 - p_appear)
