"""oscillab: a virtual two-state oscillation laboratory.

Simulates polarized light traversing a variable-thickness birefringent
crystal doublet -- the tabletop analog of two-flavor vacuum oscillation --
with a shared oscillation engine, a virtual data-acquisition chain, trace
fitting, an HTTP control service and a CLI.
"""

from .core import (
    MixingAngle,
    PhasePair,
    TransitionResult,
    TwoStateAmplitudes,
    mixing_matrix,
    propagate,
    transition_probability_chain,
    transition_probability_closed,
)
from .phases import (
    CODATA,
    NeutrinoParams,
    OpticalParams,
    PhysicalConstants,
    conversion_constant,
    neutrino_phase_diff,
    neutrino_phase_diff_natural,
    optical_phase_diff,
    oscillation_length_neutrino,
    oscillation_length_optical,
)
from .rig import CrystalDoublet, PotentiometerCalibration, RigState
from .beamline import BeamlineConfig, DetectorReading, LaserSpec, laser_preset
from .daq import NoiseModel, Sample, ScanPlan, Trace, VirtualDaq, read_trace, write_trace
from .analysis import FitModel, FitResult, fit_trace, model_intensity, seed_guess
from .config import LabConfig, default_config, load_config

__version__ = "0.1.0"
