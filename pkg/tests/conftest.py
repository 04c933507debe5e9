import pytest

from oscillab.beamline import laser_preset
from oscillab.daq import NoiseModel, ScanPlan, VirtualDaq
from oscillab.rig import CrystalDoublet

# Coherence scale of the 2 nm diode line in LTB is ~1.9 mm of crystal, so
# demonstrating partial washing needs the retardance parked near that scale;
# the fit fixtures instead use a thin pair so the contrast envelope starts
# at ~1 where the fit model expects it.
WASHING_DOUBLET = CrystalDoublet(base_thickness_mm=1.5)
THIN_DOUBLET = CrystalDoublet(base_thickness_mm=0.01)

OPTICAL_LOSC_UM = 633e-9 / 0.057 * 1e6  # 11.105 um


def noiseless_daq(doublet=None, laser="hene", rotation_deg=0.0, seed=0):
    d = VirtualDaq(
        doublet=doublet or CrystalDoublet(),
        laser=laser_preset(laser),
        noise=NoiseModel(0.0, 0.0, seed=seed),
        laser_name=laser,
    )
    d.set_table_rotation(rotation_deg)
    return d


@pytest.fixture
def default_plan():
    return ScanPlan(0.0, 5.5, 0.55, 10.0)
