"""Virtual instrument: scan engine, measurement noise, trace persistence.

Owns the mutable rig state and a virtual clock.  Everything stochastic in
the package happens here, driven by one seeded generator, so a given
(config, plan, seed) triple reproduces a trace bit for bit.  The instance
may be handed between threads but must never be mutated concurrently; the
service serializes every command through one lock.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any, Iterable, TextIO

import numpy as np

from . import beamline, rig
from .beamline import BeamlineConfig, LaserSpec
from .rig import CrystalDoublet, RigState

__all__ = [
    "Sample",
    "ScanPlan",
    "NoiseModel",
    "Trace",
    "VirtualDaq",
    "ScanStateError",
    "TraceParseError",
    "write_trace",
    "read_trace",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("time_s", "position_mm", "delta_L_um", "theta_deg", "i1", "i2")
TRACE_FORMAT = "oscillab-trace-1"


class ScanStateError(RuntimeError):
    """Raised when a command conflicts with the scan state."""


class TraceParseError(ValueError):
    """Malformed trace file; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Sample:
    """One DAQ record: virtual time, reported position and both intensities."""

    time_s: float
    position_mm: float
    delta_L_um: float
    theta_deg: float
    i1: float
    i2: float

    def as_dict(self) -> dict[str, float]:
        return {c: getattr(self, c) for c in CSV_COLUMNS}


@dataclass(frozen=True)
class ScanPlan:
    """Constant-speed manipulator sweep sampled at a fixed rate."""

    s_start_mm: float = 0.0
    s_end_mm: float = 5.5
    speed_mm_per_s: float = 0.55
    sample_rate_hz: float = 10.0

    def __post_init__(self):
        if self.s_start_mm == self.s_end_mm:
            raise ValueError("scan endpoints coincide")
        if self.speed_mm_per_s <= 0:
            raise ValueError(f"speed must be positive: {self.speed_mm_per_s}")
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample rate must be positive: {self.sample_rate_hz}")

    @property
    def duration_s(self) -> float:
        return abs(self.s_end_mm - self.s_start_mm) / self.speed_mm_per_s

    @property
    def sample_count(self) -> int:
        return math.ceil(self.duration_s * self.sample_rate_hz) + 1


@dataclass(frozen=True)
class NoiseModel:
    """Additive gaussian noise on the intensities and the reported position.

    The photodiode currents sit far above shot noise, so gaussian additive
    noise is the right regime; identical seeds reproduce identical traces.
    """

    sigma_intensity: float = 0.005
    sigma_position_mm: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.sigma_intensity < 0 or self.sigma_position_mm < 0:
            raise ValueError("noise sigmas must be non-negative")


@dataclass
class Trace:
    """Ordered samples of one scan plus the configuration that produced them."""

    samples: list[Sample] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.samples)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples])


class VirtualDaq:
    """Software twin of the acquisition chain around the crystal rig."""

    def __init__(
        self,
        doublet: CrystalDoublet | None = None,
        beamline_config: BeamlineConfig | None = None,
        laser: LaserSpec | None = None,
        noise: NoiseModel | None = None,
        quadrature_points: int = 101,
        laser_name: str | None = None,
    ):
        self.doublet = doublet or CrystalDoublet()
        self.beamline_config = beamline_config or BeamlineConfig()
        self.laser = laser or beamline.laser_preset("hene")
        self.laser_name = laser_name or ("hene" if laser is None else "custom")
        self.noise = noise or NoiseModel()
        self.quadrature_points = quadrature_points
        self.state = RigState()
        self._plan: ScanPlan | None = None
        self._direction = 0.0
        self._time_s = 0.0
        self._rng = np.random.default_rng(self.noise.seed)
        self._samples: list[Sample] = []

    # -- manual controls ---------------------------------------------------

    @property
    def scan_active(self) -> bool:
        return self._plan is not None

    def set_position(self, position_mm: float) -> bool:
        """Move the manipulator; rejected while a scan owns it."""
        if self.scan_active:
            raise ScanStateError("scan in progress owns the manipulator")
        s, clamped = rig.clamp_position(position_mm, self.doublet)
        self.state = RigState(s, self.state.table_rotation_deg)
        return clamped

    def set_table_rotation(self, rotation_deg: float) -> bool:
        rho, clamped = rig.clamp_rotation(rotation_deg)
        self.state = RigState(self.state.position_mm, rho)
        return clamped

    def set_laser(self, laser: LaserSpec | str) -> None:
        if isinstance(laser, str):
            self.laser = beamline.laser_preset(laser)
            self.laser_name = laser
        else:
            self.laser = laser
            self.laser_name = "custom"

    def current_sample(self) -> Sample:
        """Noiseless snapshot of the instrument at its current state."""
        return self._measure(add_noise=False)

    # -- scanning ----------------------------------------------------------

    def begin_scan(self, plan: ScanPlan) -> Sample:
        """Arm a scan: move to the start, reset the clock, record sample 0."""
        if self.scan_active:
            raise ScanStateError("scan already in progress")
        start, _ = rig.clamp_position(plan.s_start_mm, self.doublet)
        self._plan = plan
        self._direction = 1.0 if plan.s_end_mm >= plan.s_start_mm else -1.0
        self._time_s = 0.0
        self._rng = np.random.default_rng(self.noise.seed)
        self._samples = []
        self.state = RigState(start, self.state.table_rotation_deg)
        first = self._measure(add_noise=True)
        self._samples.append(first)
        return first

    def step(self, dt_s: float) -> Sample:
        """Advance the scan by dt on the virtual clock and record a sample."""
        plan = self._plan
        if plan is None:
            raise ScanStateError("no active scan session")
        if dt_s < 0:
            raise ValueError(f"dt must be non-negative: {dt_s}")
        target = self.state.position_mm + self._direction * plan.speed_mm_per_s * dt_s
        end, _ = rig.clamp_position(plan.s_end_mm, self.doublet)
        if self._direction > 0:
            target = min(target, end)
        else:
            target = max(target, end)
        target, _ = rig.clamp_position(target, self.doublet)
        self._time_s += dt_s
        self.state = RigState(target, self.state.table_rotation_deg)
        sample = self._measure(add_noise=True)
        self._samples.append(sample)
        return sample

    def scan_finished(self) -> bool:
        plan = self._plan
        if plan is None:
            return True
        end, _ = rig.clamp_position(plan.s_end_mm, self.doublet)
        return self.state.position_mm == end

    def finish_scan(self) -> Trace:
        """Close the active scan and package the recorded trace."""
        if self._plan is None:
            raise ScanStateError("no active scan session")
        trace = Trace(samples=list(self._samples), metadata=self._metadata(self._plan))
        self._plan = None
        return trace

    def abort_scan(self) -> Trace | None:
        if self._plan is None:
            return None
        return self.finish_scan()

    def run_scan(self, plan: ScanPlan) -> Trace:
        """Execute a whole plan on the virtual clock; sample_count records."""
        self.begin_scan(plan)
        dt = 1.0 / plan.sample_rate_hz
        for _ in range(plan.sample_count - 1):
            self.step(dt)
        return self.finish_scan()

    # -- internals ----------------------------------------------------------

    def _measure(self, add_noise: bool) -> Sample:
        theta = rig.mixing_angle(self.state)
        length = rig.path_length(self.state, self.doublet)
        p = beamline.spectrum_averaged_probabilities(
            theta, length, self.laser, self.doublet.birefringence, self.quadrature_points
        )
        reading = beamline.detector_readings(p, self.beamline_config)
        i1, i2 = reading.i1, reading.i2
        reported = self.state.position_mm
        if add_noise:
            # Draw in a fixed order even at sigma = 0 so the stream position
            # is independent of the noise settings.
            i1 += self._rng.normal(0.0, self.noise.sigma_intensity)
            i2 += self._rng.normal(0.0, self.noise.sigma_intensity)
            reported += self._rng.normal(0.0, self.noise.sigma_position_mm)
        delta_l_um = (
            2.0 * reported * math.tan(math.radians(self.doublet.wedge_angle_deg)) * 1e3
        )
        return Sample(
            time_s=self._time_s,
            position_mm=reported,
            delta_L_um=delta_l_um,
            theta_deg=theta.degrees,
            i1=i1,
            i2=i2,
        )

    def _metadata(self, plan: ScanPlan | None) -> dict[str, Any]:
        meta: dict[str, Any] = {
            "format": TRACE_FORMAT,
            "laser_name": self.laser_name,
            "laser": asdict(self.laser),
            "doublet": asdict(self.doublet),
            "beamline": asdict(self.beamline_config),
            "noise": asdict(self.noise),
            "table_rotation_deg": self.state.table_rotation_deg,
            "quadrature_points": self.quadrature_points,
        }
        if plan is not None:
            # Virtual times only: wall-clock stamps would break bit-exact
            # reproducibility of the written file.
            meta["plan"] = asdict(plan)
            meta["virtual_duration_s"] = self._time_s
        return meta


# -- trace persistence -------------------------------------------------------


def _format_value(v: float) -> str:
    return f"{v:.9g}"


def write_trace(trace: Trace, destination: str | Path | TextIO) -> None:
    """Write a trace as CSV with a '# key: json' metadata header."""
    if not trace.samples:
        raise ValueError("refusing to write an empty trace")
    if hasattr(destination, "write"):
        _write_trace_stream(trace, destination)  # type: ignore[arg-type]
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            _write_trace_stream(trace, fh)


def _write_trace_stream(trace: Trace, fh: TextIO) -> None:
    meta = dict(trace.metadata)
    meta.setdefault("format", TRACE_FORMAT)
    for key, value in meta.items():
        fh.write(f"# {key}: {json.dumps(value)}\n")
    fh.write(",".join(CSV_COLUMNS) + "\n")
    for s in trace.samples:
        fh.write(",".join(_format_value(getattr(s, c)) for c in CSV_COLUMNS) + "\n")


def read_trace(source: str | Path | TextIO) -> Trace:
    """Parse a trace file; raises TraceParseError with the offending line."""
    if hasattr(source, "read"):
        lines = source.read().splitlines()  # type: ignore[union-attr]
    else:
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    metadata: dict[str, Any] = {}
    header: list[str] | None = None
    samples: list[Sample] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" not in body:
                raise TraceParseError(f"metadata line without key: {raw!r}", lineno)
            key, _, value = body.partition(":")
            try:
                metadata[key.strip()] = json.loads(value.strip())
            except json.JSONDecodeError as exc:
                raise TraceParseError(f"bad JSON in metadata {key.strip()!r}: {exc}", lineno) from exc
            continue
        cells = [c.strip() for c in line.split(",")]
        if header is None:
            header = cells
            missing = set(CSV_COLUMNS) - set(header)
            if missing:
                raise TraceParseError(f"missing columns: {sorted(missing)}", lineno)
            continue
        if len(cells) != len(header):
            raise TraceParseError(
                f"expected {len(header)} cells, found {len(cells)}", lineno
            )
        row = dict(zip(header, cells))
        try:
            samples.append(Sample(**{c: float(row[c]) for c in CSV_COLUMNS}))
        except ValueError as exc:
            raise TraceParseError(f"bad numeric value: {exc}", lineno) from exc
    if header is None:
        raise TraceParseError("no column header found", len(lines) or 1)
    if not samples:
        raise TraceParseError("no samples in file", len(lines) or 1)
    return Trace(samples=samples, metadata=metadata)
