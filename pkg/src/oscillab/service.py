"""HTTP control service: rig state, live sample streaming, trace download.

One simulation owner: every mutation of the virtual DAQ goes through a
single lock, request handlers only read immutable snapshots, and the scan
runs on a background thread that fans samples out to per-client queues for
the server-sent-event stream.
"""

from __future__ import annotations

import io
import json
import queue
import threading
import time
from typing import Iterator, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, model_validator

from .beamline import LASER_PRESETS
from .config import LabConfig, config_to_dict, default_config
from .daq import ScanPlan, ScanStateError, Trace, VirtualDaq, write_trace

__all__ = ["ControlCommand", "ScanRequest", "LabService", "create_app"]

_STREAM_POLL_S = 0.25


class ControlCommand(BaseModel):
    """Manual control request; at least one field must be present."""

    position_mm: Optional[float] = None
    table_rotation_deg: Optional[float] = None
    laser: Optional[str] = None

    @model_validator(mode="after")
    def _at_least_one(self):
        if self.position_mm is None and self.table_rotation_deg is None and self.laser is None:
            raise ValueError("command must set at least one of position, rotation, laser")
        return self


class ScanRequest(BaseModel):
    s_start_mm: float = 0.0
    s_end_mm: float = 5.5
    speed_mm_per_s: float = 0.55
    sample_rate_hz: float = 10.0


class LabService:
    """Owns the virtual DAQ; serializes commands, snapshots state."""

    def __init__(self, config: LabConfig | None = None, fast: bool = False):
        self.config = config or default_config()
        self.fast = fast
        self._lock = threading.Lock()
        self._daq = VirtualDaq(
            doublet=self.config.doublet,
            beamline_config=self.config.beamline,
            laser=self.config.laser,
            noise=self.config.noise,
            quadrature_points=self.config.quadrature_points,
            laser_name=self.config.laser_name,
        )
        self._subscribers: list[queue.Queue] = []
        self._scan_thread: threading.Thread | None = None
        self._stop_requested = threading.Event()
        self._last_trace: Trace | None = None

    # -- snapshots -----------------------------------------------------------

    def state_snapshot(self) -> dict:
        with self._lock:
            sample = self._daq.current_sample()
            return {
                "position_mm": self._daq.state.position_mm,
                "table_rotation_deg": self._daq.state.table_rotation_deg,
                "theta_deg": sample.theta_deg,
                "delta_L_um": sample.delta_L_um,
                "i1": sample.i1,
                "i2": sample.i2,
                "time_s": sample.time_s,
                "laser": self._daq.laser_name,
                "scan_active": self._daq.scan_active,
                "travel_mm": self.config.doublet.travel_mm,
            }

    def trace_csv(self) -> str:
        with self._lock:
            trace = self._current_trace_locked()
        if trace is None or not trace.samples:
            raise HTTPException(status_code=404, detail="no trace recorded yet")
        buf = io.StringIO()
        write_trace(trace, buf)
        return buf.getvalue()

    def _current_trace_locked(self) -> Trace | None:
        if self._daq.scan_active:
            return Trace(
                samples=list(self._daq._samples),
                metadata=self._daq._metadata(self._daq._plan),
            )
        return self._last_trace

    # -- commands ------------------------------------------------------------

    def apply_controls(self, cmd: ControlCommand) -> dict:
        with self._lock:
            if cmd.position_mm is not None and self._daq.scan_active:
                raise HTTPException(
                    status_code=409, detail="scan in progress owns the manipulator"
                )
            if cmd.laser is not None and cmd.laser not in LASER_PRESETS:
                raise HTTPException(
                    status_code=422,
                    detail=f"unknown laser preset {cmd.laser!r}; options: {sorted(LASER_PRESETS)}",
                )
            if cmd.table_rotation_deg is not None:
                self._daq.set_table_rotation(cmd.table_rotation_deg)
            if cmd.position_mm is not None:
                self._daq.set_position(cmd.position_mm)
            if cmd.laser is not None:
                self._daq.set_laser(cmd.laser)
        return self.state_snapshot()

    def start_scan(self, req: ScanRequest) -> dict:
        try:
            plan = ScanPlan(req.s_start_mm, req.s_end_mm, req.speed_mm_per_s, req.sample_rate_hz)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        with self._lock:
            if self._daq.scan_active:
                raise HTTPException(status_code=409, detail="scan already in progress")
            self._stop_requested.clear()
            first = self._daq.begin_scan(plan)
        self._broadcast(first)
        self._scan_thread = threading.Thread(
            target=self._scan_loop, args=(plan,), daemon=True
        )
        self._scan_thread.start()
        return {"started": True, "samples_expected": plan.sample_count}

    def stop_scan(self) -> dict:
        self._stop_requested.set()
        thread = self._scan_thread
        if thread is not None:
            thread.join(timeout=5.0)
        with self._lock:
            if self._daq.scan_active:
                self._last_trace = self._daq.abort_scan()
        return {"stopped": True}

    def _scan_loop(self, plan: ScanPlan) -> None:
        dt = 1.0 / plan.sample_rate_hz
        for _ in range(plan.sample_count - 1):
            if self._stop_requested.is_set():
                break
            if not self.fast:
                time.sleep(dt)
            with self._lock:
                if not self._daq.scan_active:
                    return
                sample = self._daq.step(dt)
            self._broadcast(sample)
        with self._lock:
            if self._daq.scan_active:
                self._last_trace = self._daq.finish_scan()

    # -- streaming -----------------------------------------------------------

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def _broadcast(self, sample) -> None:
        with self._lock:
            targets = list(self._subscribers)
        for q in targets:
            q.put(sample)

    def shutdown(self) -> None:
        self.stop_scan()


def create_app(
    config: LabConfig | None = None, fast: bool = False, ui_dir: str | None = None
) -> FastAPI:
    """Build the FastAPI app around one LabService instance."""
    service = LabService(config=config, fast=fast)
    app = FastAPI(title="oscillab control service")
    app.state.service = service
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ScanStateError)
    async def _scan_state(_, exc: ScanStateError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.get("/api/state")
    def get_state():
        return service.state_snapshot()

    @app.post("/api/controls")
    def post_controls(cmd: ControlCommand):
        return service.apply_controls(cmd)

    @app.post("/api/scan")
    def post_scan(req: ScanRequest):
        return service.start_scan(req)

    @app.post("/api/scan/stop")
    def post_scan_stop():
        return service.stop_scan()

    @app.get("/api/trace")
    def get_trace():
        return Response(content=service.trace_csv(), media_type="text/csv")

    @app.get("/api/stream")
    def get_stream():
        def events() -> Iterator[str]:
            q = service.subscribe()
            try:
                # Immediate comment so clients (and tests) can tell the
                # subscription is live before any sample arrives.
                yield ": connected\n\n"
                while True:
                    try:
                        sample = q.get(timeout=_STREAM_POLL_S)
                    except queue.Empty:
                        yield ": keepalive\n\n"
                        continue
                    yield f"event: sample\ndata: {json.dumps(sample.as_dict())}\n\n"
            finally:
                service.unsubscribe(q)

        return StreamingResponse(events(), media_type="text/event-stream")

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
