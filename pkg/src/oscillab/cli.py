"""Command-line entry points: curve generation, scanning, fitting, serving.

Every command that writes a delimited output also renders a companion PNG
figure next to it unless --no-plot is given.  Exit codes: 0 success,
1 runtime error, 2 usage or precondition error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import beamline
from .analysis import (
    FitPreconditionError,
    UnidentifiableTraceError,
    fit_trace,
    seed_guess,
)
from .config import ConfigError, LabConfig, default_config, load_config
from .core import MixingAngle, transition_probability_closed
from .daq import NoiseModel, ScanPlan, TraceParseError, VirtualDaq, read_trace, write_trace
from .phases import (
    NeutrinoParams,
    neutrino_phase_diff,
    oscillation_length_neutrino,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_RUNTIME):
        super().__init__(message)
        self.code = code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscillab",
        description="Virtual two-state oscillation laboratory",
    )
    parser.add_argument("--config", metavar="FILE", help="YAML lab configuration")
    parser.add_argument("--seed", type=int, help="override the noise RNG seed")
    parser.add_argument(
        "--fast", action="store_true", help="run scans at full speed (no wall-clock pacing)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    curve = sub.add_parser("curve", help="evaluate the oscillation curve to CSV")
    curve.add_argument("--mode", choices=("optical", "neutrino"), default="optical")
    curve.add_argument("--theta-deg", type=float, default=45.0)
    curve.add_argument("--l-start", type=float, default=0.0,
                       help="range start: um (optical) or km (neutrino)")
    curve.add_argument("--l-end", type=float, default=38.4,
                       help="range end: um (optical) or km (neutrino)")
    curve.add_argument("--points", type=int, default=600)
    curve.add_argument("--laser", help="laser preset for optical mode (default from config)")
    curve.add_argument("--dm2", type=float, default=2.5e-3, help="mass splitting [eV^2]")
    curve.add_argument("--energy", type=float, default=1.0, help="energy [GeV]")
    curve.add_argument("--out", required=True, help="output CSV path")
    curve.add_argument("--no-plot", action="store_true", help="skip the companion figure")

    scan = sub.add_parser("scan", help="run a virtual scan and write the trace")
    scan.add_argument("--rotation-deg", type=float, default=0.0, help="table rotation rho")
    scan.add_argument("--start", type=float, default=0.0, help="scan start [mm]")
    scan.add_argument("--end", type=float, default=5.5, help="scan end [mm]")
    scan.add_argument("--speed", type=float, default=0.55, help="manipulator speed [mm/s]")
    scan.add_argument("--rate", type=float, default=10.0, help="sample rate [Hz]")
    scan.add_argument("--laser", help="laser preset override")
    scan.add_argument("--out", required=True, help="output trace CSV path")
    scan.add_argument("--no-plot", action="store_true")

    fit = sub.add_parser("fit", help="fit a recorded trace")
    fit.add_argument("trace", help="trace CSV file")
    fit.add_argument("--out", help="write the JSON report here (default: stdout only)")
    fit.add_argument("--free-gain", action="store_true",
                     help="also fit the detector gain (normally fixed by normalization)")
    fit.add_argument("--max-iterations", type=int, default=200)
    fit.add_argument("--no-plot", action="store_true")

    serve = sub.add_parser("serve", help="run the HTTP control service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, help="override the configured port")
    serve.add_argument("--ui", help="static directory with the browser panel")

    return parser


def _load_config(args: argparse.Namespace) -> LabConfig:
    try:
        cfg = load_config(args.config) if args.config else default_config()
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    if args.seed is not None:
        cfg.noise = replace(cfg.noise, seed=args.seed)
    return cfg


def _laser_for(args: argparse.Namespace, cfg: LabConfig) -> tuple[beamline.LaserSpec, str]:
    if getattr(args, "laser", None):
        try:
            return beamline.laser_preset(args.laser), args.laser
        except KeyError as exc:
            raise CliError(str(exc), EXIT_USAGE) from exc
    return cfg.laser, cfg.laser_name


def _write_csv(path: Path, header: list[str], rows: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")


def cmd_curve(args: argparse.Namespace, cfg: LabConfig) -> int:
    if args.points < 2:
        raise CliError(f"need at least 2 points, got {args.points}", EXIT_USAGE)
    if args.l_end <= args.l_start:
        raise CliError("curve range is empty (l-end <= l-start)", EXIT_USAGE)
    theta = MixingAngle.from_degrees(args.theta_deg)
    out = Path(args.out)
    if args.mode == "optical":
        laser, _ = _laser_for(args, cfg)
        dn = cfg.doublet.birefringence
        l_um = np.linspace(args.l_start, args.l_end, args.points)
        results = [
            beamline.spectrum_averaged_probabilities(
                theta, l * 1e-6, laser, dn, cfg.quadrature_points
            )
            for l in l_um
        ]
        header = ["L_um", "p_appear", "p_survive"]
        xlabel = "path length L (um)"
        x = l_um
    else:
        if args.dm2 <= 0 or args.energy <= 0:
            raise CliError("neutrino mode needs positive --dm2 and --energy", EXIT_USAGE)
        x = np.linspace(args.l_start, args.l_end, args.points)
        results = []
        for l_km in x:
            p = NeutrinoParams(args.dm2, args.energy, float(l_km))
            results.append(transition_probability_closed(theta, neutrino_phase_diff(p)))
        header = ["L_km", "p_appear", "p_survive"]
        xlabel = "baseline L (km)"
    p_appear = np.array([r.p_appear for r in results])
    p_survive = np.array([r.p_survive for r in results])
    _write_csv(out, header, np.column_stack([x, p_appear, p_survive]))
    if not args.no_plot:
        from .plotting import save_curve_figure

        save_curve_figure(x, p_appear, p_survive, out.with_suffix(".png"), xlabel=xlabel)
    print(f"wrote {len(x)} points to {out}")
    if args.mode == "neutrino":
        osc = oscillation_length_neutrino(NeutrinoParams(args.dm2, args.energy, 0.0))
        print(f"oscillation length: {osc:.4g} km")
    return EXIT_OK


def cmd_scan(args: argparse.Namespace, cfg: LabConfig) -> int:
    laser, laser_name = _laser_for(args, cfg)
    try:
        plan = ScanPlan(args.start, args.end, args.speed, args.rate)
    except ValueError as exc:
        raise CliError(f"invalid scan plan: {exc}", EXIT_USAGE) from exc
    daq = VirtualDaq(
        doublet=cfg.doublet,
        beamline_config=cfg.beamline,
        laser=laser,
        noise=cfg.noise,
        quadrature_points=cfg.quadrature_points,
        laser_name=laser_name,
    )
    daq.set_table_rotation(args.rotation_deg)
    trace = daq.run_scan(plan)
    out = Path(args.out)
    write_trace(trace, out)
    if not args.no_plot:
        from .plotting import save_trace_figure

        save_trace_figure(trace, out.with_suffix(".png"))
    print(f"recorded {len(trace)} samples to {out}")
    return EXIT_OK


def cmd_fit(args: argparse.Namespace, cfg: LabConfig) -> int:
    path = Path(args.trace)
    if not path.exists():
        raise CliError(f"trace file not found: {path}", EXIT_RUNTIME)
    try:
        trace = read_trace(path)
    except TraceParseError as exc:
        raise CliError(f"cannot parse {path}: {exc}", EXIT_RUNTIME) from exc
    try:
        guess = seed_guess(trace)
        result = fit_trace(
            trace, initial=guess, free_gain=args.free_gain, max_iterations=args.max_iterations
        )
    except (FitPreconditionError, UnidentifiableTraceError) as exc:
        raise CliError(f"fit precondition failed: {exc}", EXIT_USAGE) from exc
    report = json.dumps(result.as_dict(), indent=2)
    print(report)
    if args.out:
        Path(args.out).write_text(report + "\n", encoding="utf-8")
        if not args.no_plot:
            from .plotting import save_fit_figure

            save_fit_figure(trace, result, Path(args.out).with_suffix(".png"))
    if not result.converged:
        print(f"fit did not converge: {result.message}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_serve(args: argparse.Namespace, cfg: LabConfig, fast: bool) -> int:
    import uvicorn

    from .service import create_app

    port = args.port if args.port is not None else cfg.service_port
    app = create_app(config=cfg, fast=fast, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=port, log_level="info")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "curve":
            return cmd_curve(args, cfg)
        if args.command == "scan":
            return cmd_scan(args, cfg)
        if args.command == "fit":
            return cmd_fit(args, cfg)
        if args.command == "serve":
            return cmd_serve(args, cfg, args.fast)
        parser.error(f"unknown command {args.command!r}")
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
