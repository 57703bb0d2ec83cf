"""Batch driver: config parsing, the run loop, CSV/VTK/manifest output.

Runs are fully deterministic: fixed-significant-digit float formatting and
a seed-free scheme mean identical configs produce byte-identical
diagnostics files.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, replace

from .errors import ConfigError, SimulationError
from .scenarios import build_test1, build_test2, diagnostics_row
from .stepper import advance, suggested_dt_bound
from .vtkio import write_vtk_snapshot

CSV_HEADER = "t,kinetic,potential,mass,probe_radius,probe_ground_level,fp_iters,min_area"

_FLOAT_KEYS = {
    "dt", "t_end", "cd", "nu", "gravity", "kappa", "h_min", "fp_tol",
    "relaxation", "forcing_duration",
}
_INT_KEYS = {"output_every", "snapshot_every", "fp_max"}
_BOOL_KEYS = {"contact_line_enabled"}
_STR_KEYS = {"scenario", "mesh", "output_dir"}
_PAIR_KEYS = {"forcing_direction"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _BOOL_KEYS | _STR_KEYS | _PAIR_KEYS


@dataclass
class RunConfig:
    """Resolved run settings; None means 'use the scenario default'."""

    scenario: str = "test1"
    mesh: str = "M1"
    output_dir: str = "out"
    output_every: int = 10
    snapshot_every: int = 200
    dt: float | None = None
    t_end: float | None = None
    cd: float | None = None
    nu: float | None = None
    gravity: float | None = None
    kappa: float | None = None
    contact_line_enabled: bool | None = None
    h_min: float | None = None
    fp_tol: float | None = None
    fp_max: int | None = None
    relaxation: float | None = None
    forcing_duration: float | None = None
    forcing_direction: tuple[float, float] | None = None

    def validated(self) -> "RunConfig":
        if self.scenario not in ("test1", "test2"):
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if not (self.mesh in ("M1", "M2", "M3") or self.mesh.isdigit()):
            raise ConfigError(f"mesh must be M1, M2, M3 or a triangle count, got {self.mesh!r}")
        if self.output_every < 1:
            raise ConfigError("output_every must be at least 1")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot_every must be nonnegative")
        for key in ("dt", "t_end", "h_min", "fp_tol", "relaxation"):
            val = getattr(self, key)
            if val is not None and val <= 0 and not (key == "t_end" and val == 0.0):
                raise ConfigError(f"{key} must be positive, got {val}")
        for key in ("cd", "nu", "gravity", "kappa", "forcing_duration"):
            val = getattr(self, key)
            if val is not None and val < 0:
                raise ConfigError(f"{key} must be nonnegative, got {val}")
        if self.fp_max is not None and self.fp_max < 1:
            raise ConfigError("fp_max must be at least 1")
        return self


def _parse_value(key: str, raw: str, where: str):
    try:
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _INT_KEYS:
            return int(raw)
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if key in _PAIR_KEYS:
            parts = [float(p) for p in raw.replace(",", " ").split()]
            if len(parts) != 2:
                raise ValueError("expected two numbers")
            return (parts[0], parts[1])
        return raw
    except ValueError as err:
        raise ConfigError(f"{where}: bad value for {key}: {err}") from None


def parse_config(path: str) -> RunConfig:
    """Read a key = value file; unknown keys and bad types are errors."""
    cfg = RunConfig()
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {text!r}")
            key, raw = (part.strip() for part in text.split("=", 1))
            if key not in _ALL_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            cfg = replace(cfg, **{key: _parse_value(key, raw, f"{path}:{lineno}")})
    return cfg.validated()


def _resolved_spec(config: RunConfig):
    """Build the scenario and apply config overrides onto its spec."""
    builder = build_test1 if config.scenario == "test1" else build_test2
    variant = config.mesh if config.mesh in ("M1", "M2", "M3") else int(config.mesh)
    spec, state = builder(variant)
    overrides = {}
    mapping = {
        "dt": "dt", "t_end": "t_end", "cd": "cd", "nu": "nu", "gravity": "g",
        "kappa": "contact_line_kappa", "contact_line_enabled": "contact_line_enabled",
        "h_min": "h_min", "fp_tol": "fp_tol", "fp_max": "fp_max",
        "relaxation": "relaxation", "forcing_duration": "forcing_duration",
        "forcing_direction": "forcing_direction", "output_every": "output_every",
    }
    for cfg_key, spec_key in mapping.items():
        val = getattr(config, cfg_key, None)
        if val is not None:
            overrides[spec_key] = val
    return replace(spec, **overrides), state


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _csv_line(row) -> str:
    return ",".join(
        [
            _fmt(row.t),
            _fmt(row.kinetic),
            _fmt(row.potential),
            _fmt(row.mass),
            _fmt(row.probe_radius),
            _fmt(row.probe_ground_level),
            str(row.fp_iters),
            _fmt(row.min_area),
        ]
    )


def resolved_config_lines(config: RunConfig, spec) -> list[str]:
    lines = [
        f"scenario = {config.scenario}",
        f"mesh = {config.mesh}",
        f"output_dir = {config.output_dir}",
        f"output_every = {spec.output_every}",
        f"snapshot_every = {config.snapshot_every}",
        f"dt = {_fmt(spec.dt)}",
        f"t_end = {_fmt(config.t_end if config.t_end is not None else spec.t_end)}",
        f"cd = {_fmt(spec.cd)}",
        f"nu = {_fmt(spec.nu)}",
        f"gravity = {_fmt(spec.g)}",
        f"kappa = {_fmt(spec.contact_line_kappa)}",
        f"contact_line_enabled = {str(spec.contact_line_enabled).lower()}",
        f"h_min = {_fmt(spec.h_min)}",
        f"fp_tol = {_fmt(spec.fp_tol)}",
        f"fp_max = {spec.fp_max}",
        f"relaxation = {_fmt(spec.relaxation)}",
        f"forcing_duration = {_fmt(spec.forcing_duration)}",
        "forcing_direction = "
        + f"{_fmt(spec.forcing_direction[0])} {_fmt(spec.forcing_direction[1])}",
    ]
    return lines


def run(config: RunConfig) -> int:
    """Execute one run; returns the process exit status."""
    config = config.validated()
    spec, state = _resolved_spec(config)
    t_end = config.t_end if config.t_end is not None else spec.t_end
    n_steps = int(round(t_end / spec.dt))

    os.makedirs(config.output_dir, exist_ok=True)
    manifest_path = os.path.join(config.output_dir, "run_manifest.txt")
    csv_path = os.path.join(config.output_dir, "diagnostics.csv")

    bound = suggested_dt_bound(state.mesh, max(state.h.values.max(), spec.h_min), spec.g)
    if spec.dt > bound:
        print(
            f"warning: dt = {spec.dt} exceeds the advective-gravity guideline {bound:.3g}",
            file=sys.stderr,
        )

    manifest_lines = resolved_config_lines(config, spec) + [f"n_steps = {n_steps}"]
    status = 0
    error_line = None
    with open(csv_path, "w") as csv:
        csv.write(CSV_HEADER + "\n")
        csv.write(_csv_line(diagnostics_row(state, None, spec.g)) + "\n")
        csv.flush()
        if config.snapshot_every > 0:
            write_vtk_snapshot(
                os.path.join(config.output_dir, f"mesh_{state.step:06d}.vtk"), state
            )
        try:
            for _ in range(n_steps):
                state, report = advance(state, spec)
                if state.step % spec.output_every == 0:
                    csv.write(_csv_line(diagnostics_row(state, report, spec.g)) + "\n")
                    csv.flush()
                if config.snapshot_every > 0 and state.step % config.snapshot_every == 0:
                    write_vtk_snapshot(
                        os.path.join(config.output_dir, f"mesh_{state.step:06d}.vtk"), state
                    )
        except SimulationError as err:
            error_line = f"error: {type(err).__name__}: step {state.step + 1}: {err}"
            print(error_line, file=sys.stderr)
            status = 2
    manifest_lines.append(f"completed_steps = {state.step}")
    manifest_lines.append("status = " + ("ok" if status == 0 else error_line))
    with open(manifest_path, "w") as fh:
        fh.write("\n".join(manifest_lines) + "\n")
    return status


def build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simulate",
        description="Moving-domain shallow-water runs (flag defaults in parentheses; "
        "flags override config-file keys of the same name).",
    )
    p.add_argument("--scenario", choices=["test1", "test2"], help="experiment to run (test1)")
    p.add_argument("--mesh", help="M1, M2, M3 or a triangle count (M1)")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--out", help="output directory (out)")
    p.add_argument("--dt", type=float, help="time step in seconds (0.05)")
    p.add_argument("--t-end", type=float, help="final time in seconds (200)")
    p.add_argument("--cd", type=float, help="drag coefficient (0.01)")
    p.add_argument("--nu", type=float, help="viscosity m^2/s (0.01)")
    p.add_argument("--kappa", type=float, help="contact-line strength (1.0)")
    p.add_argument("--gravity", type=float, help="gravity m/s^2 (1.0)")
    p.add_argument("--h-min", type=float, help="interior thickness floor (1e-6)")
    p.add_argument("--fp-tol", type=float, help="fixed-point tolerance (1e-8)")
    p.add_argument("--fp-max", type=int, help="fixed-point iteration cap (50)")
    p.add_argument("--relaxation", type=float, help="fixed-point relaxation (1.0)")
    p.add_argument("--forcing-duration", type=float, help="forcing window in seconds (20)")
    p.add_argument("--forcing-direction", help="two numbers, e.g. '1 0' (1 0)")
    p.add_argument("--output-every", type=int, help="steps between CSV rows (10)")
    p.add_argument("--snapshot-every", type=int, help="steps between VTK files, 0 disables (200)")
    p.add_argument("--print-config", action="store_true",
                   help="print the resolved configuration and exit")
    return p


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config) if args.config else RunConfig()
        flag_map = {
            "scenario": args.scenario,
            "mesh": args.mesh,
            "output_dir": args.out,
            "dt": args.dt,
            "t_end": args.t_end,
            "cd": args.cd,
            "nu": args.nu,
            "kappa": args.kappa,
            "gravity": args.gravity,
            "h_min": args.h_min,
            "fp_tol": args.fp_tol,
            "fp_max": args.fp_max,
            "relaxation": args.relaxation,
            "forcing_duration": args.forcing_duration,
            "output_every": args.output_every,
            "snapshot_every": args.snapshot_every,
        }
        if args.forcing_direction is not None:
            flag_map["forcing_direction"] = _parse_value(
                "forcing_direction", args.forcing_direction, "--forcing-direction"
            )
        updates = {k: v for k, v in flag_map.items() if v is not None}
        cfg = replace(cfg, **updates).validated()
        if args.print_config:
            spec, _ = _resolved_spec(cfg)
            t_end = cfg.t_end if cfg.t_end is not None else spec.t_end
            for line in resolved_config_lines(cfg, replace(spec, t_end=t_end)):
                print(line)
            return 0
        return run(cfg)
    except ConfigError as err:
        print(f"error: ConfigError: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
