"""Run configuration (flat `section.key = value` text) and unit conversion.

All solver code consumes dimensionless oscillator units; the only physical
input is the interaction strength g = 8 pi N a / r0 computed here.  Defaults
reproduce the reference numerical parameters: n_max = 11, field of view
[-5, 5]^2 with 128 points per axis, dt = 1e-3.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np

from .basis import GridSpec, default_grid
from .dynamics import PropagationConfig
from .errors import ConfigError
from .potential import PotentialKind, PotentialSpec


def g_from_physical(n_atoms, scattering_length, trap_length):
    """Dimensionless interaction strength 8 pi N a / r0."""
    if n_atoms < 1:
        raise ValueError("particle number must be at least 1")
    if trap_length <= 0:
        raise ValueError("trap length must be positive")
    if scattering_length < 0:
        raise ValueError("scattering length must be non-negative")
    return 8.0 * np.pi * n_atoms * scattering_length / trap_length


@dataclass
class RunConfig:
    g: float = 1.0
    potential: PotentialSpec = dc_field(default_factory=lambda: PotentialSpec(PotentialKind.A))
    n_max: int = 11
    grid: GridSpec = dc_field(default_factory=default_grid)
    propagation: PropagationConfig = None
    sweep: tuple = None  # (parameter name, values array)
    seed: int = 0
    output_dir: str = "out"
    solver_tol: float = 1e-10
    solver_max_iter: int = 100

    def __post_init__(self):
        if self.propagation is None:
            self.propagation = PropagationConfig(n_steps=1000, dt=1e-3, grid=self.grid)


_DEFAULTS = {
    "run.g": "1.0",
    "run.seed": "0",
    "run.output_dir": "out",
    "basis.n_max": "11",
    "grid.x_min": "-5.0",
    "grid.x_max": "5.0",
    "grid.y_min": "-5.0",
    "grid.y_max": "5.0",
    "grid.n_x": "128",
    "grid.n_y": "128",
    "potential.kind": "A",
    "potential.d": "1.0",
    "potential.gamma": "0.0",
    "potential.gain_factor": "",
    "propagation.dt": "1e-3",
    "propagation.n_steps": "1000",
    "propagation.noise_amplitude": "0.0",
    "propagation.record_every": "1",
    "sweep.parameter": "",
    "sweep.values": "",
    "solver.tol": "1e-10",
    "solver.max_iter": "100",
}


def parse_kv_text(text):
    """Parse `section.key = value` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value
    return out


def _get_float(kv, key, errors):
    try:
        return float(kv[key])
    except ValueError:
        errors.append(f"{key}: not a number ({kv[key]!r})")
        return 0.0


def _get_int(kv, key, errors):
    try:
        return int(kv[key])
    except ValueError:
        errors.append(f"{key}: not an integer ({kv[key]!r})")
        return 0


def config_from_mapping(kv):
    """Build a RunConfig from a key-value mapping, aggregating all violations."""
    unknown = sorted(set(kv) - set(_DEFAULTS))
    merged = dict(_DEFAULTS)
    merged.update({k: v for k, v in kv.items() if k in _DEFAULTS})

    errors = [f"unknown key {k!r}" for k in unknown]
    g = _get_float(merged, "run.g", errors)
    if g < 0:
        errors.append("run.g: interaction strength must be non-negative (repulsive)")
    seed = _get_int(merged, "run.seed", errors)
    n_max = _get_int(merged, "basis.n_max", errors)
    if not 0 <= n_max <= 64:
        errors.append(f"basis.n_max: must be in [0, 64], got {n_max}")

    grid = None
    try:
        grid = GridSpec(
            x_min=_get_float(merged, "grid.x_min", errors),
            x_max=_get_float(merged, "grid.x_max", errors),
            y_min=_get_float(merged, "grid.y_min", errors),
            y_max=_get_float(merged, "grid.y_max", errors),
            n_x=_get_int(merged, "grid.n_x", errors),
            n_y=_get_int(merged, "grid.n_y", errors),
        )
    except ValueError as exc:
        errors.append(f"grid: {exc}")

    potential = None
    kind_raw = merged["potential.kind"]
    try:
        kind = PotentialKind(kind_raw)
        if kind is PotentialKind.CUSTOM:
            errors.append("potential.kind: CUSTOM potentials cannot be configured from text")
        else:
            gain = merged["potential.gain_factor"].strip()
            gamma = _get_float(merged, "potential.gamma", errors)
            if gamma < 0:
                errors.append("potential.gamma: gain-loss strength must be non-negative")
            potential = PotentialSpec(
                kind,
                d=_get_float(merged, "potential.d", errors),
                gamma=gamma,
                gain_factor=float(gain) if gain else None,
            )
    except ValueError as exc:
        errors.append(f"potential.kind: unknown potential kind {kind_raw!r} ({exc})")

    propagation = None
    dt = _get_float(merged, "propagation.dt", errors)
    n_steps = _get_int(merged, "propagation.n_steps", errors)
    noise = _get_float(merged, "propagation.noise_amplitude", errors)
    record_every = _get_int(merged, "propagation.record_every", errors)
    if dt <= 0:
        errors.append("propagation.dt: time step must be positive")
    if n_steps < 0:
        errors.append("propagation.n_steps: step count must be non-negative")
    if noise < 0:
        errors.append("propagation.noise_amplitude: must be non-negative")
    if record_every < 1:
        errors.append("propagation.record_every: must be at least 1")
    if grid is not None and dt > 0 and n_steps >= 0 and record_every >= 1 and noise >= 0:
        propagation = PropagationConfig(n_steps=n_steps, dt=dt, noise_amplitude=noise,
                                        record_every=record_every, grid=grid)

    sweep = None
    sweep_param = merged["sweep.parameter"].strip()
    if sweep_param:
        if sweep_param not in ("gamma", "d"):
            errors.append(f"sweep.parameter: must be 'gamma' or 'd', got {sweep_param!r}")
        else:
            try:
                values = np.array([float(v) for v in merged["sweep.values"].split(",") if v.strip()])
                if values.size == 0:
                    errors.append("sweep.values: empty value list")
                sweep = (sweep_param, values)
            except ValueError:
                errors.append(f"sweep.values: not a comma-separated number list")

    tol = _get_float(merged, "solver.tol", errors)
    if tol <= 0:
        errors.append("solver.tol: must be positive")
    max_iter = _get_int(merged, "solver.max_iter", errors)
    if max_iter < 1:
        errors.append("solver.max_iter: must be at least 1")

    if errors:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))
    return RunConfig(g=g, potential=potential, n_max=n_max, grid=grid,
                     propagation=propagation, sweep=sweep, seed=seed,
                     output_dir=merged["run.output_dir"],
                     solver_tol=tol, solver_max_iter=max_iter)


def load_config(path, overrides=None):
    """Load a config file and apply 'section.key=value' override strings."""
    with open(path, "r", encoding="utf-8") as fh:
        kv = parse_kv_text(fh.read())
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        key, value = item.split("=", 1)
        kv[key.strip()] = value.strip()
    return config_from_mapping(kv)


def serialize_config(config):
    """Render a RunConfig back to the flat text format (load/serialize round-trips)."""
    lines = [
        f"run.g = {config.g!r}",
        f"run.seed = {config.seed}",
        f"run.output_dir = {config.output_dir}",
        f"basis.n_max = {config.n_max}",
        f"grid.x_min = {config.grid.x_min!r}",
        f"grid.x_max = {config.grid.x_max!r}",
        f"grid.y_min = {config.grid.y_min!r}",
        f"grid.y_max = {config.grid.y_max!r}",
        f"grid.n_x = {config.grid.n_x}",
        f"grid.n_y = {config.grid.n_y}",
        f"potential.kind = {config.potential.kind.value}",
        f"potential.d = {config.potential.d!r}",
        f"potential.gamma = {config.potential.gamma!r}",
        f"potential.gain_factor = {config.potential.gain_factor!r}",
        f"propagation.dt = {config.propagation.dt!r}",
        f"propagation.n_steps = {config.propagation.n_steps}",
        f"propagation.noise_amplitude = {config.propagation.noise_amplitude!r}",
        f"propagation.record_every = {config.propagation.record_every}",
        f"solver.tol = {config.solver_tol!r}",
        f"solver.max_iter = {config.solver_max_iter}",
    ]
    if config.sweep is not None:
        name, values = config.sweep
        lines.append(f"sweep.parameter = {name}")
        lines.append("sweep.values = " + ",".join(repr(float(v)) for v in values))
    return "\n".join(lines) + "\n"


def validate(config):
    """Re-validate a RunConfig; returns a list of violation messages (empty if ok)."""
    try:
        config_from_mapping(parse_kv_text(serialize_config(config)))
    except ConfigError as exc:
        return str(exc).splitlines()[1:]
    return []
