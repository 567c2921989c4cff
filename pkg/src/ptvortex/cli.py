"""Command-line driver: solve, spectrum, stability, evolve, precession.

Every run writes its data products plus a `manifest.txt` under the output
directory and prints a one-line key=value summary on stdout.  Exit codes:
0 ok, 1 configuration error, 2 no convergence, 3 I/O error, 4 blow-up.
"""

import argparse
import concurrent.futures
import os
import subprocess
import sys
import time

import numpy as np

from . import __version__
from .basis import Wavefunction, build_basis, coeffs_to_grid
from .bdg import bdg_spectrum, stability_sweep
from .config import load_config, serialize_config
from .dynamics import PropagationConfig, evolve, offcenter_vortex, precession_experiment
from .errors import BlowUpError, ConfigError, ConvergenceError, JacobianSingularError
from .io import (write_branch_csv, write_coeffs_csv, write_gpe2, write_manifest,
                 write_omegas_csv, write_sweep_csv, write_trajectory_csv)
from .observables import azimuthal_current, current_density
from .potential import complex_on_grid
from .stationary import (BranchLabel, continue_branch, energy_split, initial_guess,
                         locate_bifurcation, solve_stationary, state_overlap)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_CONVERGENCE = 2
EXIT_IO = 3
EXIT_BLOWUP = 4

ALL_BRANCHES = (BranchLabel.GROUND, BranchLabel.EXCITED_X, BranchLabel.EXCITED_Y,
                BranchLabel.VORTEX_PLUS, BranchLabel.VORTEX_MINUS)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ptvortex",
        description="Spectral solver suite for 2D condensates with gain-loss potentials")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="run configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry (repeatable)")
        p.add_argument("--out", help="output directory (overrides run.output_dir)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, help="PRNG seed (overrides run.seed)")

    p = sub.add_parser("solve", help="solve one stationary state")
    common(p)
    p.add_argument("--branch", default="VORTEX_PLUS",
                   choices=[b.value for b in ALL_BRANCHES])

    p = sub.add_parser("spectrum", help="continue all five branches over gamma or d")
    common(p)

    p = sub.add_parser("stability", help="BdG stability sweep along the branches")
    common(p)
    p.add_argument("--dump-spectra", action="store_true",
                   help="write full omega CSVs per sweep point")

    p = sub.add_parser("evolve", help="noise-robustness time evolution of a state")
    common(p)
    p.add_argument("--branch", default="VORTEX_PLUS",
                   choices=[b.value for b in ALL_BRANCHES])
    p.add_argument("--snapshot-every", type=int, default=0,
                   help="dump a GPE2 snapshot every N steps (0 = ends only)")

    p = sub.add_parser("precession", help="off-center vortex trajectory experiment")
    common(p)
    p.add_argument("--x0", type=float, default=0.2)
    p.add_argument("--y0", type=float, default=0.2)
    p.add_argument("--snapshot-every", type=int, default=0)
    return parser


def _load(args):
    overrides = list(args.set)
    if args.config:
        config = load_config(args.config, overrides)
    else:
        from .config import config_from_mapping, parse_kv_text
        kv = {}
        for item in overrides:
            if "=" not in item:
                raise ConfigError(f"override must look like section.key=value, got {item!r}")
            key, value = item.split("=", 1)
            kv[key.strip()] = value.strip()
        config = config_from_mapping(kv)
    if args.out:
        config.output_dir = args.out
    if args.seed is not None:
        config.seed = args.seed
    return config


def _git_id():
    try:
        rev = subprocess.run(["git", "rev-parse", "--short", "HEAD"],
                             capture_output=True, text=True, timeout=5)
        if rev.returncode == 0:
            return rev.stdout.strip()
    except OSError:
        pass
    return "unknown"


class _Run:
    def __init__(self, command, config):
        self.command = command
        self.config = config
        self.outputs = []
        self.t0 = time.time()
        os.makedirs(config.output_dir, exist_ok=True)

    def path(self, name):
        full = os.path.join(self.config.output_dir, name)
        self.outputs.append(full)
        return full

    def finish(self, extra=None):
        entries = {"command": self.command,
                   "build": f"ptvortex-{__version__}+{_git_id()}",
                   "seed": self.config.seed,
                   "wall_time_s": f"{time.time() - self.t0:.3f}"}
        for line in serialize_config(self.config).strip().splitlines():
            key, value = (p.strip() for p in line.split("=", 1))
            entries[f"config.{key}"] = value
        for key, value in (extra or {}).items():
            entries[key] = value
        manifest = os.path.join(self.config.output_dir, "manifest.txt")
        entries["outputs"] = [os.path.relpath(p, self.config.output_dir)
                              for p in self.outputs]
        write_manifest(manifest, entries)


def _summary(command, status, **fields):
    parts = [f"command={command}", f"status={status}"]
    parts += [f"{k}={v}" for k, v in fields.items()]
    print(" ".join(parts))


def _state_row(value, state, basis):
    e_kin, e_pot = energy_split(state, basis)
    jphi = azimuthal_current(coeffs_to_grid(state.coeffs, basis))
    return (value, state.mu, e_kin, e_pot, jphi, state.residual_norm)


def _branch_outputs(run, branch, basis):
    label = branch.label.value.lower()
    rows = []
    for value, state in branch.samples:
        rows.append(_state_row(value, state, basis))
        write_coeffs_csv(run.path(f"{label}_{value:g}.coeff.csv"), state.coeffs, basis)
    write_branch_csv(run.path(f"{label}_branch.csv"), rows)
    return rows


def _dump_potential(run, config):
    values = complex_on_grid(config.potential, config.grid)
    write_gpe2(run.path("potential.gpe2"), Wavefunction(values, config.grid))


def cmd_solve(args, config):
    run = _Run("solve", config)
    basis = build_basis(config.n_max)
    label = BranchLabel(args.branch)
    guess = initial_guess(label, basis)
    state = solve_stationary(guess, config.g, config.potential, basis,
                             tol=config.solver_tol,
                             max_iter=max(config.solver_max_iter, 200), label=label)
    name = label.value.lower()
    write_coeffs_csv(run.path(f"{name}.coeff.csv"), state.coeffs, basis)
    psi = coeffs_to_grid(state.coeffs, basis, config.grid)
    write_gpe2(run.path(f"{name}.gpe2"), psi)
    _dump_potential(run, config)
    current = current_density(psi)
    write_gpe2(run.path(f"{name}_jx.gpe2"), Wavefunction(current.jx.astype(complex), config.grid))
    write_gpe2(run.path(f"{name}_jy.gpe2"), Wavefunction(current.jy.astype(complex), config.grid))
    row = _state_row(config.potential.gamma, state, basis)
    write_branch_csv(run.path(f"{name}_state.csv"), [row])
    run.finish({"branch": label.value, "mu_re": f"{state.mu.real!r}",
                "mu_im": f"{state.mu.imag!r}"})
    _summary("solve", "ok", branch=label.value, mu_re=f"{state.mu.real:.12g}",
             mu_im=f"{state.mu.imag:.3g}", jphi=f"{row[4]:.6g}",
             residual=f"{state.residual_norm:.3g}", out=config.output_dir)
    return EXIT_OK


def _sweep_values(config):
    if config.sweep is not None:
        return config.sweep
    return ("gamma", np.round(np.arange(0.0, 4.0 + 1e-9, 0.05), 10))


def cmd_spectrum(args, config):
    run = _Run("spectrum", config)
    basis = build_basis(config.n_max)
    parameter, values = _sweep_values(config)

    def one(label):
        return continue_branch(label, config.g, config.potential, parameter, values,
                               basis, tol=config.solver_tol,
                               max_iter=config.solver_max_iter)

    branches = _map_parallel(one, ALL_BRANCHES, args.threads)
    report = ["branch,last_param,terminated_at,reason,critical,partner"]
    for branch in branches:
        rows = _branch_outputs(run, branch, basis)
        if branch.terminated_at is None:
            continue
        floor = 1e-9 if branch.label in (BranchLabel.VORTEX_PLUS,
                                         BranchLabel.VORTEX_MINUS) else None
        try:
            critical = locate_bifurcation(branch, config.g, basis, refine_tol=1e-3,
                                          jphi_floor=floor)
        except (ValueError, ConvergenceError, JacobianSingularError):
            critical = np.nan
        partner = _merge_partner(branch, branches)
        last_param = branch.samples[-1][0]
        report.append(
            f"{branch.label.value},{last_param:.6g},{branch.terminated_at:.6g},"
            f"{branch.termination_reason},{critical:.6g},{partner}")
    with open(run.path("bifurcations.csv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(report) + "\n")
    run.finish({"parameter": parameter, "n_branches": len(branches)})
    _summary("spectrum", "ok", parameter=parameter,
             points=sum(len(b.samples) for b in branches), out=config.output_dir)
    return EXIT_OK


def _merge_partner(branch, branches):
    """Label of the branch whose mu is closest at the termination point."""
    v_end = branch.samples[-1][0]
    mu_end = branch.samples[-1][1].mu
    best, best_dist = "", np.inf
    for other in branches:
        if other.label is branch.label or not other.samples:
            continue
        values = other.parameter_values()
        idx = int(np.argmin(np.abs(values - v_end)))
        if abs(values[idx] - v_end) > 0.5:
            continue
        dist = abs(other.samples[idx][1].mu - mu_end)
        if dist < best_dist:
            best, best_dist = other.label.value, dist
    return best


def cmd_stability(args, config):
    run = _Run("stability", config)
    basis = build_basis(config.n_max)
    parameter, values = _sweep_values(config)

    def one(label):
        branch = continue_branch(label, config.g, config.potential, parameter, values,
                                 basis, tol=config.solver_tol,
                                 max_iter=config.solver_max_iter)
        return branch, stability_sweep(branch, basis)

    results = _map_parallel(one, ALL_BRANCHES, args.threads)
    for branch, rows in results:
        label = branch.label.value.lower()
        write_sweep_csv(run.path(f"{label}_stability.csv"), rows)
        if args.dump_spectra:
            for value, state in branch.samples:
                try:
                    spec = bdg_spectrum(state, basis)
                except ValueError:
                    continue
                write_omegas_csv(run.path(f"{label}_{value:g}_omegas.csv"), spec.omegas)
    run.finish({"parameter": parameter})
    _summary("stability", "ok", parameter=parameter, out=config.output_dir)
    return EXIT_OK


def _snapshot_writer(run, prefix, every):
    if not every:
        return None, None

    def sink(step, psi):
        write_gpe2(run.path(f"{prefix}_step{step:06d}.gpe2"), psi)
    return every, sink


def cmd_evolve(args, config):
    run = _Run("evolve", config)
    basis = build_basis(config.n_max)
    label = BranchLabel(args.branch)
    state = solve_stationary(initial_guess(label, basis), config.g, config.potential,
                             basis, tol=config.solver_tol,
                             max_iter=max(config.solver_max_iter, 200), label=label)
    psi0 = coeffs_to_grid(state.coeffs, basis, config.grid)
    name = label.value.lower()
    write_gpe2(run.path(f"{name}_initial.gpe2"), psi0)
    _dump_potential(run, config)
    every, sink = _snapshot_writer(run, name, args.snapshot_every)
    traj, final = evolve(psi0, config.propagation, config.g, config.potential,
                         seed=config.seed, snapshot_every=every, snapshot_sink=sink)
    write_trajectory_csv(run.path(f"{name}_trajectory.csv"), traj)
    write_gpe2(run.path(f"{name}_final.gpe2"), final)
    run.finish({"branch": label.value, "final_overlap": f"{traj.overlaps[-1]!r}",
                "final_norm": f"{traj.norms[-1]!r}"})
    _summary("evolve", "ok", branch=label.value, steps=config.propagation.n_steps,
             final_overlap=f"{traj.overlaps[-1]:.6g}",
             final_norm=f"{traj.norms[-1]:.6g}", out=config.output_dir)
    return EXIT_OK


def cmd_precession(args, config):
    run = _Run("precession", config)
    prop = config.propagation
    psi0 = offcenter_vortex(args.x0, args.y0, config.grid)
    write_gpe2(run.path("precession_initial.gpe2"), psi0)
    _dump_potential(run, config)
    every, sink = _snapshot_writer(run, "precession", args.snapshot_every)
    config_prop = PropagationConfig(n_steps=prop.n_steps, dt=prop.dt,
                                    record_every=prop.record_every, grid=config.grid)
    traj, final = evolve(psi0, config_prop, config.g, config.potential,
                         seed=config.seed, track=True,
                         snapshot_every=every, snapshot_sink=sink)
    write_trajectory_csv(run.path("precession_trajectory.csv"), traj)
    write_gpe2(run.path("precession_final.gpe2"), final)
    status = traj.termination_reason or "completed"
    run.finish({"x0": args.x0, "y0": args.y0, "gamma": config.potential.gamma,
                "termination": status})
    _summary("precession", "ok", gamma=config.potential.gamma,
             records=len(traj.times), termination=f"\"{status}\"",
             out=config.output_dir)
    return EXIT_OK


def _map_parallel(fn, items, threads):
    if threads <= 1:
        return [fn(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


_COMMANDS = {"solve": cmd_solve, "spectrum": cmd_spectrum, "stability": cmd_stability,
             "evolve": cmd_evolve, "precession": cmd_precession}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        config = _load(args)
    except (ConfigError, OSError) as exc:
        _summary(args.command, "error", code=EXIT_CONFIG, error=f"\"{exc}\"")
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args, config)
    except (ConvergenceError, JacobianSingularError) as exc:
        _summary(args.command, "error", code=EXIT_NO_CONVERGENCE, error=f"\"{exc}\"")
        return EXIT_NO_CONVERGENCE
    except BlowUpError as exc:
        _summary(args.command, "error", code=EXIT_BLOWUP, step=exc.step, error=f"\"{exc}\"")
        return EXIT_BLOWUP
    except OSError as exc:
        _summary(args.command, "error", code=EXIT_IO, error=f"\"{exc}\"")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
