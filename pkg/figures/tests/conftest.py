import subprocess
import sys

import pytest

SOLVER = [sys.executable, "-m", "ptvortex.cli"]


def run_solver(args):
    result = subprocess.run(SOLVER + args, capture_output=True, text=True)
    if result.returncode != 0:
        raise RuntimeError(f"solver failed ({result.returncode}): {args}\n"
                           f"{result.stdout}\n{result.stderr}")
    return result


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    """Reduced but complete data layout produced by the solver CLI."""
    root = tmp_path_factory.mktemp("figdata")

    for kind, extra in (("A", []), ("B", []), ("C", ["--set", "potential.d=3.0"])):
        run_solver(["solve", "--branch", "GROUND", "--out",
                    str(root / f"pot_{kind.lower()}"), "--set", f"potential.kind={kind}",
                    "--set", "potential.gamma=1.0", "--set", "run.g=0.0"] + extra)

    sweep = ["--set", "sweep.parameter=gamma", "--set", "sweep.values=0.0,0.5,1.0"]
    for kind in ("a", "b"):
        run_solver(["spectrum", "--out", str(root / f"spec_{kind}"),
                    "--set", f"potential.kind={kind.upper()}"] + sweep)
        run_solver(["stability", "--out", str(root / f"stab_{kind}"),
                    "--set", f"potential.kind={kind.upper()}",
                    "--set", "sweep.parameter=gamma", "--set", "sweep.values=0.0,0.5"])
        for g in ("1", "2", "4"):
            run_solver(["spectrum", "--out", str(root / f"spec_{kind}_g{g}"),
                        "--set", f"potential.kind={kind.upper()}",
                        "--set", f"run.g={g}.0"] + sweep)
        for gamma, tag in (("0.0", "g0"), ("1.0", "g1")):
            run_solver(["solve", "--branch", "VORTEX_PLUS",
                        "--out", str(root / f"state_{kind}_{tag}"),
                        "--set", f"potential.kind={kind.upper()}",
                        "--set", f"potential.gamma={gamma}"])

    run_solver(["spectrum", "--out", str(root / "specd_c"),
                "--set", "potential.kind=C", "--set", "potential.gamma=2.0",
                "--set", "sweep.parameter=d", "--set", "sweep.values=0.0,0.5,1.0"])

    for tag, kind, gamma in (("prec_gamma0", "C", "0.0"), ("prec_gamma05", "C", "0.5"),
                             ("prec_gamma08", "C", "0.8"),
                             ("prec_broken", "PT_BROKEN_C", "0.5")):
        run_solver(["precession", "--out", str(root / tag),
                    "--set", f"potential.kind={kind}", "--set", "potential.d=1.0",
                    "--set", f"potential.gamma={gamma}",
                    "--set", "propagation.n_steps=60",
                    "--set", "propagation.record_every=10"])
    return root
