"""Figure recipes F1-F8: required inputs and render functions.

Each recipe reads files from a data directory produced by the solver CLI
(layout documented in the README / Makefile) and renders one deterministic
image.  Missing inputs fail loudly with the offending path.
"""

import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .formats import read_branch_csv, read_gpe2, read_stability_csv, read_trajectory_csv

BRANCHES = ("ground", "excited_x", "excited_y", "vortex_plus", "vortex_minus")
BRANCH_STYLE = {
    "ground": ("tab:blue", "ground"),
    "excited_x": ("tab:orange", "excited x"),
    "excited_y": ("tab:green", "excited y"),
    "vortex_plus": ("tab:red", "vortex"),
    "vortex_minus": ("tab:red", None),  # degenerate pair plots as one curve
}
QUIVER_STRIDE = 8


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    description: str
    inputs: tuple  # relative paths or (glob-ish) templates
    render: callable = None


def _require(data_dir, relative):
    path = os.path.join(data_dir, relative)
    if not os.path.exists(path):
        raise FileNotFoundError(f"missing input for figure: {path}")
    return path


def _branch_files(data_dir, run):
    return {name: _require(data_dir, os.path.join(run, f"{name}_branch.csv"))
            for name in BRANCHES}


def _plot_spectrum_panel(ax, files, zoom=None):
    for name in BRANCHES:
        color, label = BRANCH_STYLE[name]
        table = read_branch_csv(files[name])
        ax.plot(table["param"], table["mu_re"], color=color, label=label, lw=1.2)
    ax.set_xlabel(r"$\Gamma$")
    ax.set_ylabel(r"$\mu$")
    if zoom is not None:
        ax.set_xlim(zoom[0])
        ax.set_ylim(zoom[1])


def _vortex_zoom(files):
    vortex = read_branch_csv(files["vortex_plus"])
    end = vortex["param"].max()
    lo = max(0.0, end - 0.4 * (end - vortex["param"].min()) - 1e-6)
    mu = vortex["mu_re"]
    pad = 0.2 * (mu.max() - mu.min() + 1e-3)
    return (lo, end * 1.05 + 1e-3), (mu.min() - pad, mu.max() + pad)


def render_f1(data_dir, out_path):
    """Three-panel gain-loss profile surfaces."""
    fig, axes = plt.subplots(1, 3, figsize=(10.5, 3.2), constrained_layout=True)
    for ax, (tag, title) in zip(axes, (("pot_a", "profile a"),
                                       ("pot_b", "profile b"),
                                       ("pot_c", "profile c, d=3"))):
        field = read_gpe2(_require(data_dir, os.path.join(tag, "potential.gpe2")))
        im = ax.imshow(field.values.imag, origin="lower", extent=field.extent,
                       cmap="RdBu_r")
        ax.set_title(title)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.suptitle("imaginary potential part")
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_f2(data_dir, out_path):
    """Spectra vs gain-loss strength for profiles a and b, with zoomed extracts."""
    fig, axes = plt.subplots(2, 2, figsize=(9, 7), constrained_layout=True)
    for col, run in enumerate(("spec_a", "spec_b")):
        files = _branch_files(data_dir, run)
        _plot_spectrum_panel(axes[0, col], files)
        axes[0, col].set_title(f"profile {run[-1]}")
        _plot_spectrum_panel(axes[1, col], files, zoom=_vortex_zoom(files))
        axes[1, col].set_title("bifurcation region")
    axes[0, 0].legend(loc="best", fontsize=8)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_f3(data_dir, out_path):
    """Chemical potential and energy contributions of the excited states vs d."""
    fx = read_branch_csv(_require(data_dir, "specd_c/excited_x_branch.csv"))
    fy = read_branch_csv(_require(data_dir, "specd_c/excited_y_branch.csv"))
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 6.5), sharex=True,
                                      constrained_layout=True)
    top.plot(fx["param"], fx["mu_re"], color="tab:orange", label="excited x")
    top.plot(fy["param"], fy["mu_re"], color="tab:green", label="excited y")
    top.set_ylabel(r"$\mu$")
    top.legend(fontsize=8)
    for table, color, tag in ((fx, "tab:orange", "x"), (fy, "tab:green", "y")):
        bottom.plot(table["param"], table["Ekin"], color=color, ls="-",
                    label=f"E_kin ({tag})")
        bottom.plot(table["param"], table["Epot_re"], color=color, ls="--",
                    label=f"Re E_pot ({tag})")
    bottom.set_xlabel("d")
    bottom.set_ylabel("energy contributions")
    bottom.legend(fontsize=8)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def _density_phase_column(axes_col, state_path, jx_path, jy_path, title):
    psi = read_gpe2(state_path)
    jx = read_gpe2(jx_path).values.real
    jy = read_gpe2(jy_path).values.real
    density = np.abs(psi.values) ** 2
    top, bottom = axes_col
    top.imshow(density, origin="lower", extent=psi.extent, cmap="viridis")
    s = QUIVER_STRIDE
    x, y = psi.x(), psi.y()
    top.quiver(x[::s], y[::s], jx[::s, ::s], jy[::s, ::s], color="white",
               scale_units="xy", angles="xy")
    top.set_title(title, fontsize=9)
    bottom.imshow(np.angle(psi.values), origin="lower", extent=psi.extent,
                  cmap="twilight", vmin=-np.pi, vmax=np.pi)
    for ax in (top, bottom):
        ax.set_xlabel("x")
        ax.set_ylabel("y")


def render_f4(data_dir, out_path):
    """Vortex density with current arrows (top) and phase (bottom)."""
    runs = ("state_a_g0", "state_a_g1", "state_b_g0", "state_b_g1")
    titles = ("a, no gain-loss", "a, with gain-loss",
              "b, no gain-loss", "b, with gain-loss")
    fig, axes = plt.subplots(2, len(runs), figsize=(3.0 * len(runs), 6),
                             constrained_layout=True)
    for col, (run, title) in enumerate(zip(runs, titles)):
        _density_phase_column(
            (axes[0, col], axes[1, col]),
            _require(data_dir, os.path.join(run, "vortex_plus.gpe2")),
            _require(data_dir, os.path.join(run, "vortex_plus_jx.gpe2")),
            _require(data_dir, os.path.join(run, "vortex_plus_jy.gpe2")),
            title)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_f5(data_dir, out_path):
    """Integrated azimuthal current projection along the vortex branch."""
    vortex = read_branch_csv(_require(data_dir, "spec_a/vortex_plus_branch.csv"))
    excited = read_branch_csv(_require(data_dir, "spec_a/excited_x_branch.csv"))
    fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
    ax.plot(vortex["param"], vortex["Jphi"], color="tab:red", label="vortex")
    ax.plot(excited["param"], excited["Jphi"], color="tab:orange", ls="--",
            label="excited x")
    ax.set_xlabel(r"$\Gamma$")
    ax.set_ylabel(r"$J_\varphi$")
    ax.legend(fontsize=8)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_f6(data_dir, out_path):
    """Positive imaginary parts of the stability eigenfrequencies."""
    fig, axes = plt.subplots(2, 1, figsize=(6, 6.5), sharex=False,
                             constrained_layout=True)
    for ax, run in zip(axes, ("stab_a", "stab_b")):
        for name in BRANCHES:
            color, label = BRANCH_STYLE[name]
            path = os.path.join(data_dir, run, f"{name}_stability.csv")
            if not os.path.exists(path):
                continue
            table = read_stability_csv(path)
            ax.plot(table["param"], table["max_imag"], color=color, label=label)
        ax.set_xlabel(r"$\Gamma$")
        ax.set_ylabel(r"max Im $\omega$")
        ax.set_title(f"profile {run[-1]}", fontsize=9)
    handles, labels = axes[0].get_legend_handles_labels()
    if handles:
        axes[0].legend(fontsize=8)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_f7(data_dir, out_path):
    """Four vortex-center trajectory panels."""
    runs = ("prec_gamma0", "prec_gamma05", "prec_gamma08", "prec_broken")
    titles = ("balanced, off", "balanced, weak", "balanced, strong", "broken")
    fig, axes = plt.subplots(1, 4, figsize=(13, 3.4), constrained_layout=True)
    for ax, run, title in zip(axes, runs, titles):
        table = read_trajectory_csv(
            _require(data_dir, os.path.join(run, "precession_trajectory.csv")))
        points = ax.scatter(table["x"], table["y"], c=table["t"], s=2, cmap="plasma")
        ax.plot(0, 0, "k+", ms=8)
        ax.set_title(title, fontsize=9)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
    fig.colorbar(points, ax=axes[-1], label="t")
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_f8(data_dir, out_path):
    """Spectra for several interaction strengths."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), constrained_layout=True)
    for ax, kind in zip(axes, ("a", "b")):
        for g, ls in (("1", "-"), ("2", "--"), ("4", ":")):
            files = _branch_files(data_dir, f"spec_{kind}_g{g}")
            for name in BRANCHES:
                color, _ = BRANCH_STYLE[name]
                table = read_branch_csv(files[name])
                ax.plot(table["param"], table["mu_re"], color=color, ls=ls, lw=1.0)
        ax.set_title(f"profile {kind} (g = 1, 2, 4)", fontsize=9)
        ax.set_xlabel(r"$\Gamma$")
        ax.set_ylabel(r"$\mu$")
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


RECIPES = {
    "F1": FigureRecipe("F1", "gain-loss potential surfaces",
                       ("pot_a/potential.gpe2", "pot_b/potential.gpe2",
                        "pot_c/potential.gpe2"), render_f1),
    "F2": FigureRecipe("F2", "spectra vs gain-loss strength (profiles a, b)",
                       tuple(f"spec_{k}/{b}_branch.csv" for k in "ab" for b in BRANCHES),
                       render_f2),
    "F3": FigureRecipe("F3", "excited-state energies vs peak offset d",
                       ("specd_c/excited_x_branch.csv", "specd_c/excited_y_branch.csv"),
                       render_f3),
    "F4": FigureRecipe("F4", "vortex density with current arrows, and phase",
                       tuple(f"state_{k}_g{g}/vortex_plus{suffix}.gpe2"
                             for k in "ab" for g in "01"
                             for suffix in ("", "_jx", "_jy")), render_f4),
    "F5": FigureRecipe("F5", "azimuthal current projection vs gain-loss strength",
                       ("spec_a/vortex_plus_branch.csv", "spec_a/excited_x_branch.csv"),
                       render_f5),
    "F6": FigureRecipe("F6", "stability eigenfrequency imaginary parts",
                       ("stab_a/vortex_plus_stability.csv",
                        "stab_b/vortex_plus_stability.csv"), render_f6),
    "F7": FigureRecipe("F7", "off-center vortex trajectories",
                       tuple(f"{run}/precession_trajectory.csv"
                             for run in ("prec_gamma0", "prec_gamma05",
                                         "prec_gamma08", "prec_broken")), render_f7),
    "F8": FigureRecipe("F8", "spectra for several interaction strengths",
                       tuple(f"spec_{k}_g{g}/{b}_branch.csv"
                             for k in "ab" for g in "124" for b in BRANCHES),
                       render_f8),
}


def render(figure_id, data_dir, out_path):
    """Render one figure; raises FileNotFoundError naming any missing input."""
    recipe = RECIPES.get(figure_id.upper())
    if recipe is None:
        raise KeyError(f"unknown figure id {figure_id!r} (have {sorted(RECIPES)})")
    for relative in recipe.inputs:
        _require(data_dir, relative)
    recipe.render(data_dir, out_path)
    return out_path
