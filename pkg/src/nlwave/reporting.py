"""Delimited output, JSON manifests, and the figures rendered beside them.

CSV files follow RFC 4180 (csv module defaults, '.' decimal separator,
header row); floats are written with repr so re-running a configuration
reproduces the bytes exactly.  Figures are PNG files rendered with the Agg
backend into the same output directory as the data they illustrate.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import __version__
from .dynamics import Trajectory
from .kernels import KernelMeasure, dispersion, symbol
from .limits import ConvergenceReport, ENVELOPE_SLACK
from .picard import PicardRun

SCHEMA_VERSION = 1


def _fmt(x) -> str:
    return repr(float(x))


def write_json(obj, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def write_snapshot_csv(state, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "u", "v"])
        for x, u, v in zip(state.grid.x, state.u.values, state.v.values):
            writer.writerow([_fmt(x), _fmt(u), _fmt(v)])
    return path


def write_energy_csv(traj: Trajectory, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "energy", "s"])
        for e in traj.energies:
            writer.writerow([_fmt(e.t), _fmt(e.value), _fmt(e.s)])
    return path


def write_kernel_csv(kernel: KernelMeasure, xi: np.ndarray, path) -> Path:
    path = Path(path)
    sym = symbol(kernel, xi)
    omega = np.sqrt(np.maximum(dispersion(kernel, xi), 0.0))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["xi", "symbol", "omega"])
        for row in zip(xi, sym, omega):
            writer.writerow([_fmt(v) for v in row])
    return path


def write_study_csv(report: ConvergenceReport, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eps", "t", "error"])
        for eps, curve in zip(report.eps_list, report.error_curves):
            for t, e in zip(report.times, curve):
                writer.writerow([_fmt(eps), _fmt(t), _fmt(e)])
    return path


def build_manifest(config_echo: dict, monitors: dict, outputs: list, wall_time: float, extra=None) -> dict:
    manifest = {
        "schema": SCHEMA_VERSION,
        "config_echo": config_echo,
        "versions": {"nlwave": __version__},
        "monitors": monitors,
        "outputs": [str(p) for p in outputs],
        "wall_time": wall_time,
    }
    if extra:
        manifest.update(extra)
    return manifest


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------


def render_kernel_figure(kernel: KernelMeasure, xi: np.ndarray, path) -> Path:
    path = Path(path)
    sym = symbol(kernel, xi)
    omega = np.sqrt(np.maximum(dispersion(kernel, xi), 0.0))
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.2))
    axes[0].plot(xi, sym)
    axes[0].set_xlabel(r"$\xi$")
    axes[0].set_ylabel("symbol")
    axes[1].plot(xi, omega)
    axes[1].plot(xi, xi, ls="--", lw=0.8, color="gray", label="nondispersive")
    axes[1].set_xlabel(r"$\xi$")
    axes[1].set_ylabel(r"$\omega(\xi)$")
    axes[1].legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_trajectory_figure(traj: Trajectory, path) -> Path:
    path = Path(path)
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.2))
    first, last = traj.states[0], traj.states[-1]
    x = first.grid.x
    axes[0].plot(x, first.u.values, label=f"u, t={first.t:g}")
    axes[0].plot(x, last.u.values, label=f"u, t={last.t:g}")
    axes[0].set_xlabel("x")
    axes[0].set_ylabel("u")
    axes[0].legend(frameon=False)
    ts = [e.t for e in traj.energies]
    es = [e.value for e in traj.energies]
    axes[1].plot(ts, es)
    axes[1].set_xlabel("t")
    axes[1].set_ylabel(f"energy (s={traj.energies[0].s:g})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_study_figures(report: ConvergenceReport, order_path, envelope_path) -> list[Path]:
    order_path, envelope_path = Path(order_path), Path(envelope_path)
    eps = np.asarray(report.eps_list)
    e_final = np.asarray(report.errors_at_final)

    fig, ax = plt.subplots(figsize=(4.8, 3.6))
    ax.loglog(eps, e_final, "o", label="measured e(T)")
    ref = e_final[0] * (eps / eps[0]) ** report.fitted_order
    ax.loglog(eps, ref, "--", label=f"slope {report.fitted_order:.3f}")
    ax.set_xlabel(r"$\varepsilon$")
    ax.set_ylabel(f"error in H^{report.sigma:g}")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(order_path, dpi=150)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(4.8, 3.6))
    for epsv, curve in zip(report.eps_list, report.error_curves):
        (line,) = ax.plot(report.times, curve, label=f"eps={epsv:g}")
        env = ENVELOPE_SLACK * epsv * np.expm1(report.fitted_C * report.times)
        ax.plot(report.times, env, ls="--", lw=0.8, color=line.get_color())
    ax.set_xlabel("t")
    ax.set_ylabel("error / envelope")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(envelope_path, dpi=150)
    plt.close(fig)
    return [order_path, envelope_path]


def render_picard_figure(run: PicardRun, path) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(4.8, 3.6))
    ax.semilogy(range(1, len(run.diff_norms) + 1), run.diff_norms, "o-")
    ax.set_xlabel("iteration")
    ax.set_ylabel("sup-in-time difference norm")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
