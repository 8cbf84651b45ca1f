"""Fixed-point iteration on the frozen-coefficient linear system.

Each stage solves u_t = v_x, v_t = B u_x + w_n u_x with w_n = g'(u^n)
frozen from the previous iterate, starting from the constant-in-time
iterate (u^0, v^0) = (u0, v0).  Successive differences are measured in
sup-in-time H^{s-1}, one derivative below the working norm, and are
expected to decay geometrically in the small-data regime.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .dynamics import (
    SimConfig,
    Trajectory,
    WaveState,
    _check_hyperbolicity,
    _run_loop,
    effective_steps,
)
from .errors import NoContraction, WidthUnresolvable
from .spectral import SpectralField, bump_symbol, sobolev_norm

CONTRACTION_CEILING = 0.9


@dataclass(frozen=True)
class PicardRun:
    iterates: list[Trajectory]
    diff_norms: list[float]
    contraction_factors: list[float]
    converged: bool
    tol: float

    def final(self) -> Trajectory:
        return self.iterates[-1]

    def to_dict(self) -> dict:
        return {
            "diff_norms": [float(d) for d in self.diff_norms],
            "contraction_factors": [float(r) for r in self.contraction_factors],
            "converged": self.converged,
            "iterations": len(self.iterates),
            "tol": self.tol,
        }


def _as_w_array(w_traj, n_points: int) -> np.ndarray:
    if isinstance(w_traj, np.ndarray):
        arr = w_traj
    else:
        arr = np.stack(
            [w.values if isinstance(w, SpectralField) else np.asarray(w, float) for w in w_traj]
        )
    if arr.ndim != 2 or arr.shape[0] != n_points:
        raise ValueError(
            f"coefficient samples must have shape ({n_points}, N), got {arr.shape}"
        )
    return arr


def solve_frozen(
    config: SimConfig,
    w_times,
    w_traj,
    init: WaveState,
    sample_every: int = 1,
    mollifier_width: float | None = None,
) -> Trajectory:
    """Integrate the frozen-coefficient system with w(x, t) interpolated
    cubically in time from the given samples.

    w_times must cover [0, t_final] so Runge-Kutta stage times interpolate
    rather than extrapolate.  With mollifier_width set, both transport terms
    are pre-smoothed by J^h (the regularized variant of the system).
    """
    w_times = np.asarray(w_times, dtype=float)
    w_arr = _as_w_array(w_traj, w_times.size)
    _check_hyperbolicity(config, w_arr, 0.0)
    if w_times[0] > 0.0 or w_times[-1] < config.t_final - 1e-12:
        raise ValueError("coefficient samples must cover [0, t_final]")
    # stage times fall between samples; require at least 8 samples per time
    # unit so the cubic interpolant does not limit the integrator order
    required = max(1, math.ceil(8.0 * config.t_final))
    if w_times.size - 1 < required:
        raise ValueError(
            f"need at least {required + 1} coefficient samples on [0, t_final], "
            f"got {w_times.size}"
        )
    spline = CubicSpline(w_times, w_arr, axis=0)

    def w_of_t(t):
        return spline(min(max(t, w_times[0]), w_times[-1]))

    j_mult = None
    if mollifier_width is not None:
        if mollifier_width < 2.0 * config.grid.dx:
            raise WidthUnresolvable(
                f"mollifier width {mollifier_width:.6g} below resolvable limit",
                width=mollifier_width,
            )
        j_mult = bump_symbol(mollifier_width * config.grid.xi)

    def rhs(ws):
        return lambda t, u, v: ws.rhs_frozen(t, u, v, w_of_t, j_mult)

    return _run_loop(config, init, rhs, sample_every)


def _sup_diff(traj_a: Trajectory, traj_b: Trajectory, s: float) -> float:
    worst = 0.0
    for sa, sb in zip(traj_a.states, traj_b.states):
        d = sobolev_norm(sa.u - sb.u, s) + sobolev_norm(sa.v - sb.v, s)
        worst = max(worst, d)
    return worst


def _constant_trajectory(config: SimConfig, init: WaveState) -> Trajectory:
    """Iterate zero: the initial data held fixed at every step time."""
    n_steps, dt = effective_steps(config.t_final, config.dt)
    times = dt * np.arange(n_steps + 1)
    states = [WaveState(init.u, init.v, float(t)) for t in times]
    return Trajectory(
        times=times,
        states=states,
        energies=[],
        monitors=None,
        dt=dt,
        n_steps=n_steps,
    )


def picard_solve(config: SimConfig, init: WaveState, max_iters: int, tol: float) -> PicardRun:
    """Iterate frozen-coefficient solves until the sup-H^{s-1} difference of
    successive iterates drops below tol, raising NoContraction when the
    ratios stay above 0.9 twice in a row."""
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    s_diff = config.s_norm - 1.0
    nl = config.nonlinearity

    prev = _constant_trajectory(config, init)
    iterates: list[Trajectory] = []
    diff_norms: list[float] = []
    factors: list[float] = []
    converged = False

    for _ in range(max_iters):
        w_vals = np.stack([nl.gprime(st.u.values) for st in prev.states])
        traj = solve_frozen(config, prev.times, w_vals, init, sample_every=1)
        d = _sup_diff(traj, prev, s_diff)
        diff_norms.append(d)
        if len(diff_norms) >= 2:
            prev_d = diff_norms[-2]
            factors.append(d / prev_d if prev_d > 0.0 else 0.0)
            if (
                len(factors) >= 2
                and factors[-1] > CONTRACTION_CEILING
                and factors[-2] > CONTRACTION_CEILING
            ):
                raise NoContraction(
                    f"difference ratios {factors[-2]:.3g}, {factors[-1]:.3g} exceed "
                    f"{CONTRACTION_CEILING}; shrink t_final or the data amplitude",
                    factors=factors[-2:],
                )
        iterates.append(traj)
        prev = traj
        if d < tol:
            converged = True
            break

    return PicardRun(
        iterates=iterates,
        diff_norms=diff_norms,
        contraction_factors=factors,
        converged=converged,
        tol=tol,
    )
