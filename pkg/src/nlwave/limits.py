"""Vanishing-dispersion studies against the identity-kernel baseline.

Two kernel families drive the limit:

  * type 1: delta + eps * beta for a fixed unit-mass density beta, with the
    error measured in H^{s-1};
  * type 2: the rescaled unit-mass measure mu_eps (lengths scaled by
    sqrt(eps)), with the error measured in H^{s-3}.

A study integrates both systems from identical data on a shared grid and
step size, fits the order of e(T) against eps, and fits a single constant C
so the whole family satisfies e(t) <= 1.1 * eps * (exp(C t) - 1).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import SimConfig, WaveState, integrate
from .errors import EnvelopeViolated, InvalidEpsilon
from .kernels import (
    ContinuousDensity,
    KernelMeasure,
    MASS_TOL,
    bounds_on_frequencies,
    dirac,
    perturb_identity,
    scale_kernel,
    three_point_measure,
    total_mass,
)
from .spectral import sobolev_norm

ENVELOPE_SLACK = 1.1


@dataclass(frozen=True)
class Type1Limit:
    """Family delta + eps * beta."""

    beta: ContinuousDensity

    @property
    def kind(self) -> int:
        return 1

    def sigma(self, s_norm: float) -> float:
        return s_norm - 1.0

    def kernel_for(self, eps: float) -> KernelMeasure:
        return perturb_identity(self.beta, eps)


@dataclass(frozen=True)
class Type2Limit:
    """Family of rescaled unit-mass measures mu_eps."""

    mu: KernelMeasure

    def __post_init__(self):
        mass = total_mass(self.mu)
        if abs(mass - 1.0) > MASS_TOL * max(1.0, abs(mass)):
            raise ValueError(f"type-2 measure must have unit mass, got {mass!r}")

    @property
    def kind(self) -> int:
        return 2

    def sigma(self, s_norm: float) -> float:
        return s_norm - 3.0

    def kernel_for(self, eps: float) -> KernelMeasure:
        return scale_kernel(self.mu, eps)


LimitType = Type1Limit | Type2Limit


def default_limit(kind: int) -> LimitType:
    if kind == 1:
        return Type1Limit(ContinuousDensity("exponential", 1.0, 1.0))
    if kind == 2:
        return Type2Limit(three_point_measure())
    raise ValueError(f"limit kind must be 1 or 2, got {kind}")


@dataclass(frozen=True)
class PairResult:
    eps: float
    times: np.ndarray
    errors: np.ndarray
    sigma: float
    alt_sigma: float | None = None
    alt_errors: np.ndarray | None = None


@dataclass(frozen=True)
class ConvergenceReport:
    eps_list: list[float]
    sigma: float
    times: np.ndarray
    error_curves: list[np.ndarray]
    errors_at_final: list[float]
    fitted_order: float
    fitted_C: float
    envelope_ok: bool
    alt_sigma: float | None
    alt_error_curves: list[np.ndarray] | None
    metadata: dict

    def to_dict(self) -> dict:
        out = {
            "schema": 1,
            "eps_list": [float(e) for e in self.eps_list],
            "sigma": float(self.sigma),
            "times": [float(t) for t in self.times],
            "error_curves": [[float(v) for v in c] for c in self.error_curves],
            "errors_at_final": [float(v) for v in self.errors_at_final],
            "fitted_order": float(self.fitted_order),
            "fitted_C": float(self.fitted_C),
            "envelope_ok": self.envelope_ok,
            "metadata": self.metadata,
        }
        if self.alt_sigma is not None:
            out["alt_sigma"] = float(self.alt_sigma)
            out["alt_error_curves"] = [[float(v) for v in c] for c in self.alt_error_curves]
        return out


def run_pair(
    config: SimConfig,
    limit: LimitType,
    eps: float,
    init: WaveState,
    sample_every: int = 1,
) -> PairResult:
    """Integrate the eps-family system and the identity-kernel baseline from
    the same data with the same grid and dt; return the error time series
    e(t) = ||u_eps - u||_{H^sigma} + ||v_eps - v||_{H^sigma}.

    At eps = 0 both runs use literally the same kernel, so the curves are
    identically zero.
    """
    if eps < 0.0:
        raise InvalidEpsilon(f"eps must be >= 0, got {eps}", eps=eps)
    kernel_eps = dirac() if eps == 0.0 else limit.kernel_for(eps)
    cfg_eps = replace(config, kernel=kernel_eps)
    cfg_base = replace(config, kernel=dirac())
    traj_eps = integrate(cfg_eps, init, sample_every=sample_every)
    traj_base = integrate(cfg_base, init, sample_every=sample_every)

    sigma = limit.sigma(config.s_norm)
    alt_sigma = config.s_norm - 1.0 if isinstance(limit, Type2Limit) else None
    errors, alt_errors = [], []
    for se, sb in zip(traj_eps.states, traj_base.states):
        du = se.u - sb.u
        dv = se.v - sb.v
        errors.append(sobolev_norm(du, sigma) + sobolev_norm(dv, sigma))
        if alt_sigma is not None:
            alt_errors.append(sobolev_norm(du, alt_sigma) + sobolev_norm(dv, alt_sigma))
    return PairResult(
        eps=eps,
        times=traj_eps.times,
        errors=np.asarray(errors),
        sigma=sigma,
        alt_sigma=alt_sigma,
        alt_errors=np.asarray(alt_errors) if alt_sigma is not None else None,
    )


def fit_envelope_constant(times, errors, eps: float) -> float:
    """Smallest C with errors(t) <= eps * (exp(C t) - 1) at every sample.

    The hinge penalty sum_t max(0, e - eps*(exp(Ct)-1))^2 is nonincreasing
    in C, so its minimizer set is [C*, inf); C* = max_t log1p(e/eps)/t is
    returned.
    """
    times = np.asarray(times, dtype=float)
    errors = np.asarray(errors, dtype=float)
    pos = times > 0.0
    if not np.any(pos):
        return 0.0
    return float(np.max(np.log1p(errors[pos] / eps) / times[pos]))


def _shared_dt(config: SimConfig, limit: LimitType, eps_list) -> float:
    c2 = 1.0
    for eps in eps_list:
        if eps > 0.0:
            b = bounds_on_frequencies(limit.kernel_for(eps), config.grid.xi)
            c2 = max(c2, b.c2)
    return min(config.dt, 0.5 * config.grid.dx / np.sqrt(c2))


def study(
    config: SimConfig,
    limit: LimitType,
    eps_list,
    init: WaveState,
    sample_every: int = 1,
    threads: int = 1,
) -> ConvergenceReport:
    """Run the pair per eps, fit the convergence order of e(T) against eps,
    and certify the exponential envelope fitted on the largest eps.

    All runs share one dt, chosen as the smaller of config.dt and the
    default step for the stiffest kernel in the family, so discretization
    error cancels inside each pair and is uniform across the family.
    """
    eps_arr = [float(e) for e in eps_list]
    if len(eps_arr) < 4:
        raise ValueError(f"need at least 4 eps values, got {len(eps_arr)}")
    if any(b >= a for a, b in zip(eps_arr, eps_arr[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    if eps_arr[-1] <= 0.0:
        raise InvalidEpsilon("all eps in a study must be > 0", eps=eps_arr[-1])

    cfg = replace(config, dt=_shared_dt(config, limit, eps_arr))

    def one(eps: float) -> PairResult:
        return run_pair(cfg, limit, eps, init, sample_every=sample_every)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, eps_arr))
    else:
        results = [one(e) for e in eps_arr]

    times = results[0].times
    curves = [r.errors for r in results]
    e_final = [float(c[-1]) for c in curves]

    fitted_order = float(np.polyfit(np.log(eps_arr), np.log(e_final), 1)[0])
    fitted_C = fit_envelope_constant(times, curves[0], eps_arr[0])

    for eps, curve in zip(eps_arr[1:], curves[1:]):
        envelope = ENVELOPE_SLACK * eps * np.expm1(fitted_C * times)
        if np.any(curve > envelope + 1e-300):
            worst = int(np.argmax(curve - envelope))
            raise EnvelopeViolated(
                f"error at eps={eps} exceeds {ENVELOPE_SLACK} * eps * (exp(C t) - 1) "
                f"at t = {times[worst]:.6g} (C = {fitted_C:.6g})",
                eps=eps,
                t=float(times[worst]),
                C=fitted_C,
            )

    alt_sigma = results[0].alt_sigma
    return ConvergenceReport(
        eps_list=eps_arr,
        sigma=results[0].sigma,
        times=times,
        error_curves=curves,
        errors_at_final=e_final,
        fitted_order=fitted_order,
        fitted_C=fitted_C,
        envelope_ok=True,
        alt_sigma=alt_sigma,
        alt_error_curves=[r.alt_errors for r in results] if alt_sigma is not None else None,
        metadata={
            "limit_kind": limit.kind,
            "grid": {"L": cfg.grid.L, "N": cfg.grid.N},
            "dt": cfg.dt,
            "t_final": cfg.t_final,
            "s_norm": cfg.s_norm,
        },
    )
