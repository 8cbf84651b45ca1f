"""Even finite Borel measures and their exactly evaluable Fourier symbols.

A measure is stored as symmetric Dirac atom pairs plus weighted closed-form
densities, so evenness holds by construction.  The symbol is

    symbol(k, xi) = sum_atoms w * cos(a * xi) + sum_densities w * shape(xi)

where an atom with shift a > 0 denotes the symmetric pair
(w/2) delta_{-a} + (w/2) delta_{+a}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import MassNotOne, NegativeSymbol, NonpositiveEpsilon, PositivityViolation

EXPONENTIAL = "exponential"
TRIANGULAR = "triangular"
GAUSSIAN = "gaussian"
DENSITY_KINDS = (EXPONENTIAL, TRIANGULAR, GAUSSIAN)

# Relative tolerance for "unit mass" checks; masses are exact rationals of
# user inputs, so anything beyond roundoff is a real mismatch.
MASS_TOL = 1e-12


@dataclass(frozen=True)
class DiracAtom:
    """Point mass; shift a > 0 stands for the even pair at +-a carrying
    `weight` in total."""

    shift: float
    weight: float

    def __post_init__(self):
        if not (math.isfinite(self.shift) and self.shift >= 0.0):
            raise ValueError(f"atom shift must be finite and >= 0, got {self.shift}")
        if not math.isfinite(self.weight):
            raise ValueError(f"atom weight must be finite, got {self.weight}")


@dataclass(frozen=True)
class ContinuousDensity:
    """Weighted copy of a unit-mass even density.

    kind/param:
      exponential  (1/2l) exp(-|x|/l), param = length scale l
      triangular   (1/h)(1 - |x|/h) on |x| <= h, param = half-width h
      gaussian     normal density, param = scale sigma
    """

    kind: str
    param: float
    weight: float

    def __post_init__(self):
        if self.kind not in DENSITY_KINDS:
            raise ValueError(f"unknown density kind {self.kind!r}")
        if not (math.isfinite(self.param) and self.param > 0.0):
            raise ValueError(f"density param must be finite and > 0, got {self.param}")
        if not math.isfinite(self.weight):
            raise ValueError(f"density weight must be finite, got {self.weight}")

    def shape_symbol(self, xi):
        """Fourier transform of the unit-mass density."""
        z = self.param * np.asarray(xi, dtype=float)
        if self.kind == EXPONENTIAL:
            return 1.0 / (1.0 + z * z)
        if self.kind == GAUSSIAN:
            return np.exp(-0.5 * z * z)
        # triangular: (sin(t)/t)^2 with t = h*xi/2, value 1 at xi = 0
        t = 0.5 * z
        return np.sinc(t / np.pi) ** 2

    def shape_deviation(self, xi):
        """shape_symbol(xi) - 1, evaluated without cancellation near xi = 0."""
        z = self.param * np.asarray(xi, dtype=float)
        if self.kind == EXPONENTIAL:
            return -(z * z) / (1.0 + z * z)
        if self.kind == GAUSSIAN:
            return np.expm1(-0.5 * z * z)
        t = 0.5 * z
        t2 = t * t
        series = -t2 / 3.0 + 2.0 * t2 * t2 / 45.0
        direct = np.sinc(t / np.pi) ** 2 - 1.0
        return np.where(np.abs(t) < 1e-3, series, direct)

    def shape_second_moment(self) -> float:
        if self.kind == EXPONENTIAL:
            return 2.0 * self.param**2
        if self.kind == GAUSSIAN:
            return self.param**2
        return self.param**2 / 6.0


@dataclass(frozen=True)
class KernelMeasure:
    atoms: tuple[DiracAtom, ...] = ()
    densities: tuple[ContinuousDensity, ...] = ()

    def to_dict(self) -> dict:
        return {
            "atoms": [{"shift": a.shift, "weight": a.weight} for a in self.atoms],
            "densities": [
                {"kind": d.kind, "param": d.param, "weight": d.weight}
                for d in self.densities
            ],
        }


@dataclass(frozen=True)
class KernelBounds:
    """Sampled symbol bounds: c1 <= symbol(xi) <= c2 on the sampled window."""

    c1: float
    c2: float
    xi_max: float
    n_samples: int


def dirac(weight: float = 1.0) -> KernelMeasure:
    return KernelMeasure(atoms=(DiracAtom(0.0, weight),))


def exponential_density(weight: float = 1.0, scale: float = 1.0) -> ContinuousDensity:
    return ContinuousDensity(EXPONENTIAL, scale, weight)


def triangular_density(width: float, weight: float = 1.0) -> ContinuousDensity:
    return ContinuousDensity(TRIANGULAR, width, weight)


def gaussian_density(sigma: float, weight: float = 1.0) -> ContinuousDensity:
    return ContinuousDensity(GAUSSIAN, sigma, weight)


def three_point_measure() -> KernelMeasure:
    """Unit-mass measure with atoms at -1, 0, 1 and weights 1/5, 3/5, 1/5.

    Its symbol is (3 + 2 cos xi)/5, bounded below by 1/5, with second
    moment 2/5.
    """
    return KernelMeasure(atoms=(DiracAtom(0.0, 0.6), DiracAtom(1.0, 0.4)))


def symbol(kernel: KernelMeasure, xi):
    """Evaluate the Fourier symbol at xi (scalar or array); real and even."""
    x = np.asarray(xi, dtype=float)
    out = np.zeros_like(x)
    for atom in kernel.atoms:
        out += atom.weight * np.cos(atom.shift * x)
    for dens in kernel.densities:
        out += dens.weight * dens.shape_symbol(x)
    return float(out) if np.isscalar(xi) else out


def symbol_deviation(kernel: KernelMeasure, xi):
    """symbol(kernel, xi) - total_mass(kernel), cancellation-free.

    Atom contributions use cos(a xi) - 1 = -2 sin^2(a xi / 2); density
    contributions use per-kind stable forms, so the result is accurate even
    where the deviation is many orders below the mass.
    """
    x = np.asarray(xi, dtype=float)
    out = np.zeros_like(x)
    for atom in kernel.atoms:
        out += -2.0 * atom.weight * np.sin(0.5 * atom.shift * x) ** 2
    for dens in kernel.densities:
        out += dens.weight * dens.shape_deviation(x)
    return float(out) if np.isscalar(xi) else out


def total_mass(kernel: KernelMeasure) -> float:
    return float(
        sum(a.weight for a in kernel.atoms) + sum(d.weight for d in kernel.densities)
    )


def second_moment(kernel: KernelMeasure) -> float:
    acc = sum(a.weight * a.shift**2 for a in kernel.atoms)
    acc += sum(d.weight * d.shape_second_moment() for d in kernel.densities)
    return float(acc)


def verify_bounds(kernel: KernelMeasure, xi_max: float, n_samples: int) -> KernelBounds:
    """Sample the symbol on a uniform grid of [0, xi_max] and report min/max.

    Raises PositivityViolation if any sampled value is <= 0; the report is a
    sampled certificate only, recording xi_max and n_samples explicitly.
    """
    if not xi_max > 0.0:
        raise ValueError(f"xi_max must be > 0, got {xi_max}")
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    xs = np.linspace(0.0, xi_max, n_samples)
    vals = symbol(kernel, xs)
    i_min = int(np.argmin(vals))
    c1 = float(vals[i_min])
    if c1 <= 0.0:
        raise PositivityViolation(
            f"symbol minimum {c1:.6g} at xi={xs[i_min]:.6g} is not positive",
            xi=float(xs[i_min]),
            value=c1,
        )
    return KernelBounds(c1=c1, c2=float(vals.max()), xi_max=float(xi_max), n_samples=int(n_samples))


def bounds_on_frequencies(kernel: KernelMeasure, xi) -> KernelBounds:
    """Exact bounds of the symbol over a given frequency set (e.g. a grid)."""
    xs = np.unique(np.abs(np.asarray(xi, dtype=float)))
    vals = symbol(kernel, xs)
    i_min = int(np.argmin(vals))
    c1 = float(vals[i_min])
    if c1 <= 0.0:
        raise PositivityViolation(
            f"symbol minimum {c1:.6g} at xi={xs[i_min]:.6g} is not positive",
            xi=float(xs[i_min]),
            value=c1,
        )
    return KernelBounds(c1=c1, c2=float(vals.max()), xi_max=float(xs.max()), n_samples=xs.size)


def scale_kernel(kernel: KernelMeasure, eps: float) -> KernelMeasure:
    """Rescale lengths by sqrt(eps): symbol(scaled, xi) = symbol(k, sqrt(eps) xi).

    Atom shifts and density length scales are multiplied by sqrt(eps);
    weights (hence total mass) are unchanged.
    """
    if not eps > 0.0:
        raise NonpositiveEpsilon(f"scale parameter must be > 0, got {eps}", eps=eps)
    r = math.sqrt(eps)
    atoms = tuple(replace(a, shift=a.shift * r) for a in kernel.atoms)
    densities = tuple(replace(d, param=d.param * r) for d in kernel.densities)
    return KernelMeasure(atoms=atoms, densities=densities)


def perturb_identity(beta: ContinuousDensity, eps: float) -> KernelMeasure:
    """The measure delta + eps * beta, with symbol 1 + eps * beta_hat(xi)."""
    if eps < 0.0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    return KernelMeasure(
        atoms=(DiracAtom(0.0, 1.0),),
        densities=(replace(beta, weight=beta.weight * eps),),
    )


def dispersion(kernel: KernelMeasure, xi):
    """omega^2(xi) = xi^2 * symbol(xi) for linear plane waves."""
    s = symbol(kernel, xi)
    if np.any(np.asarray(s) < 0.0):
        bad = np.asarray(s)
        raise NegativeSymbol(
            f"symbol is negative (min {float(np.min(bad)):.6g}); no real frequency",
            value=float(np.min(bad)),
        )
    return np.asarray(xi, dtype=float) ** 2 * s if not np.isscalar(xi) else float(xi**2 * s)


def deviation_constant(kernel: KernelMeasure, xi_max: float, n_samples: int) -> float:
    """Sampled supremum of |symbol(xi) - 1| / xi^2 over xi in (0, xi_max].

    Requires unit mass.  The sample set is a uniform grid augmented with
    log-spaced points toward 0 (where the stable deviation form stays
    accurate), so the small-xi limit |symbol''(0)|/2 is captured.
    """
    mass = total_mass(kernel)
    if abs(mass - 1.0) > MASS_TOL * max(1.0, abs(mass)):
        raise MassNotOne(f"total mass is {mass!r}, expected 1", mass=mass)
    if not xi_max > 0.0:
        raise ValueError(f"xi_max must be > 0, got {xi_max}")
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    xs = np.concatenate(
        [
            np.linspace(0.0, xi_max, n_samples)[1:],
            np.geomspace(xi_max * 1e-9, xi_max, 257),
        ]
    )
    ratios = np.abs(symbol_deviation(kernel, xs)) / xs**2
    return float(ratios.max())
