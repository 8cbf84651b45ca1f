"""Pseudo-spectral simulation of nonlocal elastic waves u_tt = B u_xx + g(u)_xx
with convolution-operator dispersion, plus drivers for the vanishing-dispersion
limits against the identity-kernel baseline."""

__version__ = "0.1.0"

from .kernels import (
    ContinuousDensity,
    DiracAtom,
    KernelBounds,
    KernelMeasure,
    deviation_constant,
    dirac,
    dispersion,
    exponential_density,
    gaussian_density,
    perturb_identity,
    scale_kernel,
    second_moment,
    symbol,
    symbol_deviation,
    three_point_measure,
    total_mass,
    triangular_density,
    verify_bounds,
)
from .spectral import (
    MollifierSpec,
    PeriodicGrid,
    SpectralField,
    apply_kernel,
    apply_multiplier,
    commutator_general,
    commutator_lambda,
    dealias,
    derivative,
    lambda_s,
    mollify,
    sobolev_norm,
    to_physical,
    to_spectral,
)
from .dynamics import (
    EnergyReading,
    Nonlinearity,
    SimConfig,
    Trajectory,
    WaveState,
    energy_functional,
    integrate,
    make_initial,
    nonlinear_estimate_ratio,
    rhs_linearized,
    rhs_nonlinear,
    step_rk4,
)
from .picard import PicardRun, picard_solve, solve_frozen
from .limits import (
    ConvergenceReport,
    Type1Limit,
    Type2Limit,
    default_limit,
    run_pair,
    study,
)
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
