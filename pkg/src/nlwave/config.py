"""JSON run configuration: parsing, validation, and echo.

Schema (all keys under the document root):

    {
      "schema": 1,
      "seed": 42,
      "grid": {"L": 40.0, "N": 1024},
      "kernel": {"atoms": [{"shift": 0.0, "weight": 1.0}, ...],
                 "densities": [{"kind": "exponential"|"triangular"|"gaussian",
                                "param": 1.0, "weight": 1.0}, ...]},
      "nonlinearity": {"coefficients": [1.0]},      # (a_2, a_3, ...)
      "initial": {"profile": "gaussian"|"sech2"|"packet",
                  "amp": 0.05, "width": 2.0, "carrier": 0.0,
                  "v_choice": "zero"|"riemann_left_mover"},
      "time": {"dt": null, "t_final": 1.0, "sample_every": 1},
      "s_norm": 4.0,
      "dealias": true,
      "hyperbolicity_floor": null,
      "cfl_safety": 0.9
    }

Validation failures raise ConfigError carrying the JSON-pointer path of the
offending entry.  The echoed form of a parsed setup is itself a valid input.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .dynamics import Nonlinearity, SimConfig, WaveState, make_initial
from .errors import ConfigError, NlwaveError
from .kernels import ContinuousDensity, DiracAtom, KernelMeasure, dirac
from .spectral import PeriodicGrid

SCHEMA_VERSION = 1
DEFAULT_SEED = 42


@dataclass(frozen=True)
class RunSetup:
    config: SimConfig
    init: WaveState
    initial_spec: dict
    seed: int
    sample_every: int

    def echo(self) -> dict:
        """Fully resolved configuration, valid as input."""
        cfg = self.config
        return {
            "schema": SCHEMA_VERSION,
            "seed": self.seed,
            "grid": {"L": cfg.grid.L, "N": cfg.grid.N},
            "kernel": cfg.kernel.to_dict(),
            "nonlinearity": {"coefficients": list(cfg.nonlinearity.coefficients)},
            "initial": dict(self.initial_spec),
            "time": {"dt": cfg.dt, "t_final": cfg.t_final, "sample_every": self.sample_every},
            "s_norm": cfg.s_norm,
            "dealias": cfg.dealias,
            "hyperbolicity_floor": cfg.d1,
            "cfl_safety": cfg.cfl_safety,
        }


def _get(data: dict, key: str, pointer: str, default=None, required=False):
    if key not in data:
        if required:
            raise ConfigError(f"{pointer}/{key}", "missing required key")
        return default
    return data[key]


def _number(value, pointer: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(pointer, f"expected a number, got {value!r}")
    return float(value)


def _integer(value, pointer: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(pointer, f"expected an integer, got {value!r}")
    return value


def parse_kernel(data, pointer: str = "/kernel") -> KernelMeasure:
    if not isinstance(data, dict):
        raise ConfigError(pointer, "expected an object")
    atoms = []
    for i, entry in enumerate(data.get("atoms", [])):
        p = f"{pointer}/atoms/{i}"
        if not isinstance(entry, dict):
            raise ConfigError(p, "expected an object")
        try:
            atoms.append(
                DiracAtom(
                    shift=_number(_get(entry, "shift", p, required=True), f"{p}/shift"),
                    weight=_number(_get(entry, "weight", p, required=True), f"{p}/weight"),
                )
            )
        except ValueError as exc:
            raise ConfigError(p, str(exc)) from exc
    densities = []
    for i, entry in enumerate(data.get("densities", [])):
        p = f"{pointer}/densities/{i}"
        if not isinstance(entry, dict):
            raise ConfigError(p, "expected an object")
        kind = _get(entry, "kind", p, required=True)
        param = entry.get("param", 1.0)
        try:
            densities.append(
                ContinuousDensity(
                    kind=kind,
                    param=_number(param, f"{p}/param"),
                    weight=_number(_get(entry, "weight", p, required=True), f"{p}/weight"),
                )
            )
        except ValueError as exc:
            raise ConfigError(p, str(exc)) from exc
    if not atoms and not densities:
        raise ConfigError(pointer, "kernel needs at least one atom or density")
    return KernelMeasure(atoms=tuple(atoms), densities=tuple(densities))


def parse_run_setup(data: dict) -> RunSetup:
    if not isinstance(data, dict):
        raise ConfigError("", "config root must be an object")
    schema = data.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError("/schema", f"unsupported schema version {schema!r}")

    grid_data = _get(data, "grid", "", required=True)
    if not isinstance(grid_data, dict):
        raise ConfigError("/grid", "expected an object")
    try:
        grid = PeriodicGrid(
            L=_number(_get(grid_data, "L", "/grid", required=True), "/grid/L"),
            N=_integer(_get(grid_data, "N", "/grid", required=True), "/grid/N"),
        )
    except ValueError as exc:
        raise ConfigError("/grid", str(exc)) from exc

    kernel = parse_kernel(data["kernel"]) if "kernel" in data else dirac()

    nl_data = data.get("nonlinearity", {"coefficients": []})
    if not isinstance(nl_data, dict):
        raise ConfigError("/nonlinearity", "expected an object")
    coeffs = nl_data.get("coefficients", [])
    if not isinstance(coeffs, list):
        raise ConfigError("/nonlinearity/coefficients", "expected a list")
    try:
        nonlinearity = Nonlinearity(
            tuple(_number(a, f"/nonlinearity/coefficients/{i}") for i, a in enumerate(coeffs))
        )
    except ValueError as exc:
        raise ConfigError("/nonlinearity/coefficients", str(exc)) from exc

    time_data = _get(data, "time", "", required=True)
    if not isinstance(time_data, dict):
        raise ConfigError("/time", "expected an object")
    t_final = _number(_get(time_data, "t_final", "/time", required=True), "/time/t_final")
    dt = time_data.get("dt")
    if dt is not None:
        dt = _number(dt, "/time/dt")
    sample_every = time_data.get("sample_every", 1)
    sample_every = _integer(sample_every, "/time/sample_every")
    if sample_every < 1:
        raise ConfigError("/time/sample_every", f"must be >= 1, got {sample_every}")

    floor = data.get("hyperbolicity_floor")
    if floor is not None:
        floor = _number(floor, "/hyperbolicity_floor")

    try:
        config = SimConfig(
            grid=grid,
            kernel=kernel,
            nonlinearity=nonlinearity,
            t_final=t_final,
            dt=dt,
            s_norm=_number(data.get("s_norm", 4.0), "/s_norm"),
            dealias=bool(data.get("dealias", True)),
            hyperbolicity_floor=floor,
            cfl_safety=_number(data.get("cfl_safety", 0.9), "/cfl_safety"),
        )
    except ValueError as exc:
        raise ConfigError("/time/dt" if dt is not None else "", str(exc)) from exc
    except NlwaveError:
        raise

    init_data = data.get("initial", {})
    if not isinstance(init_data, dict):
        raise ConfigError("/initial", "expected an object")
    initial_spec = {
        "profile": init_data.get("profile", "gaussian"),
        "amp": _number(init_data.get("amp", 0.05), "/initial/amp"),
        "width": _number(init_data.get("width", 1.0), "/initial/width"),
        "carrier": _number(init_data.get("carrier", 0.0), "/initial/carrier"),
        "v_choice": init_data.get("v_choice", "zero"),
    }
    try:
        init = make_initial(grid, **initial_spec)
    except ValueError as exc:
        raise ConfigError("/initial", str(exc)) from exc

    seed = data.get("seed", DEFAULT_SEED)
    seed = _integer(seed, "/seed")

    return RunSetup(
        config=config,
        init=init,
        initial_spec=initial_spec,
        seed=seed,
        sample_every=sample_every,
    )


def load_run_setup(path) -> RunSetup:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError("", f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON in {path}: {exc}") from exc
    return parse_run_setup(data)


def default_config_dict() -> dict:
    """A small, runnable configuration used when no file is given."""
    return {
        "schema": SCHEMA_VERSION,
        "seed": DEFAULT_SEED,
        "grid": {"L": 20.0, "N": 256},
        "kernel": {"atoms": [{"shift": 0.0, "weight": 0.6}, {"shift": 1.0, "weight": 0.4}]},
        "nonlinearity": {"coefficients": [1.0]},
        "initial": {"profile": "gaussian", "amp": 0.05, "width": 2.0, "v_choice": "zero"},
        "time": {"dt": None, "t_final": 1.0, "sample_every": 4},
        "s_norm": 4.0,
        "dealias": True,
        "hyperbolicity_floor": None,
        "cfl_safety": 0.9,
    }
