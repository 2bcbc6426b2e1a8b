"""``hubbard-pair`` command-line front end."""
from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .core import LatticeParams, QuasiMomentum, collective_hopping, momentum_grid
from .dimer import (
    binding_energy,
    dimer_alpha,
    dimer_effective_mass,
    dimer_energy,
    dimer_wavefunction,
    effective_pair_hopping,
    normalization_constant,
    strong_coupling_energy,
)
from .errors import HubbardPairError
from .io import SPECTRUM_COLUMNS, Dataset, atomic_write, serialize, to_csv, to_json
from .oracle import Tolerances, compare_with_analytic, ring_momenta
from .scattering import band_edges, density_of_states, scattering_state

COMMANDS = ("spectrum", "scatter", "dimer", "dos", "validate", "figure")
EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

DEFAULT_U = -5.0
FROZEN_TIMESTAMP = "1970-01-01T00:00:00Z"
VALIDATION_U = (0.5, 2.0, 5.0, 20.0)
SHALLOW_N_FACTOR = 8  # |U| < 2J binds weakly; N = 200 becomes 1600


class ConfigError(HubbardPairError):
    """Bad command line or config file."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    J: float = 1.0
    U: Optional[float] = None
    d: float = 1.0
    K_points: int = 101
    k_points: int = 101
    E_points: int = 101
    sites: int = 10
    N: int = 200
    M: int = 24
    tolerances: Tolerances = field(default_factory=Tolerances)
    format: str = "csv"
    out: Optional[str] = None
    raw_units: bool = False
    freeze_timestamp: bool = False

    def params(self, U: Optional[float] = None) -> LatticeParams:
        if U is None:
            U = DEFAULT_U if self.U is None else self.U
        return LatticeParams(J=self.J, U=U, d=self.d)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hubbard-pair", description="Two bosons in the 1D Hubbard model.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--J", type=float)
    p.add_argument("--U", type=float)
    p.add_argument("--d", type=float)
    p.add_argument("--K-points", dest="K_points", type=int)
    p.add_argument("--k-points", dest="k_points", type=int)
    p.add_argument("--E-points", dest="E_points", type=int)
    p.add_argument("--sites", type=int, help="wavefunction half-width for figure panels")
    p.add_argument("--N", type=int, help="relative-chain half-width for the oracle")
    p.add_argument("--M", type=int, help="ring size for the oracle")
    p.add_argument("--energy-tol", dest="energy_tol", type=float)
    p.add_argument("--overlap-tol", dest="overlap_tol", type=float)
    p.add_argument("--dos-tol", dest="dos_tol", type=float)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out")
    p.add_argument("--raw-units", dest="raw_units", action="store_const", const=True)
    p.add_argument("--freeze-timestamp", dest="freeze_timestamp", action="store_const", const=True)
    return p


_FILE_KEYS = {"J", "U", "d", "K_points", "k_points", "E_points", "sites", "N", "M", "energy_tol",
              "overlap_tol", "dos_tol", "format", "out", "raw_units", "freeze_timestamp"}


def parse_config(argv: Sequence[str], config_file=None) -> RunConfig:
    """Build a validated RunConfig; command-line flags override file values."""
    args = vars(_parser().parse_args(list(argv)))
    values = {}
    path = config_file or args.pop("config", None)
    args.pop("config", None)
    if path is not None:
        try:
            loaded = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        unknown = set(loaded) - _FILE_KEYS
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        values.update(loaded)
    values.update({k: v for k, v in args.items() if v is not None})

    tol = Tolerances()
    tol = replace(tol, **{name: values.pop(key) for key, name in
                          (("energy_tol", "energy"), ("overlap_tol", "overlap"), ("dos_tol", "dos_bin"))
                          if key in values})
    command = values.pop("command")
    try:
        config = RunConfig(command=command, tolerances=tol, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    _validate(config)
    return config


def _validate(c: RunConfig):
    for name in ("J", "d"):
        value = getattr(c, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
            raise ConfigError(f"{name} must be positive")
    if c.U is not None and not math.isfinite(c.U):
        raise ConfigError("U must be finite")
    for name in ("K_points", "k_points", "E_points"):
        if getattr(c, name) < 2:
            raise ConfigError(f"--{name.replace('_', '-')} must be at least 2")
    if c.N < 1:
        raise ConfigError("--N must be at least 1")
    if c.M < 4:
        raise ConfigError("--M must be at least 4")
    if c.sites < 0:
        raise ConfigError("--sites must be non-negative")
    if c.format not in ("csv", "json"):
        raise ConfigError("--format must be csv or json")
    if c.command == "figure" and c.U == 0:
        raise ConfigError("figure needs U != 0")


# unit scales: divide energies by J and lengths by d unless raw units were requested
def _units(config: RunConfig):
    if config.raw_units:
        return 1.0, 1.0
    return config.J, config.d


def _metadata(config: RunConfig, columns, params: Optional[LatticeParams] = None, **extra) -> dict:
    params = params or config.params()
    stamp = FROZEN_TIMESTAMP if config.freeze_timestamp else (
        datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"))
    meta = {
        "command": config.command,
        "params": {"J": params.J, "U": params.U, "d": params.d, "hbar": params.hbar},
        "units": "raw" if config.raw_units else "energy/J, momentum*d, length/d",
        "columns": list(columns),
        "timestamp": stamp,
        "tool_version": __version__,
    }
    meta.update(extra)
    return meta


def spectrum_rows(params: LatticeParams, n_points: int, energy_unit=1.0, length_unit=1.0) -> list[tuple]:
    rows = []
    for K in momentum_grid(n_points, params):
        lo, hi = band_edges(K, params)
        if params.U == 0.0:
            E = EB = alpha = None
        else:
            E = dimer_energy(K, params) / energy_unit
            EB = binding_energy(K, params) / energy_unit
            alpha = None if collective_hopping(K, params) == 0.0 else dimer_alpha(K, params)
        rows.append((K.value * length_unit, lo / energy_unit, hi / energy_unit, E, EB, alpha))
    return rows


def run_spectrum_sweep(config: RunConfig, U: Optional[float] = None) -> Dataset:
    """Band edges and dimer branch on a K grid spanning the zone, edges included."""
    params = config.params(U)
    eu, lu = _units(config)
    rows = spectrum_rows(params, config.K_points, eu, lu)
    return Dataset(SPECTRUM_COLUMNS, rows, _metadata(config, SPECTRUM_COLUMNS, params))


def run_scatter_sweep(config: RunConfig) -> Dataset:
    params = config.params()
    eu, lu = _units(config)
    columns = ("K", "k", "E", "delta", "at_band_edge")
    rows = []
    ks = np.linspace(0.0, math.pi, config.k_points)
    for K in momentum_grid(config.K_points, params):
        for kd in ks:
            k = QuasiMomentum(float(kd), params.d)
            if collective_hopping(K, params) == 0.0:
                rows.append((K.value * lu, k.value * lu, 0.0, None, None))
                continue
            s = scattering_state(K, k, params)
            rows.append((K.value * lu, k.value * lu, s.energy / eu, s.phase_shift, s.at_band_edge))
    return Dataset(columns, rows, _metadata(config, columns, params))


def run_dimer_sweep(config: RunConfig) -> Dataset:
    params = config.params()
    eu, lu = _units(config)
    columns = ("K", "alpha", "E_dimer", "E_binding", "C", "E_strong_coupling")
    rows = []
    for K in momentum_grid(config.K_points, params):
        alpha = None if collective_hopping(K, params) == 0.0 else dimer_alpha(K, params)
        rows.append((K.value * lu, alpha, dimer_energy(K, params) / eu, binding_energy(K, params) / eu,
                     normalization_constant(K, params), strong_coupling_energy(K, params) / eu))
    mass_unit = 1.0 if config.raw_units else params.hbar**2 / (params.J * params.d**2)
    meta = _metadata(config, columns, params,
                     effective_mass=dimer_effective_mass(params) / mass_unit,
                     pair_hopping=effective_pair_hopping(params) / eu)
    return Dataset(columns, rows, meta)


def dos_rows(params: LatticeParams, K_points: int, E_points: int, L: float,
             energy_unit=1.0, length_unit=1.0) -> list[tuple]:
    """DOS on an (E, K) mesh; only mesh points strictly inside the band are kept."""
    Es = np.linspace(-4.0 * params.J, 4.0 * params.J, E_points)
    rows = []
    for K in momentum_grid(K_points, params):
        JK = collective_hopping(K, params)
        for E in Es:
            if abs(E) < 2.0 * JK:
                rows.append((K.value * length_unit, float(E) / energy_unit,
                             density_of_states(float(E), K, L, params) * energy_unit))
    return rows


def run_dos_mesh(config: RunConfig) -> Dataset:
    params = config.params()
    eu, lu = _units(config)
    columns = ("K", "E", "rho")
    # display normalization only: L = (number of K points) * d
    L = config.K_points * params.d
    rows = dos_rows(params, config.K_points, config.E_points, L, eu, lu)
    return Dataset(columns, rows, _metadata(config, columns, params, L=L / lu))


def emit_figure_data(config: RunConfig) -> list[Path]:
    """Write the spectrum, DOS mesh and wavefunction panels for U = -|U| and +|U|."""
    out_dir = Path(config.out or "figure_data")
    out_dir.mkdir(parents=True, exist_ok=True)
    magnitude = abs(config.U) if config.U is not None else abs(DEFAULT_U)
    eu, lu = _units(config)
    ext = config.format
    written = []
    for label, U in (("attractive", -magnitude), ("repulsive", magnitude)):
        data = run_spectrum_sweep(config, U)
        written.append(serialize(data, ext, out_dir / f"spectrum_{label}.{ext}"))

    params = config.params(-magnitude)
    L = config.K_points * params.d
    columns = ("K", "E", "rho")
    dos = Dataset(columns, dos_rows(params, config.K_points, config.E_points, L, eu, lu),
                  _metadata(config, columns, params, L=L / lu))
    written.append(serialize(dos, ext, out_dir / f"dos.{ext}"))

    columns = ("U", "K", "i", "psi")
    rows = []
    for U in (-magnitude, magnitude):
        p = config.params(U)
        for kd in (0.0, math.pi / 2, math.pi):
            K = QuasiMomentum(kd, p.d)
            wf = dimer_wavefunction(K, p, config.sites)
            rows.extend((U / eu, K.value * lu, int(i), float(a)) for i, a in zip(wf.sites, wf.amplitudes))
    panels = Dataset(columns, rows, _metadata(config, columns, params))
    written.append(serialize(panels, ext, out_dir / f"wavefunctions.{ext}"))
    return written


def validation_points(config: RunConfig) -> list[tuple[float, list[float]]]:
    """``(U, [Kd ...])`` pairs; the default matrix unless --U was given."""
    if config.U is not None:
        Us = [config.U]
    else:
        Us = [0.0] + [s * u * config.J for u in VALIDATION_U for s in (-1.0, 1.0)]
    kds = [0.0, math.pi / 2]
    kds += [kd for kd in ring_momenta(config.M) if not any(math.isclose(kd, x, abs_tol=1e-15) for x in kds)]
    return [(U, kds) for U in Us]


def run_validation(config: RunConfig) -> tuple[int, dict]:
    """Oracle comparison over the parameter matrix; returns (exit status, report document)."""
    reports = []
    first_failure = None
    for U, kds in validation_points(config):
        params = config.params(U)
        N = config.N if abs(U) >= 2.0 * params.J or U == 0 else SHALLOW_N_FACTOR * config.N
        runs = [compare_with_analytic(params, K=kd / params.d, N=N, tolerances=config.tolerances)
                for kd in kds]
        runs.append(compare_with_analytic(params, M=config.M, tolerances=config.tolerances))
        for r in runs:
            reports.append(r.to_dict())
            if first_failure is None and not r.passed:
                first_failure = {"parameter_point": r.parameter_point, "reasons": r.failures()}
    doc = {
        "metadata": _metadata(config, (), config.params(), M=config.M, N=config.N),
        "pass": first_failure is None,
        "first_failure": first_failure,
        "reports": reports,
    }
    return (EXIT_OK if first_failure is None else EXIT_VALIDATION), doc


def _emit(dataset: Dataset, config: RunConfig):
    if config.out in (None, "-"):
        sys.stdout.write(to_csv(dataset) if config.format == "csv" else to_json(dataset))
    else:
        serialize(dataset, config.format, config.out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv)
        if config.command == "validate":
            status, doc = run_validation(config)
            text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
            if config.out in (None, "-"):
                sys.stdout.write(text)
            else:
                atomic_write(config.out, text)
            if status != EXIT_OK:
                failure = doc["first_failure"]
                print(f"hubbard-pair: validation failed at {failure['parameter_point']}: "
                      f"{failure['reasons'][0]}", file=sys.stderr)
            return status
        if config.command == "figure":
            for path in emit_figure_data(config):
                print(path)
            return EXIT_OK
        builders = {"spectrum": run_spectrum_sweep, "scatter": run_scatter_sweep,
                    "dimer": run_dimer_sweep, "dos": run_dos_mesh}
        _emit(builders[config.command](config), config)
        return EXIT_OK
    except HubbardPairError as exc:
        print(f"hubbard-pair: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"hubbard-pair: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
