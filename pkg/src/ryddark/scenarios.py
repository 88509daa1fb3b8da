"""Named scenarios, parameter sweeps and file outputs.

A scenario is a JSON-friendly configuration dict: physical parameters with
explicit unit suffixes, a time grid, an optional drive ramp, an optional
sweep specification, and an output directory.  Named scenarios (``fig1b``,
``fig4``, ``fig5``, ``fig6``, ``fig7a``..``fig7d``, ``fig8``, ``fig9``)
pre-populate complete parameter sets; ``custom`` starts empty.  Dotted-path
overrides (``params.omega2_over_omega1=4.0``) refine any field.

Unit conventions
----------------
Every frequency-like quantity accepts exactly one of these key suffixes:

* ``_rad_per_us``: angular frequency (or bare rate), used internally;
* ``_mhz_over_2pi``: the common "Omega/2pi in MHz" convention, multiplied
  by 2*pi on resolution (1 MHz/2pi == 2*pi rad/us);
* ``_per_us``: bare rate in inverse microseconds (decay rates only);
* ``_over_omega1``: dimensionless multiple of the resolved ``omega1``.

``run.json`` always records the fully resolved rad/us values actually used.

Sweep-axis ranges for the robustness scans are encoded as scenario
defaults read off the corresponding figures; ``run.json`` flags them as
such.  Output files are deterministic functions of the configuration
(numbers are serialized at 12 significant digits; wall-clock timing is
kept out of the files).
"""

from __future__ import annotations

import copy
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import __version__
from .dynamics import (
    PulseSchedule,
    TimeSeries,
    evolve,
    evolve_timedep,
)
from .measures import (
    MeasureReport,
    fidelity,
    log_negativity,
    measure_state,
    negativity,
    population,
    purity,
)
from .model import (
    AtomParams,
    RRIMatrix,
    build_single_atom,
    build_two_atom,
    ground_entangled_state,
    initial_mixed_state,
    single_atom_dark_state,
    target_state,
)

__all__ = [
    "ConfigError",
    "SweepAxis",
    "SweepGrid",
    "SCENARIO_NAMES",
    "scenario_defaults",
    "load_config",
    "apply_overrides",
    "resolve_params",
    "run_scenario",
    "run_sweep",
    "run_nscaling",
    "emit_outputs",
]

SCHEMA_VERSION = "ryddark-run-1"

TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Invalid or incomplete scenario configuration."""


# --------------------------------------------------------------------------
# parameter resolution


_ANGULAR = ("rad_per_us", "mhz_over_2pi", "over_omega1")
_RATE = ("rad_per_us", "per_us", "mhz_over_2pi", "over_omega1")

# quantity -> (allowed suffixes, required, default rad/us when optional)
_QUANTITIES: dict[str, tuple[tuple[str, ...], bool, float]] = {
    "omega1": (("rad_per_us", "mhz_over_2pi"), True, 0.0),
    "omega2": (_ANGULAR, True, 0.0),
    "omega_mw": (_ANGULAR, False, 0.0),
    "delta": (_ANGULAR, False, 0.0),
    "gamma_p": (_RATE, True, 0.0),
    "gamma_r": (_RATE, False, 0.0),
    "v00": (_ANGULAR, False, 0.0),
    "v10": (_ANGULAR, False, 0.0),
    "v02": (_ANGULAR, False, 0.0),
    "v12": (_ANGULAR, False, 0.0),
}
_RRI_KEYS = ("v00", "v10", "v02", "v12")


def _resolve_one(
    params: Mapping[str, Any], name: str, omega1: float | None
) -> float | None:
    suffixes, required, default = _QUANTITIES[name]
    found = [(s, params[f"{name}_{s}"]) for s in suffixes if f"{name}_{s}" in params]
    if len(found) > 1:
        keys = ", ".join(f"{name}_{s}" for s, _ in found)
        raise ConfigError(f"ambiguous parameter {name}: give only one of {keys}")
    if not found:
        if required:
            raise ConfigError(f"missing required parameter {name} "
                              f"(one of suffixes {suffixes})")
        return default
    suffix, raw = found[0]
    value = float(raw)
    if suffix in ("rad_per_us", "per_us"):
        return value
    if suffix == "mhz_over_2pi":
        return value * TWO_PI
    if suffix == "over_omega1":
        if omega1 is None:
            raise ConfigError(f"{name}_over_omega1 given but omega1 unresolved")
        return value * omega1
    raise AssertionError(suffix)


def resolve_params(
    params: Mapping[str, Any], system: str
) -> tuple[AtomParams, RRIMatrix | None, dict[str, float]]:
    """Resolve unit-suffixed parameters into rad/us values.

    Returns the atom parameters, the interaction matrix (``None`` for the
    single-atom system) and an audit dict of everything resolved.
    """
    known = {f"{q}_{s}" for q, (sfx, _, _) in _QUANTITIES.items() for s in sfx}
    unknown = set(params) - known
    if unknown:
        raise ConfigError(f"unknown parameter keys: {sorted(unknown)}")

    omega1 = _resolve_one(params, "omega1", None)
    resolved = {"omega1": omega1}
    for name in ("omega2", "omega_mw", "delta", "gamma_p", "gamma_r"):
        resolved[name] = _resolve_one(params, name, omega1)
    atom = AtomParams(
        omega1=resolved["omega1"],
        omega2=resolved["omega2"],
        gamma_p=resolved["gamma_p"],
        gamma_r=resolved["gamma_r"],
        delta=resolved["delta"],
        omega_mw=resolved["omega_mw"],
    )

    rri = None
    if system == "two_atom":
        missing = [k for k in _RRI_KEYS
                   if not any(f"{k}_{s}" in params for s in _ANGULAR)]
        if missing:
            raise ConfigError(f"two-atom system needs interaction parameters "
                              f"{missing}")
        for name in _RRI_KEYS:
            resolved[name] = _resolve_one(params, name, omega1)
        rri = RRIMatrix(v00=resolved["v00"], v10=resolved["v10"],
                        v02=resolved["v02"], v12=resolved["v12"])
    audit = {f"{k}_rad_per_us": v for k, v in resolved.items()}
    return atom, rri, audit


# --------------------------------------------------------------------------
# scenario table


def _fig4_params() -> dict[str, float]:
    return {
        "omega1_mhz_over_2pi": 30.0,
        "omega2_over_omega1": 3.85,
        "omega_mw_over_omega1": 0.004,
        "delta_rad_per_us": 0.0,
        "gamma_p_mhz_over_2pi": 10.0,
        "gamma_r_mhz_over_2pi": 0.001,
        "v12_over_omega1": 2.0,
        "v10_over_omega1": 1.6,
        "v02_over_omega1": 1.6,
        "v00_over_omega1": 0.002,
    }


_FIG1B_TFINAL = 1000.0 / TWO_PI  # drive-cycle count omega1 * t = 1000


def _scenario_table() -> dict[str, dict]:
    fig4 = {
        "system": "two_atom",
        "params": _fig4_params(),
        "t_final": 500.0,
        "sample_dt": 0.5,
        "initial_state": "mixed_ground",
        "workers": None,
    }
    fig6 = copy.deepcopy(fig4)
    fig6["params"]["v10_over_omega1"] = 1.0
    fig6["params"]["v02_over_omega1"] = 1.0
    fig6["sweep"] = [
        {"param": "params.omega2_over_omega1", "min": 1.5, "max": 6.0,
         "count": 10, "scale": "linear"},
        {"param": "params.omega_mw_over_omega1", "min": 0.001, "max": 0.01,
         "count": 10, "scale": "linear"},
    ]
    fig6["axis_ranges_read_from_figure"] = True

    def sweep_variant(axis: dict) -> dict:
        cfg = copy.deepcopy(fig4)
        cfg["sweep"] = [axis]
        cfg["axis_ranges_read_from_figure"] = True
        return cfg

    fig8 = copy.deepcopy(fig4)
    fig8["ramp"] = {"shape": "cosine_ramp", "total_time": 120.0,
                    "sample_dt": 1.0}
    fig8["ramp_time_read_from_figure"] = True

    fig9 = copy.deepcopy(fig4)
    del fig9["params"]["v00_over_omega1"]  # set per n by the generator
    fig9["nscale"] = {
        # Scaling-law generator, anchored at n = 70: Rydberg lifetime
        # grows as n^3 and the interaction asymmetry shrinks as n^-7.
        # These are model assumptions (the per-n interaction strengths are
        # not independently known); rows may instead be given explicitly.
        "n_values": [40, 50, 60, 70, 80, 90, 100],
        "reference_n": 70,
        "reference_lifetime_us": 305.0,
        "reference_asymmetry": 27.8523,
        "lifetime_exponent": 3.0,
        "asymmetry_exponent": -7.0,
        # which interaction the asymmetry divides to produce v00
        "asymmetry_reference": "v10",
        "rows": None,
    }

    table = {
        "fig1b": {
            "system": "single_atom",
            "params": {
                "omega1_mhz_over_2pi": 1.0,
                "omega2_over_omega1": 1.0,
                "omega_mw_over_omega1": 0.0,
                "delta_rad_per_us": 0.0,
                "gamma_p_over_omega1": 0.1515,
                "gamma_r_over_omega1": 5e-5,
            },
            "t_final": _FIG1B_TFINAL,
            "sample_dt": _FIG1B_TFINAL / 1000.0,
            "initial_state": "ground_1",
            "workers": None,
        },
        "fig4": fig4,
        "fig5": copy.deepcopy(fig4),
        "fig6": fig6,
        "fig7a": sweep_variant({"param": "params.v12_over_omega1", "min": 0.5,
                                "max": 4.0, "count": 8, "scale": "linear"}),
        "fig7b": sweep_variant({"param": "params.v00_over_omega1", "min": 0.002,
                                "max": 2.0, "count": 8, "scale": "log"}),
        "fig7c": sweep_variant({"param": "params.gamma_p_mhz_over_2pi", "min": 1.0,
                                "max": 100.0, "count": 7, "scale": "log"}),
        "fig7d": sweep_variant({"param": "params.gamma_r_mhz_over_2pi", "min": 1e-4,
                                "max": 0.1, "count": 7, "scale": "log"}),
        "fig8": fig8,
        "fig9": fig9,
        "custom": {
            "system": "two_atom",
            "params": {},
            "t_final": None,
            "sample_dt": None,
            "initial_state": "mixed_ground",
            "workers": None,
        },
    }
    for name, cfg in table.items():
        cfg["scenario"] = name
    return table


SCENARIO_NAMES = tuple(sorted(_scenario_table()))


def scenario_defaults(name: str) -> dict:
    """Deep copy of a named scenario's complete configuration."""
    table = _scenario_table()
    if name not in table:
        raise ConfigError(f"unknown scenario {name!r}; choose from {SCENARIO_NAMES}")
    return copy.deepcopy(table[name])


def _parse_override_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_overrides(cfg: dict, overrides: Sequence[str]) -> dict:
    """Apply ``dotted.path=value`` overrides in place (lists use indices)."""
    for entry in overrides:
        if "=" not in entry:
            raise ConfigError(f"override {entry!r} is not of the form path=value")
        path, raw = entry.split("=", 1)
        node: Any = cfg
        parts = path.split(".")
        for i, part in enumerate(parts[:-1]):
            key: Any = int(part) if isinstance(node, list) else part
            try:
                nxt = node[key]
            except (KeyError, IndexError, TypeError):
                raise ConfigError(f"override path {path!r} has no element {part!r}")
            if not isinstance(nxt, (dict, list)):
                raise ConfigError(f"override path {path!r}: {part!r} is a leaf")
            node = nxt
        leaf: Any = int(parts[-1]) if isinstance(node, list) else parts[-1]
        try:
            node[leaf] = _parse_override_value(raw)
        except (IndexError, TypeError):
            raise ConfigError(f"override path {path!r} cannot be assigned")
    return cfg


def load_config(
    scenario: str | None = None,
    config_path: str | os.PathLike | None = None,
    overrides: Sequence[str] = (),
) -> dict:
    """Assemble a configuration: scenario defaults <- file <- overrides."""
    file_cfg: dict = {}
    if config_path is not None:
        with open(config_path, "r", encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must contain a JSON object")
    name = scenario or file_cfg.get("scenario")
    if name is None:
        raise ConfigError("no scenario given (flag or config file)")
    cfg = scenario_defaults(name)
    for key, value in file_cfg.items():
        if key == "params" and isinstance(value, dict):
            cfg["params"].update(value)
        else:
            cfg[key] = copy.deepcopy(value)
    apply_overrides(cfg, overrides)
    if cfg.get("t_final") is None or cfg.get("sample_dt") is None:
        raise ConfigError(f"scenario {name!r} needs t_final and sample_dt")
    return cfg


# --------------------------------------------------------------------------
# model assembly and observables


def _build_model(cfg: dict):
    atom, rri, audit = resolve_params(cfg["params"], cfg["system"])
    if cfg["system"] == "single_atom":
        model = build_single_atom(atom)
    elif cfg["system"] == "two_atom":
        model = build_two_atom(atom, rri)
    else:
        raise ConfigError(f"unknown system {cfg['system']!r}")
    return model, atom, rri, audit


def _initial_state(cfg: dict, model) -> np.ndarray:
    name = cfg.get("initial_state", "mixed_ground")
    if name == "mixed_ground":
        return initial_mixed_state()
    if name == "ground_1":
        rho = np.zeros((model.dim, model.dim), dtype=complex)
        rho[1, 1] = 1.0
        return rho
    raise ConfigError(f"unknown initial_state {name!r}")


def _observables(cfg: dict, atom: AtomParams) -> tuple[dict, np.ndarray]:
    """Per-sample observable callables and the scenario's target state."""
    if cfg["system"] == "single_atom":
        dark = single_atom_dark_state(atom.omega1, atom.omega2)
        eye = np.eye(4, dtype=complex)
        obs = {
            "fidelity": lambda r: fidelity(r, dark),
            "purity": purity,
            "pop_0": lambda r: population(r, eye[0]),
            "pop_1": lambda r: population(r, eye[1]),
            "pop_p": lambda r: population(r, eye[2]),
            "pop_R": lambda r: population(r, eye[3]),
        }
        return obs, dark

    split = int(cfg.get("negativity_split", 1))
    if cfg.get("ramp"):
        target = ground_entangled_state()
        dark_target = target_state(atom.omega1, atom.omega2)
        obs = {
            "fidelity": lambda r: fidelity(r, target),
            "fidelity_dark": lambda r: fidelity(r, dark_target),
        }
    else:
        target = target_state(atom.omega1, atom.omega2)
        obs = {"fidelity": lambda r: fidelity(r, target)}
    obs.update({
        "purity": purity,
        "negativity": lambda r: negativity(r, (7, 7), split),
        "log_negativity": lambda r: log_negativity(r, (7, 7), split),
    })
    return obs, target


# --------------------------------------------------------------------------
# runners


def run_scenario(cfg: dict, out_dir: str | os.PathLike | None = None) -> TimeSeries:
    """Run one time-series scenario; write outputs when ``out_dir`` given.

    Scenarios with a ``ramp`` section run as a two-stage chain inside one
    configuration: constant-drive preparation for ``t_final``, then the
    drive ramp; the time column is global and a ``stage`` column marks the
    pieces.
    """
    model, atom, rri, audit = _build_model(cfg)
    rho0 = _initial_state(cfg, model)
    observables, _target = _observables(cfg, atom)

    series = evolve(model, rho0, cfg["t_final"], cfg["sample_dt"], observables)

    if cfg.get("ramp"):
        if cfg["system"] != "two_atom":
            raise ConfigError("drive ramps are only defined for the two-atom "
                              "system")
        ramp = cfg["ramp"]
        schedule = PulseSchedule(ramp.get("shape", "cosine_ramp"),
                                 float(ramp["total_time"]), atom.omega1)

        def builder(omega1_value: float):
            return build_two_atom(replace(atom, omega1=omega1_value), rri)

        ramp_series = evolve_timedep(
            builder,
            schedule,
            series.final_state,
            sample_dt=float(ramp.get("sample_dt", cfg["sample_dt"])),
            observables=observables,
        )
        t0 = series.times[-1]
        series = TimeSeries(
            times=np.concatenate([series.times, t0 + ramp_series.times[1:]]),
            columns={
                name: np.concatenate([series.columns[name],
                                      ramp_series.columns[name][1:]])
                for name in series.columns
            },
            final_state=ramp_series.final_state,
            diagnostics={"stage1": series.diagnostics,
                         "stage2": ramp_series.diagnostics},
        )
        n_ramp = len(ramp_series.times) - 1
        series.columns["stage"] = np.concatenate(
            [np.ones(len(series.times) - n_ramp), 2 * np.ones(n_ramp)])

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        emit_outputs(series, "csv", out / "timeseries.csv")
        _write_run_json(out / "run.json", cfg, audit, _series_summary(series))
    return series


@dataclass(frozen=True)
class SweepAxis:
    """One sweep dimension over a dotted config path."""

    param: str
    min: float
    max: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError("sweep axis count must be >= 1")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"unknown sweep scale {self.scale!r}")
        if self.scale == "log" and (self.min <= 0 or self.max <= 0):
            raise ConfigError("log-scale sweep needs positive bounds")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.min])
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass
class SweepGrid:
    """Grid results in row-major axis order plus run metadata.

    ``metadata`` may carry wall-clock timing for interactive use; timing is
    never serialized, keeping output files deterministic.
    """

    axes: list[SweepAxis]
    columns: list[str]
    cells: list[dict]
    metadata: dict = field(default_factory=dict)


def _axes_from_cfg(cfg: dict) -> list[SweepAxis]:
    spec = cfg.get("sweep") or []
    if not spec:
        raise ConfigError("sweep scenario needs a 'sweep' axis list")
    if len(spec) > 2:
        raise ConfigError("at most two sweep axes are supported")
    return [SweepAxis(param=a["param"], min=float(a["min"]), max=float(a["max"]),
                      count=int(a["count"]), scale=a.get("scale", "linear"))
            for a in spec]


def _cell_config(cfg: dict, assignment: Sequence[tuple[str, float]]) -> dict:
    cell = copy.deepcopy(cfg)
    cell.pop("sweep", None)
    apply_overrides(cell, [f"{path}={value!r}" for path, value in assignment])
    return cell


def _final_report(cfg: dict) -> MeasureReport:
    model, atom, _rri, _audit = _build_model(cfg)
    rho0 = _initial_state(cfg, model)
    series = evolve(model, rho0, cfg["t_final"], cfg["sample_dt"], observables={})
    _obs, target = _observables(cfg, atom)
    dims = model.dims if len(model.dims) > 1 else None
    return measure_state(series.final_state.matrix, target, dims=dims,
                         split=int(cfg.get("negativity_split", 1)))


def _sweep_cell(args: tuple[dict, tuple[tuple[str, float], ...]]) -> dict:
    cfg, assignment = args
    row = {path.split(".")[-1]: value for path, value in assignment}
    try:
        report = _final_report(_cell_config(cfg, assignment))
        row.update(fidelity=report.fidelity, purity=report.purity,
                   negativity=report.negativity,
                   log_negativity=report.log_negativity, error="")
    except Exception as exc:  # recorded per cell; the sweep continues
        row.update(fidelity=math.nan, purity=math.nan, negativity=math.nan,
                   log_negativity=math.nan, error=f"{type(exc).__name__}: {exc}")
    return row


def run_sweep(cfg: dict, out_dir: str | os.PathLike | None = None) -> SweepGrid:
    """Evaluate the final-time scorecard over the configured grid.

    Cells run concurrently but land in the grid in row-major axis order,
    so outputs are deterministic; a failed cell is recorded in its row and
    does not abort the sweep.
    """
    axes = _axes_from_cfg(cfg)
    _model, _atom, _rri, audit = _build_model(cfg)  # validate base config early

    grids = [axis.values() for axis in axes]
    assignments = []
    if len(axes) == 1:
        for x in grids[0]:
            assignments.append(((axes[0].param, float(x)),))
    else:
        for x in grids[0]:
            for y in grids[1]:
                assignments.append(((axes[0].param, float(x)),
                                    (axes[1].param, float(y))))

    workers = cfg.get("workers") or os.cpu_count() or 1
    jobs = [(cfg, a) for a in assignments]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_sweep_cell, jobs))
    else:
        cells = [_sweep_cell(job) for job in jobs]

    axis_names = [axis.param.split(".")[-1] for axis in axes]
    columns = axis_names + ["fidelity", "purity", "negativity",
                            "log_negativity", "error"]
    grid = SweepGrid(
        axes=axes,
        columns=columns,
        cells=cells,
        metadata={"scenario": cfg.get("scenario"), "code_version": __version__,
                  "resolved_base_params": audit},
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        emit_outputs(grid, "csv", out / "grid.csv")
        _write_run_json(out / "run.json", cfg, audit, _grid_summary(grid))
    return grid


def _nscale_rows(cfg: dict) -> list[dict]:
    spec = cfg.get("nscale")
    if not spec:
        raise ConfigError("n-scaling needs an 'nscale' section")
    if spec.get("rows"):
        rows = [dict(r) for r in spec["rows"]]
        for row in rows:
            for key in ("n", "gamma_r_per_us", "v00_over_omega1", "t_final"):
                if key not in row:
                    raise ConfigError(f"nscale row missing {key!r}: {row}")
        return rows

    needed = ("n_values", "reference_n", "reference_lifetime_us",
              "reference_asymmetry", "lifetime_exponent", "asymmetry_exponent")
    missing = [k for k in needed if spec.get(k) is None]
    if missing:
        raise ConfigError(f"nscale generator missing {missing}")
    ref_key = spec.get("asymmetry_reference", "v10")
    if ref_key not in ("v10", "v12"):
        raise ConfigError("asymmetry_reference must be 'v10' or 'v12'")
    ref_over_omega1 = float(cfg["params"][f"{ref_key}_over_omega1"])
    n0 = float(spec["reference_n"])
    rows = []
    for n in spec["n_values"]:
        lifetime = float(spec["reference_lifetime_us"]) \
            * (n / n0) ** float(spec["lifetime_exponent"])
        asymmetry = float(spec["reference_asymmetry"]) \
            * (n / n0) ** float(spec["asymmetry_exponent"])
        rows.append({
            "n": int(n),
            "gamma_r_per_us": 1.0 / lifetime,
            "v00_over_omega1": ref_over_omega1 / asymmetry,
            "t_final": lifetime,
            "asymmetry": asymmetry,
        })
    return rows


def _nscale_cell_config(cfg: dict, row: dict) -> dict:
    """Apply one n-row: replace decay/parasitic-interaction keys and horizon."""
    cell_cfg = copy.deepcopy(cfg)
    cell_cfg.pop("nscale", None)
    params = cell_cfg["params"]
    for key in list(params):
        if key.startswith("gamma_r_") or key.startswith("v00_"):
            del params[key]
    params["gamma_r_per_us"] = row["gamma_r_per_us"]
    params["v00_over_omega1"] = row["v00_over_omega1"]
    cell_cfg["t_final"] = row["t_final"]
    return cell_cfg


def run_nscaling(cfg: dict, out_dir: str | os.PathLike | None = None) -> SweepGrid:
    """Principal-quantum-number scan: per-n rates, interactions and horizon.

    Rows come either from the scaling-law generator (lifetime ~ n^3,
    asymmetry ~ n^-7, anchored at a reference n; these are model
    assumptions) or verbatim from ``nscale.rows``.
    """
    rows = _nscale_rows(cfg)
    cells = []
    for row in rows:
        cell_cfg = _nscale_cell_config(cfg, row)
        cell = {k: row[k] for k in ("n", "gamma_r_per_us", "v00_over_omega1",
                                    "t_final")}
        try:
            report = _final_report(cell_cfg)
            cell.update(fidelity=report.fidelity, purity=report.purity,
                        negativity=report.negativity,
                        log_negativity=report.log_negativity, error="")
        except Exception as exc:
            cell.update(fidelity=math.nan, purity=math.nan, negativity=math.nan,
                        log_negativity=math.nan,
                        error=f"{type(exc).__name__}: {exc}")
        cells.append(cell)

    _model, _atom, _rri, audit = _build_model(_nscale_cell_config(cfg, rows[0]))
    columns = ["n", "gamma_r_per_us", "v00_over_omega1", "t_final",
               "fidelity", "purity", "negativity", "log_negativity", "error"]
    grid = SweepGrid(axes=[], columns=columns, cells=cells,
                     metadata={"scenario": cfg.get("scenario"),
                               "code_version": __version__,
                               "resolved_base_params": audit})
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        emit_outputs(grid, "csv", out / "grid.csv")
        _write_run_json(out / "run.json", cfg, audit, _grid_summary(grid))
    return grid


# --------------------------------------------------------------------------
# serialization


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _quantize(obj: Any) -> Any:
    """Round floats to 12 significant digits so JSON round-trips bytewise."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _quantize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_quantize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_quantize(float(v)) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return _quantize(float(obj))
    return obj


def _json_dump(path: Path, payload: dict) -> None:
    text = json.dumps(_quantize(payload), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")


def emit_outputs(results: TimeSeries | SweepGrid, format: str,
                 path: str | os.PathLike) -> None:
    """Write a time series or sweep grid as CSV or JSON.

    CSV carries a header row naming every column; JSON mirrors the table
    and adds metadata.  Floats are serialized at 12 significant digits.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(results, TimeSeries):
        names = ["t_us"] + list(results.columns)
        table = [results.times] + [results.columns[k] for k in results.columns]
        rows = zip(*table)
    elif isinstance(results, SweepGrid):
        names = list(results.columns)
        rows = ([cell.get(c, "") for c in names] for cell in results.cells)
    else:
        raise TypeError(f"cannot emit {type(results).__name__}")

    if format == "csv":
        lines = [",".join(names)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif format == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "columns": names,
            "rows": [[v if isinstance(v, str) else v for v in row] for row in rows],
        }
        if isinstance(results, SweepGrid):
            payload["metadata"] = {k: v for k, v in results.metadata.items()
                                   if k != "wall_time_s"}
        _json_dump(path, payload)
    else:
        raise ConfigError(f"unknown output format {format!r}")


def _series_summary(series: TimeSeries) -> dict:
    summary = {f"final_{name}": float(col[-1])
               for name, col in series.columns.items() if name != "stage"}
    summary["t_final"] = float(series.times[-1])
    summary["diagnostics"] = series.diagnostics
    return summary


def _grid_summary(grid: SweepGrid) -> dict:
    ok = [c for c in grid.cells if not c.get("error")]
    return {
        "cells_total": len(grid.cells),
        "cells_failed": len(grid.cells) - len(ok),
        "fidelity_min": min((c["fidelity"] for c in ok), default=math.nan),
        "fidelity_max": max((c["fidelity"] for c in ok), default=math.nan),
    }


def _write_run_json(path: Path, cfg: dict, audit: dict, summary: dict) -> None:
    notes = []
    if cfg.get("axis_ranges_read_from_figure"):
        notes.append("sweep axis ranges are best-effort readings off the "
                     "figure this scenario reproduces, not tabulated values")
    if cfg.get("ramp_time_read_from_figure"):
        notes.append("ramp duration is a best-effort reading off the figure "
                     "this scenario reproduces; only the pulse shape is exact")
    if cfg.get("nscale"):
        notes.append("per-n lifetimes and interaction asymmetries follow the "
                     "documented scaling-law assumptions unless rows are "
                     "given explicitly")
    payload = {
        "schema_version": SCHEMA_VERSION,
        "code_version": __version__,
        "scenario": cfg.get("scenario"),
        "config": {k: v for k, v in cfg.items() if k != "output"},
        "resolved_params_rad_per_us": audit,
        "summary": summary,
        "notes": notes,
    }
    _json_dump(path, payload)
