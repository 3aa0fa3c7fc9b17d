"""Command-line front end.

Subcommands
-----------
tau           decoherence timescale in a uniform field or outside a mass
visibility    closed-form visibility curves on a time grid
evolve        position-basis master-equation evolution
regime        map of time-dilation vs emission dominance
propertime    proper-time difference along sampled arm trajectories
oracle-check  randomized battery comparing every oracle to the product law

Every subcommand accepts ``--config FILE`` pointing at a JSON object whose
keys are the subcommand's parameter names (long flag names with dashes
replaced by underscores); explicit flags override the file. A ``"constants"``
object inside the file overrides individual physical constants. Unknown keys
are rejected.

Outputs are byte-deterministic: JSON is written with sorted keys, CSV carries
a ``#``-commented metadata preamble, and nothing embeds timestamps. Exit
codes: 0 success, 1 oracle disagreement, 2 configuration error, 3 domain
error, 4 numerical instability.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .constants import PhysicalConstants, default_constants
from .emission import (
    blackbody_emission_model,
    emission_model_from_csv,
    power_law_cross_section,
    regime_scan,
)
from .errors import DomainError, NumericalInstabilityError
from .internal_state import InternalStateSpec
from .master_equation import (
    CMHamiltonianSpec,
    DensityMatrixGrid,
    EvolutionConfig,
    dephasing_coefficient,
    evolve,
    extract_visibility,
    save_snapshots,
)
from .oracles import OracleConfig, run_oracle_battery
from .proper_time import (
    HomogeneousPotential,
    SchwarzschildWeakPotential,
    TabulatedPotential,
    TrajectoryPair,
    proper_time_difference,
    semiclassical_visibility,
)
from .visibility import (
    SchwarzschildSpec,
    decoherence_time,
    decoherence_time_schwarzschild,
    hawking_temperature,
    visibility_curve,
)


class ConfigError(Exception):
    """Bad command line or config file; maps to exit code 2."""


_REQUIRED = object()

_DEFAULTS: dict[str, dict[str, object]] = {
    "tau": {
        "n_modes": _REQUIRED,
        "temperature": None,
        "delta_x": _REQUIRED,
        "g": None,
        "central_mass": None,
        "radius": None,
        "hawking": None,
    },
    "visibility": {
        "law": "high-T",
        "n_modes": None,
        "temperature": _REQUIRED,
        "delta_x": None,
        "g": None,
        "t_final": None,
        "n_times": 200,
        "dtau": None,
        "frequencies_csv": None,
    },
    "evolve": {
        "form": "markovian",
        "x1": _REQUIRED,
        "x2": _REQUIRED,
        "n_points": 64,
        "hamiltonian": "none",
        "mass": None,
        "g": None,
        "n_modes": None,
        "temperature": None,
        "lambda_coefficient": None,
        "dt": _REQUIRED,
        "t_final": _REQUIRED,
        "store_every": 0,
        "snapshots": None,
    },
    "regime": {
        "axis1": "radius",
        "axis1_min": _REQUIRED,
        "axis1_max": _REQUIRED,
        "n_axis1": 16,
        "t_min": _REQUIRED,
        "t_max": _REQUIRED,
        "n_temps": 16,
        "mode_density": None,
        "delta_x": None,
        "n_modes": None,
        "g": None,
        "emission_csv": None,
        "sigma0": None,
        "k0": None,
        "alpha": 0.0,
    },
    "propertime": {
        "trajectories": None,
        "x1": None,
        "x2": None,
        "t_final": None,
        "n_samples": 201,
        "potential": "homogeneous",
        "g": None,
        "central_mass": None,
        "potential_csv": None,
        "n_modes": None,
        "temperature": None,
        "frequencies_csv": None,
    },
    "oracle-check": {
        "cases": 20,
        "samples": 200_000,
        "seed": 20240811,
        "mc_seed": 0,
        "fock_cutoff": 64,
        "tail_epsilon": 1e-9,
        "mc_sigmas": 5.0,
        "atol": 1e-6,
        "verbose": None,
    },
}

#: --preset bundles for oracle-check; explicit flags still override.
_PRESETS: dict[str, dict[str, object]] = {
    "standard": {"cases": 50, "samples": 1_000_000, "mc_sigmas": 3.0, "atol": 1e-6},
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of parameter defaults")
    p.add_argument("--output", help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravidec",
        description="decoherence of composite particles from gravitational time dilation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tau", help="decoherence timescale")
    p.add_argument("--n-modes", "--N", type=float, help="internal mode count N")
    p.add_argument("--temperature", "--T", type=float)
    p.add_argument("--delta-x", "--dx", type=float)
    p.add_argument("--g", type=float, help="uniform acceleration (default: Earth)")
    p.add_argument("--central-mass", type=float, help="use the field outside this mass")
    p.add_argument("--radius", type=float, help="distance from the central mass")
    p.add_argument("--hawking", action="store_true", default=None,
                   help="take the temperature to be the central mass's Hawking temperature")
    _add_common(p)

    p = sub.add_parser("visibility", help="closed-form visibility curve")
    p.add_argument("--law", choices=("exact-product", "high-T", "gaussian"))
    p.add_argument("--n-modes", "--N", type=float)
    p.add_argument("--temperature", "--T", type=float)
    p.add_argument("--delta-x", "--dx", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--t-final", type=float)
    p.add_argument("--n-times", type=int)
    p.add_argument("--dtau", type=float,
                   help="single proper-time difference (s); emits one row instead of a curve")
    p.add_argument("--frequencies-csv", help="one mode frequency (rad/s) per line")
    _add_common(p)

    p = sub.add_parser("evolve", help="master-equation evolution")
    p.add_argument("--form", choices=("markovian", "full_memory"))
    p.add_argument("--x1", type=float)
    p.add_argument("--x2", type=float)
    p.add_argument("--n-points", type=int)
    p.add_argument("--hamiltonian", choices=("none", "free", "free_plus_linear"))
    p.add_argument("--mass", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--n-modes", "--N", type=float)
    p.add_argument("--temperature", "--T", type=float)
    p.add_argument("--lambda-coefficient", type=float,
                   help="dephasing strength; overrides the (n-modes, temperature) route")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-final", type=float)
    p.add_argument("--store-every", type=int)
    p.add_argument("--snapshots", help="write stored density matrices to this binary file")
    _add_common(p)

    p = sub.add_parser("regime", help="dominance map over (radius or separation) x temperature")
    p.add_argument("--axis1", choices=("radius", "delta-x"),
                   help="what the first axis scans (second axis is temperature)")
    p.add_argument("--axis1-min", type=float)
    p.add_argument("--axis1-max", type=float)
    p.add_argument("--n-axis1", type=int)
    p.add_argument("--t-min", type=float, help="temperature axis lower edge (K)")
    p.add_argument("--t-max", type=float)
    p.add_argument("--n-temps", type=int)
    p.add_argument("--mode-density", type=float,
                   help="internal modes per m^3 (radius axis only)")
    p.add_argument("--delta-x", "--dx", type=float,
                   help="fixed separation (radius axis only)")
    p.add_argument("--n-modes", "--N", type=float, help="fixed mode count (delta-x axis only)")
    p.add_argument("--g", type=float)
    p.add_argument("--emission-csv", help="tabulated k,g,sigma emission model")
    p.add_argument("--sigma0", type=float, help="power-law cross-section scale (m^2)")
    p.add_argument("--k0", type=float, help="power-law reference wavenumber (1/m)")
    p.add_argument("--alpha", type=float, help="power-law exponent")
    _add_common(p)

    p = sub.add_parser("propertime", help="proper-time difference between arms")
    p.add_argument("--trajectories", help="CSV of t,x_a,v_a,x_b,v_b")
    p.add_argument("--x1", type=float, help="static arm position (alternative to CSV)")
    p.add_argument("--x2", type=float)
    p.add_argument("--t-final", type=float)
    p.add_argument("--n-samples", type=int)
    p.add_argument("--potential", choices=("homogeneous", "schwarzschild", "tabulated"))
    p.add_argument("--g", type=float)
    p.add_argument("--central-mass", type=float)
    p.add_argument("--potential-csv", help="tabulated x,phi potential")
    p.add_argument("--n-modes", type=float, help="attach an internal state for visibility")
    p.add_argument("--temperature", type=float)
    p.add_argument("--frequencies-csv")
    _add_common(p)

    p = sub.add_parser("oracle-check", help="cross-validate the oracles")
    p.add_argument("--preset", choices=sorted(_PRESETS),
                   help="named bundle of battery settings (standard: 50 cases, 1e6 samples)")
    p.add_argument("--cases", type=int, help="valid parameter sets required per oracle")
    p.add_argument("--samples", type=int, help="Monte Carlo samples per case")
    p.add_argument("--seed", type=int, help="battery seed (draws the parameter sets)")
    p.add_argument("--mc-seed", type=int, help="base seed of the sampling streams")
    p.add_argument("--fock-cutoff", type=int)
    p.add_argument("--tail-epsilon", type=float)
    p.add_argument("--mc-sigmas", type=float, help="MC agreement window in standard errors")
    p.add_argument("--atol", type=float, help="deterministic-oracle agreement window")
    p.add_argument("--verbose", action="store_true", default=None,
                   help="print every case, not just the summary")
    _add_common(p)

    return parser


def _load_config(path: str) -> tuple[dict, dict]:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    constants = raw.pop("constants", {})
    if not isinstance(constants, dict):
        raise ConfigError('"constants" must be a JSON object')
    return raw, constants


def _build_constants(overrides: dict) -> PhysicalConstants:
    base = asdict(default_constants())
    unknown = sorted(set(overrides) - set(base))
    if unknown:
        raise ConfigError(f"unknown constants: {', '.join(unknown)}")
    try:
        return PhysicalConstants(**{**base, **overrides})
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve(args: argparse.Namespace, command: str) -> tuple[dict, PhysicalConstants]:
    defaults = _DEFAULTS[command]
    merged = dict(defaults)
    preset = getattr(args, "preset", None)
    if preset:
        merged.update(_PRESETS[preset])
        merged["preset"] = preset
    constants_overrides: dict = {}
    if args.config:
        section, constants_overrides = _load_config(args.config)
        unknown = sorted(set(section) - set(defaults))
        if unknown:
            raise ConfigError(
                f"unknown config keys for {command!r}: {', '.join(unknown)}"
            )
        merged.update(section)
    for key in defaults:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            merged[key] = value
    missing = sorted(k for k, v in merged.items() if v is _REQUIRED)
    if missing:
        raise ConfigError(f"missing required parameters: {', '.join(missing)}")
    return merged, _build_constants(constants_overrides)


def _jsonable(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _metadata(command: str, params: dict, consts: PhysicalConstants, **extra) -> dict:
    meta = {
        "version": __version__,
        "command": command,
        "parameters": _jsonable({k: v for k, v in params.items() if v is not None}),
        "constants": asdict(consts),
    }
    meta.update(extra)
    return meta


def _emit_json(payload: dict, output: str | None) -> None:
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_csv(meta: dict, header: list[str], rows, output: str | None) -> None:
    lines = [f"# {k} = {json.dumps(_jsonable(v), sort_keys=True)}" for k, v in sorted(meta.items())]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _cmd_tau(params: dict, consts: PhysicalConstants, output, fmt) -> int:
    results: dict = {}
    if params["central_mass"] is not None or params["radius"] is not None:
        if params["central_mass"] is None or params["radius"] is None:
            raise ConfigError("central_mass and radius must be given together")
        sw = SchwarzschildSpec(params["central_mass"], params["radius"])
        temperature = params["temperature"]
        if params["hawking"]:
            temperature = hawking_temperature(params["central_mass"], consts)
            results["hawking_temperature"] = temperature
        if temperature is None:
            raise ConfigError("need --temperature or --hawking")
        results["schwarzschild_radius"] = sw.schwarzschild_radius(consts)
        results["temperature_used"] = temperature
        results["tau_dec"] = decoherence_time_schwarzschild(
            params["n_modes"], temperature, params["delta_x"], sw, consts
        )
        results["field"] = "schwarzschild"
    else:
        if params["temperature"] is None:
            raise ConfigError("need --temperature")
        g = params["g"] if params["g"] is not None else consts.g_earth
        results["tau_dec"] = decoherence_time(
            params["n_modes"], params["temperature"], params["delta_x"], g, consts
        )
        results["temperature_used"] = params["temperature"]
        results["g_used"] = g
        results["field"] = "homogeneous"
    meta = _metadata("tau", params, consts, law="gaussian-timescale")
    if fmt == "csv":
        keys = sorted(results)
        _emit_csv(meta, keys, [[results[k] for k in keys]], output)
    else:
        _emit_json({**meta, "results": results}, output)
    return 0


def _cmd_visibility(params: dict, consts: PhysicalConstants, output, fmt) -> int:
    g = params["g"] if params["g"] is not None else consts.g_earth

    if params["dtau"] is not None:
        # Single-point mode: visibility at one proper-time difference.
        if params["frequencies_csv"] is not None:
            spec = InternalStateSpec.from_frequency_csv(
                params["frequencies_csv"], params["temperature"]
            )
        elif params["n_modes"] is not None:
            spec = InternalStateSpec.high_temperature_limit(
                params["n_modes"], params["temperature"]
            )
        else:
            raise ConfigError("--dtau needs --n-modes or --frequencies-csv")
        value = semiclassical_visibility(spec, params["dtau"], consts)
        meta = _metadata("visibility", params, consts, law="semiclassical")
        if fmt == "json":
            _emit_json({**meta, "delta_tau": params["dtau"], "visibility": value}, output)
        else:
            _emit_csv(
                meta,
                ["delta_tau", "visibility", "law"],
                [[params["dtau"], value, "semiclassical"]],
                output,
            )
        return 0

    law = params["law"]
    frequencies = None
    if law == "exact-product":
        if params["frequencies_csv"] is None:
            raise ConfigError("exact-product law needs --frequencies-csv")
        spec = InternalStateSpec.from_frequency_csv(
            params["frequencies_csv"], params["temperature"]
        )
        frequencies = spec.frequencies
        n_modes = float(len(frequencies))
    else:
        if params["n_modes"] is None:
            raise ConfigError(f"law {law!r} needs --n-modes")
        n_modes = params["n_modes"]
    if params["t_final"] is None or params["delta_x"] is None:
        raise ConfigError("curve mode needs --t-final and --delta-x (or use --dtau)")
    if params["n_times"] < 2:
        raise ConfigError("n_times must be >= 2")
    times = np.linspace(0.0, params["t_final"], params["n_times"])
    curve = visibility_curve(
        law, times, n_modes, params["temperature"], params["delta_x"], g, consts,
        frequencies=frequencies,
    )
    meta = _metadata("visibility", params, consts, law=law, g_used=g)
    if fmt == "json":
        _emit_json({**meta, "times": curve.times, "values": curve.values}, output)
    else:
        rows = ([t, v, law] for t, v in zip(curve.times, curve.values))
        _emit_csv(meta, ["t", "visibility", "law"], rows, output)
    return 0


def _cmd_evolve(params: dict, consts: PhysicalConstants, output, fmt) -> int:
    g = params["g"] if params["g"] is not None else consts.g_earth
    if params["lambda_coefficient"] is not None:
        lam = params["lambda_coefficient"]
    elif params["n_modes"] is not None and params["temperature"] is not None:
        lam = dephasing_coefficient(params["n_modes"], params["temperature"], g, consts)
    else:
        raise ConfigError("need --lambda-coefficient or both --n-modes and --temperature")

    internal_energy = 0.0
    if params["n_modes"] is not None and params["temperature"] is not None:
        internal_energy = params["n_modes"] * consts.k_B * params["temperature"]
    ham_kind = params["hamiltonian"]
    if ham_kind != "none" and params["mass"] is None:
        raise ConfigError(f"hamiltonian {ham_kind!r} needs --mass")
    ham = CMHamiltonianSpec(
        kind=ham_kind,
        mass=params["mass"] or 0.0,
        g=g,
        internal_mean_energy=internal_energy,
    )
    if params["snapshots"] and params["store_every"] == 0:
        raise ConfigError("--snapshots needs --store-every >= 1")
    cfg = EvolutionConfig(
        dt=params["dt"],
        t_final=params["t_final"],
        lambda_coefficient=lam,
        form=params["form"],
        store_every=params["store_every"],
    )
    rho0 = DensityMatrixGrid.two_point_superposition(
        params["x1"], params["x2"], n_points=params["n_points"]
    )
    result = evolve(rho0, ham, cfg, consts)
    curve = extract_visibility(result)
    if params["snapshots"]:
        save_snapshots(params["snapshots"], result.snapshot_times, result.x, result.snapshots)
    meta = _metadata(
        "evolve", params, consts,
        law="master-equation", form=result.form, lambda_coefficient=lam,
        n_snapshots=int(result.snapshot_times.size),
    )
    if fmt == "json":
        _emit_json(
            {
                **meta,
                "times": result.times,
                "coherence_re": result.coherence.real,
                "coherence_im": result.coherence.imag,
                "visibility": curve.values,
            },
            output,
        )
    else:
        rows = zip(result.times, result.coherence.real, result.coherence.imag, curve.values)
        _emit_csv(meta, ["t", "coherence_re", "coherence_im", "visibility"], rows, output)
    return 0


def _cmd_regime(params: dict, consts: PhysicalConstants, output, fmt) -> int:
    g = params["g"] if params["g"] is not None else consts.g_earth
    if params["emission_csv"]:
        fixed_model = emission_model_from_csv(params["emission_csv"])
        label = fixed_model.label

        def model_factory(temp: float):
            return fixed_model
    else:
        if params["sigma0"] is None or params["k0"] is None:
            raise ConfigError("need --emission-csv or --sigma0 with --k0")
        sigma = power_law_cross_section(params["sigma0"], params["k0"], params["alpha"])
        label = "blackbody-standin"

        def model_factory(temp: float):
            return blackbody_emission_model(temp, sigma, consts)

    kind = str(params["axis1"]).replace("-", "_")
    if kind == "radius" and (params["mode_density"] is None or params["delta_x"] is None):
        raise ConfigError("radius axis needs --mode-density and --delta-x")
    if kind == "delta_x" and params["n_modes"] is None:
        raise ConfigError("delta-x axis needs --n-modes")
    if params["n_axis1"] < 1 or params["n_temps"] < 1:
        raise ConfigError("n_axis1 and n_temps must be >= 1")
    edges = (params["axis1_min"], params["axis1_max"], params["t_min"], params["t_max"])
    if any(e <= 0 for e in edges):
        raise ConfigError("axis edges must be > 0 (grids are log-spaced)")
    axis1 = np.geomspace(params["axis1_min"], params["axis1_max"], params["n_axis1"])
    temps = np.geomspace(params["t_min"], params["t_max"], params["n_temps"])
    rmap = regime_scan(
        kind, axis1, temps, model_factory, g, consts,
        mode_density=params["mode_density"],
        delta_x=params["delta_x"],
        n_modes=params["n_modes"],
    )
    meta = _metadata("regime", params, consts, emission_model=label, g_used=g,
                     axis1_kind=kind, grid="log-spaced")
    if fmt == "json":
        _emit_json(
            {
                **meta,
                "axis1": rmap.axis1,
                "temperatures": rmap.temperatures,
                "tau_dec": rmap.tau_dec,
                "tau_em": rmap.tau_em,
                "flags": [list(row) for row in rmap.flags],
            },
            output,
        )
    else:
        rows = [
            [float(a), float(temp), float(rmap.tau_dec[i, j]), float(rmap.tau_em[i, j]),
             rmap.flags[i, j]]
            for i, a in enumerate(rmap.axis1)
            for j, temp in enumerate(rmap.temperatures)
        ]
        _emit_csv(meta, ["axis1", "axis2", "tau_dec", "tau_em", "flag"], rows, output)
    return 0


def _cmd_propertime(params: dict, consts: PhysicalConstants, output, fmt) -> int:
    if params["trajectories"]:
        pair = TrajectoryPair.from_csv(params["trajectories"])
    else:
        needed = ("x1", "x2", "t_final")
        if any(params[k] is None for k in needed):
            raise ConfigError("need --trajectories or all of --x1, --x2, --t-final")
        pair = TrajectoryPair.static(
            params["x1"], params["x2"], params["t_final"], params["n_samples"]
        )
    kind = params["potential"]
    if kind == "homogeneous":
        g = params["g"] if params["g"] is not None else consts.g_earth
        potential = HomogeneousPotential(g)
    elif kind == "schwarzschild":
        if params["central_mass"] is None:
            raise ConfigError("schwarzschild potential needs --central-mass")
        potential = SchwarzschildWeakPotential(params["central_mass"])
    else:
        if params["potential_csv"] is None:
            raise ConfigError("tabulated potential needs --potential-csv")
        potential = TabulatedPotential.from_csv(params["potential_csv"])

    dtau = proper_time_difference(pair, potential, consts)
    results: dict = {"delta_tau": dtau, "potential": kind}
    if params["temperature"] is not None and (
        params["n_modes"] is not None or params["frequencies_csv"] is not None
    ):
        if params["frequencies_csv"] is not None:
            spec = InternalStateSpec.from_frequency_csv(
                params["frequencies_csv"], params["temperature"]
            )
        else:
            spec = InternalStateSpec.high_temperature_limit(
                params["n_modes"], params["temperature"]
            )
        results["visibility"] = semiclassical_visibility(spec, dtau, consts)
        results["law"] = "semiclassical"
    meta = _metadata("propertime", params, consts)
    if fmt == "csv":
        keys = sorted(results)
        _emit_csv(meta, keys, [[results[k] for k in keys]], output)
    else:
        _emit_json({**meta, "results": results}, output)
    return 0


def _cmd_oracle_check(params: dict, consts: PhysicalConstants, output, fmt) -> int:
    if fmt == "csv":
        raise ConfigError("oracle reports are JSON only; drop --format or use json")
    cfg = OracleConfig(
        n_samples=params["samples"],
        seed=params["mc_seed"],
        fock_cutoff=params["fock_cutoff"],
        tail_epsilon=params["tail_epsilon"],
    )
    cases = run_oracle_battery(params["cases"], cfg, consts, seed=params["seed"])
    summary = {name: {"valid": 0, "agree": 0, "max_abs_err": 0.0} for name in
               ("mc", "fock", "tensor")}
    all_ok = True
    lines = []
    reports = []
    for idx, case in enumerate(cases):
        verdicts = case.agreements(params["mc_sigmas"], params["atol"])
        case_ok = True
        for name, ok in verdicts.items():
            if ok is None:
                continue
            value = {"mc": case.v_mc, "fock": case.v_fock, "tensor": case.v_tensor}[name]
            summary[name]["valid"] += 1
            summary[name]["agree"] += int(ok)
            summary[name]["max_abs_err"] = max(
                summary[name]["max_abs_err"], abs(value - case.v_exact)
            )
            case_ok = case_ok and ok
        all_ok = all_ok and case_ok
        marks = " ".join(
            f"{name}={'skip' if ok is None else ('ok' if ok else 'FAIL')}"
            for name, ok in verdicts.items()
        )
        lines.append(f"case {idx:3d}: {'PASS' if case_ok else 'FAIL'}  {marks}")
        if params["verbose"]:
            lines.append(
                f"          modes={len(case.frequencies)} T={case.temperature:9.3f} K "
                f"dtau={case.delta_tau:.6e} V_exact={case.v_exact:.9f} "
                + " ".join(
                    f"{name}={'-' if v is None else format(v, '.9f')}"
                    for name, v in (("mc", case.v_mc), ("fock", case.v_fock),
                                    ("tensor", case.v_tensor))
                )
            )
        reports.append(
            {
                "index": idx,
                "frequencies": case.frequencies,
                "temperature": case.temperature,
                "delta_tau": case.delta_tau,
                "v_exact": case.v_exact,
                "v_mc": case.v_mc,
                "se_mc": case.se_mc,
                "v_fock": case.v_fock,
                "fock_bound": case.fock_bound,
                "v_tensor": case.v_tensor,
                "errors": {
                    name: (None if v is None else abs(v - case.v_exact))
                    for name, v in (("mc", case.v_mc), ("fock", case.v_fock),
                                    ("tensor", case.v_tensor))
                },
                "mc_seed": case.mc_seed,
                "n_samples": case.n_samples,
                "skipped": case.skipped,
                "verdicts": verdicts,
                "pass": case_ok,
            }
        )
    for name, row in summary.items():
        lines.append(
            f"{name:6s}: {row['agree']}/{row['valid']} within tolerance, "
            f"max |error| = {row['max_abs_err']:.3e}"
        )
    lines.append("oracle-check: " + ("OK" if all_ok else "DISAGREEMENT"))
    payload = {
        **_metadata("oracle-check", params, consts),
        "summary": summary,
        "cases": reports,
        "all_within_tolerance": all_ok,
        "n_cases": len(cases),
    }
    if fmt == "json" and not output:
        _emit_json(payload, None)
    else:
        sys.stdout.write("\n".join(lines) + "\n")
        if output:
            _emit_json(payload, output)
    return 0 if all_ok else 1


_HANDLERS = {
    "tau": _cmd_tau,
    "visibility": _cmd_visibility,
    "evolve": _cmd_evolve,
    "regime": _cmd_regime,
    "propertime": _cmd_propertime,
    "oracle-check": _cmd_oracle_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        params, consts = _resolve(args, args.command)
        if args.command == "oracle-check":
            fmt = args.format  # default: human-readable case lines on stdout
        else:
            fmt = args.format or ("json" if args.command in ("tau", "propertime") else "csv")
        return _HANDLERS[args.command](params, consts, args.output, fmt)
    except ConfigError as exc:
        print(f"gravidec: configuration error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"gravidec: domain error: {exc}", file=sys.stderr)
        return 3
    except NumericalInstabilityError as exc:
        print(f"gravidec: numerical instability: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
