"""Which-path information carried away by emitted radiation, and regime maps.

A superposition of separation dx also decoheres when the particle emits or
scatters quanta that resolve the two positions. In the long-wavelength limit
the rate is quadratic in the separation,

    1/tau_em = dx^2 * integral dk k^2 c g(k) sigma_eff(k),

with g(k) the spectral number density of available modes and sigma_eff the
effective coupling cross-section. This scales as dx^-2 against the dx^-1 of
the time-dilation channel, so for fixed internal content the two timescales
cross at exactly one separation; :func:`regime_scan` charts which channel
wins where.

The built-in spectral density is a thermal (blackbody) stand-in,
g(k) = (k^2 / pi^2) / (exp(hbar c k / k_B T) - 1); measured spectra and
cross-sections can be supplied as tables instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .constants import PhysicalConstants
from .errors import DomainError
from .visibility import decoherence_time

MECHANISMS = ("time_dilation", "emission", "boundary")

#: Relative timescale difference below which neither channel is called dominant.
BOUNDARY_RTOL = 1e-9


@dataclass(frozen=True)
class EmissionModel:
    """Spectral density g(k) and cross-section sigma(k) with an integration grid."""

    spectral_density: Callable[[np.ndarray], np.ndarray]
    cross_section: Callable[[np.ndarray], np.ndarray]
    k_grid: np.ndarray
    label: str

    def __post_init__(self) -> None:
        k = np.asarray(self.k_grid, dtype=float)
        object.__setattr__(self, "k_grid", k)
        if k.ndim != 1 or k.size < 2:
            raise DomainError("k_grid needs at least two points")
        if k[0] <= 0 or not np.all(np.diff(k) > 0):
            raise DomainError("k_grid must be positive and strictly increasing")


def blackbody_spectral_density(
    temperature: float, consts: PhysicalConstants
) -> Callable[[np.ndarray], np.ndarray]:
    """Thermal photon-number spectrum (k^2/pi^2) / (exp(hbar c k / k_B T) - 1)."""
    if temperature <= 0:
        raise DomainError("temperature must be > 0")

    def g(k: np.ndarray) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        x = consts.hbar * consts.c * k / (consts.k_B * temperature)
        return k**2 / math.pi**2 / np.expm1(x)

    return g


def power_law_cross_section(
    sigma0: float, k0: float, alpha: float
) -> Callable[[np.ndarray], np.ndarray]:
    """sigma(k) = sigma0 * (k/k0)^alpha."""
    if sigma0 < 0 or k0 <= 0:
        raise DomainError("need sigma0 >= 0 and k0 > 0")

    def sigma(k: np.ndarray) -> np.ndarray:
        return sigma0 * (np.asarray(k, dtype=float) / k0) ** alpha

    return sigma


def blackbody_emission_model(
    temperature: float,
    cross_section: Callable[[np.ndarray], np.ndarray],
    consts: PhysicalConstants,
    n_k: int = 4096,
) -> EmissionModel:
    """Thermal stand-in model on a grid spanning the occupied band.

    The grid covers hbar c k / k_B T from 1e-3 to 40, which holds the whole
    integrand for any cross-section of sub-exponential growth.
    """
    k_thermal = consts.k_B * temperature / (consts.hbar * consts.c)
    k_grid = np.geomspace(1e-3 * k_thermal, 40.0 * k_thermal, n_k)
    return EmissionModel(
        spectral_density=blackbody_spectral_density(temperature, consts),
        cross_section=cross_section,
        k_grid=k_grid,
        label="blackbody-standin",
    )


def tabulated_emission_model(
    k: np.ndarray, g: np.ndarray, sigma: np.ndarray, label: str = "tabulated"
) -> EmissionModel:
    """Model interpolated linearly from measured (k, g, sigma) samples."""
    k = np.asarray(k, dtype=float)
    g = np.asarray(g, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if not (k.shape == g.shape == sigma.shape) or k.ndim != 1 or k.size < 2:
        raise DomainError("need matching 1-D arrays with at least two samples")
    if np.any(g < 0) or np.any(sigma < 0):
        raise DomainError("spectral density and cross-section must be >= 0")

    def interp(values: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
        def f(kq: np.ndarray) -> np.ndarray:
            kq = np.asarray(kq, dtype=float)
            if np.any(kq < k[0]) or np.any(kq > k[-1]):
                raise DomainError("query outside tabulated k range")
            return np.interp(kq, k, values)

        return f

    return EmissionModel(
        spectral_density=interp(g), cross_section=interp(sigma), k_grid=k, label=label
    )


def emission_model_from_csv(path: str) -> EmissionModel:
    """Load a tabulated model from CSV columns k,g,sigma."""
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape[1] != 3:
        raise DomainError(f"{path}: expected three columns k,g,sigma")
    return tabulated_emission_model(data[:, 0], data[:, 1], data[:, 2], label=path)


def emission_rate_integral(model: EmissionModel, consts: PhysicalConstants) -> float:
    """Trapezoid integral int dk k^2 c g(k) sigma(k) over the model's grid."""
    k = model.k_grid
    f = k**2 * consts.c * model.spectral_density(k) * model.cross_section(k)
    if np.any(f < 0):
        raise DomainError("emission integrand must be nonnegative")
    dk = np.diff(k)
    return float(0.5 * np.sum((f[1:] + f[:-1]) * dk))


def tau_emission(delta_x: float, model: EmissionModel, consts: PhysicalConstants) -> float:
    """Emission decoherence time 1 / (dx^2 * rate integral); inf when either is 0."""
    integral = emission_rate_integral(model, consts)
    if delta_x == 0.0 or integral == 0.0:
        return math.inf
    return 1.0 / (delta_x**2 * integral)


def number_of_modes_from_radius(radius: float, mode_density: float) -> float:
    """Internal mode count (4/3) pi r^3 rho_N of a particle of radius r."""
    if radius <= 0 or mode_density <= 0:
        raise DomainError("radius and mode_density must be > 0")
    return 4.0 / 3.0 * math.pi * radius**3 * mode_density


def compare_timescales(tau_dec: float, tau_em: float) -> str:
    """Shorter timescale wins; ties within BOUNDARY_RTOL are "boundary"."""
    if tau_dec < 0 or tau_em < 0:
        raise DomainError("timescales must be >= 0")
    if math.isinf(tau_dec) and math.isinf(tau_em):
        return "boundary"
    if math.isinf(tau_dec):
        return "emission"
    if math.isinf(tau_em):
        return "time_dilation"
    if abs(tau_dec - tau_em) <= BOUNDARY_RTOL * min(tau_dec, tau_em):
        return "boundary"
    return "time_dilation" if tau_dec < tau_em else "emission"


def dominant_mechanism(
    n_modes: float,
    temperature: float,
    delta_x: float,
    g: float,
    model: EmissionModel,
    consts: PhysicalConstants,
) -> tuple[str, float, float]:
    """Which channel decoheres faster at one parameter point.

    Returns ``(flag, tau_dec, tau_em)`` with flag in MECHANISMS; a tie within
    BOUNDARY_RTOL relative is flagged "boundary".
    """
    tau_dec = decoherence_time(n_modes, temperature, delta_x, g, consts)
    tau_em = tau_emission(delta_x, model, consts)
    return compare_timescales(tau_dec, tau_em), tau_dec, tau_em


AXIS_KINDS = ("radius", "delta_x")


@dataclass(frozen=True)
class RegimeMap:
    """Timescales and winning mechanisms over (radius or separation) x temperature."""

    axis1_kind: str
    axis1: np.ndarray
    temperatures: np.ndarray
    tau_dec: np.ndarray
    tau_em: np.ndarray
    flags: np.ndarray

    def __post_init__(self) -> None:
        if self.axis1_kind not in AXIS_KINDS:
            raise DomainError(f"axis1_kind must be one of {AXIS_KINDS}")
        shape = (self.axis1.size, self.temperatures.size)
        for name in ("tau_dec", "tau_em", "flags"):
            if getattr(self, name).shape != shape:
                raise DomainError(f"{name} must have shape {shape}")

    def to_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(f"# regime map: axis1 = {self.axis1_kind} (m), axis2 = T (K)\n")
            fh.write("axis1,axis2,tau_dec,tau_em,flag\n")
            for i, a in enumerate(self.axis1):
                for j, temp in enumerate(self.temperatures):
                    fh.write(
                        f"{float(a)!r},{float(temp)!r},{float(self.tau_dec[i, j])!r},"
                        f"{float(self.tau_em[i, j])!r},{self.flags[i, j]}\n"
                    )


def regime_scan(
    axis1_kind: str,
    axis1: np.ndarray,
    temperatures: np.ndarray,
    model_factory: Callable[[float], EmissionModel],
    g: float,
    consts: PhysicalConstants,
    mode_density: float | None = None,
    delta_x: float | None = None,
    n_modes: float | None = None,
) -> RegimeMap:
    """Chart the dominant decoherence channel over a 2-D parameter grid.

    ``axis1_kind`` picks the first axis: "radius" converts each radius to a
    mode count via ``mode_density`` and holds ``delta_x`` fixed, "delta_x"
    scans the separation at fixed ``n_modes``. The second axis is always
    temperature, and ``model_factory(T)`` supplies the emission model per
    column (thermal spectra move with T; a fixed tabulated model can ignore
    the argument). Cells are independent; evaluation order never affects the
    stored values.
    """
    axis1 = np.asarray(axis1, dtype=float)
    temperatures = np.asarray(temperatures, dtype=float)
    if axis1.ndim != 1 or temperatures.ndim != 1 or not axis1.size or not temperatures.size:
        raise DomainError("axis grids must be non-empty 1-D arrays")
    if axis1_kind == "radius":
        if mode_density is None or delta_x is None:
            raise DomainError("radius axis needs mode_density and a fixed delta_x")
        n_of = [number_of_modes_from_radius(float(r), mode_density) for r in axis1]
        dx_of = [float(delta_x)] * axis1.size
    elif axis1_kind == "delta_x":
        if n_modes is None:
            raise DomainError("delta_x axis needs a fixed n_modes")
        n_of = [float(n_modes)] * axis1.size
        dx_of = [float(dx) for dx in axis1]
    else:
        raise DomainError(f"axis1_kind must be one of {AXIS_KINDS}")

    tau_d = np.empty((axis1.size, temperatures.size))
    tau_e = np.empty_like(tau_d)
    flags = np.empty(tau_d.shape, dtype=object)
    for j, temp in enumerate(temperatures):
        model = model_factory(float(temp))
        for i in range(axis1.size):
            flags[i, j], tau_d[i, j], tau_e[i, j] = dominant_mechanism(
                n_of[i], float(temp), dx_of[i], g, model, consts
            )
    return RegimeMap(
        axis1_kind=axis1_kind,
        axis1=axis1,
        temperatures=temperatures,
        tau_dec=tau_d,
        tau_em=tau_e,
        flags=flags,
    )


def crossover_separation(
    n_modes: float,
    temperature: float,
    g: float,
    model: EmissionModel,
    consts: PhysicalConstants,
) -> float:
    """Separation where the two channels tie: dx* = 1 / (A * I).

    A = tau_dec * dx is the separation-free part of the time-dilation law and
    I the emission rate integral; above dx* time dilation wins.
    """
    a = decoherence_time(n_modes, temperature, 1.0, g, consts)
    integral = emission_rate_integral(model, consts)
    if math.isinf(a) or integral == 0.0:
        return math.inf
    return 1.0 / (a * integral)
