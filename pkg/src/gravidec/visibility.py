"""Closed-form visibility laws and decoherence timescales.

For a particle held in a two-point vertical superposition, the internal
thermal modes dephase the centre of mass. The exact interferometric
visibility is a product over modes,

    V = | prod_i [1 + nbar_i (1 - exp(-i w_i dtau))]^-1 |,

with dtau the proper-time difference between the two arms (dtau =
t*g*dx/c^2 for static arms in a homogeneous field). In the high-temperature
limit the frequencies drop out and V collapses to a closed form in (N, T)
alone, with the Gaussian decay exp(-(t/tau_dec)^2) as its small-angle limit.

All products are accumulated in log space; nothing here ever materializes
1e23 factors. Degenerate no-decoherence inputs (N, T, dx or g equal to 0)
yield an infinite timescale rather than an exception: these are physically
meaningful regimes the CLI reports as such.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import PhysicalConstants
from .errors import DomainError
from .internal_state import InternalStateSpec, thermal_occupation

#: Laws a VisibilityCurve can be tagged with.
VISIBILITY_LAWS = ("exact-product", "high-T", "gaussian", "master-equation", "oracle")

#: Explicit-frequency mode counts above this refuse to evaluate the product.
DEFAULT_MODE_LIMIT = 10**6


@dataclass(frozen=True)
class SuperpositionConfig:
    """Two-point vertical superposition of a particle of mass ``mass``.

    ``delta_x`` must equal ``x2 - x1`` exactly; use :meth:`from_positions`.
    """

    mass: float
    x1: float
    x2: float
    delta_x: float
    hold_time: float

    def __post_init__(self) -> None:
        if self.mass <= 0:
            raise DomainError("mass must be > 0")
        if self.hold_time < 0:
            raise DomainError("hold_time must be >= 0")
        if self.delta_x != self.x2 - self.x1:
            raise DomainError("delta_x must equal x2 - x1 exactly")

    @classmethod
    def from_positions(cls, mass: float, x1: float, x2: float, hold_time: float) -> "SuperpositionConfig":
        return cls(mass=mass, x1=x1, x2=x2, delta_x=x2 - x1, hold_time=hold_time)


@dataclass(frozen=True)
class SchwarzschildSpec:
    """Central mass M and the distance R of the particle from its centre."""

    central_mass: float
    radius: float

    def __post_init__(self) -> None:
        if self.central_mass <= 0:
            raise DomainError("central_mass must be > 0")
        if self.radius <= 0:
            raise DomainError("radius must be > 0")

    def schwarzschild_radius(self, consts: PhysicalConstants) -> float:
        return 2.0 * consts.G * self.central_mass / consts.c**2

    def validate_weak_field(self, consts: PhysicalConstants) -> None:
        """Reject R below the horizon; warn where the weak-field form is marginal."""
        r_s = self.schwarzschild_radius(consts)
        if self.radius < r_s:
            raise DomainError(
                f"radius {self.radius} m lies inside the Schwarzschild radius {r_s:.6g} m"
            )
        if self.radius < 10.0 * r_s:
            warnings.warn(
                "weak-field timescale used at R < 10 R_s; treat as an order-of-magnitude estimate",
                stacklevel=2,
            )


@dataclass(frozen=True)
class VisibilityCurve:
    """Time series of interferometric visibility with the law that produced it."""

    times: np.ndarray
    values: np.ndarray
    law: str

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if self.law not in VISIBILITY_LAWS:
            raise DomainError(f"unknown visibility law {self.law!r}")
        if times.shape != values.shape or times.ndim != 1:
            raise DomainError("times and values must be 1-D arrays of equal length")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise DomainError("times must be strictly increasing")
        if np.any(values < -1e-12) or np.any(values > 1.0 + 1e-12):
            raise DomainError("visibility values must lie in [0, 1]")
        if times.size and times[0] == 0.0 and not math.isclose(values[0], 1.0, rel_tol=0, abs_tol=1e-9):
            raise DomainError("visibility at t = 0 must be 1")


def _log_abs_mode_factor(nbar: float, phase: float) -> float:
    # log|1 + nbar (1 - e^{-i phase})| = 0.5 log(1 + 4 nbar (nbar+1) sin^2(phase/2))
    s = math.sin(0.5 * phase)
    return 0.5 * math.log1p(4.0 * nbar * (nbar + 1.0) * s * s)


def exact_visibility(
    spec: InternalStateSpec,
    delta_tau: float,
    consts: PhysicalConstants,
    mode_limit: int = DEFAULT_MODE_LIMIT,
) -> float:
    """Exact product-formula visibility for an explicit-frequency thermal spec.

    Even in ``delta_tau``; equals 1 at delta_tau = 0 and at T = 0. Accumulated
    as exp(-sum log|z_i|) so arbitrarily small visibilities do not underflow
    intermediate products. Specs with more than ``mode_limit`` explicit modes
    are refused (the high-temperature law exists precisely to avoid them).
    """
    if spec.is_high_temperature:
        raise DomainError("exact_visibility requires explicit frequencies; "
                          "use highT_visibility for the high-T marker")
    if len(spec.frequencies) > mode_limit:
        raise DomainError(f"{len(spec.frequencies)} modes exceeds mode_limit={mode_limit}")
    if spec.temperature == 0.0 or delta_tau == 0.0:
        return 1.0
    log_v = 0.0
    for w in spec.frequencies:
        nbar = thermal_occupation(w, spec.temperature, consts)
        log_v -= _log_abs_mode_factor(nbar, w * delta_tau)
    return math.exp(log_v)


def highT_visibility(
    n_modes: float,
    temperature: float,
    delta_x: float,
    g: float,
    t: float,
    consts: PhysicalConstants,
) -> float:
    """High-temperature visibility (1 + theta^2)^(-N/2), theta = k_B*T*g*dx*t/(hbar*c^2)."""
    _require_nonnegative(n_modes, temperature, t)
    theta = consts.k_B * temperature * g * delta_x * t / (consts.hbar * consts.c**2)
    return math.exp(-0.5 * n_modes * math.log1p(theta * theta))


def gaussian_visibility(
    n_modes: float,
    temperature: float,
    delta_x: float,
    g: float,
    t: float,
    consts: PhysicalConstants,
) -> float:
    """Gaussian decay exp(-(t/tau_dec)^2), the small-angle limit of the high-T law."""
    _require_nonnegative(n_modes, temperature, t)
    tau = decoherence_time(n_modes, temperature, delta_x, g, consts)
    if math.isinf(tau):
        return 1.0
    return math.exp(-((t / tau) ** 2))


def decoherence_time(
    n_modes: float,
    temperature: float,
    delta_x: float,
    g: float,
    consts: PhysicalConstants,
) -> float:
    """Time at which the Gaussian law reaches 1/e: sqrt(2/N) hbar c^2 / (k_B T g |dx|).

    Degenerate inputs (N, T, dx or g equal to 0) mean no decoherence and give
    math.inf. The sign of the separation (and of g) is irrelevant.
    """
    if n_modes < 0 or temperature < 0:
        raise DomainError("n_modes and temperature must be >= 0")
    if n_modes == 0 or temperature == 0 or delta_x == 0 or g == 0:
        return math.inf
    return (
        math.sqrt(2.0 / n_modes)
        * consts.hbar
        * consts.c**2
        / (consts.k_B * temperature * abs(g) * abs(delta_x))
    )


def decoherence_time_schwarzschild(
    n_modes: float,
    temperature: float,
    delta_x: float,
    sw: SchwarzschildSpec,
    consts: PhysicalConstants,
) -> float:
    """Decoherence time sqrt(8/N) hbar R^2 / (k_B T R_s |dx|) near a mass M.

    Algebraically identical to :func:`decoherence_time` evaluated at the local
    acceleration g = G M / R^2.
    """
    if n_modes < 0 or temperature < 0:
        raise DomainError("n_modes and temperature must be >= 0")
    sw.validate_weak_field(consts)
    if n_modes == 0 or temperature == 0 or delta_x == 0:
        return math.inf
    r_s = sw.schwarzschild_radius(consts)
    return (
        math.sqrt(8.0 / n_modes)
        * consts.hbar
        * sw.radius**2
        / (consts.k_B * temperature * r_s * abs(delta_x))
    )


def hawking_temperature(mass: float, consts: PhysicalConstants) -> float:
    """Hawking temperature hbar c^3 / (8 pi k_B G M) of a mass M."""
    if mass <= 0:
        raise DomainError("mass must be > 0")
    return consts.hbar * consts.c**3 / (8.0 * math.pi * consts.k_B * consts.G * mass)


def redshifted_frequency(omega: float, phi: float, consts: PhysicalConstants) -> float:
    """Gravitationally shifted frequency omega * (1 + phi/c^2).

    Evaluated as omega + omega*phi/c^2 so laboratory-scale potentials
    (|phi|/c^2 ~ 1e-16) are not absorbed by the leading 1.
    """
    if omega <= 0:
        raise DomainError("omega must be > 0")
    return omega + omega * phi / consts.c**2


def proper_time_lab(delta_x: float, g: float, t: float, consts: PhysicalConstants) -> float:
    """Proper-time difference t*g*dx/c^2 between static arms in a homogeneous field."""
    return t * g * delta_x / consts.c**2


def visibility_curve(
    law: str,
    times: np.ndarray,
    n_modes: float,
    temperature: float,
    delta_x: float,
    g: float,
    consts: PhysicalConstants,
    frequencies=None,
) -> VisibilityCurve:
    """Evaluate one of the closed-form laws on a time grid.

    ``law`` is one of "exact-product" (requires ``frequencies``), "high-T",
    or "gaussian".
    """
    times = np.asarray(times, dtype=float)
    if law == "exact-product":
        if frequencies is None:
            raise DomainError("exact-product law requires explicit frequencies")
        spec = InternalStateSpec.from_frequencies(frequencies, temperature)
        values = np.array([
            exact_visibility(spec, proper_time_lab(delta_x, g, t, consts), consts)
            for t in times
        ])
    elif law == "high-T":
        values = np.array([
            highT_visibility(n_modes, temperature, delta_x, g, t, consts)
            for t in times
        ])
    elif law == "gaussian":
        values = np.array([
            gaussian_visibility(n_modes, temperature, delta_x, g, t, consts)
            for t in times
        ])
    else:
        raise DomainError(f"unknown closed-form law {law!r}")
    return VisibilityCurve(times=times, values=values, law=law)


def _require_nonnegative(n_modes: float, temperature: float, t: float) -> None:
    if n_modes < 0 or temperature < 0 or t < 0:
        raise DomainError("n_modes, temperature and t must be >= 0")
