"""Proper time along centre-of-mass trajectories and the semiclassical picture.

To lowest relevant order the coupling of internal dynamics to the centre of
mass enters through gamma(x, v) = phi(x) - v^2/2 per unit mass: proper time
along one arm ticks at rate 1 + gamma/c^2. The proper-time difference between
two interferometer arms is therefore

    dtau = tau_b - tau_a = (1/c^2) * integral (gamma_b(t) - gamma_a(t)) dt,

so an arm b held above arm a in a uniform field accumulates dtau = g dx t / c^2
with dx = x_b - x_a,

evaluated here by the trapezoid rule on sampled trajectories. The visibility
of the recombined superposition is the modulus of the characteristic function
of the internal energy distribution evaluated at dtau/hbar; for a thermal
state this reproduces the mode-product law exactly, which is the content of
the semiclassical picture.

Everything is non-relativistic and weak-field: trajectories are validated
against |v| <= 1e-3 c, and potentials are plain Newtonian phi(x).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .constants import PhysicalConstants
from .errors import DomainError
from .internal_state import InternalStateSpec, thermal_occupation

#: Trajectories faster than this fraction of c are outside the model's validity.
VELOCITY_BOUND = 1e-3


class HomogeneousPotential:
    """Linearized potential phi(x) = g * x of a uniform field."""

    def __init__(self, g: float) -> None:
        self.g = g

    def phi(self, x: np.ndarray, consts: PhysicalConstants) -> np.ndarray:
        return self.g * np.asarray(x, dtype=float)


class SchwarzschildWeakPotential:
    """Newtonian potential phi(x) = -G M / x of a central mass, x > 0."""

    def __init__(self, central_mass: float) -> None:
        if central_mass <= 0:
            raise DomainError("central_mass must be > 0")
        self.central_mass = central_mass

    def phi(self, x: np.ndarray, consts: PhysicalConstants) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise DomainError("SchwarzschildWeakPotential requires x > 0")
        return -consts.G * self.central_mass / x


class TabulatedPotential:
    """Potential interpolated linearly from (x, phi) samples.

    Queries outside the tabulated domain raise DomainError rather than
    extrapolating silently.
    """

    def __init__(self, x: np.ndarray, phi_values: np.ndarray) -> None:
        x = np.asarray(x, dtype=float)
        phi_values = np.asarray(phi_values, dtype=float)
        if x.ndim != 1 or x.shape != phi_values.shape or x.size < 2:
            raise DomainError("need matching 1-D arrays with at least two samples")
        if not np.all(np.diff(x) > 0):
            raise DomainError("tabulated x must be strictly increasing")
        self._x = x
        self._phi = phi_values

    @classmethod
    def from_csv(cls, path: str) -> "TabulatedPotential":
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        if data.shape[1] != 2:
            raise DomainError(f"{path}: expected two columns x,phi")
        return cls(data[:, 0], data[:, 1])

    def phi(self, x: np.ndarray, consts: PhysicalConstants) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(x < self._x[0]) or np.any(x > self._x[-1]):
            raise DomainError(
                f"query outside tabulated domain [{self._x[0]}, {self._x[-1]}]"
            )
        return np.interp(x, self._x, self._phi)


@dataclass(frozen=True)
class TrajectoryPair:
    """Sampled centre-of-mass trajectories of the two interferometer arms."""

    times: np.ndarray
    x_a: np.ndarray
    v_a: np.ndarray
    x_b: np.ndarray
    v_b: np.ndarray

    def __post_init__(self) -> None:
        arrays = {}
        for name in ("times", "x_a", "v_a", "x_b", "v_b"):
            arrays[name] = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arrays[name])
        t = arrays["times"]
        if t.ndim != 1 or t.size < 2:
            raise DomainError("need at least two time samples")
        if any(a.shape != t.shape for a in arrays.values()):
            raise DomainError("all trajectory arrays must share the time grid's shape")
        if not np.all(np.diff(t) > 0):
            raise DomainError("times must be strictly increasing")

    @classmethod
    def from_csv(cls, path: str) -> "TrajectoryPair":
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        if data.shape[1] != 5:
            raise DomainError(f"{path}: expected five columns t,x_a,v_a,x_b,v_b")
        return cls(data[:, 0], data[:, 1], data[:, 2], data[:, 3], data[:, 4])

    @classmethod
    def static(cls, x_a: float, x_b: float, t_final: float, n_samples: int) -> "TrajectoryPair":
        """Arms held fixed at x_a and x_b for a duration t_final."""
        if t_final <= 0 or n_samples < 2:
            raise DomainError("need t_final > 0 and n_samples >= 2")
        t = np.linspace(0.0, t_final, n_samples)
        zeros = np.zeros_like(t)
        return cls(t, np.full_like(t, x_a), zeros, np.full_like(t, x_b), zeros)

    def validate_velocities(self, consts: PhysicalConstants) -> None:
        vmax = max(np.max(np.abs(self.v_a)), np.max(np.abs(self.v_b)))
        if vmax > VELOCITY_BOUND * consts.c:
            raise DomainError(
                f"|v| reaches {vmax:.6g} m/s, above the {VELOCITY_BOUND:g} c validity bound"
            )


def gamma_coupling(x: np.ndarray, v: np.ndarray, potential, consts: PhysicalConstants) -> np.ndarray:
    """Per-unit-mass coupling gamma(x, v) = phi(x) - v^2/2."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    return potential.phi(x, consts) - 0.5 * v * v


def proper_time_difference(pair: TrajectoryPair, potential, consts: PhysicalConstants) -> float:
    """Trapezoid-rule dtau = tau_b - tau_a = (1/c^2) * integral (gamma_b - gamma_a) dt.

    Second-order accurate in the sampling step; exact whenever the integrand
    is piecewise linear in t (static or uniformly falling arms).
    """
    pair.validate_velocities(consts)
    f = gamma_coupling(pair.x_b, pair.v_b, potential, consts) - gamma_coupling(
        pair.x_a, pair.v_a, potential, consts
    )
    dt = np.diff(pair.times)
    return float(0.5 * np.sum((f[1:] + f[:-1]) * dt) / consts.c**2)


def internal_characteristic_function(
    spec: InternalStateSpec, delta_tau: float, consts: PhysicalConstants
) -> complex:
    """Thermal characteristic function E[exp(-i E0 dtau / hbar)] of the excitation energy.

    Per explicit mode this is the geometric sum (1-q) / (1 - q e^{-i w dtau})
    with q = exp(-hbar w / k_B T); its modulus reproduces the mode-product
    visibility factor exactly. For the high-temperature marker the energy
    distribution of each mode is exponential with mean k_B T, giving
    (1 + i k_B T dtau / hbar)^{-N}.
    """
    if spec.is_high_temperature:
        z = 1.0 + 1j * consts.k_B * spec.temperature * delta_tau / consts.hbar
        # z^(-N) in log space: N can be 1e23, but |z^-N| stays representable
        # only through exp(-N log|z|); clamp the true underflow to 0.
        log_mod = -spec.n_modes * 0.5 * math.log1p(
            (consts.k_B * spec.temperature * delta_tau / consts.hbar) ** 2
        )
        phase = -spec.n_modes * cmath.phase(z)
        if log_mod < -745.0:
            return 0.0j
        return cmath.rect(math.exp(log_mod), phase)
    if spec.temperature == 0.0:
        return 1.0 + 0.0j
    chi = 1.0 + 0.0j
    for w in spec.frequencies:
        nbar = thermal_occupation(w, spec.temperature, consts)
        chi /= 1.0 + nbar * (1.0 - cmath.exp(-1j * w * delta_tau))
    return chi


def semiclassical_visibility(
    spec: InternalStateSpec, delta_tau: float, consts: PhysicalConstants
) -> float:
    """Visibility |chi(dtau)| from the internal energy distribution alone."""
    return abs(internal_characteristic_function(spec, delta_tau, consts))


def redshift_factor(phi: float, consts: PhysicalConstants) -> float:
    """Clock-rate factor sqrt(1 + 2u + 2u^2), u = phi/c^2.

    The radicand equals (1+u)^2 + u^2, positive for every real u; the domain
    check below can only trip on non-finite input.
    """
    u = phi / consts.c**2
    radicand = 2.0 * u * (1.0 + u)
    if not radicand > -1.0:
        raise DomainError(f"clock-rate radicand 1+{radicand} is not positive")
    return math.exp(0.5 * math.log1p(radicand))


def redshift_factor_excess(phi: float, consts: PhysicalConstants) -> float:
    """redshift_factor(phi) - 1, accurate for |phi|/c^2 down to ~1e-300.

    At u = 1e-16 the factor itself rounds to 1.0 in float64; the excess is
    still exactly representable and equals u to leading order.
    """
    u = phi / consts.c**2
    radicand = 2.0 * u * (1.0 + u)
    if not radicand > -1.0:
        raise DomainError(f"clock-rate radicand 1+{radicand} is not positive")
    return math.expm1(0.5 * math.log1p(radicand))


@dataclass(frozen=True)
class WeakFieldTerms:
    """Pieces of the weak-field Hamiltonian for a composite particle at phi.

    ``internal_multiplier`` scales the internal Hamiltonian H0: it is the
    gravitational redshift of internal clock rates. ``external_potential``
    carries the rest-mass coupling m*phi (1 + phi/(2c^2)).
    """

    rest_energy: float
    internal_multiplier: float
    external_potential: float


def weak_field_terms(mass: float, phi: float, consts: PhysicalConstants) -> WeakFieldTerms:
    if mass <= 0:
        raise DomainError("mass must be > 0")
    c2 = consts.c**2
    return WeakFieldTerms(
        rest_energy=mass * c2,
        internal_multiplier=1.0 + phi / c2,
        external_potential=mass * phi + mass * phi**2 / (2.0 * c2),
    )
