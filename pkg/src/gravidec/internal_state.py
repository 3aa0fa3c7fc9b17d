"""Thermal internal structure of a composite particle.

A particle's internal degrees of freedom are modelled as N independent
harmonic modes in thermal equilibrium at temperature T. Either the mode
frequencies are listed explicitly, or the spec carries a high-temperature
marker (``frequencies=None``) in which case the frequencies drop out of
every derived quantity and only N and T matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constants import PhysicalConstants
from .errors import DomainError

# exp argument beyond which 1/expm1(x) underflows to 0 in float64
_EXP_UNDERFLOW = 745.0


@dataclass(frozen=True)
class InternalStateSpec:
    """N thermal harmonic modes standing in for the particle's internal structure.

    ``frequencies=None`` is the high-temperature marker: frequencies drop out
    and closed forms in (N, T) are used. With explicit frequencies, ``n_modes``
    must equal the list length. ``n_modes`` is a float so that closed-form
    evaluations at N ~ 1e23 stay representable.
    """

    n_modes: float
    temperature: float
    frequencies: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.n_modes < 0:
            raise DomainError("n_modes must be >= 0")
        if self.temperature < 0:
            raise DomainError("temperature must be >= 0")
        if self.frequencies is not None:
            object.__setattr__(self, "frequencies", tuple(float(w) for w in self.frequencies))
            if len(self.frequencies) != int(self.n_modes) or self.n_modes != int(self.n_modes):
                raise DomainError("explicit frequency list length must equal n_modes")
            if any(w <= 0 for w in self.frequencies):
                raise DomainError("all mode frequencies must be > 0")

    @property
    def is_high_temperature(self) -> bool:
        return self.frequencies is None

    @classmethod
    def high_temperature_limit(cls, n_modes: float, temperature: float) -> "InternalStateSpec":
        return cls(n_modes=n_modes, temperature=temperature, frequencies=None)

    @classmethod
    def from_frequencies(cls, frequencies, temperature: float) -> "InternalStateSpec":
        freqs = tuple(float(w) for w in frequencies)
        return cls(n_modes=len(freqs), temperature=temperature, frequencies=freqs)

    @classmethod
    def from_frequency_csv(cls, path: str | Path, temperature: float) -> "InternalStateSpec":
        """Load a single-column CSV of angular frequencies (rad/s, one per line)."""
        freqs = np.loadtxt(path, ndmin=1, dtype=float)
        if freqs.ndim != 1:
            raise DomainError(f"{path}: expected a single column of frequencies")
        return cls.from_frequencies(freqs, temperature)


def thermal_occupation(omega: float, temperature: float, consts: PhysicalConstants) -> float:
    """Mean occupation 1/(exp(hbar*omega/k_B*T) - 1) of a harmonic mode.

    Returns 0 at T = 0 (no thermal excitation at absolute zero).
    """
    if omega <= 0:
        raise DomainError("omega must be > 0")
    if temperature < 0:
        raise DomainError("temperature must be >= 0")
    if temperature == 0:
        return 0.0
    x = consts.hbar * omega / (consts.k_B * temperature)
    if x > _EXP_UNDERFLOW:
        return 0.0
    return 1.0 / math.expm1(x)


def mean_internal_energy(spec: InternalStateSpec, consts: PhysicalConstants) -> float:
    """Mean internal energy: N*k_B*T in the high-T limit, else sum of hbar*w*nbar."""
    if spec.is_high_temperature:
        return spec.n_modes * consts.k_B * spec.temperature
    return sum(
        consts.hbar * w * thermal_occupation(w, spec.temperature, consts)
        for w in spec.frequencies
    )


def internal_energy_variance(spec: InternalStateSpec, consts: PhysicalConstants) -> float:
    """Internal energy variance: N*(k_B*T)^2 in the high-T limit.

    With explicit frequencies the exact thermal-oscillator variance
    (hbar*w)^2 * nbar * (nbar + 1) is summed over the independent modes; the
    high-T closed form is recovered as hbar*w/k_B*T -> 0.
    """
    if spec.is_high_temperature:
        return spec.n_modes * (consts.k_B * spec.temperature) ** 2
    total = 0.0
    for w in spec.frequencies:
        nbar = thermal_occupation(w, spec.temperature, consts)
        total += (consts.hbar * w) ** 2 * nbar * (nbar + 1.0)
    return total
