"""Brute-force cross-checks for the closed-form visibility laws.

Three independent routes to the same number:

* :func:`mc_visibility` samples each thermal mode's Glauber-Sudarshan
  P distribution and averages the dephasing weight exp(|a|^2 (e^{-i d} - 1)).
* :func:`fock_visibility` sums the geometric number-state populations of each
  mode up to an explicit cutoff and reports the truncation bound.
* :func:`two_point_unitary_oracle` enumerates the joint Fock spectrum of all
  modes, applies the diagonal two-arm evolution, and reads the off-diagonal
  element of the reduced centre-of-mass state directly. Unlike the other two
  it never factorizes over modes, and it also returns the accumulated
  relative phase (m g dx t / hbar for a cold particle).

Deliberately, nothing here imports the analytic formulas: occupations are
recomputed from exp(-hbar w / k_B T) on the spot, so agreement with
``visibility.exact_visibility`` is a genuine consistency check and not a
tautology.

Monte Carlo sampling is split into fixed-size shards of 2^16 samples, each
with its own child seed derived from (seed, shard index); shard partial sums
are combined with a single np.sum over the shard-indexed array, so the
result is bit-identical no matter how the shards are distributed across
workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import PhysicalConstants
from .errors import DomainError
from .internal_state import InternalStateSpec

_SHARD = 1 << 16

#: Monte Carlo relative-variance precondition: nbar*(1-cos d) above this makes
#: the P-representation estimator too noisy to certify anything.
MC_WEIGHT_BOUND = 0.5

#: The joint-spectrum oracle is meant for small systems only.
TENSOR_MAX_MODES = 4
TENSOR_MAX_CUTOFF = 64


@dataclass(frozen=True)
class OracleConfig:
    """Knobs shared by the brute-force oracles.

    ``fock_cutoff`` caps the per-mode number-state truncation; a thermal mode
    whose tail mass above the cutoff exceeds ``tail_epsilon`` is refused with
    the required cutoff named rather than silently truncated.
    ``max_joint_dim`` bounds the enumerated joint spectrum of
    :func:`two_point_unitary_oracle`.
    """

    n_samples: int = 200_000
    seed: int = 0
    fock_cutoff: int = 64
    tail_epsilon: float = 1e-9
    max_joint_dim: int = 1 << 22

    def __post_init__(self) -> None:
        if self.n_samples < 2:
            raise DomainError("n_samples must be >= 2")
        if self.fock_cutoff < 1:
            raise DomainError("fock_cutoff must be >= 1")
        if not 0 < self.tail_epsilon < 1:
            raise DomainError("tail_epsilon must lie in (0, 1)")
        if self.max_joint_dim < 2:
            raise DomainError("max_joint_dim must be >= 2")


def _require_explicit(spec: InternalStateSpec) -> tuple[float, ...]:
    if spec.is_high_temperature:
        raise DomainError("oracles need explicit frequencies, not the high-T marker")
    return spec.frequencies


def _boltzmann_q(omega: float, temperature: float, consts: PhysicalConstants) -> float:
    # q = exp(-hbar w / k_B T); the mean occupation is q / (1 - q).
    if temperature == 0.0:
        return 0.0
    return math.exp(-consts.hbar * omega / (consts.k_B * temperature))


def mc_visibility(
    spec: InternalStateSpec,
    delta_tau: float,
    cfg: OracleConfig,
    consts: PhysicalConstants,
) -> tuple[float, float]:
    """P-representation Monte Carlo estimate of the visibility.

    Each mode contributes a complex Gaussian alpha with E|alpha|^2 = nbar and
    a weight exp(|alpha|^2 (e^{-i w dtau} - 1)); the visibility is the modulus
    of the weight's sample mean. Returns ``(visibility, standard_error)``,
    reproducible bit for bit at fixed (seed, n_samples).

    Raises DomainError when any mode has nbar * (1 - cos(w dtau)) above
    ``MC_WEIGHT_BOUND``: past that point the estimator's relative error grows
    too fast with mode count to be a usable cross-check.
    """
    freqs = _require_explicit(spec)
    qs = [_boltzmann_q(w, spec.temperature, consts) for w in freqs]
    nbars = np.array([q / (1.0 - q) for q in qs])
    deltas = np.array([w * delta_tau for w in freqs])
    strain = nbars * (1.0 - np.cos(deltas))
    if np.any(strain > MC_WEIGHT_BOUND):
        worst = float(np.max(strain))
        raise DomainError(
            f"MC oracle precondition violated: max nbar*(1-cos d) = {worst:.3g} "
            f"> {MC_WEIGHT_BOUND}"
        )

    scale2 = nbars / 2.0  # per-component variance of alpha
    growth = np.exp(-1j * deltas) - 1.0
    n_shards = math.ceil(cfg.n_samples / _SHARD)
    shard_sums = np.empty(n_shards, dtype=complex)
    shard_abs2 = np.empty(n_shards)
    for shard in range(n_shards):
        m = min(_SHARD, cfg.n_samples - shard * _SHARD)
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, shard]))
        re = rng.standard_normal((m, len(freqs)))
        im = rng.standard_normal((m, len(freqs)))
        abs2 = (re * re + im * im) * scale2
        w = np.exp(abs2 @ growth)
        shard_sums[shard] = np.sum(w)
        shard_abs2[shard] = np.sum(np.abs(w) ** 2)

    mean = complex(np.sum(shard_sums)) / cfg.n_samples
    var = max(float(np.sum(shard_abs2)) / cfg.n_samples - abs(mean) ** 2, 0.0)
    se = math.sqrt(var / (cfg.n_samples - 1))
    return abs(mean), se


def _mode_cutoff(q: float, cfg: OracleConfig, cap: int | None = None) -> int:
    """Smallest cutoff c with thermal tail mass q^(c+1) <= tail_epsilon."""
    limit = cfg.fock_cutoff if cap is None else min(cfg.fock_cutoff, cap)
    if q == 0.0:
        return 0
    need = max(math.ceil(math.log(cfg.tail_epsilon) / math.log(q)) - 1, 0)
    if need > limit:
        raise DomainError(
            f"thermal tail mass {q ** (limit + 1):.3g} above tail_epsilon="
            f"{cfg.tail_epsilon:g} at cutoff {limit}; required cutoff is {need}"
        )
    return need


def fock_visibility(
    spec: InternalStateSpec,
    delta_tau: float,
    cfg: OracleConfig,
    consts: PhysicalConstants,
    populations=None,
) -> tuple[float, float]:
    """Number-basis visibility: per mode, |sum_n p_n exp(-i n w dtau)|.

    Thermal populations p_n = (1-q) q^n are truncated at the smallest cutoff
    whose tail mass is below ``tail_epsilon`` and renormalized, so the value
    at dtau = 0 is exactly 1; a cutoff above ``fock_cutoff`` is refused with
    the required value named. Returns ``(visibility, tail_bound)`` where
    ``tail_bound`` sums the discarded mass over modes.

    ``populations`` overrides the thermal weights with one explicit
    distribution applied to every mode (e.g. [0.5, 0.5] for an equal
    ground/first-excited superposition's diagonal).
    """
    freqs = _require_explicit(spec)
    log_v = 0.0
    tail = 0.0
    for w in freqs:
        if populations is not None:
            p = np.asarray(populations, dtype=float)
            if p.ndim != 1 or p.size == 0 or np.any(p < 0) or np.sum(p) == 0:
                raise DomainError("populations must be a nonnegative 1-D distribution")
        else:
            q = _boltzmann_q(w, spec.temperature, consts)
            c = _mode_cutoff(q, cfg)
            p = (1.0 - q) * q ** np.arange(c + 1)
            tail += q ** (c + 1)
        p = p / np.sum(p)
        n = np.arange(p.size)
        chi = np.sum(p * np.exp(-1j * n * w * delta_tau))
        log_v += math.log(abs(chi)) if abs(chi) > 0 else -math.inf
    return math.exp(log_v), tail


def two_point_unitary_oracle(
    spec: InternalStateSpec,
    x1: float,
    x2: float,
    t: float,
    g: float,
    cfg: OracleConfig,
    consts: PhysicalConstants,
    mass: float = 0.0,
) -> tuple[float, float]:
    """Exact diagonal evolution of (|x1> + |x2>)/sqrt(2) x thermal state.

    Enumerates the full joint Fock spectrum (no factorization over modes),
    applies the phase (m c^2 + E_n)(phi(x1) - phi(x2)) t / (hbar c^2) with
    phi = g x, and traces out the internal state. Returns ``(visibility,
    phase)``: visibility is 2 |rho_12| of the reduced two-point state and
    ``phase`` the principal-value argument of the off-diagonal element; for
    a cold internal state it equals m g (x2 - x1) t / hbar modulo 2 pi.

    Internal energies are measured from the joint ground state, so the
    returned phase excludes the zero-point contribution. Meant for small
    systems: at most 4 modes and per-mode cutoff 64.
    """
    freqs = _require_explicit(spec)
    if len(freqs) > TENSOR_MAX_MODES:
        raise DomainError(f"joint-spectrum oracle handles at most {TENSOR_MAX_MODES} modes")
    if mass < 0:
        raise DomainError("mass must be >= 0")

    pops: list[np.ndarray] = []
    energies: list[np.ndarray] = []
    joint_dim = 1
    for w in freqs:
        q = _boltzmann_q(w, spec.temperature, consts)
        c = _mode_cutoff(q, cfg, cap=TENSOR_MAX_CUTOFF)
        p = (1.0 - q) * q ** np.arange(c + 1) if q > 0 else np.ones(1)
        p = p / np.sum(p)  # renormalize the truncated state so V(0) = 1
        pops.append(p)
        energies.append(consts.hbar * w * np.arange(c + 1))
        joint_dim *= c + 1
    if joint_dim > cfg.max_joint_dim:
        raise DomainError(
            f"joint Fock dimension {joint_dim} exceeds max_joint_dim={cfg.max_joint_dim}"
        )

    dphi = g * x1 - g * x2
    rate = dphi * t / (consts.hbar * consts.c**2)  # phase per unit energy

    dims = [p.size for p in pops]
    strides = np.ones(len(dims), dtype=np.int64)
    for i in range(len(dims) - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]

    acc = 0.0 + 0.0j
    for start in range(0, joint_dim, _SHARD):
        idx = np.arange(start, min(start + _SHARD, joint_dim), dtype=np.int64)
        prob = np.ones(idx.size)
        energy = np.zeros(idx.size)
        for i, (p, e) in enumerate(zip(pops, energies)):
            n_i = (idx // strides[i]) % dims[i]
            prob *= p[n_i]
            energy += e[n_i]
        acc += complex(np.sum(prob * np.exp(-1j * energy * rate)))

    # rho_12 of the reduced state is acc/2; report V = 2|rho_12| = |acc|.
    amp = acc * np.exp(-1j * mass * dphi * t / consts.hbar)
    return abs(amp), float(np.angle(amp))


@dataclass(frozen=True)
class OracleCase:
    """One randomized parameter set plus every oracle's verdict on it."""

    frequencies: tuple[float, ...]
    temperature: float
    delta_tau: float
    v_exact: float
    v_mc: float | None
    se_mc: float | None
    v_fock: float | None
    fock_bound: float | None
    v_tensor: float | None
    mc_seed: int | None = None
    n_samples: int | None = None
    skipped: tuple[str, ...] = field(default=())

    def agreements(self, mc_sigmas: float, det_atol: float) -> dict[str, bool | None]:
        """Per-oracle verdicts; None where the oracle skipped this set.

        MC agrees within ``mc_sigmas`` standard errors, the number-basis
        oracle within 10x its own truncation bound, the joint-spectrum
        oracle within ``det_atol`` absolute.
        """
        out: dict[str, bool | None] = {}
        out["mc"] = (
            None
            if self.v_mc is None
            else bool(abs(self.v_mc - self.v_exact) <= mc_sigmas * (self.se_mc or 0.0) + 1e-12)
        )
        out["fock"] = (
            None
            if self.v_fock is None
            else bool(abs(self.v_fock - self.v_exact) <= 10.0 * (self.fock_bound or 0.0) + 1e-12)
        )
        out["tensor"] = (
            None
            if self.v_tensor is None
            else bool(abs(self.v_tensor - self.v_exact) <= det_atol)
        )
        return out


def run_oracle_battery(
    n_cases: int,
    cfg: OracleConfig,
    consts: PhysicalConstants,
    seed: int = 20240811,
) -> list[OracleCase]:
    """Randomized head-to-head comparison of all oracles against the product law.

    Parameter sets are drawn from the envelope 1-4 modes, nbar <= 5 and
    |w dtau| <= 0.5 (temperatures 10-1000 K), until every oracle has at
    least ``n_cases`` sets satisfying its own precondition; an oracle skips
    sets outside its domain and the case records why. The corners of the
    envelope do violate individual preconditions (nbar = 5 at the largest
    phase exceeds the MC variance bound, and needs a number-state cutoff
    beyond the joint-spectrum oracle's cap), which is exactly why skipping
    with replacement is allowed. Deterministic in ``seed``, including the
    per-case Monte Carlo streams.

    The number-basis oracle runs with a cutoff of at least 512 so the whole
    envelope stays below ``tail_epsilon``; the other oracles use ``cfg`` as
    given.
    """
    from .visibility import exact_visibility  # local import keeps the check one-way

    fock_cfg = replace(cfg, fock_cutoff=max(cfg.fock_cutoff, 512))
    rng = np.random.default_rng(seed)
    cases: list[OracleCase] = []
    counts = {"mc": 0, "fock": 0, "tensor": 0}
    attempts = 0
    while min(counts.values()) < n_cases and attempts < 200 * n_cases:
        attempts += 1
        n_modes = int(rng.integers(1, TENSOR_MAX_MODES + 1))
        temperature = float(10.0 * 10 ** (2.0 * rng.random()))
        kt_over_h = consts.k_B * temperature / consts.hbar
        # hbar w / k_B T in [ln(6/5), 5] maps to nbar in [0.007, 5].
        freqs = tuple(
            float(kt_over_h * math.exp(rng.uniform(math.log(math.log(6 / 5)), math.log(5.0))))
            for _ in range(n_modes)
        )
        delta_tau = float(rng.uniform(0.05, 0.5) / max(freqs))
        spec = InternalStateSpec.from_frequencies(freqs, temperature)
        v_exact = exact_visibility(spec, delta_tau, consts)

        case_seed = cfg.seed + attempts
        case_cfg = replace(cfg, seed=case_seed)
        skipped: list[str] = []
        v_mc = se_mc = v_fock = fock_bound = v_tensor = None
        try:
            v_mc, se_mc = mc_visibility(spec, delta_tau, case_cfg, consts)
            counts["mc"] += 1
        except DomainError as exc:
            skipped.append(f"mc: {exc}")
        try:
            v_fock, fock_bound = fock_visibility(spec, delta_tau, fock_cfg, consts)
            counts["fock"] += 1
        except DomainError as exc:
            skipped.append(f"fock: {exc}")
        try:
            # Static arms with g t (x1 - x2) / c^2 = dtau reproduce the same dtau.
            v_tensor, _ = two_point_unitary_oracle(
                spec, 0.0, -delta_tau * consts.c**2, 1.0, 1.0, case_cfg, consts
            )
            counts["tensor"] += 1
        except DomainError as exc:
            skipped.append(f"tensor: {exc}")

        cases.append(
            OracleCase(
                frequencies=freqs,
                temperature=temperature,
                delta_tau=delta_tau,
                v_exact=v_exact,
                v_mc=v_mc,
                se_mc=se_mc,
                v_fock=v_fock,
                fock_bound=fock_bound,
                v_tensor=v_tensor,
                mc_seed=case_seed,
                n_samples=cfg.n_samples,
                skipped=tuple(skipped),
            )
        )
    if min(counts.values()) < n_cases:
        raise DomainError(
            f"could not collect {n_cases} valid sets per oracle; got {counts}"
        )
    return cases
