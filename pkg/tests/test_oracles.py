from __future__ import annotations

import math

import numpy as np
import pytest

from gravidec import (
    InternalStateSpec,
    OracleConfig,
    default_constants,
    exact_visibility,
    fock_visibility,
    mc_visibility,
    run_oracle_battery,
    two_point_unitary_oracle,
)
from gravidec.errors import DomainError

CONSTS = default_constants()


def _omega_for_nbar(nbar: float, temperature: float) -> float:
    return math.log1p(1.0 / nbar) * CONSTS.k_B * temperature / CONSTS.hbar


def _spec(nbars, temperature: float = 300.0) -> InternalStateSpec:
    freqs = tuple(_omega_for_nbar(nb, temperature) for nb in nbars)
    return InternalStateSpec.from_frequencies(freqs, temperature)


def test_mc_is_deterministic_and_shard_invariant():
    spec = _spec((1.0, 0.3))
    dtau = 0.25 / max(spec.frequencies)
    cfg = OracleConfig(n_samples=70_000, seed=42)  # not a multiple of the shard size
    first = mc_visibility(spec, dtau, cfg, CONSTS)
    second = mc_visibility(spec, dtau, cfg, CONSTS)
    assert first == second
    assert first[1] > 0.0


def test_mc_agrees_with_product_law():
    spec = _spec((1.0,))
    dtau = 0.3 / spec.frequencies[0]
    v_exact = exact_visibility(spec, dtau, CONSTS)
    v_mc, se = mc_visibility(spec, dtau, OracleConfig(n_samples=200_000, seed=7), CONSTS)
    assert abs(v_mc - v_exact) < 5.0 * se
    assert se < 1e-3


def test_mc_error_shrinks_with_samples():
    spec = _spec((0.5,))
    dtau = 0.2 / spec.frequencies[0]
    _, se_small = mc_visibility(spec, dtau, OracleConfig(n_samples=20_000, seed=1), CONSTS)
    _, se_large = mc_visibility(spec, dtau, OracleConfig(n_samples=320_000, seed=1), CONSTS)
    # 16x the samples should cut the standard error about 4x
    assert se_large < 0.35 * se_small


def test_mc_refuses_high_variance_regime():
    spec = _spec((5.0,))
    dtau = 2.0 / spec.frequencies[0]  # nbar (1 - cos 2) = 7.08 >> bound
    with pytest.raises(DomainError, match="precondition"):
        mc_visibility(spec, dtau, OracleConfig(), CONSTS)


def test_oracles_require_explicit_frequencies():
    marker = InternalStateSpec.high_temperature_limit(1e20, 300.0)
    with pytest.raises(DomainError, match="explicit frequencies"):
        mc_visibility(marker, 1e-15, OracleConfig(), CONSTS)
    with pytest.raises(DomainError, match="explicit frequencies"):
        fock_visibility(marker, 1e-15, OracleConfig(), CONSTS)


def test_fock_matches_product_law_within_tail_bound():
    spec = _spec((0.5, 2.0))
    dtau = 0.35 / max(spec.frequencies)
    v_exact = exact_visibility(spec, dtau, CONSTS)
    v_fock, tail = fock_visibility(spec, dtau, OracleConfig(), CONSTS)
    assert tail < 1e-8
    assert abs(v_fock - v_exact) <= 10.0 * tail + 1e-12
    assert fock_visibility(spec, 0.0, OracleConfig(), CONSTS)[0] == pytest.approx(1.0, abs=1e-15)


def test_fock_refusal_names_required_cutoff():
    spec = _spec((2.0,))  # q = 2/3 needs cutoff 51 for the default tail
    with pytest.raises(DomainError, match="required cutoff is 51"):
        fock_visibility(spec, 1e-15, OracleConfig(fock_cutoff=8), CONSTS)


def test_fock_population_override():
    w = _omega_for_nbar(1.0, 300.0)
    spec = InternalStateSpec.from_frequencies((w,), 300.0)
    delta = 0.4

    v_ground, tail = fock_visibility(spec, delta / w, OracleConfig(), CONSTS, populations=[1.0])
    assert v_ground == pytest.approx(1.0, abs=1e-15)
    assert tail == 0.0

    # equal ground/first-excited mixture: |(1 + e^{-i d})/2| = cos(d/2)
    v_mix, _ = fock_visibility(spec, delta / w, OracleConfig(), CONSTS, populations=[0.5, 0.5])
    assert math.isclose(v_mix, math.cos(delta / 2.0), rel_tol=1e-12)

    with pytest.raises(DomainError):
        fock_visibility(spec, delta / w, OracleConfig(), CONSTS, populations=[0.5, -0.5])


def test_tensor_cold_particle_phase():
    w = _omega_for_nbar(1.0, 300.0)
    spec = InternalStateSpec.from_frequencies((w,), 0.0)
    mass, g, dx, t = 1e-26, 9.81, 1e-3, 1e-6
    v, phase = two_point_unitary_oracle(spec, 0.0, dx, t, g, OracleConfig(), CONSTS, mass=mass)
    assert v == pytest.approx(1.0, abs=1e-12)
    expected = mass * g * dx * t / CONSTS.hbar  # 0.93 rad, safely inside (-pi, pi]
    assert abs(phase - expected) < 1e-9


def test_tensor_matches_product_law_without_factorizing():
    spec = _spec((0.3, 1.0, 2.5))
    dtau = 0.3 / max(spec.frequencies)
    v_exact = exact_visibility(spec, dtau, CONSTS)
    # static arms: g t (x1 - x2) / c^2 equals dtau
    v_tensor, _ = two_point_unitary_oracle(
        spec, 0.0, -dtau * CONSTS.c**2, 1.0, 1.0, OracleConfig(), CONSTS
    )
    assert abs(v_tensor - v_exact) < 1e-6


def test_tensor_limits():
    spec5 = _spec((0.5,) * 5)
    with pytest.raises(DomainError, match="at most 4"):
        two_point_unitary_oracle(spec5, 0.0, 1e-3, 1.0, 9.81, OracleConfig(), CONSTS)
    spec3 = _spec((0.3, 1.0, 2.5))
    with pytest.raises(DomainError, match="max_joint_dim"):
        two_point_unitary_oracle(
            spec3, 0.0, 1e-3, 1.0, 9.81, OracleConfig(max_joint_dim=1000), CONSTS
        )
    with pytest.raises(DomainError, match="mass"):
        two_point_unitary_oracle(
            _spec((1.0,)), 0.0, 1e-3, 1.0, 9.81, OracleConfig(), CONSTS, mass=-1.0
        )


def test_battery_small_run_is_deterministic_and_consistent():
    cfg = OracleConfig(n_samples=20_000, seed=3)
    cases = run_oracle_battery(5, cfg, CONSTS)
    again = run_oracle_battery(5, cfg, CONSTS)
    assert cases == again
    per_oracle = {"mc": 0, "fock": 0, "tensor": 0}
    for case in cases:
        verdicts = case.agreements(mc_sigmas=5.0, det_atol=1e-6)
        for name, verdict in verdicts.items():
            if verdict is None:
                assert any(item.startswith(name) for item in case.skipped)
            else:
                assert verdict, (case.frequencies, case.temperature, name)
                per_oracle[name] += 1
    assert min(per_oracle.values()) >= 5


def test_battery_raises_when_an_oracle_cannot_qualify():
    # a 2-dimensional joint-spectrum budget is below any thermal cutoff in
    # the sampled envelope, so the tensor oracle can never reach quota
    cfg = OracleConfig(n_samples=2, seed=1, max_joint_dim=2)
    with pytest.raises(DomainError, match="could not collect"):
        run_oracle_battery(2, cfg, CONSTS)


def test_config_validation():
    with pytest.raises(DomainError):
        OracleConfig(n_samples=1)
    with pytest.raises(DomainError):
        OracleConfig(fock_cutoff=0)
    with pytest.raises(DomainError):
        OracleConfig(tail_epsilon=0.0)
    with pytest.raises(DomainError):
        OracleConfig(max_joint_dim=1)
